from setuptools import find_packages, setup

setup(
    name="maxent_market",
    version="0.1.0",
    packages=find_packages(include=["src*"]),
    install_requires=open("requirements.txt").read().splitlines(),
    extras_require={"dev": open("requirements-dev.txt").read().splitlines()},
    entry_points={"console_scripts": ["maxent-market=src.cli.main:main"]},
)
