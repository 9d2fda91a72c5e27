"""Built-in inverse-Ising methods.

Every module here exposes `register(registry)`; auto_register discovers and
calls it.
"""
