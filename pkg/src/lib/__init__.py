"""Numerical core: spin data, exact engine, inverters, sampler and analytics."""
