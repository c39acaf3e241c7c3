"""Numerical services: special functions, jets, quadrature, densities, simulation."""
