"""Perturbative gadget construction and verification for qudit Hamiltonians."""

__version__ = "0.1.0"
