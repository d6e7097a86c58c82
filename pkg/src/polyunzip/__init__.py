"""Polycube surfaces, Hamiltonian cut paths and edge unfoldings on the unit lattice."""

__version__ = "0.1.0"
