"""Categorical-logic workbench: elementary doctrines over finite sets,
Horn theories, and the free-model left adjoint to precomposition."""

__version__ = "0.1.0"
