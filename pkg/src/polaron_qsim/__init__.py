"""Digital quantum simulation of an impurity in a lattice Fermi bath."""

__version__ = "0.1.0"
