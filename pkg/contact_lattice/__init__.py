"""Three-state contact processes on finite lattices: exact simulation, graphical
couplings, density-dependent rates, percolation analysis and an exact oracle."""

__version__ = "0.1.0"
