"""Simulation toolkit for photonic entanglement protocols.

Modules
-------
statevec     dense pure-state simulator
cluster      graph states and stabilizer checks
mbqc         one-way computation with feed-forward on linear clusters
commcomplex  GHZ communication complexity and its noise model
network      entanglement swapping and GHZ merging
cli          command-line entry point
"""

__version__ = "0.1.0"
