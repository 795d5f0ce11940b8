"""Two-way amplify-and-forward MIMO relaying with OSTBC and estimated CSI.

Simulation of the training and data phases, ML decoding, and analytical
m.g.f.-based error rates.
"""

__version__ = "0.1.0"
