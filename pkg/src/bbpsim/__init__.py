"""
Bodyless block propagation simulator: chain types, execution, mempool, propagation
protocols, a deterministic network simulator and the closed-form latency models.
"""
__version__ = "0.1.0"
