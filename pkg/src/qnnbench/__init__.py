"""Benchmark suite for real-valued, complex-valued and simulated two-qubit
quantum neural networks on logic gates, Iris classification and a pure-state
entanglement witness."""

__version__ = "0.1.0"
