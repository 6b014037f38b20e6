"""Dense statevector simulation for small systems."""
from .statevector import DenseState, apply_gate

__all__ = ["DenseState", "apply_gate"]
