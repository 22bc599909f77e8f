"""Compile conic-constructible numbers into ruler-and-compass programs that use one fixed conic."""
from .numeric import Precision

__version__ = "0.1.0"

__all__ = ["Precision", "__version__"]
