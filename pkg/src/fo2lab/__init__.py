"""Finite-model toolkit for two-variable first-order logic on binary structures."""

from .kernels import BACKEND
from .structures import FinStructure, load_structure, parse_structure, save_structure, write_structure

__version__ = "0.1.0"

__all__ = ["BACKEND", "FinStructure", "load_structure", "parse_structure", "save_structure",
           "write_structure", "__version__"]
