"""Joint many-task NLP model: tagging, chunking, dependency parsing, and
sentence-pair relatedness/entailment from one stack of bi-LSTM layers."""

from .kernels import BACKEND

__version__ = "1.0.0"
__all__ = ["BACKEND", "__version__"]
