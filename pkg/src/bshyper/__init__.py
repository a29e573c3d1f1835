"""Exact finite combinatorics for weighted hypergraph predimensions."""

from .weights import Weight, AlphaSpec, Symbol, weight_compare, is_rational, is_coherent
from .structures import FinStructure, induced, free_join, find_embeddings, is_isomorphic
from .rank import delta, rel_rank, in_kalpha, is_strong, icl, zero_set
from .constructions import Certificate, verify

__all__ = [
    "Weight", "AlphaSpec", "Symbol", "weight_compare", "is_rational", "is_coherent",
    "FinStructure", "induced", "free_join", "find_embeddings", "is_isomorphic",
    "delta", "rel_rank", "in_kalpha", "is_strong", "icl", "zero_set",
    "Certificate", "verify",
]

__version__ = "0.1.0"
