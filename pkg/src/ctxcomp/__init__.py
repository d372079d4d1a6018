"""Query-aware context compression kernel and experiment lab."""

from . import costmodel, embio, lab, merge, metrics, realloc
from .core import GainRecord, cosine, mig_scores, pool_query, representative
from .embio import EmbeddingMatrix, read_cemb, read_embeddings, write_cemb, write_embeddings
from .kernels import BACKEND as KERNEL_BACKEND
from .merge import CompressedContext, compress
from .realloc import CompressionConfig, GroupPartition

__version__ = "0.1.0"

__all__ = [
    "CompressedContext",
    "CompressionConfig",
    "EmbeddingMatrix",
    "GainRecord",
    "GroupPartition",
    "KERNEL_BACKEND",
    "compress",
    "cosine",
    "costmodel",
    "embio",
    "lab",
    "merge",
    "metrics",
    "mig_scores",
    "pool_query",
    "read_cemb",
    "read_embeddings",
    "realloc",
    "representative",
    "write_cemb",
    "write_embeddings",
]
