"""Dictionary compressor: window-searched fragments, context-modelled index stream."""

from .codec import CompressStats, compress, compress_with_stats, decompress
from .errors import CorruptStreamError, DictionaryCapError, FormatError, X3Error
from .optimizer import SearchSpace, TrialResult, evaluate_point, optimize
from .window_search import SearchParams

__all__ = [
    "CompressStats", "CorruptStreamError", "DictionaryCapError", "FormatError",
    "SearchParams", "SearchSpace", "TrialResult", "X3Error", "compress",
    "compress_with_stats", "decompress", "evaluate_point", "optimize",
]
