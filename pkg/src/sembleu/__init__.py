"""SemBleu and Smatch for AMR graphs."""

from .graph import Graph, ParseError, normalize_inverse, parse_corpus, parse_penman, read_corpus, to_penman
from .metric import SembleuConfig, SembleuScore, sembleu_corpus, sembleu_sentence
from .ngram import extract_ngrams, ngram_key
from .smatch import smatch_corpus, smatch_oracle, smatch_score

__all__ = [
    "Graph", "ParseError", "normalize_inverse", "parse_corpus", "parse_penman", "read_corpus", "to_penman",
    "SembleuConfig", "SembleuScore", "sembleu_corpus", "sembleu_sentence",
    "extract_ngrams", "ngram_key",
    "smatch_corpus", "smatch_oracle", "smatch_score",
]
