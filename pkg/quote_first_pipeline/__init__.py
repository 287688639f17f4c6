"""Quote-first-then-answer RAG pipeline: distill, export, quote, judge, compare."""

__version__ = "0.1.0"
