"""Quote markup: rendering, parsing and verbatim validation."""
from .quote_set import Quote, QuoteSet, collapse_whitespace
from .markup import BEGIN_MARKER, END_MARKER, parse_quote_block, render_quote_block
from .verbatim import verify_quote_set, verify_verbatim

__all__ = [
    "BEGIN_MARKER",
    "END_MARKER",
    "Quote",
    "QuoteSet",
    "collapse_whitespace",
    "parse_quote_block",
    "render_quote_block",
    "verify_quote_set",
    "verify_verbatim",
]
