"""QA corpus ingestion and seeded train/test splitting."""
from .records import DatasetSplit, ParagraphedContext, RawSample
from .corpus_loader import corpus_digest, flatten_context, load_corpus
from .splitter import load_split, save_split, split_dataset

__all__ = [
    "DatasetSplit",
    "ParagraphedContext",
    "RawSample",
    "corpus_digest",
    "flatten_context",
    "load_corpus",
    "load_split",
    "save_split",
    "split_dataset",
]
