"""Seeded train/test splitting and its on-disk form."""
from __future__ import annotations

import random
from pathlib import Path
from typing import List, Optional

from ..errors import DataError, SplitRangeError
from ..storage import read_json, read_jsonl, write_json, write_jsonl
from .corpus_loader import corpus_digest
from .records import DatasetSplit, RawSample

TRAIN_FILE = "train.jsonl"
TEST_FILE = "test.jsonl"
SPLIT_MANIFEST_FILE = "split_manifest.json"


def split_dataset(samples: List[RawSample], test_size: int, seed: int) -> DatasetSplit:
    """Hold out ``test_size`` samples chosen by a seeded shuffle.

    Both parts keep the corpus order, so the result depends only on
    (samples, test_size, seed).
    """
    if test_size < 0 or test_size > len(samples):
        raise SplitRangeError(f"test_size {test_size} outside [0, {len(samples)}]")
    indices = list(range(len(samples)))
    random.Random(seed).shuffle(indices)
    held_out = set(indices[:test_size])
    train = [s for i, s in enumerate(samples) if i not in held_out]
    test = [s for i, s in enumerate(samples) if i in held_out]
    return DatasetSplit(train=train, test=test, seed=seed, source_digest=corpus_digest(samples))


def save_split(split: DatasetSplit, directory: Path) -> Path:
    directory.mkdir(parents=True, exist_ok=True)
    write_jsonl(directory / TRAIN_FILE, (s.to_dict() for s in split.train))
    write_jsonl(directory / TEST_FILE, (s.to_dict() for s in split.test))
    manifest_path = directory / SPLIT_MANIFEST_FILE
    write_json(manifest_path, split.manifest())
    return manifest_path


def load_split(directory: Path) -> Optional[DatasetSplit]:
    manifest_path = directory / SPLIT_MANIFEST_FILE
    if not manifest_path.exists():
        return None
    manifest = read_json(manifest_path)
    train = [RawSample.from_dict(r) for r in read_jsonl(directory / TRAIN_FILE)]
    test = [RawSample.from_dict(r) for r in read_jsonl(directory / TEST_FILE)]
    sizes = manifest.get("sizes", {})
    if sizes.get("train") != len(train) or sizes.get("test") != len(test):
        raise DataError(f"Split files in {directory} do not match their manifest sizes.")
    return DatasetSplit(train=train, test=test, seed=manifest["seed"], source_digest=manifest["source_digest"])
