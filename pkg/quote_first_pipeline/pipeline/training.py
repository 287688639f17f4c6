"""Quoter training-file export: the prompt carries question and context only."""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from ..dataset.records import RawSample
from ..errors import DataError
from ..quotes import render_quote_block
from ..storage import write_jsonl
from .prompts import QUOTER, PromptTemplate, load_template
from .records import GoldSample

logger = logging.getLogger(__name__)


def render_quoter_prompt(s: RawSample, template: Optional[PromptTemplate] = None) -> str:
    template = template or load_template(QUOTER)
    return template.render(question=s.question, context=s.context)


def training_rows(gold: Sequence[GoldSample], template: Optional[PromptTemplate] = None) -> List[Dict[str, str]]:
    template = template or load_template(QUOTER)
    return [
        {
            "id": g.id,
            "prompt": render_quoter_prompt(g.sample, template),
            "completion": render_quote_block(g.quotes),
        }
        for g in gold
    ]


def export_training_file(gold: Sequence[GoldSample], path: Path, template: Optional[PromptTemplate] = None) -> int:
    """Write ``{id, prompt, completion}`` lines and return how many were written."""
    if not gold:
        raise DataError("Nothing to export: the gold dataset is empty.")
    count = write_jsonl(Path(path), training_rows(gold, template))
    logger.info("Wrote %d training rows to %s", count, path)
    return count
