"""Versioned prompt templates stored as text files next to the package."""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path
from typing import Dict, Iterable

from ..config import PROMPTS_DIR
from ..storage import text_digest

DISTILL = "distill"
QUOTER = "quoter"
ANSWER = "answer"
JUDGE_QUOTE = "judge_quote"
JUDGE_ANSWER = "judge_answer"
JUDGE_SETS = "judge_sets"


@dataclass(frozen=True)
class PromptTemplate:
    name: str
    text: str

    @property
    def digest(self) -> str:
        return text_digest(self.text)

    def render(self, **fields: str) -> str:
        return self.text.format(**fields).rstrip("\n")


@lru_cache(maxsize=None)
def _read(path: Path) -> str:
    return path.read_text(encoding="utf-8")


def load_template(name: str, directory: Path = PROMPTS_DIR) -> PromptTemplate:
    path = directory / f"{name}.txt"
    if not path.exists():
        raise FileNotFoundError(f"Prompt template not found: {path}")
    return PromptTemplate(name=name, text=_read(path))


def template_digests(names: Iterable[str], directory: Path = PROMPTS_DIR) -> Dict[str, str]:
    return {name: load_template(name, directory).digest for name in names}
