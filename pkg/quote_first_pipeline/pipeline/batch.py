"""Bounded worker pool that keeps results keyed by sample id."""
from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Callable, Dict, Generic, List, Optional, Sequence, TypeVar

from tqdm import tqdm

from ..errors import QuotePipelineError, TransportError

logger = logging.getLogger(__name__)

T = TypeVar("T")
R = TypeVar("R")


@dataclass
class BatchResult(Generic[R]):
    order: List[str]
    results: Dict[str, R] = field(default_factory=dict)
    errors: Dict[str, QuotePipelineError] = field(default_factory=dict)

    def ordered_results(self) -> List[R]:
        return [self.results[key] for key in self.order if key in self.results]

    def ordered_errors(self) -> List[tuple]:
        return [(key, self.errors[key]) for key in self.order if key in self.errors]

    @property
    def transport_failures(self) -> List[str]:
        return [key for key, err in self.ordered_errors() if isinstance(err, TransportError)]


def run_batch(
    items: Sequence[T],
    worker: Callable[[T], R],
    key: Callable[[T], str],
    parallelism: int = 1,
    desc: str = "batch",
    on_result: Optional[Callable[[str, R], None]] = None,
    progress: bool = True,
) -> BatchResult[R]:
    """Apply ``worker`` to every item with at most ``parallelism`` in flight.

    Per-item QuotePipelineErrors are collected; anything else propagates.
    ``on_result`` runs on the calling thread as each item completes.
    """
    result: BatchResult[R] = BatchResult(order=[key(item) for item in items])
    if not items:
        return result

    with ThreadPoolExecutor(max_workers=max(1, parallelism)) as pool:
        futures = {pool.submit(worker, item): key(item) for item in items}
        bar = tqdm(total=len(futures), desc=desc, disable=not progress, leave=False)
        try:
            for future in as_completed(futures):
                item_key = futures[future]
                bar.update(1)
                try:
                    value = future.result()
                except QuotePipelineError as exc:
                    result.errors[item_key] = exc
                    continue
                result.results[item_key] = value
                if on_result is not None:
                    on_result(item_key, value)
        finally:
            bar.close()

    logger.info("%s: %d done, %d failed", desc, len(result.results), len(result.errors))
    return result
