"""Shared computation context: seed, degree cap, cache and collected flags."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .cache import BasisCache
from .local import DEFAULT_DEGREE_CAP

DEFAULT_SLICE_TRUNCATION = 10


@dataclass
class ComputeContext:
    seed: int = 0
    degree_cap: int = DEFAULT_DEGREE_CAP
    cache: Optional[BasisCache] = None
    slice_truncation: int = DEFAULT_SLICE_TRUNCATION
    flags: set = field(default_factory=set)
    tables: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.cache is None:
            self.cache = BasisCache()

    def with_seed(self, seed: int) -> "ComputeContext":
        """Fresh flags and table memo, shared cache, different master seed."""
        return ComputeContext(
            seed=seed,
            degree_cap=self.degree_cap,
            cache=self.cache,
            slice_truncation=self.slice_truncation,
        )
