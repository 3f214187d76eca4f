"""Shared segmentation result type."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class Segmentation:
    """Ordered break positions over sentence-gap indices."""

    breaks: tuple[int, ...]
    total_cost: float | None = None
    flags: tuple[str, ...] = ()

    def __post_init__(self):
        if list(self.breaks) != sorted(set(self.breaks)):
            raise ValueError("breaks must be strictly increasing")
