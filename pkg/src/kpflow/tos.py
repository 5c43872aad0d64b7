"""Spectral type-of-service tagging.

Flow sizes are mapped onto the 255 usable one-octet service values: every
mice flow (<= 100 KB by default) gets the top value 255, and the elephant
range is cut into 254 consecutive bins of descending value, so the smaller
the flow the higher its tag.  The tag doubles as the knapsack item value.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np


class NonPositiveSize(ValueError):
    """Flow sizes below 1 KB cannot be tagged."""


@dataclass(frozen=True)
class TosTable:
    """Binning table mapping size ranges in KB to service values.

    ``bin_width_kb`` is always derived from the other parameters; with the
    defaults (200000 - 100) // 254 = 787, so elephant bins span 788 KB each:
    [101, 888], [889, 1676], ... with both ends inclusive.
    """

    mf_threshold_kb: int = 100
    max_size_kb: int = 200_000
    num_values: int = 255

    def __post_init__(self) -> None:
        if self.mf_threshold_kb < 1:
            raise ValueError("mf_threshold_kb must be >= 1")
        if self.num_values < 2:
            raise ValueError("num_values must be >= 2")
        if self.max_size_kb <= self.mf_threshold_kb:
            raise ValueError("max_size_kb must exceed mf_threshold_kb")

    @property
    def bin_width_kb(self) -> int:
        return (self.max_size_kb - self.mf_threshold_kb) // (self.num_values - 1)

    @property
    def bin_span_kb(self) -> int:
        # bins are inclusive on both ends, so each covers width + 1 sizes
        return self.bin_width_kb + 1

    @property
    def last_covered_kb(self) -> int:
        """Upper edge of the final bin; larger sizes clamp to value 1."""
        return self.mf_threshold_kb + (self.num_values - 1) * self.bin_span_kb


DEFAULT_TABLE = TosTable()


def tag(size_kb: int, table: TosTable = DEFAULT_TABLE) -> int:
    """Tag one flow size; returns a value in [1, num_values].

    Sizes at or below the mice threshold get the maximum value; elephant
    bin k (1-based) gets num_values - k; sizes past the last bin clamp to 1.
    """
    if size_kb < 1:
        raise NonPositiveSize(f"flow size must be >= 1 KB, got {size_kb}")
    if size_kb <= table.mf_threshold_kb:
        return table.num_values
    k = (size_kb - table.mf_threshold_kb - 1) // table.bin_span_kb + 1
    k = min(k, table.num_values - 1)
    return table.num_values - k


def tag_flows(sizes_kb: Iterable[int], table: TosTable = DEFAULT_TABLE) -> list[tuple[int, int]]:
    """Tag a batch of sizes, preserving order; yields (value, size_kb) pairs."""
    out = []
    for idx, size in enumerate(sizes_kb):
        try:
            out.append((tag(size, table), size))
        except NonPositiveSize as exc:
            raise NonPositiveSize(f"size at index {idx}: {exc}") from None
    return out


def tag_array(sizes_kb: Sequence[int] | np.ndarray, table: TosTable = DEFAULT_TABLE) -> np.ndarray:
    """Vectorized :func:`tag` for bulk workloads."""
    sizes = np.asarray(sizes_kb, dtype=np.int64)
    if sizes.size and sizes.min() < 1:
        idx = int(np.argmax(sizes < 1))
        raise NonPositiveSize(f"size at index {idx}: flow size must be >= 1 KB, got {int(sizes[idx])}")
    k = (sizes - table.mf_threshold_kb - 1) // table.bin_span_kb + 1
    np.clip(k, None, table.num_values - 1, out=k)
    values = table.num_values - k
    values[sizes <= table.mf_threshold_kb] = table.num_values
    return values
