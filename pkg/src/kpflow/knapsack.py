"""0/1 knapsack model and reference solvers.

A congested link is treated as a knapsack: the link's transferable volume is
the capacity, each flow is an item whose weight is its size in KB and whose
value is its service tag.  The solvers here are the exact/greedy references
the stochastic optimizer is checked against.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

DEFAULT_DP_CELL_BUDGET = 10**8
EXHAUSTIVE_MAX_ITEMS = 25

_ENUM_CHUNK = 1 << 16


class KnapsackError(Exception):
    """Base class for knapsack solver errors."""


class CapacityTooLarge(KnapsackError):
    """The DP table (n * capacity cells) would exceed the cell budget."""


class InstanceTooLarge(KnapsackError):
    """Exhaustive enumeration was asked for more items than it can afford."""


@dataclass(frozen=True)
class KnapsackItem:
    """One selectable item: integer weight in KB, value in [1, 255]."""

    id: int
    weight: int
    value: int

    def __post_init__(self) -> None:
        if self.weight < 0:
            raise ValueError(f"item {self.id}: weight must be >= 0, got {self.weight}")
        if not 1 <= self.value <= 255:
            raise ValueError(f"item {self.id}: value must be in [1, 255], got {self.value}")


@dataclass(frozen=True)
class KnapsackInstance:
    """An ordered set of items plus the total capacity in KB."""

    items: tuple[KnapsackItem, ...]
    capacity: int

    def __init__(self, items: Sequence[KnapsackItem], capacity: int):
        if capacity < 0:
            raise ValueError(f"capacity must be >= 0, got {capacity}")
        items = tuple(items)
        ids = [it.id for it in items]
        if len(set(ids)) != len(ids):
            raise ValueError("item ids must be unique within an instance")
        object.__setattr__(self, "items", items)
        object.__setattr__(self, "capacity", int(capacity))

    @property
    def n(self) -> int:
        return len(self.items)

    def weights(self) -> np.ndarray:
        return np.array([it.weight for it in self.items], dtype=np.int64)

    def values(self) -> np.ndarray:
        return np.array([it.value for it in self.items], dtype=np.int64)


@dataclass(frozen=True)
class KnapsackSolution:
    """A 0/1 selection with its aggregates, recomputable from the bit vector."""

    selection: tuple[int, ...]
    total_value: int
    total_weight: int
    feasible: bool

    @classmethod
    def from_selection(cls, instance: KnapsackInstance, selection: Sequence[int]) -> "KnapsackSolution":
        if len(selection) != instance.n:
            raise ValueError(f"selection length {len(selection)} != item count {instance.n}")
        bits = tuple(int(b) for b in selection)
        if any(b not in (0, 1) for b in bits):
            raise ValueError("selection must be a 0/1 vector")
        value = sum(it.value for it, b in zip(instance.items, bits) if b)
        weight = sum(it.weight for it, b in zip(instance.items, bits) if b)
        return cls(bits, value, weight, weight <= instance.capacity)


def solve_exact_dp(instance: KnapsackInstance, cell_budget: int = DEFAULT_DP_CELL_BUDGET) -> KnapsackSolution:
    """Exact optimum by dynamic programming over capacity.

    Ties between optimal selections are broken toward the lexicographically
    smallest bit vector (prefer leaving low-index items out).  Rejects
    instances whose table would exceed ``cell_budget`` cells.
    """
    n, cap = instance.n, instance.capacity
    if n * cap > cell_budget:
        raise CapacityTooLarge(f"DP table needs {n * cap} cells, budget is {cell_budget}")
    if n == 0:
        return KnapsackSolution.from_selection(instance, ())

    weights = instance.weights()
    values = instance.values()

    # table[i] = best value achievable with items i..n-1 at each residual capacity
    table = np.zeros((n + 1, cap + 1), dtype=np.int64)
    for i in range(n - 1, -1, -1):
        w, v = int(weights[i]), int(values[i])
        skip = table[i + 1]
        if w <= cap:
            take = np.full(cap + 1, -1, dtype=np.int64)
            take[w:] = skip[: cap + 1 - w] + v
            np.maximum(skip, take, out=table[i])
        else:
            table[i] = skip

    # Preferring "skip" whenever it preserves the optimum yields the
    # lexicographically smallest optimal selection.
    bits = []
    c = cap
    for i in range(n):
        if table[i, c] == table[i + 1, c]:
            bits.append(0)
        else:
            bits.append(1)
            c -= int(weights[i])
    return KnapsackSolution.from_selection(instance, bits)


def solve_exhaustive(instance: KnapsackInstance) -> KnapsackSolution:
    """Exact optimum by enumerating all 2^n subsets; oracle for the DP solver.

    Same lexicographic tie-break as :func:`solve_exact_dp`.
    """
    n = instance.n
    if n > EXHAUSTIVE_MAX_ITEMS:
        raise InstanceTooLarge(f"exhaustive enumeration limited to {EXHAUSTIVE_MAX_ITEMS} items, got {n}")
    if n == 0:
        return KnapsackSolution.from_selection(instance, ())

    weights = instance.weights()
    values = instance.values()
    shifts = np.arange(n, dtype=np.uint64)
    # mask bit i selects item i; lex order on the bit vector corresponds to
    # the integer with bit 0 most significant
    lex_coeff = (np.int64(1) << (n - 1 - np.arange(n, dtype=np.int64))).astype(np.int64)

    best_value = -1
    best_lex = None
    best_mask = 0
    for start in range(0, 1 << n, _ENUM_CHUNK):
        stop = min(start + _ENUM_CHUNK, 1 << n)
        masks = np.arange(start, stop, dtype=np.uint64)
        bits = ((masks[:, None] >> shifts[None, :]) & 1).astype(np.int64)
        tw = bits @ weights
        ok = tw <= instance.capacity
        if not ok.any():
            continue
        tv = bits @ values
        tv_ok = np.where(ok, tv, -1)
        vmax = int(tv_ok.max())
        if vmax < best_value:
            continue
        cand = np.nonzero(tv_ok == vmax)[0]
        lex = bits[cand] @ lex_coeff
        j = int(cand[int(np.argmin(lex))])
        lex_j = int(lex.min())
        if vmax > best_value or (best_lex is None or lex_j < best_lex):
            best_value = vmax
            best_lex = lex_j
            best_mask = start + j

    bits = [(best_mask >> i) & 1 for i in range(n)]
    return KnapsackSolution.from_selection(instance, bits)


def _density_key(item: KnapsackItem) -> tuple:
    # weight-0 items sort ahead of everything (infinite density)
    if item.weight == 0:
        return (0, 0, item.id)
    return (1, -Fraction(item.value, item.weight), item.id)


def solve_greedy_ratio(instance: KnapsackInstance) -> KnapsackSolution:
    """Greedy by non-increasing value/weight density; ties go to smaller id.

    Feasible by construction; a lower bound on the exact optimum.
    """
    bits = [0] * instance.n
    room = instance.capacity
    order = sorted(range(instance.n), key=lambda i: _density_key(instance.items[i]))
    for i in order:
        if instance.items[i].weight <= room:
            bits[i] = 1
            room -= instance.items[i].weight
    return KnapsackSolution.from_selection(instance, bits)
