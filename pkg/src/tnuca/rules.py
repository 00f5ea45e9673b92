"""Local rules, ring configurations and exhaustive global maps.

Configurations are encoded as integers, ``enc(c) = sum(c[i] * k**i)``, so
cell 0 is the least significant digit.  The lattice is laid out the way the
numeral is written: the left neighbour of cell ``i`` is cell ``i + 1`` (mod
n) and the right neighbour is cell ``i - 1``.  With this layout the
transition diagrams of the worked ECA examples (rule pairs such as 3/15 and
7/40 on four cells) are reproduced configuration by configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

DEFAULT_BUDGET = 2**24
_CHUNK = 2**16


class BudgetExceeded(ValueError):
    """Raised when an exhaustive enumeration would exceed the configured cap."""

    def __init__(self, requested: int, limit: int):
        self.requested = requested
        self.limit = limit
        super().__init__(
            f"enumeration of {requested} configurations exceeds budget of {limit}"
        )


def check_budget(count: int, budget: int | None = None) -> None:
    limit = DEFAULT_BUDGET if budget is None else budget
    if count > limit:
        raise BudgetExceeded(count, limit)


@dataclass(frozen=True)
class LocalRule:
    """A k-state rule over a centred window of ``arity`` cells.

    ``table[v]`` is the new state for the window whose cells ``(a_1, ..., a_m)``,
    read as a base-k numeral with ``a_m`` least significant, give ``v``.
    For ECA this is the usual Wolfram numbering.
    """

    states: int
    arity: int
    table: tuple[int, ...]

    def __post_init__(self):
        if self.states < 2:
            raise ValueError(f"states must be >= 2, got {self.states}")
        if self.arity < 1 or self.arity % 2 == 0:
            raise ValueError(f"arity must be a positive odd integer, got {self.arity}")
        if len(self.table) != self.states**self.arity:
            raise ValueError(
                f"table must have {self.states ** self.arity} entries, got {len(self.table)}"
            )
        if any(not 0 <= s < self.states for s in self.table):
            raise ValueError("table entries must lie in 0..states-1")

    @property
    def radius(self) -> int:
        return (self.arity - 1) // 2

    @property
    def code(self) -> int:
        k = self.states
        return sum(s * k**v for v, s in enumerate(self.table))

    @property
    def lut(self) -> np.ndarray:
        return np.asarray(self.table, dtype=np.int64)

    def __str__(self) -> str:
        return str(self.code)


def rule_from_code(k: int, m: int, w: int) -> LocalRule:
    """Expand decimal code ``w`` into a ``k``-state, ``m``-cell rule table."""
    if k < 2:
        raise ValueError(f"state count must be >= 2, got {k}")
    if m < 1 or m % 2 == 0:
        raise ValueError(f"arity must be odd (centred window), got {m}")
    bound = k ** (k**m)
    if not 0 <= w < bound:
        raise ValueError(f"rule code must satisfy 0 <= w < {bound}, got {w}")
    table = []
    for _ in range(k**m):
        w, digit = divmod(w, k)
        table.append(digit)
    return LocalRule(k, m, tuple(table))


def eca(w: int) -> LocalRule:
    return rule_from_code(2, 3, w)


def as_rule(rule: LocalRule | int, k: int = 2, m: int = 3) -> LocalRule:
    if isinstance(rule, LocalRule):
        return rule
    return rule_from_code(k, m, int(rule))


def window_value(window: Sequence[int], k: int) -> int:
    v = 0
    for a in window:
        v = v * k + a
    return v


def apply_local(rule: LocalRule, window: Sequence[int]) -> int:
    if len(window) != rule.arity:
        raise ValueError(f"window must have length {rule.arity}, got {len(window)}")
    if any(not 0 <= a < rule.states for a in window):
        raise ValueError(f"window entries must lie in 0..{rule.states - 1}")
    return rule.table[window_value(window, rule.states)]


@dataclass(frozen=True)
class Configuration:
    """A ring configuration; ``cells[0]`` is the least significant digit."""

    cells: tuple[int, ...]
    states: int = 2

    def __post_init__(self):
        if len(self.cells) < 1:
            raise ValueError("configuration needs at least one cell")
        if any(not 0 <= s < self.states for s in self.cells):
            raise ValueError(f"cell states must lie in 0..{self.states - 1}")

    @property
    def size(self) -> int:
        return len(self.cells)

    @property
    def code(self) -> int:
        return encode(self.cells, self.states)

    @classmethod
    def from_code(cls, code: int, n: int, k: int = 2) -> "Configuration":
        return cls(tuple(decode(code, n, k)), k)


def encode(cells: Sequence[int], k: int = 2) -> int:
    code = 0
    for s in reversed(list(cells)):
        code = code * k + int(s)
    return code


def decode(code: int, n: int, k: int = 2) -> list[int]:
    if not 0 <= code < k**n:
        raise ValueError(f"encoding {code} out of range for n={n}, k={k}")
    cells = []
    for _ in range(n):
        code, s = divmod(code, k)
        cells.append(s)
    return cells


def step_cells(rule: LocalRule, cells: np.ndarray) -> np.ndarray:
    """Synchronous update of one or many configurations given as cell arrays.

    ``cells`` has shape ``(..., n)``; the last axis indexes cells.
    """
    k, r = rule.states, rule.radius
    cells = np.asarray(cells, dtype=np.int64)
    v = np.zeros(cells.shape, dtype=np.int64)
    # window (a_1..a_m) = (c[i+r], ..., c[i-r]); np.roll(c, -d)[i] == c[i+d]
    for d in range(r, -r - 1, -1):
        v = v * k + np.roll(cells, -d, axis=-1)
    return rule.lut[v]


def global_step(rule: LocalRule, c: Configuration) -> Configuration:
    if c.states != rule.states:
        raise ValueError(
            f"configuration alphabet {c.states} does not match rule states {rule.states}"
        )
    out = step_cells(rule, np.asarray(c.cells))
    return Configuration(tuple(int(s) for s in out), c.states)


def _digits(codes: np.ndarray, n: int, k: int) -> np.ndarray:
    powers = k ** np.arange(n, dtype=np.int64)
    return (codes[:, None] // powers) % k


def _encode_rows(cells: np.ndarray, k: int) -> np.ndarray:
    powers = k ** np.arange(cells.shape[-1], dtype=np.int64)
    return cells @ powers


@dataclass(frozen=True, eq=False)
class GlobalMap:
    rule: LocalRule
    size: int
    image: np.ndarray = field(repr=False)
    preimage_counts: np.ndarray = field(repr=False)

    @property
    def states(self) -> int:
        return self.rule.states

    @property
    def num_configs(self) -> int:
        return len(self.image)

    @property
    def surjective(self) -> bool:
        return bool(np.all(self.preimage_counts > 0))

    @property
    def injective(self) -> bool:
        return bool(np.all(self.preimage_counts <= 1))

    @property
    def bijective(self) -> bool:
        return self.injective and self.surjective

    @property
    def non_reachable(self) -> frozenset[int]:
        return frozenset(int(x) for x in np.flatnonzero(self.preimage_counts == 0))

    @property
    def image_set(self) -> frozenset[int]:
        return frozenset(int(x) for x in np.flatnonzero(self.preimage_counts > 0))

    def __call__(self, code: int) -> int:
        return int(self.image[code])


@lru_cache(maxsize=256)
def build_global_map(rule: LocalRule, n: int, budget: int | None = None) -> GlobalMap:
    """Tabulate the image of every configuration of an ``n``-cell ring."""
    if n < 1:
        raise ValueError(f"lattice size must be >= 1, got {n}")
    k = rule.states
    total = k**n
    check_budget(total, budget)
    image = np.empty(total, dtype=np.int64)
    for lo in range(0, total, _CHUNK):
        codes = np.arange(lo, min(lo + _CHUNK, total), dtype=np.int64)
        image[lo : lo + len(codes)] = _encode_rows(step_cells(rule, _digits(codes, n, k)), k)
    counts = np.bincount(image, minlength=total)
    image.setflags(write=False)
    counts.setflags(write=False)
    return GlobalMap(rule, n, image, counts)
