"""Matching labels of paths as exponent vectors, and sigma-equivalence."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .matchings import classify
from .quiver import DimerQuiver

PERFECT = "P"
SIMPLE = "S"


class BasisMismatch(ValueError):
    """Exponent vectors over different matching lists were combined."""


@dataclass(frozen=True)
class ExponentVector:
    """Integer exponents over the perfect (``"P"``) or simple (``"S"``) matchings."""

    exponents: tuple
    basis: str

    @classmethod
    def zero(cls, size: int, basis: str) -> "ExponentVector":
        return cls((0,) * size, basis)

    @classmethod
    def ones(cls, size: int, basis: str) -> "ExponentVector":
        return cls((1,) * size, basis)

    def _same(self, other):
        if not isinstance(other, ExponentVector):
            return NotImplemented
        if other.basis != self.basis or len(other.exponents) != len(self.exponents):
            raise BasisMismatch(f"{self.basis}{len(self.exponents)} vs {other.basis}{len(other.exponents)}")
        return True

    def __add__(self, other):
        self._same(other)
        return ExponentVector(tuple(a + b for a, b in zip(self.exponents, other.exponents)), self.basis)

    def __sub__(self, other):
        self._same(other)
        return ExponentVector(tuple(a - b for a, b in zip(self.exponents, other.exponents)), self.basis)

    def __neg__(self):
        return ExponentVector(tuple(-a for a in self.exponents), self.basis)

    def scale(self, k: int) -> "ExponentVector":
        return ExponentVector(tuple(k * a for a in self.exponents), self.basis)

    def shift(self, k: int) -> "ExponentVector":
        """Multiply by sigma^k."""
        return ExponentVector(tuple(a + k for a in self.exponents), self.basis)

    @property
    def degree(self) -> int:
        return sum(self.exponents)

    def is_monomial(self) -> bool:
        return all(a >= 0 for a in self.exponents)

    def __len__(self):
        return len(self.exponents)

    def __iter__(self):
        return iter(self.exponents)

    def array(self) -> np.ndarray:
        return np.array(self.exponents, dtype=np.int64)

    def __repr__(self):
        return f"{self.basis}{list(self.exponents)}"


def arrow_label_table(q: DimerQuiver, basis: str) -> np.ndarray:
    """(arrows x matchings) membership table for the chosen basis."""
    index = classify(q)
    if basis == PERFECT:
        return index.perfect_bits
    if basis == SIMPLE:
        return index.simple_bits
    raise ValueError(f"unknown basis {basis!r}")


def path_label(q: DimerQuiver, path: Sequence[str], basis: str) -> ExponentVector:
    table = arrow_label_table(q, basis)
    path = tuple(path)
    if path:
        q.endpoints(path)
    total = np.zeros(table.shape[1], dtype=np.int64)
    for aid in path:
        total += table[q.arrow_index[aid]]
    return ExponentVector(tuple(int(x) for x in total), basis)


def eta_bar(q: DimerQuiver, path: Sequence[str]) -> ExponentVector:
    """Label over the perfect matchings: how often the path uses each matching."""
    return path_label(q, path, PERFECT)


def tau_bar(q: DimerQuiver, path: Sequence[str]) -> ExponentVector:
    """Label over the simple matchings only."""
    return path_label(q, path, SIMPLE)


def sigma(q: DimerQuiver, basis: str = SIMPLE) -> ExponentVector:
    return ExponentVector.ones(arrow_label_table(q, basis).shape[1], basis)


def sigma_equal(u: ExponentVector, v: ExponentVector) -> int | None:
    """The integer l with u - v = l * (1, ..., 1), or None."""
    d = u - v
    if not d.exponents:
        return 0
    first = d.exponents[0]
    if all(x == first for x in d.exponents):
        return first
    return None


def sigma_normal_form(u: ExponentVector) -> tuple[int, ExponentVector]:
    """Split u = sigma^l * r with min(r) = 0."""
    if not u.exponents:
        return 0, u
    m = min(u.exponents)
    return m, u.shift(-m)


def paths_equal_mod_ker(q: DimerQuiver, p1: Sequence[str], p2: Sequence[str]) -> bool:
    """Equality in the ghor algebra: same endpoints and the same perfect-matching label."""
    p1, p2 = tuple(p1), tuple(p2)
    if not p1 or not p2:
        return p1 == p2
    if q.endpoints(p1) != q.endpoints(p2):
        return False
    return eta_bar(q, p1) == eta_bar(q, p2)
