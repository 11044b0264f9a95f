"""Exact finite measures and finite ground spaces shared by the transport solvers."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

import numpy as np

MAX_DENOM = 2**63 - 1
METRIC_TOL = 1e-9


@dataclass(frozen=True)
class ScaledMeasure:
    """Measure on points ``0..len(num)-1``; point ``i`` carries ``num[i] / denom``."""

    num: tuple[int, ...]
    denom: int = 1

    def __post_init__(self):
        object.__setattr__(self, "num", tuple(int(x) for x in self.num))
        if self.denom <= 0:
            raise ValueError("denominator must be positive")
        if self.denom > MAX_DENOM:
            raise OverflowError(f"denominator {self.denom} exceeds 64 bits")
        if any(x < 0 for x in self.num):
            raise ValueError("masses must be nonnegative")
        if sum(self.num) > self.denom:
            raise ValueError("total mass exceeds one")

    @classmethod
    def from_fractions(cls, masses):
        masses = [Fraction(m) for m in masses]
        d = lcm(1, *(m.denominator for m in masses))
        return cls(tuple(int(m * d) for m in masses), d)

    def __len__(self):
        return len(self.num)

    def mass(self, i):
        return Fraction(self.num[i], self.denom)

    def masses(self):
        return [Fraction(x, self.denom) for x in self.num]

    def support(self):
        return [i for i, x in enumerate(self.num) if x]

    def with_denom(self, d):
        if d % self.denom:
            raise ValueError(f"{d} is not a multiple of {self.denom}")
        f = d // self.denom
        return ScaledMeasure(tuple(x * f for x in self.num), d)


def total_mass(mu):
    return Fraction(sum(mu.num), mu.denom)


def rescale_to_common_denominator(mu, nu):
    d = lcm(mu.denom, nu.denom)
    if d > MAX_DENOM:
        raise OverflowError(f"common denominator {d} exceeds 64 bits")
    return mu.with_denom(d), nu.with_denom(d)


@dataclass(frozen=True)
class GroundSpace:
    """Finite pseudometric space given by its distance matrix.

    Entries may be floats or exact rationals (``int``/``Fraction``); the
    transport solvers compare exactly when every entry is rational.
    """

    D: tuple[tuple, ...]

    def __init__(self, D):
        rows = tuple(tuple(row) for row in (D.tolist() if isinstance(D, np.ndarray) else D))
        m = len(rows)
        if any(len(r) != m for r in rows):
            raise ValueError("distance matrix must be square")
        if any(x < 0 for r in rows for x in r):
            raise ValueError("distances must be nonnegative")
        object.__setattr__(self, "D", rows)

    @property
    def m(self):
        return len(self.D)

    @property
    def is_exact(self):
        return all(isinstance(x, (int, Fraction)) for r in self.D for x in r)

    def distinct_distances(self):
        return sorted({x for r in self.D for x in r})


def validate_metric(space, tol=METRIC_TOL):
    """List violations of symmetry, zero diagonal and the triangle inequality."""
    D = space.D
    m = len(D)
    out = []
    for i in range(m):
        if D[i][i] != 0:
            out.append(("diagonal", i, i))
        for j in range(i + 1, m):
            if abs(D[i][j] - D[j][i]) > tol:
                out.append(("asymmetric", i, j))
    for i in range(m):
        for j in range(m):
            for k in range(m):
                if D[i][k] > D[i][j] + D[j][k] + tol:
                    out.append(("triangle", i, k, j))
    return out
