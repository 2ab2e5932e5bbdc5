"""Finite probability distributions, stochastic maps, Lorenz curves, majorization.

Distributions are row vectors: a stochastic matrix M acts on the right,
``q = p @ M``.  Entropies and divergences are in bits (log base 2).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

# Values of monotones live on the extended half-line [0, inf].  Plain floats
# with math.inf cover everything we need: total order, min/max, comparisons.
ExtValue = float
INF = math.inf

# Sum-to-one repair threshold: inputs off by less than this are renormalized,
# anything worse is rejected as garbage.
NORMALIZATION_TOL = 1e-9
# Entry/row-sum checks after repair.
STOCHASTIC_TOL = 1e-12
# Slack for ordinate comparisons in majorization (covers cumsum error, n <= 64).
ORDER_SLACK = 1e-10


class DimensionMismatch(ValueError):
    """Operands have incompatible lengths or shapes."""


class InvariantViolation(ValueError):
    """Input fails a type invariant (negativity, normalization, shape)."""


def ext_to_json(value: ExtValue):
    """Render an extended value for JSON; infinity has no JSON literal."""
    return "inf" if value == INF else float(value)


def ext_from_json(data) -> ExtValue:
    if data == "inf":
        return INF
    value = float(data)
    if value < 0:
        raise InvariantViolation(f"extended values are nonnegative, got {value}")
    return value


@dataclass(frozen=True)
class Dist:
    """A finite probability distribution with an optional label."""

    weights: np.ndarray
    label: str | None = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float).reshape(-1)
        if w.size < 1:
            raise InvariantViolation("distribution needs at least one outcome")
        if np.any(w < -STOCHASTIC_TOL):
            raise InvariantViolation(f"negative weight in {w}")
        w = np.clip(w, 0.0, None)
        total = w.sum()
        if abs(total - 1.0) >= NORMALIZATION_TOL:
            raise InvariantViolation(f"weights sum to {total}, expected 1")
        w = w / total
        w.setflags(write=False)
        object.__setattr__(self, "weights", w)

    def __len__(self) -> int:
        return self.weights.size

    @staticmethod
    def uniform(n: int, label: str | None = None) -> "Dist":
        return Dist(np.full(n, 1.0 / n), label)

    @staticmethod
    def point_mass(n: int, outcome: int = 0, label: str | None = None) -> "Dist":
        w = np.zeros(n)
        w[outcome] = 1.0
        return Dist(w, label)

    def to_json(self) -> list[float]:
        return [float(x) for x in self.weights]

    @classmethod
    def from_json(cls, data, label: str | None = None) -> "Dist":
        return cls(np.asarray(data, dtype=float), label)


@dataclass(frozen=True)
class StochMatrix:
    """A row-stochastic matrix mapping |X| outcomes to |Y| outcomes."""

    entries: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.entries, dtype=float)
        if m.ndim != 2 or m.shape[0] < 1 or m.shape[1] < 1:
            raise InvariantViolation(f"expected a 2-d matrix, got shape {m.shape}")
        if np.any(m < -STOCHASTIC_TOL):
            raise InvariantViolation("negative entry in stochastic matrix")
        m = np.clip(m, 0.0, None)
        row_sums = m.sum(axis=1)
        if np.any(np.abs(row_sums - 1.0) >= NORMALIZATION_TOL):
            raise InvariantViolation(f"row sums {row_sums} deviate from 1")
        m = m / row_sums[:, None]
        m.setflags(write=False)
        object.__setattr__(self, "entries", m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @staticmethod
    def identity(n: int) -> "StochMatrix":
        return StochMatrix(np.eye(n))

    def to_json(self) -> list[list[float]]:
        return [[float(x) for x in row] for row in self.entries]

    @classmethod
    def from_json(cls, data) -> "StochMatrix":
        return cls(np.asarray(data, dtype=float))


@dataclass(frozen=True)
class LorenzCurve:
    """Piecewise-linear cumulative curve from (0,0) to (1,1).

    Knots are the partial sums of the increasing rearrangement of a
    distribution; linear interpolation is implied between consecutive knots.
    """

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2 or pts.shape[0] < 2:
            raise InvariantViolation(f"expected (k, 2) points, got shape {pts.shape}")
        if not (abs(pts[0, 0]) < 1e-12 and abs(pts[0, 1]) < 1e-12):
            raise InvariantViolation("curve must start at (0, 0)")
        if not (abs(pts[-1, 0] - 1) < 1e-12 and abs(pts[-1, 1] - 1) < 1e-9):
            raise InvariantViolation("curve must end at (1, 1)")
        if np.any(np.diff(pts[:, 0]) <= 0):
            raise InvariantViolation("x knots must be strictly increasing")
        if np.any(np.diff(pts[:, 1]) < -ORDER_SLACK):
            raise InvariantViolation("y values must be non-decreasing")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    def ordinate_at(self, x: float) -> float:
        return float(np.interp(x, self.points[:, 0], self.points[:, 1]))

    def to_csv(self) -> str:
        lines = ["x,y"]
        lines += [f"{float(x)!r},{float(y)!r}" for x, y in self.points]
        return "\n".join(lines) + "\n"


def shannon_entropy(p: Dist) -> ExtValue:
    """H(p) = -sum p_i log2 p_i, with 0 log 0 = 0.  Lies in [0, log2 n]."""
    w = p.weights[p.weights > 0]
    return float(max(0.0, -(w * np.log2(w)).sum()))


def kl_divergence(p: Dist, q: Dist) -> ExtValue:
    """Relative entropy sum p_i log2(p_i / q_i); infinite off q's support."""
    if len(p) != len(q):
        raise DimensionMismatch(f"lengths {len(p)} and {len(q)} differ")
    mask = p.weights > 0
    if np.any(q.weights[mask] == 0):
        return INF
    pw = p.weights[mask]
    qw = q.weights[mask]
    total = float((pw * np.log2(pw / qw)).sum())
    if -STOCHASTIC_TOL < total < 0:
        total = 0.0
    return total


def lorenz_curve(p: Dist) -> LorenzCurve:
    """Knots (i/n, partial sums) of the increasing rearrangement of p."""
    n = len(p)
    ordered = np.sort(p.weights)
    x = np.arange(n + 1) / n
    y = np.concatenate(([0.0], np.cumsum(ordered)))
    y[-1] = 1.0
    return LorenzCurve(np.column_stack([x, y]))


def majorizes(p: Dist, q: Dist) -> bool:
    """True iff q is majorized by p (q is the more uniform of the two).

    Decided by Lorenz-curve dominance: with entries sorted increasingly, the
    curve of p must lie on or below the curve of q at every shared knot.
    Lengths are equalized by zero-padding, so both curves share knots i/n.
    """
    n = max(len(p), len(q))
    a = np.sort(np.concatenate([p.weights, np.zeros(n - len(p))]))
    b = np.sort(np.concatenate([q.weights, np.zeros(n - len(q))]))
    return bool(np.all(np.cumsum(a) <= np.cumsum(b) + ORDER_SLACK))


def apply(p: Dist, m: StochMatrix) -> Dist:
    """Push p through the stochastic map: returns p @ M."""
    if len(p) != m.shape[0]:
        raise DimensionMismatch(f"distribution of length {len(p)} vs matrix {m.shape}")
    return Dist(p.weights @ m.entries)


def is_deterministic(m: StochMatrix) -> bool:
    """True iff every entry is 0 or 1, i.e. the matrix is a function X -> Y."""
    e = m.entries
    return bool(np.all(np.minimum(np.abs(e), np.abs(e - 1.0)) <= STOCHASTIC_TOL))


def is_uniform_matrix(m: StochMatrix) -> bool:
    """True iff every column sums to |X|/|Y|; such maps preserve uniformity.

    Square uniform matrices are exactly the doubly stochastic ones.
    """
    n, k = m.shape
    return bool(np.all(np.abs(m.entries.sum(axis=0) - n / k) <= STOCHASTIC_TOL))


def simplex_grid(length: int, step: float) -> list[Dist]:
    """All distributions of the given length with weights on a step grid."""
    units = round(1.0 / step)
    if abs(units * step - 1.0) > 1e-12:
        raise InvariantViolation(f"step {step} does not divide 1")

    out: list[Dist] = []

    def compose(prefix: list[int], remaining: int, slots: int):
        if slots == 1:
            out.append(Dist(np.array(prefix + [remaining]) * step))
            return
        for k in range(remaining + 1):
            compose(prefix + [k], remaining - k, slots - 1)

    compose([], units, length)
    return out


def random_stochastic(rng: np.random.Generator, n: int, k: int) -> StochMatrix:
    """A random row-stochastic n x k matrix with Dirichlet(1) rows."""
    return StochMatrix(rng.dirichlet(np.ones(k), size=n))


def random_uniform_matrix(rng: np.random.Generator, n: int, terms: int = 4) -> StochMatrix:
    """A random doubly stochastic n x n matrix, mixed from permutations."""
    weights = rng.dirichlet(np.ones(terms))
    m = np.zeros((n, n))
    for w in weights:
        m += w * np.eye(n)[rng.permutation(n)]
    return StochMatrix(m)


def random_deterministic(rng: np.random.Generator, n: int, k: int) -> StochMatrix:
    """A random function X -> Y as a 0/1 stochastic matrix."""
    m = np.zeros((n, k))
    m[np.arange(n), rng.integers(0, k, size=n)] = 1.0
    return StochMatrix(m)
