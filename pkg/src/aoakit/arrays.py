"""Core array type and counting-based balance metrics.

An array is an N×k grid of levels ``1..s``. For a strength ``t``, the count of
a level tuple ``x`` in a column tuple ``j`` is the number of rows matching
``x`` on those columns; a perfectly balanced (orthogonal) array hits every
tuple exactly ``N / s^t`` times. The tolerance is the worst deviation from
that target, the p-unbalance the sum of p-th powers of all deviations.

All counting metrics are exact: deviations are computed as integers scaled by
``s^t`` and reduced at the end, so results are python ints (or Fractions when
``s^t`` does not divide ``N``).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

__all__ = [
    "Array",
    "count_tuple",
    "is_oa",
    "tolerance",
    "unbalance",
    "unbalance2_via_hamming",
    "normalized_unbalance",
    "bandwidth",
    "rao_max_factors",
    "lower_bound_unb22",
    "trivial_construct",
    "repeat_factors_bounds",
    "RepeatReport",
    "cyclic_oa",
    "random_array",
    "hamming_similarity",
]

Exact = int | Fraction


def _as_exact(num: int, den: int) -> Exact:
    """Reduce num/den to an int when possible, else a Fraction."""
    f = Fraction(num, den)
    return int(f) if f.denominator == 1 else f


@dataclass(frozen=True)
class Array:
    """A fixed-level array: N runs (rows) by k factors (columns) over 1..s.

    Parameters
    ----------
    cells : numpy.ndarray
        Integer matrix of shape (N, k) with values in ``1..n_levels``.
    n_levels : int
        Number of levels s.
    """

    cells: np.ndarray
    n_levels: int

    def __post_init__(self):
        cells = np.asarray(self.cells, dtype=np.int64)
        if cells.ndim != 2 or cells.size == 0:
            raise ValueError("cells must be a non-empty 2-D matrix")
        if self.n_levels < 1:
            raise ValueError("n_levels must be >= 1")
        if cells.min() < 1 or cells.max() > self.n_levels:
            raise ValueError(f"cell values must lie in 1..{self.n_levels}")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def n_runs(self) -> int:
        return self.cells.shape[0]

    @property
    def n_factors(self) -> int:
        return self.cells.shape[1]

    @classmethod
    def from_rows(cls, rows, n_levels: int) -> "Array":
        return cls(np.array(rows, dtype=np.int64), n_levels)

    def select_columns(self, cols) -> "Array":
        """Sub-array keeping the given 0-based columns, in the given order."""
        return Array(self.cells[:, list(cols)], self.n_levels)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Array)
            and self.n_levels == other.n_levels
            and self.cells.shape == other.cells.shape
            and bool(np.array_equal(self.cells, other.cells))
        )

    def __hash__(self) -> int:
        return hash((self.n_levels, self.cells.tobytes(), self.cells.shape))


def _check_strength(a: Array, t: int) -> None:
    if not 1 <= t <= a.n_factors:
        raise ValueError(f"strength t={t} out of range 1..{a.n_factors}")


def _column_tuples(k: int, t: int):
    return itertools.combinations(range(k), t)


def _tuple_counts(a: Array, cols: tuple[int, ...]) -> np.ndarray:
    """Counts of all s^t level tuples in the given columns (coded base s)."""
    s = a.n_levels
    code = np.zeros(a.n_runs, dtype=np.int64)
    for c in cols:
        code = code * s + (a.cells[:, c] - 1)
    return np.bincount(code, minlength=s ** len(cols))


def count_tuple(a: Array, x, j) -> int:
    """Number of rows whose values on columns ``j`` equal the tuple ``x``.

    Parameters
    ----------
    a : Array
    x : sequence of int
        Levels in ``1..s``, one per column of ``j``.
    j : sequence of int
        Strictly increasing 1-based column indices.

    Returns
    -------
    int
    """
    x = tuple(int(v) for v in x)
    j = tuple(int(c) for c in j)
    if len(x) != len(j):
        raise ValueError("level tuple and column tuple must have equal length")
    if not j or len(j) > a.n_factors:
        raise ValueError("column tuple length out of range")
    if any(not 1 <= c <= a.n_factors for c in j) or any(
        j[i] >= j[i + 1] for i in range(len(j) - 1)
    ):
        raise ValueError("column indices must be strictly increasing and in range")
    if any(not 1 <= v <= a.n_levels for v in x):
        raise ValueError(f"levels must lie in 1..{a.n_levels}")
    mask = np.ones(a.n_runs, dtype=bool)
    for v, c in zip(x, j):
        mask &= a.cells[:, c - 1] == v
    return int(mask.sum())


def is_oa(a: Array, t: int) -> bool:
    """Whether every t-tuple count equals N/s^t exactly (strength-t OA)."""
    _check_strength(a, t)
    st = a.n_levels**t
    if a.n_runs % st:
        return False
    lam = a.n_runs // st
    return all(
        np.all(_tuple_counts(a, cols) == lam)
        for cols in _column_tuples(a.n_factors, t)
    )


def tolerance(a: Array, t: int) -> Exact:
    """Largest deviation ``|count - N/s^t|`` over all tuples and columns."""
    _check_strength(a, t)
    st = a.n_levels**t
    worst = 0
    for cols in _column_tuples(a.n_factors, t):
        counts = _tuple_counts(a, cols)
        dev = np.abs(counts * st - a.n_runs)
        worst = max(worst, int(dev.max()))
    return _as_exact(worst, st)


def unbalance(a: Array, t: int, p) -> Exact | float:
    """Sum of p-th powers of all deviations ``|count - N/s^t|``.

    Exact (int or Fraction) for integer ``p``; float for non-integer ``p``.
    """
    _check_strength(a, t)
    if p < 1:
        raise ValueError("p must be >= 1")
    st = a.n_levels**t
    if isinstance(p, int) or (isinstance(p, float) and p.is_integer()):
        p = int(p)
        total = 0
        for cols in _column_tuples(a.n_factors, t):
            counts = _tuple_counts(a, cols)
            dev = np.abs(counts * st - a.n_runs)
            total += int((dev.astype(object) ** p).sum())
        return _as_exact(total, st**p)
    lam = a.n_runs / st
    total_f = 0.0
    for cols in _column_tuples(a.n_factors, t):
        counts = _tuple_counts(a, cols)
        total_f += float(np.sum(np.abs(counts - lam) ** p))
    return total_f


def hamming_similarity(a: Array) -> np.ndarray:
    """N×N matrix of coordinate-agreement counts between all row pairs."""
    cells = a.cells
    return (cells[:, None, :] == cells[None, :, :]).sum(axis=2)


def unbalance2_via_hamming(a: Array, t: int) -> Exact:
    """2-unbalance of strength t computed from row-pair agreement counts.

    Equals ``unbalance(a, t, 2)`` exactly: summing binomial(H(r, r'), t) over
    all ordered row pairs counts coincident t-tuples, and subtracting the
    orthogonal-array target ``binom(k, t) * N^2 / s^t`` leaves the squared
    deviations.
    """
    _check_strength(a, t)
    h = hamming_similarity(a)
    comb_table = np.array([math.comb(v, t) for v in range(a.n_factors + 1)])
    total = int(comb_table[h].sum())
    st = a.n_levels**t
    target_num = math.comb(a.n_factors, t) * a.n_runs**2
    return _as_exact(total * st - target_num, st)


def normalized_unbalance(a: Array, t: int, p) -> float | Exact:
    """p-mean form of the unbalance: ``(Unb / (s^t * binom(k,t)))^(1/p)``.

    Nondecreasing in ``p``; the limit ``p = math.inf`` returns the tolerance.
    """
    _check_strength(a, t)
    if p == math.inf:
        return tolerance(a, t)
    if p < 1:
        raise ValueError("p must be >= 1")
    cells = a.n_levels**t * math.comb(a.n_factors, t)
    return float(unbalance(a, t, p) / cells) ** (1.0 / float(p))


def bandwidth(a: Array, t: int) -> Exact:
    """Largest gap between any two t-tuple counts, across all column tuples.

    Sandwiched between the tolerance and twice the tolerance.
    """
    _check_strength(a, t)
    lo, hi = None, None
    for cols in _column_tuples(a.n_factors, t):
        counts = _tuple_counts(a, cols)
        cmin, cmax = int(counts.min()), int(counts.max())
        lo = cmin if lo is None else min(lo, cmin)
        hi = cmax if hi is None else max(hi, cmax)
    return hi - lo


def rao_max_factors(n_runs: int, n_levels: int) -> int:
    """Largest factor count a strength-2 OA with these runs/levels allows."""
    if n_levels < 2:
        raise ValueError("n_levels must be >= 2")
    return (n_runs - 1) // (n_levels - 1)


def lower_bound_unb22(n_runs: int, n_factors: int, n_levels: int) -> Exact:
    """Universal lower bound on the 2-unbalance of strength 2.

    Requires ``s^2 | N``. May be negative, in which case it is vacuous.
    """
    n, k, s = n_runs, n_factors, n_levels
    if n % s**2:
        raise ValueError("n_levels^2 must divide n_runs")
    lam = n // s**2
    gamma = Fraction((lam * s - 1) * k, lam * s**2 - 1)
    fl = math.floor(gamma)
    value = Fraction(lam * s**2 * (lam * s**2 - 1)) * (
        math.comb(fl, 2) + fl * (gamma - fl)
    ) - lam * (lam - 1) * s**2 * math.comb(k, 2)
    return _as_exact(value.numerator, value.denominator)


def trivial_construct(b: Array) -> Array:
    """Duplicate the first factor of a strength-2 OA.

    The result (B1 | B) keeps strength 1, its strength-2 tolerance is at most
    ``lam*(s-1)``, and its strength-2 p-unbalance is exactly
    ``lam^p * s*(s-1) * (1 + (s-1)^(p-1))`` where ``lam = N/s^2``.
    """
    if not is_oa(b, 2):
        raise ValueError("input must be an orthogonal array of strength 2")
    cells = np.hstack([b.cells[:, :1], b.cells])
    return Array(cells, b.n_levels)


@dataclass
class RepeatReport:
    """Repeated-factors array together with its guaranteed metric bounds."""

    array: Array
    tol_bound: Exact
    tol_actual: Exact
    unb_bounds: dict[int, Exact]
    unb_actuals: dict[int, Exact]

    @property
    def ok(self) -> bool:
        return self.tol_actual <= self.tol_bound and all(
            self.unb_actuals[p] <= self.unb_bounds[p] for p in self.unb_bounds
        )


def repeat_factors_bounds(b: Array, kappa: int, ps: tuple[int, ...] = (1, 2)) -> RepeatReport:
    """Prepend copies of the first ``kappa`` factors and bound the result.

    For any array B with ``s^2 | N``, the array (B[:kappa] | B) satisfies
    ``Tol2 <= max(Tol2(B), lam*(s-1))`` and, for each p,
    ``Unb2 <= 2*Unb2(B) + 2*Unb2(B[:kappa]) + kappa*lam^p*s*(s-1)*(1+(s-1)^(p-1))``.
    The report carries both bounds and the measured values.
    """
    if not 1 <= kappa <= b.n_factors - 1:
        raise ValueError("kappa must lie in 1..k-1")
    s = b.n_levels
    lam = _as_exact(b.n_runs, s**2)
    repeated = Array(np.hstack([b.cells[:, :kappa], b.cells]), s)

    tol_b = tolerance(b, 2)
    tol_bound = max(tol_b, lam * (s - 1))
    head = b.select_columns(range(kappa)) if kappa >= 2 else None
    unb_bounds: dict[int, Exact] = {}
    unb_actuals: dict[int, Exact] = {}
    for p in ps:
        unb_b = unbalance(b, 2, p)
        unb_head = unbalance(head, 2, p) if head is not None else 0
        per_pair = lam**p * s * (s - 1) * (1 + (s - 1) ** (p - 1))
        unb_bounds[p] = 2 * unb_b + 2 * unb_head + kappa * per_pair
        unb_actuals[p] = unbalance(repeated, 2, p)
    return RepeatReport(
        array=repeated,
        tol_bound=tol_bound,
        tol_actual=tolerance(repeated, 2),
        unb_bounds=unb_bounds,
        unb_actuals=unb_actuals,
    )


def cyclic_oa(s: int, lam: int = 1) -> Array:
    """Three-column strength-2 OA from modular addition, for any s >= 2.

    Rows are ``(u, v, u+v mod s)`` over all pairs, repeated ``lam`` times
    (stacked blocks, each in lexicographic row order), mapped to levels 1..s.
    """
    if s < 2:
        raise ValueError("s must be >= 2")
    if lam < 1:
        raise ValueError("lam must be >= 1")
    u, v = np.divmod(np.arange(s * s), s)
    block = np.column_stack([u, v, (u + v) % s]) + 1
    return Array(np.vstack([block] * lam), s)


def random_array(n_runs: int, n_factors: int, n_levels: int, rng) -> Array:
    """Uniformly random array with the given shape, from a numpy Generator."""
    cells = rng.integers(1, n_levels + 1, size=(n_runs, n_factors))
    return Array(cells, n_levels)
