"""Quadrature discrepancy measures for arrays mapped into the unit cube.

The runs of an N x k array over 1..s map to N points in [0,1]^k with
coordinates (2a - 1) / (2s).  Three classical product-kernel L2 discrepancies
are computed from their kernel definitions (centered, wrap-around, mixture),
with the per-coordinate integrals

    i1(x) = int_0^1 K(x, y) dy        i2 = int_0^1 int_0^1 K(x, y) dx dy

derived analytically.  The discrete discrepancy DD (a two-valued kernel on
level space, parameters a > b > 0) is computed in two provably equal ways —
from Hamming similarity counts and from the strength-t unbalances — and is
exact rational whenever the parameters are.  ``check_discrepancy_bounds``
evaluates the inequalities that sandwich each classical discrepancy by a DD
with coupled parameters; they are equalities for CD at s = 2, WD at s <= 3
and MD at s = 2 because the kernels are then two-valued on the point lattice.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .arrays import Array, Exact, hamming_similarity, unbalance

__all__ = [
    "PointSet",
    "ProductKernel",
    "CENTERED",
    "WRAPAROUND",
    "MIXTURE",
    "DdParams",
    "DdResult",
    "points_of",
    "discrepancy_sq",
    "discrepancy",
    "cd",
    "wd",
    "md",
    "dd",
    "dd_lower_bound",
    "cd_coupling",
    "wd_coupling",
    "md_coupling",
    "BoundCheck",
    "check_discrepancy_bounds",
]


@dataclass(frozen=True)
class PointSet:
    """N points in the unit cube, one row per point."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.size == 0:
            raise ValueError("points must form a non-empty 2-D matrix")
        if pts.min() < 0.0 or pts.max() > 1.0:
            raise ValueError("coordinates must lie in [0, 1]")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def n_points(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]


def points_of(a: Array) -> PointSet:
    """Map each run to the cube point ((2*a[i,1]-1)/(2s), ..., (2*a[i,k]-1)/(2s))."""
    return PointSet((2 * a.cells - 1) / (2 * a.n_levels))


@dataclass(frozen=True)
class ProductKernel:
    """A product-form kernel given by its 1-D factor and that factor's integrals."""

    name: str
    i2: float

    def k1(self, x, y):
        raise NotImplementedError

    def i1(self, x):
        raise NotImplementedError


class _Centered(ProductKernel):
    """K(x,y) = 1 + |x-1/2|/2 + |y-1/2|/2 - |x-y|/2."""

    def k1(self, x, y):
        return 1 + 0.5 * (np.abs(x - 0.5) + np.abs(y - 0.5) - np.abs(x - y))

    def i1(self, x):
        u = np.abs(x - 0.5)
        return 1 + 0.5 * u - 0.5 * u * u


class _Wraparound(ProductKernel):
    """K(x,y) = 3/2 - |x-y| + |x-y|^2 (constant 1-D mean 4/3)."""

    def k1(self, x, y):
        d = np.abs(x - y)
        return 1.5 - d + d * d

    def i1(self, x):
        return np.full_like(np.asarray(x, dtype=float), 4.0 / 3.0)


class _Mixture(ProductKernel):
    """K(x,y) = 15/8 - |x-1/2|/4 - |y-1/2|/4 - 3|x-y|/4 + |x-y|^2/2."""

    def k1(self, x, y):
        d = np.abs(x - y)
        return (
            1.875
            - 0.25 * (np.abs(x - 0.5) + np.abs(y - 0.5))
            - 0.75 * d
            + 0.5 * d * d
        )

    def i1(self, x):
        u = np.abs(x - 0.5)
        return 5.0 / 3.0 - 0.25 * u - 0.25 * u * u


CENTERED = _Centered("centered", i2=13.0 / 12.0)
WRAPAROUND = _Wraparound("wraparound", i2=4.0 / 3.0)
MIXTURE = _Mixture("mixture", i2=19.0 / 12.0)


def discrepancy_sq(ps: PointSet, kernel: ProductKernel) -> float:
    """Squared L2 discrepancy i2^k - (2/N) sum_i prod_j i1 + (1/N^2) sum_{i,i'} prod_j K."""
    pts = ps.points
    n, k = pts.shape
    cross = float(np.prod(kernel.i1(pts), axis=1).sum())
    pair = float(np.prod(kernel.k1(pts[:, None, :], pts[None, :, :]), axis=2).sum())
    return kernel.i2**k - 2.0 * cross / n + pair / (n * n)


def discrepancy(ps: PointSet, kernel: ProductKernel) -> float:
    return math.sqrt(max(discrepancy_sq(ps, kernel), 0.0))


def cd(a: Array) -> float:
    """Centered L2 discrepancy of the array's point set."""
    return discrepancy(points_of(a), CENTERED)


def wd(a: Array) -> float:
    """Wrap-around L2 discrepancy of the array's point set."""
    return discrepancy(points_of(a), WRAPAROUND)


def md(a: Array) -> float:
    """Mixture L2 discrepancy of the array's point set."""
    return discrepancy(points_of(a), MIXTURE)


Rational = int | Fraction


@dataclass(frozen=True)
class DdParams:
    """Parameters of the two-valued level-space kernel: a on agreement, b off."""

    a: float | Rational
    b: float | Rational

    def __post_init__(self):
        if not self.a > self.b > 0:
            raise ValueError("parameters must satisfy a > b > 0")

    @property
    def exact(self) -> bool:
        return isinstance(self.a, (int, Fraction)) and isinstance(
            self.b, (int, Fraction)
        )


@dataclass(frozen=True)
class DdResult:
    """Squared discrete discrepancy by both formulas, plus the root."""

    params: DdParams
    sq_hamming: Exact | float
    sq_unbalance: Exact | float

    @property
    def value(self) -> float:
        return math.sqrt(max(float(self.sq_hamming), 0.0))

    @property
    def forms_agree(self) -> bool:
        lhs, rhs = float(self.sq_hamming), float(self.sq_unbalance)
        return abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs), abs(rhs))


def dd(a: Array, params: DdParams) -> DdResult:
    """Discrete discrepancy of the runs, via Hamming counts and via unbalances.

    Exact rational arithmetic whenever both parameters are rational.
    """
    n, k, s = a.n_runs, a.n_factors, a.n_levels
    if params.exact:
        pa, pb = Fraction(params.a), Fraction(params.b)
    else:
        pa, pb = float(params.a), float(params.b)

    h = hamming_similarity(a)
    counts = np.bincount(h.ravel(), minlength=k + 1)
    ratio = pa / pb
    profile = sum(int(c) * ratio**t for t, c in enumerate(counts))
    sq_h = -(((pa - pb) / s + pb) ** k) + pb**k * profile / n**2

    sq_u = sum(
        Fraction(unbalance(a, t, 2)) * (pa - pb) ** t * pb ** (k - t)
        if params.exact
        else float(unbalance(a, t, 2)) * (pa - pb) ** t * pb ** (k - t)
        for t in range(1, k + 1)
    ) / n**2

    if params.exact:
        sq_h = int(sq_h) if sq_h.denominator == 1 else sq_h
        sq_u = int(sq_u) if sq_u.denominator == 1 else sq_u
    return DdResult(params=params, sq_hamming=sq_h, sq_unbalance=sq_u)


def dd_lower_bound(n: int, k: int, s: int, params: DdParams) -> Exact | float:
    """Smallest possible squared discrete discrepancy over N x k arrays, s^2 | N."""
    if n % s**2:
        raise ValueError("requires s^2 | N")
    lam = n // s**2
    if params.exact:
        pa, pb = Fraction(params.a), Fraction(params.b)
        gamma = Fraction((lam * s - 1) * k, lam * s**2 - 1)
    else:
        pa, pb = float(params.a), float(params.b)
        gamma = (lam * s - 1) * k / (lam * s**2 - 1)
    fl = math.floor(gamma)
    ratio = pa / pb
    value = (
        -(((pa - pb) / s + pb) ** k)
        + pa**k / (lam * s**2)
        + pb**k
        * (1 - Fraction(1, lam * s**2) if params.exact else 1 - 1 / (lam * s**2))
        * (1 + (ratio - 1) * (gamma - fl))
        * ratio**fl
    )
    if params.exact and isinstance(value, Fraction) and value.denominator == 1:
        return int(value)
    return value


def cd_coupling(s: int) -> DdParams:
    """DD parameters (max diagonal, max off-diagonal centered-kernel value)."""
    if s == 2:
        return DdParams(Fraction(5, 4), Fraction(1))
    return DdParams(Fraction(3 * s - 1, 2 * s), Fraction(3 * s - 3, 2 * s))


def wd_coupling(s: int) -> DdParams:
    return DdParams(Fraction(3, 2), Fraction(3 * s**2 - 2 * s + 2, 2 * s**2))


def md_coupling(s: int) -> DdParams:
    a = Fraction(15, 8) if s % 2 else Fraction(15, 8) - Fraction(1, 4 * s)
    return DdParams(a, Fraction(15 * s**2 - 8 * s + 4, 8 * s**2))


def _cross_min(kernel_name: str, s: int) -> Fraction:
    """Minimum of the 1-D kernel mean over the s-level lattice points."""
    if kernel_name == "centered":
        if s % 2:
            return Fraction(1)
        return Fraction(8 * s**2 + 2 * s - 1, 8 * s**2)
    if kernel_name == "wraparound":
        return Fraction(4, 3)
    # mixture: the mean decreases away from the centre; extreme lattice point
    u = Fraction(s - 1, 2 * s)
    return Fraction(5, 3) - u / 4 - u * u / 4


@dataclass(frozen=True)
class BoundCheck:
    """One classical-vs-discrete comparison: lhs_sq <= rhs_sq (maybe equality)."""

    name: str
    lhs_sq: float
    rhs_sq: float
    equality_expected: bool

    @property
    def holds(self) -> bool:
        return self.lhs_sq <= self.rhs_sq + 1e-8 * max(1.0, abs(self.rhs_sq))

    @property
    def is_equality(self) -> bool:
        return abs(self.lhs_sq - self.rhs_sq) <= 1e-8 * max(1.0, abs(self.rhs_sq))

    @property
    def ok(self) -> bool:
        return self.holds and (self.is_equality or not self.equality_expected)


def check_discrepancy_bounds(a: Array) -> dict[str, BoundCheck]:
    """Evaluate both sides of the CD/WD/MD vs DD inequalities on one array."""
    s, k = a.n_levels, a.n_factors
    i2 = {"centered": Fraction(13, 12), "wraparound": Fraction(4, 3), "mixture": Fraction(19, 12)}
    couplings = {
        "centered": cd_coupling(s),
        "wraparound": wd_coupling(s),
        "mixture": md_coupling(s),
    }
    measured = {"centered": cd(a), "wraparound": wd(a), "mixture": md(a)}
    equality_at = {"centered": s == 2, "wraparound": s <= 3, "mixture": s == 2}

    out: dict[str, BoundCheck] = {}
    for name, params in couplings.items():
        pa, pb = Fraction(params.a), Fraction(params.b)
        third = ((pa - pb) / s + pb) ** k
        rhs = (
            float(i2[name] ** k - 2 * _cross_min(name, s) ** k + third)
            + float(dd(a, params).sq_hamming)
        )
        out[name] = BoundCheck(
            name=name,
            lhs_sq=measured[name] ** 2,
            rhs_sq=rhs,
            equality_expected=equality_at[name],
        )
    return out
