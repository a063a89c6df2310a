"""Finite-field arithmetic for small prime-power orders.

Fields GF(p^m) with order up to 2^16 are represented by precomputed addition
and multiplication tables. Elements are integers in ``0..s-1``: the integer
``e`` encodes the residue polynomial whose coefficient of ``x^i`` is the
``i``-th base-``p`` digit of ``e`` (constant term least significant).

The reducing modulus is the lexicographically smallest irreducible monic
polynomial of degree ``m`` over GF(p), where polynomials are ordered by their
coefficient tuples read from the leading power downwards. This makes every
field deterministic; arrays built on top of it are reproducible bit for bit.
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np

__all__ = [
    "Field",
    "make_field",
    "is_prime_power",
]


def is_prime_power(s: int) -> tuple[int, int] | None:
    """Return ``(p, m)`` with ``s == p**m`` and ``p`` prime, or None.

    Parameters
    ----------
    s : int
        Candidate order, ``s >= 2``.
    """
    if s < 2:
        return None
    for p in range(2, s + 1):
        if p * p > s and p != s:
            break
        if s % p:
            continue
        m = 0
        q = s
        while q % p == 0:
            q //= p
            m += 1
        return (p, m) if q == 1 else None
    return (s, 1)


# -- polynomial helpers over GF(p), coefficient lists with index = power --


def _poly_trim(c: list[int]) -> list[int]:
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return c


def _poly_mul(a: list[int], b: list[int], p: int) -> list[int]:
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_trim(out)


def _poly_mod(a: list[int], mod: list[int], p: int) -> list[int]:
    a = list(a)
    dm = len(mod) - 1
    inv_lead = pow(mod[-1], -1, p)
    while len(a) - 1 >= dm and any(a):
        shift = len(a) - 1 - dm
        factor = (a[-1] * inv_lead) % p
        for i, mi in enumerate(mod):
            a[shift + i] = (a[shift + i] - factor * mi) % p
        _poly_trim(a)
        if len(a) == 1 and a[0] == 0:
            break
    return a


def _int_to_poly(e: int, p: int) -> list[int]:
    if e == 0:
        return [0]
    digits = []
    while e:
        digits.append(e % p)
        e //= p
    return digits


def _poly_to_int(c: list[int], p: int) -> int:
    value = 0
    for coef in reversed(c):
        value = value * p + coef
    return value


def _is_irreducible(mod: list[int], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..deg/2."""
    deg = len(mod) - 1
    for d in range(1, deg // 2 + 1):
        # monic degree-d divisors, enumerated by their lower coefficients
        for low in range(p**d):
            div = _int_to_poly(low, p)
            div += [0] * (d - len(div)) + [1]
            if _poly_to_int(_poly_mod(mod, div, p), p) == 0:
                return False
    return True


def _smallest_irreducible(p: int, m: int) -> list[int]:
    """Lexicographically smallest irreducible monic polynomial of degree m."""
    if m == 1:
        return [0, 1]  # x
    for low in range(p**m):
        mod = _int_to_poly(low, p)
        mod += [0] * (m - len(mod)) + [1]
        if _is_irreducible(mod, p):
            return mod
    raise RuntimeError(f"no irreducible polynomial of degree {m} over GF({p})")


class Field:
    """Finite field GF(p^m) with table-based arithmetic on integer elements.

    Attributes
    ----------
    order : int
        Number of elements ``s = p**m``.
    char : int
        Characteristic ``p``.
    degree : int
        Extension degree ``m``.
    modulus : tuple[int, ...]
        Coefficients of the reducing polynomial, constant term first.
    """

    def __init__(self, order: int):
        pm = is_prime_power(order)
        if pm is None:
            raise ValueError(f"{order} is not a prime power")
        if order > 2**16:
            raise ValueError(f"order {order} too large (limit 2^16)")
        p, m = pm
        self.order = order
        self.char = p
        self.degree = m
        mod = _smallest_irreducible(p, m)
        self.modulus = tuple(mod)

        s = order
        add = np.empty((s, s), dtype=np.int64)
        mul = np.empty((s, s), dtype=np.int64)
        polys = [_int_to_poly(e, p) for e in range(s)]
        for a in range(s):
            for b in range(s):
                pa, pb = polys[a], polys[b]
                width = max(len(pa), len(pb))
                summed = [
                    ((pa[i] if i < len(pa) else 0) + (pb[i] if i < len(pb) else 0)) % p
                    for i in range(width)
                ]
                add[a, b] = _poly_to_int(_poly_trim(summed), p)
                mul[a, b] = _poly_to_int(_poly_mod(_poly_mul(pa, pb, p), mod, p), p)
        self._add = add
        self._mul = mul
        self._neg = np.array(
            [int(np.where(add[a] == 0)[0][0]) for a in range(s)], dtype=np.int64
        )
        inv = np.full(s, -1, dtype=np.int64)
        for a in range(1, s):
            inv[a] = int(np.where(mul[a] == 1)[0][0])
        self._inv = inv

    # -- element arithmetic -------------------------------------------------

    @property
    def elements(self) -> range:
        return range(self.order)

    def add(self, e1: int, e2: int) -> int:
        return int(self._add[e1, e2])

    def sub(self, e1: int, e2: int) -> int:
        return int(self._add[e1, self._neg[e2]])

    def mul(self, e1: int, e2: int) -> int:
        return int(self._mul[e1, e2])

    def neg(self, e: int) -> int:
        return int(self._neg[e])

    def inv(self, e: int) -> int:
        if e == 0:
            raise ZeroDivisionError("0 has no multiplicative inverse")
        return int(self._inv[e])

    def pow(self, e: int, n: int) -> int:
        if n < 0:
            e, n = self.inv(e), -n
        result, base = 1, e
        while n:
            if n & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            n >>= 1
        return result

    def vadd(self, a, b):
        """Elementwise addition of integer-encoded element arrays."""
        return self._add[a, b]

    def vmul(self, a, b):
        """Elementwise multiplication of integer-encoded element arrays."""
        return self._mul[a, b]

    def dot(self, u: tuple[int, ...], v: tuple[int, ...]) -> int:
        """Inner product of two coefficient vectors."""
        if len(u) != len(v):
            raise ValueError("length mismatch")
        acc = 0
        for a, b in zip(u, v):
            acc = self.add(acc, self.mul(a, b))
        return acc

    def from_int(self, n: int) -> int:
        """Image of the integer n under repeated addition of 1 (prime map)."""
        out = 0
        for _ in range(n % self.char):
            out = self.add(out, 1)
        return out

    # -- maps and special elements -------------------------------------------

    def trace(self, e: int) -> int:
        """Trace onto the prime subfield: sum of e^(p^i) for i in 0..m-1."""
        acc = 0
        power = e
        for _ in range(self.degree):
            acc = self.add(acc, power)
            power = self.pow(power, self.char)
        if acc >= self.char:
            raise AssertionError("trace left the prime subfield")
        return acc

    def cotrace_image_check(self) -> bool:
        """Whether the image of x -> x + x^2 equals the kernel of the trace.

        Only meaningful in characteristic 2, where both sets are GF(2)-linear
        subspaces of the same size.
        """
        if self.char != 2:
            raise ValueError("cotrace is defined in characteristic 2 only")
        image = {self.add(x, self.mul(x, x)) for x in self.elements}
        kernel = {x for x in self.elements if self.trace(x) == 0}
        return image == kernel

    def find_nonsquare(self) -> int:
        """First element (in integer order) that is not a square; odd order only."""
        if self.order % 2 == 0:
            raise ValueError("every element of an even-order field is a square")
        squares = {self.mul(x, x) for x in self.elements}
        for e in self.elements:
            if e not in squares:
                return e
        raise AssertionError("odd-order field with no non-square")

    def find_zeta(self) -> int:
        """First element with zeta^(s/2) != zeta and trace 1; even order only.

        The first property keeps zeta outside the two-element subfield; the
        second makes ``z^2 + z + zeta`` rootless, which is what lets paired
        quadratic equations split two-against-zero in the even-order
        construction counts.  For order 4 the two properties coincide; from
        order 8 on they do not, so both are checked.
        """
        if self.order % 2 or self.order == 2:
            raise ValueError("requires even order greater than 2")
        half = self.order // 2
        for e in self.elements:
            if self.pow(e, half) != e and self.trace(e) == 1:
                return e
        raise AssertionError("even-order field with no valid zeta")

    def level_bijection(self):
        """Pair of maps between elements 0..s-1 and array levels 1..s."""

        def to_level(e: int) -> int:
            return e + 1

        def from_level(v: int) -> int:
            if not 1 <= v <= self.order:
                raise ValueError(f"level {v} out of range 1..{self.order}")
            return v - 1

        return to_level, from_level

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"Field(order={self.order}, modulus={self.modulus})"


@lru_cache(maxsize=None)
def make_field(s: int) -> Field:
    """Build (and cache) the deterministic field of order ``s``.

    Parameters
    ----------
    s : int
        A prime power at most 2^16.

    Returns
    -------
    Field

    Raises
    ------
    ValueError
        If ``s`` is not a prime power.
    """
    return Field(s)
