"""Symmetric-ordering (Moyal) star product for a constant pairing.

An element is a finite expansion ``sum_k hbar**k c_k`` whose coefficients are
:class:`~qpainleve.coeff.RatFn` values in commuting coordinate symbols.  For
coordinates ``x_a`` with pairing matrix ``P`` the product is

    a * b = sum_n (hbar/2)**n / n! * P^{i1 j1}...P^{in jn}
            (d_{i1..in} a) (d_{j1..jn} b)

so that ``[x_a, x_b] = hbar * P[a][b]``.  Products of two polynomial elements
terminate and are kept exactly; anything touching a genuine rational
coefficient is truncated at ``hbar**(order+1)``.
"""

from __future__ import annotations

import json
from fractions import Fraction
from itertools import combinations_with_replacement
from math import factorial
from typing import Iterable, Mapping, Sequence

from .coeff import Domain, RatFn

__all__ = [
    "AlgebraMismatch",
    "BadIndex",
    "NotInvertible",
    "Pairing",
    "StarElem",
    "StarSpace",
    "commutator",
    "partial",
    "star_inv",
    "star_mul",
]


class AlgebraMismatch(ValueError):
    pass


class NotInvertible(ZeroDivisionError):
    pass


class BadIndex(KeyError):
    pass


class Pairing:
    """Constant antisymmetric matrix with ``[x_a, x_b] = hbar * matrix[a][b]``."""

    def __init__(self, coords: Sequence[str], entries: Mapping[tuple[str, str], object] | None = None):
        self.coords = tuple(coords)
        self._pos = {c: i for i, c in enumerate(self.coords)}
        n = len(self.coords)
        self.matrix = [[Fraction(0)] * n for _ in range(n)]
        for (a, b), v in (entries or {}).items():
            self.set(a, b, v)

    def set(self, a: str, b: str, value) -> None:
        i, j = self._pos[a], self._pos[b]
        v = Fraction(value)
        if i == j and v:
            raise ValueError("diagonal pairing entries must vanish")
        self.matrix[i][j] = v
        self.matrix[j][i] = -v

    def __getitem__(self, key: tuple[str, str]) -> Fraction:
        a, b = key
        return self.matrix[self._pos[a]][self._pos[b]]

    def nonzero(self) -> list[tuple[int, int, Fraction]]:
        n = len(self.coords)
        return [(i, j, self.matrix[i][j]) for i in range(n) for j in range(n) if self.matrix[i][j]]

    def is_central(self, coord: str) -> bool:
        return not any(self.matrix[self._pos[coord]])

    def to_json_obj(self) -> dict:
        return {
            "coords": list(self.coords),
            "matrix": [[str(v) for v in row] for row in self.matrix],
        }


class StarSpace:
    """Shared data for a family of star-product elements.

    Holds the coefficient domain, the ordered coordinate list, the pairing and
    the truncation order.  :class:`qpainleve.algebra.AlgebraSpec` extends this.
    """

    def __init__(self, name: str, dom: Domain, pairing: Pairing, order: int = 3):
        if order < 1:
            raise ValueError("truncation order must be at least 1")
        self.name = name
        self.dom = dom
        self.pairing = pairing
        self.coords = pairing.coords
        self.order = order
        for c in self.coords:
            if not dom.is_free(c):
                raise ValueError(f"coordinate {c} must be a free symbol of the domain")
        self._tables: dict[int, list[tuple[Fraction, tuple[int, ...], tuple[int, ...]]]] = {}
        self._pairs = pairing.nonzero()

    def moyal_table(self, m: int):
        """Aggregated bidifferential terms of order ``m`` including ``1/2**m``."""
        table = self._tables.get(m)
        if table is not None:
            return table
        n = len(self.coords)
        acc: dict[tuple[tuple[int, ...], tuple[int, ...]], Fraction] = {}
        for combo in combinations_with_replacement(range(len(self._pairs)), m):
            coef = Fraction(1, 2**m)
            left = [0] * n
            right = [0] * n
            mult: dict[int, int] = {}
            for idx in combo:
                i, j, v = self._pairs[idx]
                coef *= v
                left[i] += 1
                right[j] += 1
                mult[idx] = mult.get(idx, 0) + 1
            for k in mult.values():
                coef /= factorial(k)
            key = (tuple(left), tuple(right))
            acc[key] = acc.get(key, Fraction(0)) + coef
        table = [(c, l, r) for (l, r), c in acc.items() if c]
        self._tables[m] = table
        return table

    # element constructors
    def elem(self, coeffs: Iterable, exact: bool | None = None) -> StarElem:
        cs = tuple(self.dom.const(c) for c in coeffs)
        if exact is None:
            exact = all(self.coord_poly(c) for c in cs)
        return StarElem(self, cs, exact)

    def coord_poly(self, c: RatFn) -> bool:
        """True when ``c`` is polynomial in the coordinates (central denominators allowed)."""
        if c.den.is_constant():
            return True
        degs = c.den.degrees()
        idx = self.dom._index
        return not any(degs[idx[x]] for x in self.coords)

    def scalar(self, value) -> StarElem:
        return self.elem([value])

    def zero(self) -> StarElem:
        return StarElem(self, (self.dom.zero(),), True)

    def one(self) -> StarElem:
        return StarElem(self, (self.dom.one(),), True)

    def symbol(self, name: str) -> StarElem:
        return StarElem(self, (self.dom.var(name),), True)

    def hbar(self) -> StarElem:
        return StarElem(self, (self.dom.zero(), self.dom.one()), True)

    def descriptor(self) -> dict:
        return {"name": self.name, "order": self.order, "pairing": self.pairing.to_json_obj()}


class StarElem:
    """Graded expansion ``sum_k hbar**k coeffs[k]``.

    ``exact`` elements carry their full (terminating) expansion; inexact ones
    are meaningful only modulo ``hbar**(order+1)``.
    """

    __slots__ = ("space", "coeffs", "exact", "_dcache", "_cdeg")

    def __init__(self, space: StarSpace, coeffs: tuple[RatFn, ...], exact: bool):
        if not exact and len(coeffs) > space.order + 1:
            coeffs = coeffs[: space.order + 1]
        # trim trailing zeros (keep at least one slot)
        n = len(coeffs)
        while n > 1 and coeffs[n - 1].is_zero():
            n -= 1
        self.space = space
        self.coeffs = tuple(coeffs[:n])
        self.exact = exact
        self._dcache: dict = {}
        self._cdeg: dict = {}

    # -- helpers ------------------------------------------------------
    def _check(self, other) -> StarElem:
        if not isinstance(other, StarElem):
            return self.space.scalar(other)
        if other.space is not self.space:
            raise AlgebraMismatch(f"{self.space.name} vs {other.space.name}")
        return other

    def coeff(self, k: int) -> RatFn:
        if k < len(self.coeffs):
            return self.coeffs[k]
        return self.space.dom.zero()

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)

    def is_poly(self) -> bool:
        return all(self.space.coord_poly(c) for c in self.coeffs)

    def _coord_degrees(self, k: int) -> tuple[int, ...] | None:
        """Per-coordinate degree of a polynomial coefficient (None if rational)."""
        if k in self._cdeg:
            return self._cdeg[k]
        c = self.coeffs[k]
        if not self.space.coord_poly(c):
            out = None
        elif c.num.is_zero():
            out = (0,) * len(self.space.coords)
        else:
            degs = c.num.degrees()
            idx = c.dom._index
            out = tuple(degs[idx[x]] for x in self.space.coords)
        self._cdeg[k] = out
        return out

    def deriv(self, k: int, mi: tuple[int, ...]) -> RatFn:
        """Mixed partial derivative of coefficient ``k`` (multi-index over coords)."""
        if not any(mi):
            return self.coeffs[k]
        key = (k, mi)
        hit = self._dcache.get(key)
        if hit is not None:
            return hit
        degs = self._coord_degrees(k)
        if degs is not None and any(m > d for m, d in zip(mi, degs)):
            r = self.space.dom.zero()
        else:
            pos = max(i for i, m in enumerate(mi) if m)
            parent = list(mi)
            parent[pos] -= 1
            r = self.deriv(k, tuple(parent))
            r = r.diff(self.space.coords[pos]) if not r.is_zero() else r
        self._dcache[key] = r
        return r

    # -- ring operations ----------------------------------------------
    def __add__(self, other):
        other = self._check(other)
        n = max(len(self.coeffs), len(other.coeffs))
        cs = tuple(self.coeff(k) + other.coeff(k) for k in range(n))
        return StarElem(self.space, cs, self.exact and other.exact)

    __radd__ = __add__

    def __neg__(self):
        return StarElem(self.space, tuple(-c for c in self.coeffs), self.exact)

    def __sub__(self, other):
        return self + (-self._check(other))

    def __rsub__(self, other):
        return self._check(other) - self

    def scale(self, c) -> StarElem:
        """Multiply by a commutative coefficient (RatFn or number)."""
        c = self.space.dom.const(c)
        return StarElem(self.space, tuple(x * c for x in self.coeffs),
                        self.exact and self.space.coord_poly(c))

    def __mul__(self, other):
        if not isinstance(other, StarElem):
            return self.scale(other)
        return star_mul(self, other)

    def __rmul__(self, other):
        return self.scale(other)

    def __pow__(self, n: int):
        if n < 0:
            return star_inv(self) ** (-n)
        out = self.space.one()
        for _ in range(n):
            out = out * self
        return out

    def shift_down(self) -> StarElem:
        """Divide by hbar; the hbar**0 coefficient must vanish."""
        if not self.coeffs[0].is_zero():
            raise ValueError("element is not divisible by hbar")
        cs = self.coeffs[1:] or (self.space.dom.zero(),)
        if self.exact:
            return StarElem(self.space, cs, True)
        # dividing loses one order of certification
        return StarElem(self.space, cs, False)

    def classical(self) -> RatFn:
        """The hbar -> 0 coefficient."""
        return self.coeffs[0]

    def truncated(self, order: int | None = None) -> tuple[RatFn, ...]:
        k = self.space.order if order is None else order
        return tuple(self.coeff(i) for i in range(k + 1))

    def certified_order(self) -> int | None:
        """Highest hbar power guaranteed correct (None means exact)."""
        return None if self.exact else self.space.order

    def map_coeffs(self, fn) -> StarElem:
        return StarElem(self.space, tuple(fn(c) for c in self.coeffs), False)

    # -- comparison -----------------------------------------------------
    def residual_orders(self, other) -> list[int]:
        """hbar powers where ``self`` and ``other`` differ (within certification)."""
        other = self._check(other)
        if self.exact and other.exact:
            n = max(len(self.coeffs), len(other.coeffs))
        else:
            n = self.space.order + 1
        return [k for k in range(n) if not (self.coeff(k) - other.coeff(k)).is_zero()]

    def equals(self, other) -> bool:
        return not self.residual_orders(other)

    def __eq__(self, other):
        if isinstance(other, (int, Fraction)) or isinstance(other, StarElem):
            return self.equals(other)
        return NotImplemented

    __hash__ = None

    def __repr__(self):
        parts = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            parts.append(str(c) if k == 0 else f"h^{k}*({c})")
        body = " + ".join(parts) or "0"
        return f"StarElem[{self.space.name}]({body}{'' if self.exact else ' + O(h^%d)' % (self.space.order + 1)})"

    def to_json_obj(self) -> dict:
        return {
            "algebra": self.space.name,
            "order": self.space.order,
            "exact": self.exact,
            "coeffs": [c.to_json_obj() for c in self.coeffs],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))


def star_mul(a: StarElem, b: StarElem) -> StarElem:
    """Symmetric-ordering star product ``a * b``."""
    b = a._check(b)
    space = a.space
    dom = space.dom
    exact = a.exact and b.exact
    limit = None if exact else space.order
    acc: dict[int, RatFn] = {}

    def put(n, val):
        if val.is_zero():
            return
        cur = acc.get(n)
        acc[n] = val if cur is None else cur + val

    for i, ai in enumerate(a.coeffs):
        if ai.is_zero():
            continue
        dai = a._coord_degrees(i)
        for j, bj in enumerate(b.coeffs):
            if bj.is_zero():
                continue
            if limit is not None and i + j > limit:
                break
            put(i + j, ai * bj)
            dbj = b._coord_degrees(j)
            if limit is not None:
                mmax = limit - i - j
            else:
                mmax = min(sum(dai), sum(dbj))
            for m in range(1, mmax + 1):
                term = None
                for coef, left, right in space.moyal_table(m):
                    if dai is not None and any(x > d for x, d in zip(left, dai)):
                        continue
                    if dbj is not None and any(x > d for x, d in zip(right, dbj)):
                        continue
                    da = a.deriv(i, left)
                    if da.is_zero():
                        continue
                    db = b.deriv(j, right)
                    if db.is_zero():
                        continue
                    t = (da * db) * coef
                    term = t if term is None else term + t
                if term is not None:
                    put(i + j + m, term)
    if not acc:
        return StarElem(space, (dom.zero(),), exact)
    n = max(acc) + 1
    coeffs = tuple(acc.get(k, dom.zero()) for k in range(n))
    return StarElem(space, coeffs, exact)


def commutator(a: StarElem, b: StarElem) -> StarElem:
    return star_mul(a, b) - star_mul(b, a)


def star_inv(a: StarElem) -> StarElem:
    """Two-sided inverse modulo ``hbar**(order+1)``, built order by order."""
    space = a.space
    c0 = a.coeffs[0]
    if c0.is_zero():
        raise NotInvertible("hbar**0 coefficient is zero")
    b0 = StarElem(space, (c0.inverse(),), False)
    if len(a.coeffs) == 1 and not (c0.symbols_used() & set(space.coords)):
        return StarElem(space, (c0.inverse(),), True)
    # a * b0 = 1 - r with r = O(hbar); inverse = b0 * (1 + r + r^2 + ...)
    r = space.one() - star_mul(a, b0)
    r = StarElem(space, r.coeffs, False)
    if r.is_zero():
        return b0
    series = space.one()
    power = space.one()
    for _ in range(space.order):
        power = star_mul(power, r)
        if power.is_zero():
            break
        series = series + power
    return star_mul(b0, series)


def partial(name: str, a: StarElem) -> StarElem:
    """Coefficient-wise partial derivative along a coordinate."""
    if name not in a.space.coords:
        raise BadIndex(name)
    return StarElem(a.space, tuple(c.diff(name) for c in a.coeffs), a.exact)
