"""Exact multivariate rational functions and modular identity testing.

Polynomials are held as FLINT ``fmpz_mpoly`` (exact mode, integer numerator and
denominator) or ``nmod_mpoly`` (modular mode, coefficients in GF(p)).  Every
:class:`RatFn` is stored in canonical form: ``gcd(num, den) == 1`` and the
leading coefficient of ``den`` (degree-lexicographic order over the domain's
symbol registry) is positive, respectively ``1`` modulo ``p``.

A :class:`Domain` fixes the symbol registry.  In modular mode some symbols can be
*specialized* to residues (or to points on a random line ``a + b*lam``); those
symbols then never appear as polynomial variables.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

import flint

__all__ = [
    "DEFAULT_PRIME",
    "DEFAULT_TRIALS",
    "BadPoint",
    "DivisionByZero",
    "Domain",
    "ModularPoint",
    "RatFn",
    "equal",
    "failure_bound",
    "modular_eval",
    "normalize",
    "random_point",
]

DEFAULT_PRIME = 2**61 - 1
DEFAULT_TRIALS = 3
LINE_VAR = "lam_"


class DivisionByZero(ZeroDivisionError):
    pass


class BadPoint(ValueError):
    """A denominator vanishes at the chosen evaluation point."""


class Domain:
    """Symbol registry plus coefficient field for :class:`RatFn` values.

    ``values`` maps specialized symbols either to an ``int`` residue or to a
    pair ``(a, b)`` meaning ``a + b*lam_`` where ``lam_`` is an extra free
    variable (used to measure parameter degree along a random line).
    """

    def __init__(
        self,
        symbols: Iterable[str],
        modulus: int | None = None,
        values: Mapping[str, int | tuple[int, int]] | None = None,
    ):
        self.symbols = tuple(symbols)
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("duplicate symbol in registry")
        self.modulus = modulus
        self.values = dict(values or {})
        if self.values and modulus is None:
            raise ValueError("specialization requires a modulus")
        unknown = set(self.values) - set(self.symbols)
        if unknown:
            raise ValueError(f"cannot specialize unknown symbols {sorted(unknown)}")
        self.uses_line = any(isinstance(v, tuple) for v in self.values.values())
        free = [s for s in self.symbols if s not in self.values]
        if self.uses_line:
            free.append(LINE_VAR)
        self.free = tuple(free)
        if modulus is None:
            self.ctx = flint.fmpz_mpoly_ctx.get(self.free, ordering="deglex")
        else:
            self.ctx = flint.nmod_mpoly_ctx.get(self.free, modulus=modulus, ordering="deglex")
        self._index = {s: i for i, s in enumerate(self.free)}
        self._one = self.ctx.constant(1)
        self._zero = self.ctx.constant(0)
        self._vars: dict[str, RatFn] = {}

    @property
    def exact(self) -> bool:
        return self.modulus is None

    def descriptor(self) -> dict:
        return {
            "symbols": list(self.symbols),
            "mode": "exact" if self.exact else "modular",
            "prime": self.modulus,
            "specialized": sorted(self.values),
        }

    def is_free(self, name: str) -> bool:
        return name in self._index

    # -- constructors -------------------------------------------------
    def _raw(self, num, den=None) -> RatFn:
        return RatFn(self, num, self._one if den is None else den, _reduced=den is None)

    def const(self, c) -> RatFn:
        if isinstance(c, RatFn):
            return c
        c = Fraction(c)
        if self.exact:
            return RatFn(self, self.ctx.constant(c.numerator), self.ctx.constant(c.denominator),
                         _reduced=True)
        p = self.modulus
        if c.denominator % p == 0:
            raise DivisionByZero(f"constant {c} has no inverse modulo {p}")
        r = c.numerator * pow(c.denominator, -1, p) % p
        return RatFn(self, self.ctx.constant(r), self._one, _reduced=True)

    def zero(self) -> RatFn:
        return RatFn(self, self._zero, self._one, _reduced=True)

    def one(self) -> RatFn:
        return RatFn(self, self._one, self._one, _reduced=True)

    def var(self, name: str) -> RatFn:
        cached = self._vars.get(name)
        if cached is not None:
            return cached
        if name in self.values:
            v = self.values[name]
            if isinstance(v, tuple):
                a, b = v
                lam = self.ctx.gens()[self._index[LINE_VAR]]
                poly = self.ctx.constant(a) + b * lam
            else:
                poly = self.ctx.constant(v)
        elif name in self._index:
            poly = self.ctx.gens()[self._index[name]]
        else:
            raise KeyError(f"unknown symbol {name!r}")
        r = RatFn(self, poly, self._one, _reduced=True)
        self._vars[name] = r
        return r

    def from_json(self, data) -> RatFn:
        if isinstance(data, str):
            data = json.loads(data)
        num = self._poly_from_terms(data["num"])
        den = self._poly_from_terms(data["den"])
        return RatFn(self, num, den)

    def _poly_from_terms(self, terms) -> object:
        out = self._zero
        for exps, coeff in terms:
            c = Fraction(coeff)
            if c.denominator != 1:
                raise ValueError("polynomial terms must have integral coefficients")
            vec = [0] * len(self.free)
            for sym, e in zip(self.symbols, exps):
                if e:
                    if sym not in self._index:
                        raise ValueError(f"specialized symbol {sym} in serialized term")
                    vec[self._index[sym]] = e
            out = out + self.ctx.term(exp_vec=tuple(vec), coeff=c.numerator)
        return out

    def __repr__(self) -> str:
        mode = "exact" if self.exact else f"mod {self.modulus}"
        return f"Domain({len(self.symbols)} symbols, {mode})"


class RatFn:
    """Immutable reduced quotient ``num/den`` of polynomials in a :class:`Domain`."""

    __slots__ = ("dom", "num", "den", "_hash")

    def __init__(self, dom: Domain, num, den, _reduced: bool = False):
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        self.dom = dom
        if not _reduced:
            num, den = _reduce(dom, num, den)
        self.num = num
        self.den = den
        self._hash = None

    # -- predicates ---------------------------------------------------
    def is_zero(self) -> bool:
        return self.num.is_zero()

    def is_poly(self) -> bool:
        return self.den.is_one()

    def is_constant(self) -> bool:
        return self.num.is_constant() and self.den.is_constant()

    def constant_value(self) -> Fraction | int:
        if not self.is_constant():
            raise ValueError("not a constant")
        if self.dom.exact:
            return Fraction(int(self.num.leading_coefficient()) if not self.num.is_zero() else 0,
                            int(self.den.leading_coefficient()))
        if self.num.is_zero():
            return 0
        return int(self.num.leading_coefficient())

    def total_degree(self) -> int:
        """Degree of numerator plus degree of denominator (a height bound)."""
        nd = 0 if self.num.is_zero() else self.num.total_degree()
        return int(nd + self.den.total_degree())

    def degree_in(self, name: str) -> int:
        """Height ``deg num + deg den`` in a single free variable."""
        i = self.dom._index[name]
        nd = 0 if self.num.is_zero() else self.num.degrees()[i]
        return int(nd + self.den.degrees()[i])

    def symbols_used(self) -> set[str]:
        used = set()
        for poly in (self.num, self.den):
            if poly.is_zero():
                continue
            for i, d in enumerate(poly.degrees()):
                if d:
                    used.add(self.dom.free[i])
        return used

    # -- arithmetic ---------------------------------------------------
    def _coerce(self, other) -> RatFn:
        if isinstance(other, RatFn):
            if other.dom is not self.dom:
                raise ValueError("RatFn values from different domains")
            return other
        return self.dom.const(other)

    def __add__(self, other):
        other = self._coerce(other)
        if other.num.is_zero():
            return self
        if self.num.is_zero():
            return other
        if self.den == other.den:
            num = self.num + other.num
            if self.den.is_one():
                return RatFn(self.dom, num, self.den, _reduced=True)
            return RatFn(self.dom, num, self.den)
        g = self.den.gcd(other.den)
        d1 = self.den / g
        d2 = other.den / g
        num = self.num * d2 + other.num * d1
        den = d1 * other.den
        # any common factor of num and den divides g
        h = num.gcd(g)
        if not h.is_one():
            num = num / h
            den = den / h
        if num.is_zero():
            return self.dom.zero()
        return RatFn(self.dom, *_sign_fix(self.dom, num, den), _reduced=True)

    __radd__ = __add__

    def __neg__(self):
        return RatFn(self.dom, -self.num, self.den, _reduced=True)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        other = self._coerce(other)
        if self.num.is_zero() or other.num.is_zero():
            return self.dom.zero()
        if self.den.is_one() and other.den.is_one():
            return RatFn(self.dom, self.num * other.num, self.den, _reduced=True)
        g1 = self.num.gcd(other.den)
        g2 = other.num.gcd(self.den)
        num = (self.num / g1) * (other.num / g2)
        den = (self.den / g2) * (other.den / g1)
        return RatFn(self.dom, *_sign_fix(self.dom, num, den), _reduced=True)

    __rmul__ = __mul__

    def inverse(self) -> RatFn:
        if self.num.is_zero():
            raise DivisionByZero("inverse of zero")
        return RatFn(self.dom, *_sign_fix(self.dom, self.den, self.num), _reduced=True)

    def __truediv__(self, other):
        return self * self._coerce(other).inverse()

    def __rtruediv__(self, other):
        return self._coerce(other) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        return RatFn(self.dom, self.num**n, self.den**n, _reduced=True)

    def diff(self, name: str, times: int = 1) -> RatFn:
        """Formal partial derivative with respect to a free symbol."""
        if name not in self.dom._index:
            return self.dom.zero()
        r = self
        for _ in range(times):
            if r.num.is_zero():
                return r
            if r.den.is_constant():
                r = RatFn(r.dom, r.num.derivative(name), r.den, _reduced=False)
                continue
            dn = r.num.derivative(name)
            dd = r.den.derivative(name)
            if dd.is_zero():
                r = RatFn(r.dom, dn, r.den)
                continue
            # with d = g*e, g = gcd(d, d'): (n/d)' = (n'e - n d'/g) / (d e). A common
            # factor can only be a factor of d free of `name`, and those divide g.
            g = r.den.gcd(dd)
            e = r.den / g
            num = dn * e - r.num * (dd / g)
            if num.is_zero():
                return r.dom.zero()
            den = r.den * e
            c = num.gcd(g)
            if not c.is_one():
                num, den = num / c, den / c
            r = RatFn(r.dom, *_sign_fix(r.dom, num, den), _reduced=True)
        return r

    def subs(self, assignment: Mapping[str, object]) -> RatFn:
        """Substitute constants for free symbols."""
        num, den = self.num, self.den
        sub = {}
        for k, v in assignment.items():
            if k not in self.dom._index:
                continue
            v = self.dom.const(v)
            if not v.is_constant():
                raise ValueError("subs only accepts constant values")
            sub[k] = v
        if not sub:
            return self
        # clear denominators of the substituted constants
        out_num = num
        out_den = den
        for k, v in sub.items():
            vn = v.num.leading_coefficient() if not v.num.is_zero() else 0
            vd = v.den.leading_coefficient()
            degn = out_num.degrees()[self.dom._index[k]] if not out_num.is_zero() else 0
            degd = out_den.degrees()[self.dom._index[k]]
            deg = max(degn, degd)
            out_num = _homog_subs(self.dom, out_num, k, vn, vd, deg)
            out_den = _homog_subs(self.dom, out_den, k, vn, vd, deg)
        if out_den.is_zero():
            raise DivisionByZero(f"denominator vanishes under {sorted(sub)}")
        return RatFn(self.dom, out_num, out_den)

    # -- comparison ---------------------------------------------------
    def __eq__(self, other):
        if not isinstance(other, RatFn):
            try:
                other = self.dom.const(other)
            except (TypeError, ValueError):
                return NotImplemented
        return self.dom is other.dom and self.num == other.num and self.den == other.den

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((str(self.num), str(self.den)))
        return self._hash

    def __repr__(self):
        if self.den.is_one():
            return f"RatFn({self.num})"
        return f"RatFn(({self.num})/({self.den}))"

    def __str__(self):
        if self.den.is_one():
            return str(self.num)
        return f"({self.num})/({self.den})"

    # -- serialization ------------------------------------------------
    def terms(self, which: str = "num") -> list[tuple[tuple[int, ...], Fraction | int]]:
        """Terms over the full symbol registry, sorted descending in grlex."""
        poly = self.num if which == "num" else self.den
        return _registry_terms(self.dom, poly)

    def to_json_obj(self) -> dict:
        return {
            "num": [[[int(x) for x in e], _coeff_str(c)] for e, c in self.terms("num")],
            "den": [[[int(x) for x in e], _coeff_str(c)] for e, c in self.terms("den")],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), separators=(",", ":"))


def _coeff_str(c) -> str:
    c = Fraction(int(c))
    return f"{c.numerator}/{c.denominator}"


def _registry_terms(dom: Domain, poly):
    idx = [dom._index.get(s) for s in dom.symbols]
    out = []
    for exps, coeff in poly.terms():
        vec = tuple(0 if i is None else exps[i] for i in idx)
        out.append((vec, int(coeff)))
    out.sort(key=lambda t: (sum(t[0]), t[0]), reverse=True)
    return out


def _homog_subs(dom, poly, name, vn, vd, deg):
    """Return ``vd**deg * poly(name = vn/vd)`` as a polynomial."""
    if poly.is_zero():
        return poly
    i = dom._index[name]
    out = dom._zero
    for exps, coeff in poly.terms():
        e = exps[i]
        rest = list(exps)
        rest[i] = 0
        c = coeff * (vn**e) * (vd ** (deg - e))
        if c:
            out = out + dom.ctx.term(exp_vec=tuple(rest), coeff=c)
    return out


def _sign_fix(dom: Domain, num, den):
    lc = den.leading_coefficient()
    if dom.exact:
        if lc < 0:
            return -num, -den
        return num, den
    lc = int(lc)
    if lc == 1:
        return num, den
    inv = pow(lc, -1, dom.modulus)
    return num * inv, den * inv


def _reduce(dom: Domain, num, den):
    if den.is_zero():
        raise DivisionByZero("zero denominator")
    if num.is_zero():
        return dom._zero, dom._one
    if not den.is_one():
        g = num.gcd(den)
        if not g.is_one():
            num = num / g
            den = den / g
    return _sign_fix(dom, num, den)


def normalize(r: RatFn) -> RatFn:
    """Canonical reduced form (values are always stored reduced; idempotent)."""
    if r.den.is_zero():
        raise DivisionByZero("zero denominator")
    return RatFn(r.dom, r.num, r.den)


# ---------------------------------------------------------------------
# modular evaluation
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class ModularPoint:
    prime: int
    assignments: Mapping[str, int]
    seed: int = 0

    def __post_init__(self):
        if self.prime <= 2**31:
            raise ValueError("modular points need a prime above 2**31")


def random_point(symbols: Iterable[str], prime: int = DEFAULT_PRIME,
                 seed: int = 0) -> ModularPoint:
    rng = random.Random(seed)
    return ModularPoint(prime, {s: rng.randrange(1, prime) for s in symbols}, seed)


def _eval_poly(dom: Domain, poly, pt: ModularPoint) -> int:
    p = pt.prime
    if poly.is_zero():
        return 0
    vals = []
    for name in dom.free:
        if name not in pt.assignments:
            raise KeyError(f"point does not assign {name!r}")
        vals.append(pt.assignments[name] % p)
    if not vals:
        return int(poly.leading_coefficient()) % p
    if dom.exact:
        return int(poly(*vals)) % p
    if dom.modulus != p:
        raise ValueError("point prime differs from the domain modulus")
    return int(poly(*vals))


def modular_eval(r: RatFn, pt: ModularPoint) -> int:
    """Evaluate ``num * den^-1`` modulo ``pt.prime``."""
    d = _eval_poly(r.dom, r.den, pt)
    if d == 0:
        raise BadPoint("denominator vanishes at point")
    return _eval_poly(r.dom, r.num, pt) * pow(d, -1, pt.prime) % pt.prime


def failure_bound(degree: int, prime: int = DEFAULT_PRIME, trials: int = DEFAULT_TRIALS) -> float:
    """Schwartz-Zippel bound ``(degree/prime)**trials`` on a false 'equal'."""
    return (max(int(degree), 1) / int(prime)) ** trials


@dataclass
class EqualityResult:
    equal: bool
    mode: str
    trials: int = 0
    seed: int | None = None
    prime: int | None = None
    bound: float = 0.0
    notes: list[str] = field(default_factory=list)

    def __bool__(self):
        return self.equal


def equal(a: RatFn, b: RatFn, mode: str = "exact", trials: int = DEFAULT_TRIALS,
          prime: int = DEFAULT_PRIME, seed: int = 0, max_retries: int = 20) -> EqualityResult:
    """Decide ``a == b`` exactly or by random evaluation modulo ``prime``."""
    if mode == "exact":
        return EqualityResult((a - b).is_zero(), "exact")
    if mode != "modular":
        raise ValueError(f"unknown mode {mode!r}")
    diff = a - b
    rng = random.Random(seed)
    ok = True
    for _ in range(trials):
        for _attempt in range(max_retries):
            pt = ModularPoint(prime, {s: rng.randrange(1, prime) for s in a.dom.free}, seed)
            try:
                v = modular_eval(diff, pt)
            except BadPoint:
                continue
            break
        else:
            raise BadPoint("could not find a point avoiding the denominator")
        if v != 0:
            ok = False
            break
    bound = failure_bound(max(a.total_degree(), b.total_degree()), prime, trials)
    return EqualityResult(ok, "modular", trials, seed, prime, bound if ok else 0.0)
