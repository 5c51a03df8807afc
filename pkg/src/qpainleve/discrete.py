"""Translation operators and the quantum discrete system they generate.

``T_1 = pi s_l ... s_1`` acts on K_l as a birational map; its iterates
``f_i[n] = T_1^n(f_i)`` define the discrete dynamics. Symbolic iteration
swells quickly (nested continued fractions), so long trajectories are run on
jets: every ``f_i[n]`` is kept as a truncated Taylor expansion around a random
modular point, one polynomial per power of hbar.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping

import flint

from . import expr as E
from .algebra import AlgebraSpec, alpha, build, cyc, f
from .coeff import DEFAULT_PRIME, ModularPoint, modular_eval, random_point
from .expr import Expr
from .report import CheckReport, run_suite
from .star import NotInvertible
from .weyl import apply, cartan

__all__ = [
    "DiscreteState",
    "Jet",
    "JetSpace",
    "NotInvertible",
    "initial_state",
    "printed_system2",
    "symmetry_words",
    "step",
    "trajectory",
    "translation",
    "verify_discrete_symmetry",
    "verify_system2",
    "verify_trajectory",
    "verify_translation_relations",
]


def translation(i: int, l: int) -> list[str]:
    """``T_i = s_{i-1} ... s_1 pi s_l ... s_i`` (so ``T_1 = pi s_l ... s_1``)."""
    if not 1 <= i <= l + 1:
        raise ValueError(f"T_{i} undefined for l={l}")
    return ([f"s{j}" for j in range(i - 1, 0, -1)] + ["pi"]
            + [f"s{j}" for j in range(l, i - 1, -1)])


def _names(l: int) -> list[str]:
    return [f"f{i}" for i in range(l + 1)] + [f"a{i}" for i in range(l + 1)]


def _leaf(n: str) -> Expr:
    return E.gen(n) if n.startswith("f") else E.central(n)


def _k() -> Expr:
    return E.central("k")


# ---------------------------------------------------------------------
# relations among the T_i
# ---------------------------------------------------------------------


def _alpha_identities(l: int):
    names = [f"a{m}" for m in range(l + 1)]
    k = E.add(*(alpha(m) for m in range(l + 1)))

    def identities(A: AlgebraSpec):
        for i in range(1, l + 2):
            Ti = translation(i, l)
            for m in range(l + 1):
                got = apply(Ti, alpha(m), l)
                if m == cyc(i - 1, l):
                    want = alpha(m) + k
                elif m == cyc(i, l) and i <= l:
                    want = alpha(m) - k
                else:
                    want = alpha(m)
                # for i = l+1 the index i-1 = l and i = 0 (mod l+1)
                if i == l + 1 and m == 0:
                    want = alpha(0) - k
                yield f"T{i}(a{m})", A.eval(got), A.eval(want)
        yield from _commuting(l, names, A)
    return identities


def _commuting(l: int, names: list[str], A: AlgebraSpec):
    for i in range(1, l + 2):
        for j in range(i + 1, l + 2):
            lw = translation(i, l) + translation(j, l)
            rw = translation(j, l) + translation(i, l)
            for n in names:
                g = _leaf(n)
                yield f"T{i}T{j}=T{j}T{i} on {n}", A.eval(apply(lw, g, l)), A.eval(apply(rw, g, l))
    full = [x for i in range(1, l + 2) for x in translation(i, l)]
    for n in names:
        g = _leaf(n)
        yield f"T1...T{l + 1}=1 on {n}", A.eval(apply(full, g, l)), A.eval(g)
    for j in range(2, l + 2):
        conj = ["pi"] * (j - 1) + translation(1, l) + ["pi^-1"] * (j - 1)
        for n in names:
            g = _leaf(n)
            yield (f"T{j}=pi^{j - 1} T1 pi^{1 - j} on {n}",
                   A.eval(apply(translation(j, l), g, l)), A.eval(apply(conj, g, l)))


def _f_identities(l: int):
    names = [f"f{m}" for m in range(l + 1)]

    def identities(A: AlgebraSpec):
        yield from _commuting(l, names, A)
    return identities


def verify_translation_relations(l: int, K: int = 3, *, trials: int = 3,
                                 prime: int | None = None, seed: int = 0) -> CheckReport:
    """alpha-action exactly, f-action modulo hbar^(K+1) on modular instances."""
    if l < 2:
        raise ValueError("translations are studied for l >= 2")
    rep = run_suite("discrete.translations", {"l": l, "K": K}, "K_l", l, K,
                    _alpha_identities(l), mode="exact")
    frep = run_suite("discrete.translations", {"l": l, "K": K}, "K_l", l, K,
                     _f_identities(l), mode="modular", trials=trials, prime=prime, seed=seed)
    rep.merge(frep)
    rep.elapsed += frep.elapsed
    rep.mode = "exact+modular"
    return rep


# ---------------------------------------------------------------------
# symbolic iteration
# ---------------------------------------------------------------------


@dataclass(frozen=True)
class DiscreteState:
    """Images ``T_1^n(g)`` of every generator and root, as expression trees."""

    l: int
    images: Mapping[str, Expr]
    n: int = 0


def initial_state(l: int) -> DiscreteState:
    return DiscreteState(l, {n: _leaf(n) for n in _names(l)}, 0)


_G_CACHE: dict[int, dict[str, Expr]] = {}


def _update(l: int) -> dict[str, Expr]:
    """``G_i = T_1(f_i)`` and ``T_1(alpha_i)`` in terms of step-n quantities."""
    if l not in _G_CACHE:
        T1 = translation(1, l)
        _G_CACHE[l] = {n: apply(T1, _leaf(n), l) for n in _names(l)}
    return _G_CACHE[l]


def step(state: DiscreteState) -> DiscreteState:
    """``f_i[n+1] = G_i(f[n], alpha[n])``."""
    G = _update(state.l)
    memo: dict = {}
    images = {n: E.substitute(g, state.images, memo) for n, g in G.items()}
    return DiscreteState(state.l, images, state.n + 1)


def printed_system2() -> dict[str, Expr]:
    """The l=2 system written with continued fractions."""
    a0, a2 = alpha(0), alpha(2)
    r = a0 * E.inv(f(0))
    inner = (a2 + a0) * E.inv(f(2) - r)
    return {"f0": f(1) + r - inner, "f1": f(2) - r, "f2": f(0) + inner}


def _system2_identities(depth: int):
    def identities(A: AlgebraSpec):
        G = _update(2)
        P = printed_system2()
        for n in ("f0", "f1", "f2"):
            yield f"T1({n}) = printed", A.eval(G[n]), A.eval(P[n])
        yield ("sum f[1] = sum f", A.eval(E.add(*(G[f"f{i}"] for i in range(3)))),
               A.eval(E.add(*(f(i) for i in range(3)))))
        s = initial_state(2)
        for m in range(1, depth + 1):
            s = step(s)
            yield (f"T1^{m}(a0) = a0 + {m}k", A.eval(s.images["a0"]),
                   A.eval(alpha(0) + m * E.add(*(alpha(i) for i in range(3)))))
            yield (f"sum f[{m}] = sum f", A.eval(E.add(*(s.images[f"f{i}"] for i in range(3)))),
                   A.eval(E.add(*(f(i) for i in range(3)))))
    return identities


def verify_system2(K: int = 3, *, depth: int = 2, mode: str = "exact", trials: int = 3,
                   prime: int | None = None, seed: int = 0) -> CheckReport:
    """``T_1`` on K_2 against the continued-fraction system, plus invariants."""
    return run_suite("discrete.system2", {"l": 2, "K": K, "depth": depth}, "K_l", 2, K,
                     _system2_identities(depth), mode=mode, trials=trials, prime=prime,
                     seed=seed)


# ---------------------------------------------------------------------
# A_{l-1} symmetry of the discrete system
# ---------------------------------------------------------------------


def symmetry_words(l: int) -> list[list[str]]:
    """``r_0 = s_0 s_1 s_0`` and ``r_j = s_{j+1}`` for ``1 <= j <= l-1``."""
    return [["s0", "s1", "s0"]] + [[f"s{j + 1}"] for j in range(1, l)]


def _symmetry_identities(l: int):
    r = symmetry_words(l)
    T1 = translation(1, l)
    m = l - 1  # rank of the finite part; indices of r are taken mod l

    def rel_words():
        for i in range(l):
            yield f"r{i}^2=1", r[i] + r[i], []
        for i in range(l):
            for j in range(i + 1, l):
                adjacent = m >= 2 and j in ((i + 1) % l, (i - 1) % l)
                if adjacent:
                    yield f"(r{i}r{j})^3=1", (r[i] + r[j]) * 3, []
                elif m >= 2:
                    yield f"r{i}r{j}=r{j}r{i}", r[i] + r[j], r[j] + r[i]

    def identities(A: AlgebraSpec):
        for i, w in enumerate(r):
            for n in _names(l):
                g = _leaf(n)
                yield (f"r{i} T1 = T1 r{i} on {n}", A.eval(apply(w + T1, g, l)),
                       A.eval(apply(T1 + w, g, l)))
        for label, lw, rw in rel_words():
            for n in _names(l):
                g = _leaf(n)
                yield f"{label} on {n}", A.eval(apply(lw, g, l)), A.eval(apply(rw, g, l))
    return identities


def verify_discrete_symmetry(l: int, K: int = 3, *, mode: str = "modular", trials: int = 3,
                             prime: int | None = None, seed: int = 0) -> CheckReport:
    if l < 2:
        raise ValueError("the symmetry is stated for l >= 2")
    rep = run_suite("discrete.symmetry", {"l": l, "K": K}, "K_l", l, K,
                    _symmetry_identities(l), mode=mode, trials=trials, prime=prime, seed=seed)
    if l == 2:
        rep.notes.append("A_1^(1) has no braid relation between r0 and r1")
    return rep


# ---------------------------------------------------------------------
# jets
# ---------------------------------------------------------------------


class JetSpace:
    """Truncated expansions of star elements around a point of the coordinates.

    The hbar^k coefficient is kept up to total degree ``order - k`` in the
    shifted coordinates. A bidifferential term of order m carries hbar^m, so
    this graded truncation is closed under the star product: no precision is
    lost however many operations are chained.
    """

    def __init__(self, A: AlgebraSpec, point: Mapping[str, int], order: int | None = None):
        self.A = A
        self.coords = list(A.coords)
        self.prime = int(DEFAULT_PRIME if A.dom.modulus is None else A.dom.modulus)
        self.K = A.order
        self.order = self.K if order is None else order
        if self.order < self.K:
            raise ValueError("jet order must be at least the hbar order")
        self.ctx = flint.nmod_mpoly_ctx.get(tuple(f"y_{c}" for c in self.coords),
                                            modulus=self.prime, ordering="deglex")
        self.point = {c: int(point[c]) % self.prime for c in self.coords}
        self._tables = {m: [(self._mod(c), left, right) for c, left, right in A.moyal_table(m)]
                        for m in range(1, self.K + 1)}

    def _mod(self, q) -> int:
        q = Fraction(q)
        return q.numerator * pow(q.denominator, -1, self.prime) % self.prime

    def trunc(self, poly, deg: int):
        if deg < 0:
            return self.ctx.from_dict({})
        if poly.total_degree() <= deg:
            return poly
        return self.ctx.from_dict({e: c for e, c in poly.to_dict().items() if sum(e) <= deg})

    def _clean(self, coeffs):
        out = [self.trunc(c, self.order - k) for k, c in enumerate(coeffs[: self.K + 1])]
        return Jet(self, out + [self.ctx.from_dict({})] * (self.K + 1 - len(out)))

    def scalar(self, value) -> Jet:
        return self._clean([self.ctx.from_dict({(0,) * len(self.coords): self._mod(value)})])

    def coordinate(self, name: str) -> Jet:
        i = self.coords.index(name)
        y = self.ctx.gens()[i]
        return self._clean([y + self.point[name]])

    def hbar(self) -> Jet:
        z = self.ctx.from_dict({})
        return self._clean([z, self.ctx.from_dict({(0,) * len(self.coords): 1})])


@dataclass
class Jet:
    space: JetSpace
    coeffs: list = field(default_factory=list)

    def __add__(self, other: Jet) -> Jet:
        return self.space._clean([a + b for a, b in zip(self.coeffs, other.coeffs)])

    def __sub__(self, other: Jet) -> Jet:
        return self.space._clean([a - b for a, b in zip(self.coeffs, other.coeffs)])

    def scale(self, c: int) -> Jet:
        return self.space._clean([a * c for a in self.coeffs])

    def __mul__(self, other: Jet) -> Jet:
        S = self.space
        out = [S.ctx.from_dict({}) for _ in range(S.K + 1)]
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                if i + j > S.K or b.is_zero():
                    continue
                out[i + j] += a * b
                for m in range(1, S.K - i - j + 1):
                    for c, left, right in S._tables[m]:
                        da, db = _d(a, left), _d(b, right)
                        if not da.is_zero() and not db.is_zero():
                            out[i + j + m] += da * db * c
        return S._clean(out)

    def value(self, k: int = 0) -> int:
        """hbar^k coefficient evaluated at the point."""
        return int(self.coeffs[k].to_dict().get((0,) * len(self.space.coords), 0))

    def values(self) -> list[int]:
        return [self.value(k) for k in range(self.space.K + 1)]

    def inverse(self) -> Jet:
        S = self.space
        c = self.value(0)
        if c == 0:
            raise NotInvertible("hbar^0 part vanishes at the point")
        cinv = pow(c, -1, S.prime)
        # classical inverse: a0 = c (1 - r), r without constant term
        r = S.trunc(S.ctx.from_dict({(0,) * len(S.coords): 1}) - self.coeffs[0] * cinv, S.order)
        inv0 = S.ctx.from_dict({(0,) * len(S.coords): 1})
        power = inv0
        for _ in range(S.order):
            power = S.trunc(power * r, S.order)
            if power.is_zero():
                break
            inv0 = inv0 + power
        b0 = S._clean([inv0 * cinv])
        one = S.scalar(1)
        rr = one - self * b0
        series, power = one, one
        for _ in range(S.K):
            power = power * rr
            series = series + power
        return b0 * series

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)


def _d(poly, mi):
    for var, count in enumerate(mi):
        for _ in range(count):
            poly = poly.derivative(var)
            if poly.is_zero():
                return poly
    return poly


def _jet_eval(e: Expr, S: JetSpace, values: Mapping[str, Jet], centrals: Mapping[str, int],
              memo: dict) -> Jet:
    if e in memo:
        return memo[e]
    stack = [e]
    while stack:
        node = stack[-1]
        if node in memo:
            stack.pop()
            continue
        k = node.kind
        if k == "gen":
            out = values[node.data]
        elif k == "central":
            out = S.hbar() if node.data == "h" else S.scalar(centrals[node.data])
        elif k == "const":
            out = S.scalar(node.data)
        else:
            pending = [a for a in node.args if a not in memo]
            if pending:
                stack.extend(pending)
                continue
            vals = [memo[a] for a in node.args]
            if k == "sum":
                out = vals[0]
                for v in vals[1:]:
                    out = out + v
            elif k == "prod":
                out = vals[0]
                for v in vals[1:]:
                    out = out * v
            elif k == "inv":
                out = vals[0].inverse()
            else:
                n = node.data
                out = S.scalar(1)
                for _ in range(n):
                    out = out * vals[0]
        stack.pop()
        memo[node] = out
    return memo[e]


@dataclass
class TrajectoryStep:
    n: int
    alphas: dict[str, int]
    f: dict[str, list[int]]

    def to_json_obj(self) -> dict:
        return {"n": self.n, "alphas": self.alphas, "f": self.f}


def trajectory(l: int, steps: int = 50, K: int = 3, *, prime: int | None = None,
               seed: int = 0, order: int | None = None):
    """Iterate ``T_1`` on jets at a random point; yields one record per step.

    Each record holds the residues of the hbar^0..hbar^K coefficients of
    ``f_i[n]`` at the point. Raises ``NotInvertible`` (with the step number)
    if a denominator degenerates.
    """
    prime = prime or DEFAULT_PRIME
    A = build("K_l", l, K, modulus=prime)
    pt = random_point([f"f{i}" for i in range(l + 1)] + [f"a{i}" for i in range(l + 1)],
                      prime, seed)
    S = JetSpace(A, pt.assignments, order)
    state = {f"f{i}": S.coordinate(f"f{i}") for i in range(l + 1)}
    alphas = {f"a{i}": pt.assignments[f"a{i}"] for i in range(l + 1)}
    G = _update(l)
    yield TrajectoryStep(0, dict(alphas), {n: j.values() for n, j in state.items()}), state, S
    for n in range(1, steps + 1):
        cent = dict(alphas)
        cent["k"] = sum(alphas.values()) % prime
        memo: dict = {}
        try:
            new = {g: _jet_eval(G[g], S, state, cent, memo) for g in state}
            alphas = {a: _jet_eval(G[a], S, state, cent, memo).value(0) for a in alphas}
        except NotInvertible as exc:
            raise NotInvertible(f"step {n}: {exc}") from exc
        state = new
        yield TrajectoryStep(n, dict(alphas), {g: j.values() for g, j in state.items()}), state, S


def _invariant_jets(l: int, state: Mapping[str, Jet], S: JetSpace) -> dict[str, Jet]:
    def total(idx):
        out = S.scalar(0)
        for i in idx:
            out = out + state[f"f{i}"]
        return out
    if l % 2 == 0:
        return {"sum f": total(range(l + 1))}
    return {"even sum": total(range(0, l + 1, 2)), "odd sum": total(range(1, l + 1, 2))}


def verify_trajectory(l: int, steps: int = 50, K: int = 3, *, prime: int | None = None,
                      seed: int = 0, crosscheck: int = 1) -> CheckReport:
    """Run a jet trajectory and check it.

    Every step must stay invertible, preserve the central sums as full jets
    (for odd l each step swaps the even and odd sums),
    and advance ``alpha_0`` by ``k``. The first ``crosscheck`` steps are
    compared against symbolic ``T_1^n`` evaluated at the same point.
    """
    prime = prime or DEFAULT_PRIME
    rep = CheckReport("discrete.trajectory", {"l": l, "K": K, "steps": steps, "seed": seed},
                      "modular")
    rep.prime, rep.trials = prime, 1
    with rep.timed():
        records = []
        start_inv = None
        k0 = None
        try:
            for rec, state, S in trajectory(l, steps, K, prime=prime, seed=seed):
                inv = _invariant_jets(l, state, S)
                if start_inv is None:
                    start_inv = inv
                    k0 = sum(rec.alphas.values()) % prime
                    a00 = rec.alphas["a0"]
                else:
                    # for odd l, pi (hence T_1) exchanges the even and odd sums
                    swap = l % 2 == 1 and rec.n % 2 == 1
                    want = {"even sum": start_inv["odd sum"], "odd sum": start_inv["even sum"]} \
                        if swap else start_inv
                    ok = all((inv[n] - want[n]).is_zero() for n in inv)
                    rep.check(f"step {rec.n}: central sums preserved", ok)
                    rep.check(f"step {rec.n}: a0 = a0 + n k",
                              rec.alphas["a0"] == (a00 + rec.n * k0) % prime)
                records.append(rec)
        except NotInvertible as exc:
            rep.check("trajectory invertible", False, str(exc))
            return rep
        rep.check(f"reached step {steps}", len(records) == steps + 1)
        if crosscheck:
            _crosscheck(rep, l, K, prime, seed, records[: crosscheck + 1])
    rep.notes.append(f"final residues: {records[-1].to_json_obj()}")
    return rep


def _crosscheck(rep: CheckReport, l: int, K: int, prime: int, seed: int, records) -> None:
    pt = random_point([f"f{i}" for i in range(l + 1)] + [f"a{i}" for i in range(l + 1)],
                      prime, seed)
    alphas = {f"a{i}": pt.assignments[f"a{i}"] for i in range(l + 1)}
    A = build("K_l", l, K, modulus=prime, values=alphas)
    point = ModularPoint(prime, pt.assignments, seed)
    s = initial_state(l)
    for rec in records[1:]:
        while s.n < rec.n:
            s = step(s)
        for g in (f"f{i}" for i in range(l + 1)):
            el = A.eval(s.images[g])
            sym = [modular_eval(el.coeff(k), point) for k in range(K + 1)]
            rep.check(f"step {rec.n}: jet {g} = symbolic", sym == rec.f[g],
                      f"jet {rec.f[g]} vs symbolic {sym}")
