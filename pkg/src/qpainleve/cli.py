"""Command-line batch driver.

Runs named check suites over ranges of l, streams one JSON report per
(check, l) and exits 0 if everything passed, 1 on a verification failure and
2 on a usage error.

    qpainleve --check theorem1 --l 1..5 --mode exact
    qpainleve --check weyl.relations,weyl.braid --l 1..3 --summary
    qpainleve fixtures verify
    qpainleve fixtures regenerate --yes
"""

from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable

from .coeff import DEFAULT_PRIME
from .report import CheckReport, combine

__all__ = ["CHECKS", "Check", "Options", "main", "parse_l", "plan", "run"]


@dataclass(frozen=True)
class Options:
    K: int = 3
    E: int = 3
    mode: str = "modular"
    trials: int = 3
    prime: int = DEFAULT_PRIME
    seed: int = 0


@dataclass(frozen=True)
class Check:
    name: str
    runner: Callable[[int, Options], CheckReport]
    default_l: tuple[int, ...]
    valid_l: Callable[[int], bool]
    doc: str
    skip: Callable[[int], str | None] = lambda l: None


# -- runners -------------------------------------------------------------------


def _algebra(l: int, o: Options, exact: bool = False):
    from .algebra import build, build_modular

    kind = "K_1" if l == 1 else "K_l"
    if exact or o.mode == "exact":
        return build(kind, l, o.K)
    return build_modular(kind, l, o.K, prime=o.prime, seed=o.seed)


def _theorem1(l, o):
    from .hamiltonian import verify_theorem1
    return verify_theorem1(_algebra(l, o, exact=True))


def _conservation(l, o):
    from .hamiltonian import verify_conservation
    return verify_conservation(_algebra(l, o, exact=True))


def _heisenberg(l, o):
    from .hamiltonian import verify_heisenberg
    return verify_heisenberg(_algebra(l, o))


def _h0_printed(l, o):
    from .hamiltonian import verify_h0_printed
    return verify_h0_printed(l)


def _suite_kw(o: Options) -> dict:
    return {"mode": o.mode, "trials": o.trials, "prime": o.prime, "seed": o.seed}


def _weyl_relations(l, o):
    from .weyl import verify_group_relations
    return verify_group_relations(l, o.K, **_suite_kw(o))


def _weyl_braid(l, o):
    from .weyl import verify_group_relations
    rep = verify_group_relations(l, o.K, which=[")^3"], **_suite_kw(o))
    rep.name = "weyl.braid"
    return rep


def _weyl_h(l, o):
    from .weyl import verify_H_transformation
    return verify_H_transformation(l, None, o.K, **_suite_kw(o))


def _weyl_equivariance(l, o):
    from .weyl import verify_equivariance
    return verify_equivariance(l, o.K, **_suite_kw(o))


def _weyl_differences(l, o):
    from .weyl import verify_H_differences
    reps = [verify_H_differences(l, j, o.K) for j in range(l + 1)]
    out = combine(reps)
    out.params = {"l": l, "K": o.K}
    for r in reps:
        if "fitted" in r.params:
            out.params.setdefault("fitted", []).append(r.params["fitted"])
            out.params["printed"] = r.params["printed"]
    return out


def _lax_residual(l, o):
    from .lax import verify_residual
    return verify_residual(l, o.K, **_suite_kw(o))


def _lax_odd_chain(l, o):
    from .lax import verify_odd_chain
    return verify_odd_chain(l, o.K)


def _lax_gauge(l, o):
    from .lax import verify_gauge
    return verify_gauge(l, o.K, **_suite_kw(o))


def _translations(l, o):
    from .discrete import verify_translation_relations
    return verify_translation_relations(l, o.K, trials=o.trials, prime=o.prime, seed=o.seed)


def _system2(l, o):
    from .discrete import verify_system2
    return verify_system2(o.K, **_suite_kw(o))


def _symmetry(l, o):
    from .discrete import verify_discrete_symmetry
    return verify_discrete_symmetry(l, o.K, **_suite_kw(o))


def _trajectory(l, o):
    from .discrete import verify_trajectory
    return verify_trajectory(l, 50, o.K, prime=o.prime, seed=o.seed)


def _climit(fn_name: str):
    def runner(l, o):
        from . import climit

        fn = getattr(climit, fn_name)
        kw = {"mode": o.mode, "prime": o.prime}
        if fn_name == "verify_lemma_psi":
            kw["E_order"] = o.E
        if o.mode == "exact":
            return fn(l, o.K, seed=o.seed, **kw)
        # one random-line instance per trial
        return combine([fn(l, o.K, seed=o.seed + t, **kw) for t in range(o.trials)])
    return runner


def _classical(suite: str):
    def runner(l, o):
        from .classical import verify_classical_flow, verify_classical_suite
        if suite == "flow":
            return verify_classical_flow(l, o.K, **_suite_kw(o))
        return verify_classical_suite(suite, l, o.K, **_suite_kw(o))
    return runner


def _any(l):
    return l >= 1


def _at_least(m):
    return lambda l: l >= m


CHECKS: dict[str, Check] = {c.name: c for c in [
    Check("theorem1", _theorem1, (1, 2, 3, 4, 5, 6, 7), _any,
          "derivation generated by H_0 against the closed flow forms (always exact)"),
    Check("conservation", _conservation, (1, 2, 3, 4, 5, 6, 7), _any,
          "conserved combinations of the flow (always exact)"),
    Check("heisenberg", _heisenberg, (1, 2, 3, 4, 5), _any,
          "flow in canonical coordinates is the Heisenberg equation"),
    Check("h0.printed", _h0_printed, (2, 3, 4, 5), lambda l: 2 <= l <= 5,
          "built H_0 equals the displayed examples"),
    Check("weyl.relations", _weyl_relations, (1, 2, 3, 4, 5), _any,
          "defining relations of the extended affine Weyl group"),
    Check("weyl.braid", _weyl_braid, (1, 2, 3, 4, 5), _any, "braid relations (s_i s_j)^3 = 1",
          skip=lambda l: "the l=1 group has no braid relation" if l == 1 else None),
    Check("weyl.h-transform", _weyl_h, (1, 2, 3, 4, 5), _any, "s_i(H_j) - H_j"),
    Check("weyl.equivariance", _weyl_equivariance, (1, 2, 3, 4), _any,
          "the flow commutes with s_i and pi"),
    Check("weyl.differences", _weyl_differences, (2, 3, 4, 5), _at_least(2),
          "H_{j+1} - H_j closed forms (odd l: fitted coefficient)"),
    Check("lax.residual", _lax_residual, (1, 2, 3, 4, 5, 6), _any,
          "zero curvature of the Lax pair"),
    Check("lax.odd-chain", _lax_odd_chain, (3, 5, 7), lambda l: l >= 3 and l % 2 == 1,
          "odd-l elimination of u, step by step"),
    Check("lax.gauge", _lax_gauge, (2, 3, 4), _at_least(2), "gauge origin of the Weyl action"),
    Check("discrete.translations", _translations, (2, 3, 4), _at_least(2),
          "T_i T_j = T_j T_i and T_1...T_{l+1} = 1"),
    Check("discrete.system2", _system2, (2,), lambda l: l == 2,
          "T_1 on K_2 against the explicit discrete system"),
    Check("discrete.symmetry", _symmetry, (2, 3), _at_least(2),
          "A_{l-1} symmetry of the discrete system"),
    Check("discrete.trajectory", _trajectory, (2, 3, 4, 5), _at_least(2),
          "50-step jet trajectory with invariants"),
    Check("climit.lemma-psi", _climit("verify_lemma_psi"), (2, 3, 5),
          lambda l: l == 2 or l % 2 == 1 and l >= 3, "the embedding preserves the relations"),
    Check("climit.partial1", _climit("verify_partial1"), (2, 3, 5),
          lambda l: l == 2 or l % 2 == 1 and l >= 3, "divisibility by eps of T_1 - 1"),
    Check("climit.theorem-a2n", _climit("verify_limit_theorems"), (3, 5),
          lambda l: l % 2 == 1 and l >= 3, "limit derivation for odd l"),
    Check("climit.qp2", _climit("verify_limit_theorems"), (2,), lambda l: l == 2,
          "quantum second Painleve equation and its symmetries"),
    Check("classical.flow", _classical("flow"), (1, 2, 3, 4, 5), _any,
          "hbar=0 flow equals the Poisson flow of the classical H_0"),
    Check("classical.weyl.relations", _classical("weyl.relations"), (1, 2, 3), _any,
          "group relations at hbar=0"),
    Check("classical.weyl.h-transform", _classical("weyl.h-transform"), (1, 2, 3), _any,
          "H-transformation laws at hbar=0"),
    Check("classical.weyl.equivariance", _classical("weyl.equivariance"), (1, 2, 3), _any,
          "equivariance at hbar=0"),
    Check("classical.lax.residual", _classical("lax.residual"), (1, 2, 3, 4), _any,
          "zero curvature at hbar=0"),
    Check("classical.lax.gauge", _classical("lax.gauge"), (2, 3), _at_least(2),
          "gauge action at hbar=0"),
    Check("classical.discrete.translations", _classical("discrete.translations"), (2, 3),
          _at_least(2), "translation relations at hbar=0"),
    Check("classical.discrete.system2", _classical("discrete.system2"), (2,), lambda l: l == 2,
          "explicit discrete system at hbar=0"),
]}


# -- driver --------------------------------------------------------------------


def parse_l(text: str | None) -> list[int] | None:
    """``"3"``, ``"1..5"`` or ``"2,4,6"`` (ranges and lists can be mixed)."""
    if text is None:
        return None
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            out.extend(range(int(lo), int(hi) + 1))
        elif part:
            out.append(int(part))
    if not out or any(l < 1 for l in out):
        raise ValueError(f"bad l range {text!r}")
    return out


def _params(check: Check, l: int, o: Options) -> dict:
    return {"l": l, "K": o.K, "E": o.E, "mode": o.mode, "prime": o.prime, "seed": o.seed,
            "trials": o.trials}


def _run_one(name: str, l: int, o: Options) -> CheckReport:
    check = CHECKS[name]
    note = check.skip(l)
    if note is not None:
        rep = CheckReport(name, _params(check, l, o), o.mode, skipped=note)
        rep.notes.append(note)
        return rep
    rep = check.runner(l, o)
    own = dict(rep.params)
    rep.params = _params(check, l, o)
    rep.params.update({k: v for k, v in own.items() if k not in rep.params})
    return rep


def plan(names: list[str], ls: list[int] | None) -> list[tuple[str, int]]:
    """(check, l) tasks; ``ls=None`` uses each check's default range."""
    for name in names:
        if name not in CHECKS:
            raise KeyError(name)
    tasks = []
    for name in names:
        check = CHECKS[name]
        for l in (ls or check.default_l):
            if not check.valid_l(l):
                raise ValueError(f"check {name} is not defined for l={l}")
            tasks.append((name, l))
    return tasks


def run(names: list[str], ls: list[int] | None, o: Options, jobs: int = 1) -> list[CheckReport]:
    """Run checks; reports come back ordered as planned whatever the parallelism."""
    tasks = plan(names, ls)
    if jobs <= 1 or len(tasks) <= 1:
        return [_run_one(n, l, o) for n, l in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        futures = [pool.submit(_run_one, n, l, o) for n, l in tasks]
        return [fut.result() for fut in futures]


def _summary(reports: list[CheckReport]) -> str:
    rows = [("check", "l", "status", "identities", "seconds", "bound")]
    for r in reports:
        n = len(r.entries)
        bound = f"{r.bound:.1e}" if r.mode == "modular" and r.prime else "-"
        rows.append((r.name, str(r.params.get("l", "")), r.status,
                     f"{n - len(r.failures)}/{n}", f"{r.elapsed:.2f}", bound))
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    return "\n".join("  ".join(c.ljust(w) for c, w in zip(row, widths)) for row in rows)


def _report_line(rep: CheckReport) -> str:
    return json.dumps(rep.to_json_obj(), sort_keys=True)


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qpainleve", description=__doc__.split("\n\n")[0])
    p.add_argument("--check", help="comma-separated check names (see --list)")
    p.add_argument("--list", action="store_true", help="list registered checks")
    p.add_argument("--l", dest="l", help="l values: 3, 1..5 or 2,4")
    p.add_argument("--h-order", type=int, default=3, help="hbar truncation order K")
    p.add_argument("--eps-order", type=int, default=3, help="eps expansion order E")
    p.add_argument("--mode", choices=["exact", "modular"], default="modular")
    p.add_argument("--trials", type=int, default=3)
    p.add_argument("--prime", type=int, default=DEFAULT_PRIME)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", metavar="PATH", help="also write the reports to PATH as JSON lines")
    p.add_argument("--summary", action="store_true", help="print a table instead of JSON lines")
    p.add_argument("--jobs", type=int, default=1, help="run (check, l) pairs in parallel")
    p.add_argument("--fixtures-dir", help="fixture directory (default: ./fixtures)")
    p.add_argument("command", nargs="*", help="'fixtures verify' or 'fixtures regenerate'")
    p.add_argument("--yes", action="store_true", help="confirm 'fixtures regenerate'")
    return p


def _fixtures(args, out) -> int:
    from . import fixtures

    action = args.command[1] if len(args.command) > 1 else None
    if action not in ("verify", "regenerate") or len(args.command) > 2:
        print("usage: qpainleve fixtures verify|regenerate [--yes]", file=sys.stderr)
        return 2
    directory = args.fixtures_dir
    if action == "regenerate":
        if not args.yes:
            print("regenerate rewrites the fixture files; pass --yes to confirm", file=sys.stderr)
            return 2
        for path in fixtures.regenerate(directory, confirm=True):
            print(f"wrote {path}", file=out)
    try:
        results = fixtures.verify(directory)
    except FileNotFoundError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    for r in results:
        if args.summary:
            print(f"{'PASS' if r.passed else 'FAIL'} {r.path.name}", file=out)
            for line in r.diff:
                print(f"  {line}", file=out)
        else:
            print(json.dumps(r.to_json_obj(), sort_keys=True), file=out)
    return 0 if all(r.passed for r in results) else 1


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.list:
        for c in CHECKS.values():
            print(f"{c.name:34s} l={','.join(map(str, c.default_l)):14s} {c.doc}", file=out)
        return 0
    if args.command:
        if args.command[0] != "fixtures":
            parser.print_usage(sys.stderr)
            return 2
        return _fixtures(args, out)
    if not args.check:
        parser.print_usage(sys.stderr)
        return 2
    names = [n.strip() for n in args.check.split(",") if n.strip()]
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        print(f"unknown check(s): {', '.join(unknown)}", file=sys.stderr)
        return 2
    if args.h_order < 1 or args.eps_order < 0 or args.trials < 1:
        print("orders and trials must be positive", file=sys.stderr)
        return 2
    try:
        ls = parse_l(args.l)
        plan(names, ls)
    except ValueError as exc:
        print(str(exc), file=sys.stderr)
        return 2
    o = Options(args.h_order, args.eps_order, args.mode, args.trials, args.prime, args.seed)
    reports = run(names, ls, o, args.jobs)
    lines = [_report_line(r) for r in reports]
    if args.summary:
        print(_summary(reports), file=out)
    else:
        for line in lines:
            print(line, file=out)
    if args.json:
        with open(args.json, "w") as fh:
            fh.write("\n".join(lines) + "\n")
    return 0 if all(r.status != "fail" for r in reports) else 1


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
