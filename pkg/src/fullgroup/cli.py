"""Command-line front end.

Exit codes: 0 success, 1 domain error (a certificate is printed), 2 parse error.
Every subcommand prints a short human-readable report; ``--json`` prints the
canonical serialized object instead and ``--output`` also writes it to a file.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from . import cylinder
from .census import census, conjugate_tuples, densify, en_surrogate_check, psi_embed
from .cylinder import CylinderSet, Lambda, canonicalize, fmt_q, kraft, mu, parse_q
from .equidecompose import (
    equidecompose_onto, pre_three_cycle, pre_three_cycle_violations, prec, three_cycle,
)
from .errors import DomainError
from .l0 import FiniteGroupSpec, StepFn, orbit_member, phi_embed
from .maps import (
    IDENTITY, SWAP, LeafPerm, TableMap, compose, du, odometer, rn_cocycle, support,
    to_leaf_perm,
)


class ParseError(Exception):
    pass


# -- argument parsing helpers ---------------------------------------------------

def _q(text: str) -> Fraction:
    try:
        return parse_q(text)
    except (ValueError, ZeroDivisionError) as e:
        raise argparse.ArgumentTypeError(f"not a rational p/q: {text!r}") from e


def _lam(text: str) -> Fraction:
    try:
        return Lambda(_q(text))
    except ValueError as e:
        raise argparse.ArgumentTypeError(str(e)) from e


def _load_json(spec: str):
    if spec.lstrip().startswith(("{", "[")):
        return json.loads(spec)
    return json.loads(Path(spec).read_text())


def load_map(spec: str) -> TableMap:
    """A table map from ``id``, ``swap``, ``odometer:D``, inline JSON or a file."""
    try:
        if spec == "id":
            return IDENTITY
        if spec == "swap":
            return SWAP
        if spec.startswith("odometer:"):
            return odometer(int(spec.split(":", 1)[1])).table
        data = _load_json(spec)
        if "level" in data and "perm" in data:
            from .maps import from_leaf_perm
            return from_leaf_perm(LeafPerm(data["level"], tuple(data["perm"])))
        return TableMap.from_json(data)
    except DomainError:
        raise
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise ParseError(f"cannot read table map {spec!r}: {e}") from e


def load_set(spec: str) -> CylinderSet:
    """Comma-separated words; ``X`` is the whole space, ``empty`` the empty set."""
    try:
        if spec.lstrip().startswith("["):
            return canonicalize(json.loads(spec))
        if spec == "empty":
            return canonicalize([])
        return canonicalize("" if w == "X" else w for w in spec.split(","))
    except ValueError as e:
        raise ParseError(f"cannot read cylinder set {spec!r}: {e}") from e


def load_tuple(specs, level):
    maps = [load_map(s) for s in specs]
    if level is None:
        level = max(m.depth for m in maps)
    return [to_leaf_perm(m, level) for m in maps]


def load_stepfn(spec: str) -> StepFn:
    try:
        return StepFn.from_json(_load_json(spec))
    except (OSError, ValueError, KeyError, TypeError) as e:
        raise ParseError(f"cannot read step function {spec!r}: {e}") from e


def _perm_list(text: str):
    try:
        return [tuple(int(x) for x in part.split(",")) for part in text.split(";") if part]
    except ValueError as e:
        raise ParseError(f"cannot read permutations {text!r}") from e


# -- subcommands ----------------------------------------------------------------

def cmd_measure(a):
    A = load_set(a.set)
    m, k = mu(A, a.lam), kraft(A)
    return {"set": A.to_json(), "mu": fmt_q(m), "kraft": fmt_q(k)}, \
        f"mu_{fmt_q(a.lam)} = {fmt_q(m)}\nkraft = {fmt_q(k)}"


def cmd_compose(a):
    h = compose(load_map(a.left), load_map(a.right))
    return h.to_json(), _table_text(h)


def cmd_du(a):
    d = du(load_map(a.left), load_map(a.right), a.lam)
    return fmt_q(d), fmt_q(d)


def cmd_cocycle(a):
    vals = rn_cocycle(load_map(a.map), a.lam)
    return [[u, fmt_q(v)] for u, v in vals], "\n".join(f"{u or 'ε':>12}  {fmt_q(v)}" for u, v in vals)


def cmd_support(a):
    s = support(load_map(a.map))
    return s.to_json(), f"support = {s.to_json()}  mu = {fmt_q(mu(s, a.lam))}"


def cmd_odometer(a):
    t = odometer(a.depth)
    text = _table_text(t.table) + f"\ndefect mass = {fmt_q(mu(t.defect_dom, a.lam))}"
    return t.to_json(), text


def cmd_census(a):
    c = census(load_tuple(a.tuple, a.level), a.lam)
    rows = [f"{e['type']:>20}  count={e['count']:<4} mass={e['mass']}" for e in c.to_json()]
    return c.to_json(), "\n".join(rows)


def cmd_en_check(a):
    ok, missing = en_surrogate_check(load_tuple(a.tuple, a.level), a.s, a.N)
    text = "pass" if ok else "missing: " + ", ".join(f"{k} (have {v})" for k, v in missing.items())
    return {"ok": ok, "missing": missing}, text


def cmd_conjugate(a):
    S = load_tuple(a.source, a.level)
    T = load_tuple(a.target, S[0].level)
    C, rep = conjugate_tuples(S, T, a.lam, a.epsilon)
    out = {"map": C.to_json(), "exact": rep["exact"], "residual": fmt_q(rep["residual"]),
           "uncovered_dom": fmt_q(rep["uncovered_dom"]), "types": rep["types"]}
    return out, _table_text(C) + f"\nresidual defect = {fmt_q(rep['residual'])}"


def cmd_equidecompose(a):
    A, B = load_set(a.A), load_set(a.B)
    eps = a.epsilon
    if eps is None:
        # epsilon only matters for an approximate decomposition
        if kraft(A) != kraft(B) and a.lam != Fraction(1, 2):
            raise ParseError("--epsilon is required when the kraft sums differ")
        eps = Fraction(1)
    res = equidecompose_onto(A, B, a.lam, eps)
    text = (f"pairs = {len(res.map)}  level = {res.level}  rounds = {res.rounds}\n"
            f"uncovered dom mass = {fmt_q(mu(res.uncovered_dom, a.lam))}\n"
            f"uncovered rng mass = {fmt_q(mu(res.uncovered_rng, a.lam))}")
    return res.to_json(), text


def cmd_prec(a):
    ok, obj = prec(load_set(a.A), load_set(a.B))
    if not ok:
        raise DomainError("A does not embed into B", obj)
    return obj.to_json(), _table_text(obj)


def cmd_three_cycle(a):
    if a.phi and a.psi:
        phi, psi = load_map(a.phi), load_map(a.psi)
    else:
        phi, psi = pre_three_cycle(a.lam)
    bad = pre_three_cycle_violations(phi, psi, a.lam)
    if bad:
        raise DomainError("not a pre-3-cycle", bad)
    C = three_cycle(phi, psi)
    return C.to_json(), _table_text(C) + f"\nmu(support) = {fmt_q(mu(support(C), a.lam))}"


def cmd_psi(a):
    p = psi_embed(_perm_list(a.sigma)[0])
    return p.to_json(), f"level {p.level}: {list(p.perm)}"


def cmd_phi(a):
    f = load_map(a.map)
    level = f.depth if a.level is None else a.level
    s = phi_embed(to_leaf_perm(f, level))
    return s.to_json(), "\n".join(f"{w or 'ε':>12}  {list(v)}" for w, v in s.pieces)


def cmd_densify(a):
    out = densify(load_tuple(a.tuple, a.level), a.lam, a.epsilon, a.s, a.N)
    c = census(out, a.lam)
    rows = [f"{e['type']:>20}  count={e['count']:<4} mass={e['mass']}" for e in c.to_json()]
    return [p.to_json() for p in out], f"level {out[0].level}\n" + "\n".join(rows)


def cmd_orbit_member(a):
    f = load_stepfn(a.fn)
    if a.gens:
        spec = FiniteGroupSpec.generated(_perm_list(a.gens), a.degree)
    else:
        spec = FiniteGroupSpec.symmetric(a.degree)
    ok, w = orbit_member(f, spec, a.y0)
    if not ok:
        raise DomainError(f"value {w[1]!r} on piece {w[0]!r} is outside the orbit", list(w))
    return w.to_json(), "member\n" + "\n".join(f"{u or 'ε':>12}  {list(g)}" for u, g in w.pieces)


def cmd_selftest(a):
    from .acceptance import run_all
    results = run_all(seed=a.seed)
    lines = [r.line() for r in results]
    ok = all(r.passed for r in results)
    payload = [r.to_json() for r in results]
    if not ok:
        print("\n".join(lines))
        raise DomainError("acceptance criteria failed", [r.name for r in results if not r.passed])
    return payload, "\n".join(lines)


def _table_text(f: TableMap) -> str:
    return "\n".join(f"{u or 'ε':>12} -> {v or 'ε'}" for u, v in f.pairs) or "(empty table)"


# -- parser ------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--lambda", dest="lam", type=_lam, default=Fraction(1, 2))
    common.add_argument("--epsilon", type=_q, default=None)
    common.add_argument("--level", type=int, default=None)
    common.add_argument("--max-depth", type=int, default=None)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--json", action="store_true", help="print only the serialized object")
    common.add_argument("--output", type=Path, help="also write the serialized object here")

    p = argparse.ArgumentParser(prog="fullgroup", description=__doc__.splitlines()[0])
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, *args):
        sp = sub.add_parser(name, parents=[common])
        for flags, kw in args:
            sp.add_argument(*flags, **kw)
        sp.set_defaults(handler=fn)
        return sp

    req = {"required": True}
    add("measure", cmd_measure, (("--set",), req))
    add("compose", cmd_compose, (("--left",), req), (("--right",), req))
    add("du", cmd_du, (("--left",), req), (("--right",), req))
    add("cocycle", cmd_cocycle, (("--map",), req))
    add("support", cmd_support, (("--map",), req))
    add("odometer", cmd_odometer, (("--depth",), {"type": int, "required": True}))
    add("census", cmd_census, (("--tuple",), {"nargs": "+", "required": True}))
    add("en-check", cmd_en_check, (("--tuple",), {"nargs": "+", "required": True}),
        (("--s",), {"type": int, "default": 2}), (("--N",), {"type": int, "default": 1}))
    add("conjugate", cmd_conjugate, (("--source",), {"nargs": "+", "required": True}),
        (("--target",), {"nargs": "+", "required": True}))
    add("equidecompose", cmd_equidecompose, (("--A",), req), (("--B",), req))
    add("prec", cmd_prec, (("--A",), req), (("--B",), req))
    add("three-cycle", cmd_three_cycle, (("--phi",), {}), (("--psi",), {}))
    add("psi", cmd_psi, (("--sigma",), req))
    add("phi", cmd_phi, (("--map",), req))
    add("densify", cmd_densify, (("--tuple",), {"nargs": "+", "required": True}),
        (("--s",), {"type": int, "default": 2}), (("--N",), {"type": int, "default": 1}))
    add("orbit-member", cmd_orbit_member, (("--fn",), req),
        (("--degree",), {"type": int, "required": True}),
        (("--gens",), {}), (("--y0",), {"type": int, "default": 0}))
    add("selftest", cmd_selftest)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    depth = cylinder.MAX_DEPTH if args.max_depth is None else args.max_depth
    try:
        with cylinder.max_depth(depth):
            payload, text = args.handler(args)
    except ParseError as e:
        print(f"parse error: {e}", file=sys.stderr)
        return 2
    except DomainError as e:
        print(f"error: {e}", file=sys.stderr)
        if e.certificate is not None:
            print(json.dumps(e.certificate, sort_keys=True, default=str), file=sys.stderr)
        return 1
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    serialized = json.dumps(payload, sort_keys=True)
    if args.output:
        args.output.write_text(serialized + "\n")
    print(serialized if args.json else text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
