"""Command line entry point: analyse weights, check structures, build and verify certificates.

Exit codes: 0 the property holds (or the build succeeded), 1 it fails and a
witness is printed, 2 bad input or a size cap was hit, 3 the construction is
infeasible for these inputs.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Sequence

from . import constructions as cons
from . import generic, numtheory, rank, templates
from .rank import delta, in_kalpha, is_closed, is_essential_minimal_pair, is_minimal_pair, is_strong
from .structures import FinStructure, sort_ids
from .weights import AlphaSpec, SignatureError, Weight, is_coherent, is_rational, parse_weight

DEFAULT_CAP = cons.RESULT_CAP

INFEASIBLE = (
    cons.BaseNotStrong, cons.EpsilonTooLarge, cons.NoIrrationalSymbol, cons.NotEssentialPair,
    cons.PhiMemberStrong, cons.NotCoherent, cons.BudgetInfeasible, cons.ConstructionInfeasible,
    generic.IncoherentAtomicMode, templates.BTooSmall, templates.BStarInfeasible,
    templates.CoveringInfeasible, numtheory.NoSolution, numtheory.NotCoherentIrrational, rank.NotInKalpha,
)


class InputError(Exception):
    pass


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=1) + "\n"


def _read_json(text_or_path: str):
    if text_or_path.lstrip()[:1] in ("{", "["):
        return json.loads(text_or_path)
    try:
        return json.loads(Path(text_or_path).read_text())
    except OSError as exc:
        raise InputError(f"cannot read {text_or_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{text_or_path} is not JSON: {exc}") from exc


def _load_spec(args, fallback=None) -> AlphaSpec:
    if args.sig is None:
        if fallback is not None:
            return AlphaSpec.from_json(fallback)
        raise InputError("--sig is required")
    return AlphaSpec.from_json(_read_json(args.sig))


def _load_structure(path: str, spec: AlphaSpec, cap: int) -> FinStructure:
    obj = _read_json(path)
    if "result" in obj:
        obj = obj["result"]
    S = FinStructure.from_json(obj)
    S.check(spec)
    if len(S) > cap:
        raise InputError(f"{len(S)} vertices exceed the cap {cap}")
    return S


def _id_list(text: str | None) -> list[str]:
    if not text:
        return []
    return [t for t in text.split(",") if t]


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _report_json(r) -> dict:
    return {
        "holds": bool(r.holds),
        "value": None if r.value is None else Weight.of(r.value).to_json(),
        "witness": None if r.witness is None else sort_ids(r.witness),
        "note": r.note,
    }


def _is_weight(v) -> bool:
    return isinstance(v, dict) and bool(v) and (set(v) <= {"a", "b", "d"} or set(v) == {"num", "den"})


def _as_text(obj, indent: str = "") -> str:
    lines = []
    for k in sorted(obj, key=lambda x: (len(x), x) if x.isdigit() else (0, x)):
        v = obj[k]
        if _is_weight(v):
            lines.append(f"{indent}{k}: {Weight.from_json(v)}")
        elif isinstance(v, dict) and v:
            lines.append(f"{indent}{k}:")
            lines.append(_as_text(v, indent + "  ").rstrip("\n"))
        else:
            lines.append(f"{indent}{k}: {v}")
    return "\n".join(lines) + "\n"


# -- alpha ------------------------------------------------------------------------

def analyze(spec: AlphaSpec) -> dict:
    rat, c = is_rational(spec)
    coh, wit = is_coherent(spec)
    b = numtheory.coarse_bounds(spec)
    out = {
        "signature": spec.to_json(),
        "rational": rat,
        "c": c,
        "coherent": coh,
        "coherence_witness": wit,
        "m_pt": b.m_pt,
        "m_suff": b.m_suff,
        "granularity": {str(m): numtheory.granularity(spec, m).to_json() for m in range(2, 11)},
    }
    if coh and not rat:
        out["beta_lb"] = numtheory.beta_lower_bound(spec).to_json()
    return out


def cmd_alpha(args) -> int:
    spec = _load_spec(args)
    rep = analyze(spec)
    _emit(args, _as_text(rep) if args.format == "text" else dumps(rep))
    return 0


# -- check ------------------------------------------------------------------------

def _formula(args, obj, spec) -> int:
    """Extension formula of a task B at a tuple of the structure (a fragment's top or a plain structure)."""
    M = generic.Fragment.from_json(obj).top if "chain" in obj else _load_structure(args.file, spec, args.cap)
    if not args.task:
        raise InputError("check formula needs --task")
    B = FinStructure.from_json(_read_json(args.task))
    B.check(spec)
    at = {}
    for item in _id_list(args.at):
        a, _, v = item.partition("=")
        if not v:
            raise InputError(f"--at entries look like a=v, got {item!r}")
        at[a] = v
    holds = generic.eval_extension_formula(spec, M, at, B)
    rep = {"check": "formula", "holds": holds, "at": at,
           "label": "true-in-fragment" if holds else "false-in-fragment / unknown-in-generic"}
    _emit(args, _as_text(rep) if args.format == "text" else dumps(rep))
    return 0 if holds else 1


def cmd_check(args) -> int:
    obj = _read_json(args.file)
    spec = _load_spec(args, obj.get("signature") if isinstance(obj, dict) else None)
    if args.kind == "formula":
        return _formula(args, obj, spec)
    S = _load_structure(args.file, spec, args.cap)
    X = _id_list(args.set)
    if not X and isinstance(obj, dict) and "base" in obj:
        X = list(obj["base"])
    if args.kind != "kalpha" and not set(X) <= set(S.universe):
        raise InputError("--set names vertices outside the structure")
    if args.kind == "kalpha":
        r = in_kalpha(spec, S)
    elif args.kind == "strong":
        r = is_strong(spec, S, X)
    elif args.kind == "closed":
        r = is_closed(spec, S, X, cap=min(args.cap, 14))
    elif args.kind == "minpair":
        r = is_minimal_pair(spec, S, X)
    else:
        r = is_essential_minimal_pair(spec, S, X)
    rep = {"check": args.kind, "set": sort_ids(X), **_report_json(r)}
    _emit(args, _as_text(rep) if args.format == "text" else dumps(rep))
    return 0 if r.holds else 1


# -- build ------------------------------------------------------------------------

def _base(args, spec) -> FinStructure:
    if args.base:
        return _load_structure(args.base, spec, args.cap)
    return FinStructure([f"a{i}" for i in range(1, args.points + 1)])


def _write_cert(args, cert: cons.Certificate) -> None:
    data = dumps(cert.to_json())
    if args.format == "dot":
        dot = cert.result.to_dot(cert.construction)
        if args.out:
            Path(args.out).write_text(data)
            Path(args.out).with_suffix(".dot").write_text(dot)
        else:
            sys.stdout.write(dot)
    elif args.format == "text":
        rep = {"construction": cert.construction, "vertices": len(cert.result),
               "relations": cert.result.count(), "rank": delta(cert.spec, cert.result).to_json(),
               "claims": len(cert.claims), "digest": cert.digest()}
        if args.out:
            Path(args.out).write_text(data)
        sys.stdout.write(_as_text(rep))
    else:
        _emit(args, data)


def cmd_build(args) -> int:
    spec = _load_spec(args)
    if args.kind == "fragment":
        resume = None
        if args.resume:
            resume = generic.Fragment.from_json(_read_json(args.resume))
        frag = generic.build_fragment(spec, args.steps, size_cap=args.size_cap, mode=args.mode,
                                      seed=args.seed, resume=resume)
        if args.format == "dot":
            _emit(args, frag.top.to_dot("fragment"))
        else:
            _emit(args, frag.dumps() + "\n")
        return 0
    if args.kind == "emp":
        eps = parse_weight(args.epsilon) if args.epsilon else None
        cert = cons.essential_minimal_pair(spec, _base(args, spec), epsilon=eps, variant_seed=args.seed,
                                           strict_epsilon=args.strict)
    elif args.kind == "zero":
        cert = cons.zero_extension(spec, _base(args, spec), variant_seed=args.seed)
    elif args.kind == "omit":
        if not args.base:
            raise InputError("build omit needs --base")
        B = _base(args, spec)
        phi = [_load_structure(p, spec, args.cap) for p in args.phi]
        cert = cons.omit_extension(spec, B, _id_list(args.over), phi, m=args.m, variant_seed=args.seed)
    else:
        cert = cons.tent(spec, args.k, parse_weight(args.budget), variant_seed=args.seed)
    if len(cert.result) > args.verify_cap:
        raise InputError(f"result has {len(cert.result)} vertices, above --verify-cap {args.verify_cap}")
    _write_cert(args, cert)
    return 0


# -- verify -----------------------------------------------------------------------

def cmd_verify(args) -> int:
    obj = _read_json(args.file)
    if "chain" in obj:
        frag = generic.Fragment.from_json(obj)
        if len(frag.top) > args.verify_cap:
            raise InputError(f"fragment has {len(frag.top)} vertices, above --verify-cap {args.verify_cap}")
        checks = generic.check_fragment(frag)
        ok = all(checks.values())
        rep = {"fragment": True, "ok": ok, "checks": checks}
    else:
        if len(obj.get("result", {}).get("universe", [])) > args.verify_cap:
            raise InputError(f"certificate result is above --verify-cap {args.verify_cap}")
        ok, results = cons.verify(obj)
        failed = [r for r in results if not r.ok]
        rep = {"ok": ok, "claims": len(results)}
        if failed:
            rep["first_failure"] = {"claim": failed[0].claim, "detail": failed[0].detail}
    _emit(args, _as_text(rep) if args.format == "text" else dumps(rep))
    return 0 if ok else 1


# -- parser -----------------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--sig", help="signature JSON file (or inline JSON)")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=DEFAULT_CAP, help="largest input structure accepted")
    p.add_argument("--verify-cap", type=int, default=DEFAULT_CAP, help="largest result replayed by verify")
    p.add_argument("--out", help="output file (default stdout)")
    p.add_argument("--format", choices=("json", "dot", "text"), default="json")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="bshyper", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("alpha", help="number theory of a weight signature")
    pa.add_argument("action", choices=("analyze",))
    _common(pa)
    pa.set_defaults(run=cmd_alpha)

    pc = sub.add_parser("check", help="check a property of a structure")
    pc.add_argument("kind", choices=("kalpha", "strong", "closed", "minpair", "emp", "formula"))
    pc.add_argument("file", help="structure, certificate or fragment JSON")
    pc.add_argument("--set", help="comma separated vertex ids (certificates default to their base)")
    pc.add_argument("--task", help="formula: structure B of the extension task")
    pc.add_argument("--at", help="formula: where A sits, as a=v,b=w")
    _common(pc)
    pc.set_defaults(run=cmd_check)

    pb = sub.add_parser("build", help="build a certificate or a fragment")
    pb.add_argument("kind", choices=("emp", "zero", "omit", "fragment", "tent"))
    pb.add_argument("--base", help="base structure JSON")
    pb.add_argument("--points", type=int, default=1, help="relation-free base size when --base is absent")
    pb.add_argument("--epsilon", help="drop bound for irrational weights, e.g. 1/10")
    pb.add_argument("--strict", action="store_true", help="fail instead of clamping epsilon")
    pb.add_argument("--over", help="omit: the strong subset A of the base")
    pb.add_argument("--phi", action="append", default=[], help="omit: a structure over the base to exclude")
    pb.add_argument("-m", type=int, default=2, help="omit: granularity index")
    pb.add_argument("-k", type=int, default=3, help="tent: number of base points")
    pb.add_argument("--budget", default="1/2", help="tent: bound on each pair's drop")
    pb.add_argument("--steps", type=int, default=10, help="fragment: number of amalgamations")
    pb.add_argument("--size-cap", type=int, default=5, help="fragment: largest task size")
    pb.add_argument("--mode", choices=("generic", "atomic"), default="generic")
    pb.add_argument("--resume", help="fragment: continue a saved fragment")
    _common(pb)
    pb.set_defaults(run=cmd_build)

    pv = sub.add_parser("verify", help="replay the claims of a certificate or fragment")
    pv.add_argument("file")
    _common(pv)
    pv.set_defaults(run=cmd_verify)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = make_parser().parse_args(argv)
    if args.cap < 1 or args.verify_cap < 1:
        print("error: caps must be at least 1", file=sys.stderr)
        return 2
    try:
        return args.run(args)
    except INFEASIBLE as exc:
        sys.stderr.write(dumps({"error": type(exc).__name__, "reason": str(exc)}))
        return 3
    except (InputError, SignatureError, rank.TooLarge, KeyError, TypeError, ValueError,
            json.JSONDecodeError) as exc:
        sys.stderr.write(dumps({"error": type(exc).__name__, "reason": str(exc)}))
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
