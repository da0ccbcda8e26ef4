"""Command-line interface.

Exit codes: 0 success, 2 precondition violation, 3 verification failure,
4 unavailable resource (for example no real Hadamard matrix of the order).
"""

from __future__ import annotations

import argparse
import hashlib
import itertools
import json
import sys
import tempfile
from fractions import Fraction
from pathlib import Path

from . import __version__
from .block_designs import t_bound, t_oracle
from .constructions import QefParams, construct_qef, construct_se_s, plan, qef_pipeline
from .errors import ApmubError, PreconditionError, Unavailable, VerificationError
from .hadamard import UnitaryScaffold, dft, real_hadamard, scaffold_by_name, verify_scaffold
from .latin_squares import mols_for_order
from .mub_builder import (
    MubCollection,
    SpectrumReport,
    analyze,
    build_bases,
    verify_weighing,
    weighing_from_bases,
    weighing_product,
)

EXIT_OK, EXIT_PRECONDITION, EXIT_VERIFY, EXIT_UNAVAILABLE = 0, 2, 3, 4


def dumps(obj) -> str:
    """Canonical JSON: sorted keys, no whitespace variation, trailing newline."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def _sig(x) -> str:
    if x is None:
        return "-"
    return f"{float(x):.4g}"


def _frac_str(x: Fraction | None) -> str:
    return "-" if x is None else str(x)


def _table(header: list[str], rows: list[list[str]]) -> str:
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h) for i, h in enumerate(header)]
    lines = ["  ".join(h.ljust(w) for h, w in zip(header, widths))]
    lines.append("  ".join("-" * w for w in widths))
    lines += ["  ".join(c.ljust(w) for c, w in zip(r, widths)) for r in rows]
    return "\n".join(lines)


def _load_json(path: str) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise PreconditionError(f"cannot read {path}: {exc}") from exc


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_plan(args) -> int:
    plans = plan(args.d)
    if args.json:
        print(dumps([p.to_json() for p in plans]), end="")
        return EXIT_OK
    rows = []
    for p in plans:
        notes = []
        if p.lower_bound:
            notes.append("MacNeish lower bound")
        if p.real_hadamard:
            notes.append("real")
        rows.append(
            [p.label, str(p.k), str(p.s), str(p.r), _sig(p.beta), _frac_str(p.beta_sq),
             _frac_str(p.epsilon), p.classification, ", ".join(notes)]
        )
    print(f"d = {args.d}: {len(plans)} plan(s)")
    print(_table(["plan", "k", "s", "r", "beta", "beta^2", "eps", "class", "notes"], rows))
    return EXIT_OK


def _scaffold(args, k: int) -> UnitaryScaffold:
    if args.hadamard == "file":
        if not args.hadamard_file:
            raise PreconditionError("--hadamard file needs --hadamard-file")
        sc = UnitaryScaffold.from_json(_load_json(args.hadamard_file), name=Path(args.hadamard_file).name)
        if sc.k != k:
            raise PreconditionError(f"scaffold order {sc.k} does not match block size {k}")
    else:
        sc = scaffold_by_name(args.hadamard, k)
    if not verify_scaffold(sc):
        raise VerificationError(f"scaffold {sc.name} fails the unitarity audit")
    return sc


def _report_rows(rep: SpectrumReport) -> list[list[str]]:
    delta = ", ".join(str(x) for x in rep.delta) if rep.delta is not None else ", ".join(
        f"sqrt({x})" for x in rep.delta_sq
    )
    t = rep.uniform_t
    nvals = sorted(set(rep.n_counts.values()))
    return [
        ["d", str(rep.d)],
        ["bases", str(rep.r)],
        ["k", str(rep.k)],
        ["classification", rep.classification],
        ["Delta", delta + (" (+ float values)" if rep.delta_float else "")],
        ["beta^2", _frac_str(rep.beta_sq)],
        ["beta", _sig(rep.beta)],
        ["epsilon", _frac_str(rep.epsilon)],
        ["t1, t2", "-" if t is None else f"{t[0]}, {t[1]}"],
        ["n1, n2", "; ".join(f"{a}, {b}" for a, b in nvals) or "-"],
        ["exact", str(rep.exact)],
        ["orthonormal", str(rep.orthonormal)],
        ["float check", str(rep.float_agrees)],
        ["lambda", _sig(rep.lambda_estimate)],
    ]


def _print_report(rep: SpectrumReport) -> None:
    print(_table(["quantity", "value"], _report_rows(rep)))
    for f in rep.failures[:10]:
        print(f"  ! {f}")


def _construct(args):
    if args.method == "qef":
        params = QefParams(args.q, args.e, args.f)
        if params.f == 0:
            design = construct_qef(params)
            extra = {"route": "row deletion", "classes": design.r}
        else:
            res = qef_pipeline(params, extra_search=args.search_extra)
            design = res.design
            extra = res.report()
        expected = ("MUB" if params.e == params.f == 0 else "APMUB") if params.admissible else None
        parameters = {"q": args.q, "e": args.e, "f": args.f, "search_extra": args.search_extra}
    else:
        mols = mols_for_order(args.s)
        if args.w is not None:
            if not 0 <= args.w <= mols.count:
                raise PreconditionError(f"--w must lie in 0..{mols.count} for s={args.s}")
            mols = mols.truncate(args.w)
        design = construct_se_s(args.s, args.e, mols)
        k = args.s - args.e
        beta_sq = Fraction(args.s, k)
        expected = "MUB" if args.e == 0 else ("APMUB" if beta_sq <= 4 else None)
        extra = {"mols": mols.count, "mols_note": mols.note}
        parameters = {"s": args.s, "e": args.e, "w": mols.count}
    return design, expected, extra, parameters


def cmd_construct(args) -> int:
    design, expected, extra, parameters = _construct(args)
    k = design.k
    scaffold = _scaffold(args, k)
    coll = build_bases(design, scaffold)
    coll = MubCollection(coll.d, coll.bases, {"method": args.method, **parameters, "scaffold": scaffold.name})
    rep = analyze(coll)
    parameters["hadamard"] = args.hadamard
    print(f"{args.method}: d = {design.d}, {design.r} bases of block size {k}, scaffold {scaffold.name}")
    _print_report(rep)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        texts = {
            "design.json": dumps(design.to_json()),
            "bases.json": dumps(coll.to_json(claim=expected)),
            "report.json": dumps(rep.to_json()),
        }
        for name, text in texts.items():
            (out / name).write_text(text)
        inputs = {}
        if args.hadamard == "file":
            inputs["hadamard"] = {"path": args.hadamard_file, "sha256": _sha256(Path(args.hadamard_file).read_text())}
        manifest = {
            "command": ["construct", args.method],
            "parameters": parameters,
            "inputs": inputs,
            "outputs": {n: {"path": n, "sha256": _sha256(t)} for n, t in sorted(texts.items())},
            "construction": extra,
            "result": {
                "classification": rep.classification,
                "beta_sq": None if rep.beta_sq is None else str(rep.beta_sq),
                "delta_sq": [str(x) for x in rep.delta_sq],
                "bases": rep.r,
                "d": rep.d,
            },
            "versions": {"apmub": __version__, "format": 1},
        }
        (out / "manifest.json").write_text(dumps(manifest))
        print(f"wrote {', '.join(sorted(texts))} and manifest.json to {out}")
    if expected is not None and rep.classification != expected:
        print(f"expected {expected}, measured {rep.classification}", file=sys.stderr)
        return EXIT_VERIFY
    return EXIT_OK


def cmd_replay(args) -> int:
    manifest = _load_json(args.manifest)
    p = manifest["parameters"]
    method = manifest["command"][1]
    argv = ["construct", method]
    if method == "qef":
        argv += ["--q", str(p["q"]), "--e", str(p["e"]), "--f", str(p["f"])]
        if p.get("search_extra"):
            argv.append("--search-extra")
    else:
        argv += ["--s", str(p["s"]), "--e", str(p["e"]), "--w", str(p["w"])]
    argv += ["--hadamard", p["hadamard"]]
    if p["hadamard"] == "file":
        argv += ["--hadamard-file", manifest["inputs"]["hadamard"]["path"]]
    with tempfile.TemporaryDirectory() as tmp:
        code = main(argv + ["--out", tmp])
        if code != EXIT_OK:
            return code
        fresh = _load_json(str(Path(tmp) / "manifest.json"))
    same = fresh["outputs"] == manifest["outputs"]
    print("replay reproduces all outputs" if same else "replay differs from the manifest")
    return EXIT_OK if same else EXIT_VERIFY


def cmd_verify(args) -> int:
    data = _load_json(args.file)
    coll = MubCollection.from_json(data)
    rep = analyze(coll)
    claim = args.expect or data.get("claim")
    if args.json:
        print(dumps(rep.to_json()), end="")
    else:
        _print_report(rep)
    ok = rep.classification == claim if claim else rep.classification in ("MUB", "APMUB")
    if not args.json:
        target = claim or "MUB or APMUB"
        print(f"claim {target}: {'holds' if ok else 'FAILS'}")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_weighing(args) -> int:
    coll = MubCollection.from_json(_load_json(args.file))
    ws = weighing_from_bases(coll)
    single = [verify_weighing(w) for w in ws]
    pairs = {(i, j): verify_weighing(weighing_product(ws[i], ws[j])) for i, j in itertools.combinations(range(len(ws)), 2)}
    real = all(x is None or x.is_zero() or x.rational() is not None for w in ws for row in w.entries for x in row)
    zero_free = all(x is not None for w in ws for row in w.entries for x in row)
    print(f"{len(ws)} weighing matrices of order {coll.d}" + (f", weight {ws[0].weight}" if ws else ""))
    if ws:
        print(f"  real: {real}; zero-free: {zero_free}")
        print(f"  W_i^dagger W_i = I for all i: {all(single)}")
        print(f"  pairwise products weighing of the same weight: {all(pairs.values())} ({len(pairs)} pairs)")
    if args.out:
        Path(args.out).write_text(dumps([w.to_json() for w in ws]))
    return EXIT_OK if all(single) and all(pairs.values()) else EXIT_VERIFY


def cmd_oracle(args) -> int:
    res = t_oracle(args.d, args.k, args.mu, args.budget)
    bound = t_bound(args.d, args.k, args.mu)
    status = "exact" if res.exact else f"lower bound (budget of {args.budget} nodes exhausted)"
    print(f"T({args.d},{args.k},{args.mu}) = {res.value} [{status}]; counting bound {bound}")
    if args.witness:
        for b in res.witness:
            print("  " + " ".join(map(str, b)))
    return EXIT_OK


def cmd_mols(args) -> int:
    m = mols_for_order(args.s)
    if args.json:
        print(dumps(m.to_json()), end="")
        return EXIT_OK
    ok = m.is_mutually_orthogonal()
    print(f"{m.count} mutually orthogonal Latin squares of order {args.s}" + (f" ({m.note})" if m.note else ""))
    print(f"  pairwise orthogonality verified: {ok}")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_hadamard(args) -> int:
    h = dft(args.k) if args.dft else real_hadamard(args.k)
    ok = verify_scaffold(h)
    if args.json:
        print(dumps(h.to_json()), end="")
    else:
        print(f"order {h.k} {h.kind} Hadamard matrix: {h.name}; H H^dagger = kI verified: {ok}")
    return EXIT_OK if ok else EXIT_VERIFY


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="apmub", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("plan", help="list admissible constructions for a dimension")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("construct", help="build a design and its bases")
    csub = p.add_subparsers(dest="method", required=True)
    for name in ("qef", "ses"):
        c = csub.add_parser(name, help="d=(q-e)(q+f) pipeline" if name == "qef" else "d=(s-e)s from MOLS(s)")
        if name == "qef":
            c.add_argument("--q", type=int, required=True)
            c.add_argument("--e", type=int, required=True)
            c.add_argument("--f", type=int, required=True)
            c.add_argument("--search-extra", action="store_true", help="best-effort search for surplus classes")
        else:
            c.add_argument("--s", type=int, required=True)
            c.add_argument("--e", type=int, required=True)
            c.add_argument("--w", type=int, default=None, help="use only the first w squares")
        c.add_argument("--hadamard", choices=["auto", "real", "dft", "file"], default="auto")
        c.add_argument("--hadamard-file", default=None)
        c.add_argument("--out", default=None, help="directory for design, bases, report and manifest")
        c.set_defaults(func=cmd_construct)

    p = sub.add_parser("replay", help="re-run a construct manifest and compare output digests")
    p.add_argument("manifest")
    p.set_defaults(func=cmd_replay)

    p = sub.add_parser("verify", help="audit a basis file")
    p.add_argument("file")
    p.add_argument("--expect", choices=["MUB", "APMUB", "AMUB", "fail"], default=None)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("weighing", help="derive and audit weighing matrices from a basis file")
    p.add_argument("file")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_weighing)

    p = sub.add_parser("oracle", help="exact maximum of k-subsets with pairwise intersection <= mu")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--mu", type=int, required=True)
    p.add_argument("--budget", type=int, default=2_000_000)
    p.add_argument("--witness", action="store_true")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("mols", help="constructive MOLS for an order")
    p.add_argument("--s", type=int, required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_mols)

    p = sub.add_parser("hadamard", help="Hadamard scaffold of an order")
    p.add_argument("--k", type=int, required=True)
    g = p.add_mutually_exclusive_group()
    g.add_argument("--real", action="store_true", default=True)
    g.add_argument("--dft", action="store_true")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_hadamard)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Unavailable as exc:
        print(f"unavailable: {exc}", file=sys.stderr)
        return EXIT_UNAVAILABLE
    except VerificationError as exc:
        print(f"verification failure: {exc}", file=sys.stderr)
        return EXIT_VERIFY
    except PreconditionError as exc:
        print(f"precondition violated: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except ApmubError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VERIFY


if __name__ == "__main__":
    sys.exit(main())
