"""``flatlift`` command line.

Exit codes: 0 success, 1 a mathematical check failed, 2 bad input.
Every report ends with a ``RESULT key=value ...`` line.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

import numpy as np

from . import fixtures as fx
from . import modcat as mc
from .census import run_census, summarize
from .crowns import connectedness_check
from .diagrams import check, stable_iso_report, verify_homotopism
from .errors import FlatliftError, InputError, InternalInconsistency, PreconditionViolated
from .fileio import parse_diagram, parse_poset, write_diagram_section, write_document, write_morphism_file, write_poset
from .flatness import flatness_check, mitchell_check, quasitree_check, suspended_crown
from .lifting import lift_diagram, lift_diagram_epi, lift_morphism, strict_lift_of_stable_morphism
from .modcat import RingParams
from .poset import Poset, antichain, chain, powerset, product
from . import random_instances as ri

OK, MATH_FAIL, INPUT_ERROR = 0, 1, 2


class UsageError(Exception):
    pass


def _b(x: bool) -> str:
    return "true" if x else "false"


def result(**kv) -> str:
    return "RESULT " + " ".join(f"{k}={_b(v) if isinstance(v, bool) else v}" for k, v in kv.items())


# ---------------------------------------------------------------------------
# poset generators


def _split_top(spec: str) -> list[str]:
    """Split on commas that are not inside brackets."""
    out, depth, cur = [], 0, ""
    for ch in spec:
        if ch == "," and depth == 0:
            out.append(cur)
            cur = ""
            continue
        depth += ch == "["
        depth -= ch == "]"
        cur += ch
    out.append(cur)
    return out


def generate(spec: str) -> Poset:
    """``chain:n | powerset:m | antichain:n | sc:n | product:[A],[B],...``."""
    kind, _, arg = spec.partition(":")
    try:
        if kind == "chain":
            return chain(int(arg))
        if kind == "powerset":
            return powerset(int(arg))
        if kind == "antichain":
            return antichain(int(arg))
        if kind == "sc":
            return suspended_crown(int(arg))
        if kind == "product":
            parts = [p.strip() for p in _split_top(arg) if p.strip()]
            return product(*[generate(p[1:-1] if p.startswith("[") else p) for p in parts])
    except ValueError:
        raise UsageError(f"bad generator {spec!r}") from None
    raise UsageError(f"unknown generator {spec!r}")


def _read(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None


def _load_poset(path: str | None, gen: str | None) -> Poset:
    if gen:
        return generate(gen)
    if path is None:
        raise UsageError("need a poset file or --gen")
    return parse_poset(_read(path))


# ---------------------------------------------------------------------------
# poset


POSET_SUBS = ("info", "crown", "flat", "quasitree", "mitchell")


def cmd_poset(args, out) -> int:
    rest = list(args.args)
    path = None if args.gen else (rest.pop(0) if rest else None)
    if not rest or rest[0] not in POSET_SUBS:
        raise UsageError(f"subcommand must be one of {', '.join(POSET_SUBS)}")
    sub = rest.pop(0)
    P = _load_poset(path, args.gen)
    if args.out:
        Path(args.out).write_text(write_poset(P))

    if sub == "info":
        print(f"elements: {len(P)}", file=out)
        print(f"covers: {len(P.covers())}", file=out)
        print(f"maxima: {' '.join(P.maxima())}", file=out)
        print(f"minima: {' '.join(P.minima())}", file=out)
        print(result(n=len(P), relations=len(P.strict_relations()), covers=len(P.covers())), file=out)
        return OK
    if sub == "crown":
        mode = rest[0] if rest else "ind"
        if mode not in ("ind", "pro"):
            raise UsageError("crown mode must be ind or pro")
        C = P.ind_crown() if mode == "ind" else P.pro_crown()
        rep = connectedness_check(C)
        print(f"{mode}-crown: {' '.join(C.elements)}", file=out)
        for a, b in C.strict_relations():
            print(f"  {a} < {b}", file=out)
        if rep.cycle_witness is not None:
            print(f"cycle witness: {rep.cycle_witness}", file=out)
        print(result(mode=mode, elements=len(C), relations=len(C.strict_relations()),
                     kernel_dim=rep.kernel_dim, one_connected=rep.one_connected), file=out)
        return OK if rep.one_connected else MATH_FAIL
    if sub == "flat":
        rep = flatness_check(P)
        for d, mode, r in rep.failures:
            where = "below" if mode == "ind" else "above"
            print(f"{mode}-crown {where} {d}: kernel dimension {r.kernel_dim}", file=out)
        failing = ",".join(f"{m}@{d}" for d, m, _ in rep.failures) or "none"
        print(result(ind_flat=rep.ind_flat, pro_flat=rep.pro_flat, failing=failing), file=out)
        return OK if rep.flat else MATH_FAIL
    if sub == "quasitree":
        q = quasitree_check(P)
        print(result(quasitree=q), file=out)
        return OK if q else MATH_FAIL
    m = mitchell_check(P)
    if m.witness is not None:
        n, emb, cond = m.witness
        print(f"witness: SC_{n} via condition ({cond}), image {sorted(emb.image())}", file=out)
    print(result(dimension_le_2=m.dimension_le_2, sc2_embeddings=m.sc2_embeddings,
                 sc2_without_mediator=m.sc2_without_mediator), file=out)
    return OK if m.dimension_le_2 else MATH_FAIL


# ---------------------------------------------------------------------------
# lift


def _report(out, name: str, ok: bool) -> bool:
    print(f"  {'ok  ' if ok else 'FAIL'} {name}", file=out)
    return ok


def _pick_section(doc, wanted: str) -> str:
    if wanted in doc.diagrams:
        return wanted
    if len(doc.diagrams) == 1:
        return next(iter(doc.diagrams))
    raise UsageError(f"diagram file has no section {wanted!r}")


def _random_text(P: Poset, mode: str, seed: int, ring: RingParams) -> str:
    rng = np.random.default_rng(seed)
    if mode == "diagram":
        return "\n".join([f"ring {ring.p} {ring.k}"] + write_diagram_section(ri.random_prediagram(P, ring, rng))) + "\n"
    X, Y, fhat = ri.random_morphism_instance(P, ring, rng)
    return write_morphism_file(X, Y, fhat)


def cmd_lift(args, out) -> int:
    P = _load_poset(args.poset, args.gen)
    if args.diagram is not None:
        text = _read(args.diagram)
    elif args.seed is not None:
        text = _random_text(P, args.mode, args.seed, RingParams(*args.ring))
    else:
        raise UsageError("need a diagram file or --seed")
    doc = parse_diagram(text)

    if args.mode == "diagram":
        X = doc.prediagram(P, _pick_section(doc, "main"))
        res = (lift_diagram_epi if args.epi else lift_diagram)(X, verify=False)
        Y = res.lifted
        for step in res.trace:
            print(f"step {step.step} at {step.element} (+{step.added_rank} free)", file=out)
        print("verifiers:", file=out)
        ok = _report(out, "strictly_commutative", check(Y, "strictly_commutative").ok)
        if args.epi:
            ok &= _report(out, "purely_epic", all(mc.is_epi(f) for f in Y.arrows.values()))
        else:
            ok &= _report(out, "purely_monic", check(Y, "purely_monic").ok)
        ok &= _report(out, "stable_iso", stable_iso_report(res.iso).ok)
        if args.out:
            Path(args.out).write_text(write_document(X.ring, {"lifted": Y}, {"iso": res.iso}))
        print(result(mode="diagram", verified=ok, steps=len(res.trace), size=Y.size()), file=out)
        return OK if ok else MATH_FAIL

    X = doc.prediagram(P, "source")
    Y = doc.prediagram(P, "target")
    fhat = doc.components("f", X, Y)
    if args.mode == "strict-full-test":
        g = strict_lift_of_stable_morphism(X, Y, fhat)
        if g is None:
            print("no strictly natural representative exists", file=out)
            print(result(strict_lift="none"), file=out)
            return MATH_FAIL
        if args.out:
            Path(args.out).write_text(write_document(X.ring, {"source": X, "target": Y}, {"g": g}))
        print(result(strict_lift="found"), file=out)
        return OK

    res = lift_morphism(X, Y, fhat, verify=False)
    Xp = res.replaced
    print("verifiers:", file=out)
    ok = _report(out, "replaced_strictly_commutative", check(Xp, "strictly_commutative").ok)
    ok &= _report(out, "replaced_purely_monic", check(Xp, "purely_monic").ok)
    ok &= _report(out, "g_prime_homotopism", verify_homotopism(res.g_prime))
    ok &= _report(out, "g_strictly_natural", res.g.is_strictly_natural())
    ok &= _report(out, "certificate", all(
        mc.is_stably_zero(mc.compose(res.g_prime.components[a], fhat[a]) - res.g.components[a]) is not None
        for a in P))
    if args.out:
        Path(args.out).write_text(write_document(X.ring, {"replaced": Xp}, {"g_prime": res.g_prime, "g": res.g}))
    print(result(mode="morphism", verified=ok, size=Xp.size()), file=out)
    return OK if ok else MATH_FAIL


# ---------------------------------------------------------------------------
# census


FILTERS = ("crown", "one_connected", "ind_flat", "pro_flat", "quasitree", "mitchell_dim_le_2", "qumit0_candidate")


def cmd_census(args, out) -> int:
    if not 1 <= args.max_n <= 7:
        raise UsageError("max_n must be between 1 and 7")
    records = run_census(args.max_n, jobs=args.jobs)
    cols = ("n", "classes", "crowns", "one_connected_crowns", "ind_flat", "pro_flat", "flat",
            "quasitrees", "mitchell_le_2", "qumit0_candidates", "quasitree_not_flat")
    print(" ".join(f"{c:>10}" if i else f"{c:>3}" for i, c in enumerate(cols)), file=out)
    summary = summarize(records)
    for s in summary:
        print(" ".join(f"{getattr(s, c):>10}" if i else f"{getattr(s, c):>3}" for i, c in enumerate(cols)),
              file=out)
    if args.where:
        sel = [r for r in records if all(bool(getattr(r, f)) for f in args.where)]
        print(f"records with {' & '.join(args.where)}: {len(sel)}", file=out)
        for r in sel:
            print(f"  n={r.n} code={r.code}", file=out)
    flagged = [r for r in records if r.qumit0_candidate]
    outdir = Path(args.out) if args.out else None
    for i, r in enumerate(flagged):
        text = write_poset(r.poset())
        if outdir is not None:
            outdir.mkdir(parents=True, exist_ok=True)
            (outdir / f"candidate_n{r.n}_{i}.poset").write_text(text)
        else:
            print(f"# candidate n={r.n} code={r.code}", file=out)
            print(text, end="", file=out)
    violations = sum(s.quasitree_not_flat for s in summary)
    print(result(max_n=args.max_n, classes=len(records), candidates=len(flagged),
                 quasitree_not_flat=violations), file=out)
    return OK if violations == 0 else MATH_FAIL


# ---------------------------------------------------------------------------
# examples


def export_fixture_files(outdir: Path) -> list[Path]:
    outdir.mkdir(parents=True, exist_ok=True)
    X = fx.zero_chain_prediagram()
    Xm, Ym, fhat = fx.dense_not_full_instance()
    files = {
        "zero_chain.poset": write_poset(X.shape),
        "zero_chain.diagram": "\n".join([f"ring {X.ring.p} {X.ring.k}"] + write_diagram_section(X)) + "\n",
        "dense_not_full.poset": write_poset(Xm.shape),
        "dense_not_full.morphism": write_morphism_file(Xm, Ym, fhat),
    }
    paths = []
    for name, text in files.items():
        (outdir / name).write_text(text)
        paths.append(outdir / name)
    return paths


def cmd_examples(args, out) -> int:
    if args.write:
        for p in export_fixture_files(Path(args.write)):
            print(f"wrote {p}", file=out)
    todo = list(fx.FIXTURES)
    if args.tamper:
        try:
            todo = [fx.tampered(args.tamper)]
        except KeyError as exc:
            raise UsageError(f"cannot tamper with {exc}") from None
    results = fx.run_all(todo)
    for r in results:
        line = f"{'PASS' if r.passed else 'FAIL'} {r.name}"
        if r.failed:
            line += f" invariant={','.join(r.failed)}"
        if r.error:
            line += f" error={r.error}"
        print(line, file=out)
    passed = sum(r.passed for r in results)
    print(result(fixtures=len(results), passed=passed, failed=len(results) - passed), file=out)
    return OK if passed == len(results) else MATH_FAIL


# ---------------------------------------------------------------------------


def _ring(text: str) -> tuple[int, int]:
    try:
        p, k = (int(x) for x in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError("ring must be p,k") from None
    return p, k


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="flatlift", description="Flat posets, stable diagrams and their strict lifts.")
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("poset", help="order-theoretic checks")
    p.add_argument("args", nargs="+", metavar="[FILE] SUB [MODE]",
                   help=f"SUB in {{{','.join(POSET_SUBS)}}}; crown takes ind|pro")
    p.add_argument("--gen", help="chain:n | powerset:m | antichain:n | sc:n | product:[A],[B]")
    p.add_argument("--out", help="also write the poset file here")
    p.set_defaults(func=cmd_poset)

    q = sub.add_parser("lift", help="lift a prediagram or a stable morphism")
    q.add_argument("poset", nargs="?")
    q.add_argument("diagram", nargs="?")
    q.add_argument("--mode", choices=("diagram", "morphism", "strict-full-test"), default="diagram")
    q.add_argument("--epi", action="store_true", help="purely epic lift over a pro-flat shape")
    q.add_argument("--gen")
    q.add_argument("--seed", type=int, help="generate a random instance instead of reading one")
    q.add_argument("--ring", type=_ring, default=(3, 2), help="p,k for --seed (default 3,2)")
    q.add_argument("--out")
    q.set_defaults(func=cmd_lift)

    c = sub.add_parser("census", help="classify all small posets")
    c.add_argument("max_n", type=int)
    c.add_argument("--jobs", type=int, default=1)
    c.add_argument("--where", action="append", choices=FILTERS, default=[])
    c.add_argument("--out", help="directory for flagged poset files")
    c.set_defaults(func=cmd_census)

    e = sub.add_parser("examples", help="run the regression fixtures")
    e.add_argument("--tamper", metavar="NAME", help="run a mutated copy of one fixture instead")
    e.add_argument("--write", metavar="DIR", help="export fixture poset/diagram files")
    e.set_defaults(func=cmd_examples)
    return ap


def main(argv: list[str] | None = None, out=None) -> int:
    out = out or sys.stdout
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return INPUT_ERROR if exc.code else OK
    try:
        return args.func(args, out)
    except (UsageError, InputError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        print(result(status="input_error", error=type(exc).__name__), file=out)
        return INPUT_ERROR
    except PreconditionViolated as exc:
        print(f"precondition failed: {type(exc).__name__}: {exc}", file=out)
        print(result(status="precondition_failed", check=type(exc).__name__), file=out)
        return MATH_FAIL
    except (InternalInconsistency, FlatliftError) as exc:
        print(f"check failed: {type(exc).__name__}: {exc}", file=out)
        print(result(status="failed", check=type(exc).__name__), file=out)
        return MATH_FAIL


def main_exit() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_exit()
