"""Command line: ``descentkit verify | selftest | describe``.

Exit codes: 0 every verdict passed, 1 input or usage error, 2 a checked
instance failed, 3 a hypothesis could not be verified (advisory).
"""
from __future__ import annotations

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import __version__, acceptance
from .errors import DescentKitError, SpecError
from .rings import FiniteRing
from .runner import EXIT_ADVISORY, EXIT_FAILED, EXIT_OK, EXIT_USAGE, RunReport, run_case
from .specs import bundled_cases, load_case


def _dump(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _combine(codes: list[int]) -> int:
    for code in (EXIT_USAGE, EXIT_FAILED, EXIT_ADVISORY):
        if code in codes:
            return code
    return EXIT_OK


def _error_name(exc: Exception) -> str:
    return "SpecError" if isinstance(exc, SpecError) else type(exc).__name__


def _verify_one(args: tuple[str, int | None, int | None]) -> RunReport:
    path, bound, seed = args
    try:
        case = load_case(path, bound, seed)
    except DescentKitError as exc:
        return RunReport(Path(path).stem, "?", False, [], {}, error=f"{_error_name(exc)}: {exc}")
    return run_case(case)


def _render_group_rows(groups: list[dict]) -> list[str]:
    return [f"    {g.get('name') or '?':<24} order {g.get('order')!s:>5}  factors {g.get('invariant_factors')}"
            for g in groups]


def render_text(rep: RunReport) -> str:
    status = "ERROR" if rep.error else ("PASS" if rep.passed else "FAIL")
    lines = [f"{rep.id} [{rep.kind}] {status}" + (" (advisory)" if rep.advisory and not rep.error else "")]
    if rep.error:
        lines.append(f"  {rep.error}")
        return "\n".join(lines) + "\n"
    if rep.wall_time is not None:
        lines.append(f"  time {rep.wall_time:.2f}s")
    for h in rep.hypotheses:
        lines.append(f"  hypothesis {h['name']}: {h['status']}")
    res = rep.result
    if "groups" in res:
        lines.append("  groups:")
        lines += _render_group_rows(res["groups"])
        lines.append("  position                   image  kernel  exact")
        for p in res["positions"]:
            lines.append(f"    {p['at']:<22} {p['image_order']:>6} {p['kernel_order']:>7}  {p['exact']}")
    for key, val in res.items():
        if key not in ("groups", "positions", "sequence"):
            lines.append(f"  {key}: {json.dumps(val, sort_keys=True)}")
    return "\n".join(lines) + "\n"


def cmd_verify(ns) -> int:
    paths = ns.specs or [str(p) for p in bundled_cases()]
    jobs = [(p, ns.bound, ns.seed) for p in paths]
    if ns.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=ns.jobs) as pool:
            reports = list(pool.map(_verify_one, jobs))
    else:
        reports = [_verify_one(j) for j in jobs]
    reports.sort(key=lambda r: r.id)
    if ns.emit == "json":
        _emit(_dump({"version": __version__, "cases": [r.json(timing=ns.timing) for r in reports]}), ns.out)
    else:
        _emit("".join(render_text(r) for r in reports), ns.out)
    for r in reports:
        if r.error:
            print(f"error: {r.id}: {r.error}", file=sys.stderr)
    code = _combine([r.exit_code for r in reports])
    if code == EXIT_ADVISORY and ns.advisory_ok:
        code = EXIT_OK
    return code


def cmd_selftest(ns) -> int:
    only = [o for chunk in (ns.only or []) for o in chunk.split(",") if o]
    picked = acceptance.select(only)
    if not picked:
        print(f"error: --only {','.join(only)} matches no criterion", file=sys.stderr)
        return EXIT_USAGE
    results = [acceptance.run_criterion(n, ns.seed) for n in picked]
    if ns.emit == "json":
        body = {"version": __version__, "seed": ns.seed, "criteria": [r.json() for r in results],
                "passed": all(r.passed for r in results)}
        if ns.timing:
            for entry, r in zip(body["criteria"], results):
                entry["wall_time"] = round(r.elapsed, 3)
        _emit(_dump(body), ns.out)
    else:
        _emit("".join(r.line() + "\n" for r in results), ns.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_FAILED


def _ring_summary(R: FiniteRing) -> dict:
    from .groups import invariant_factors
    from .rings import units
    out = {"name": R.name, "order": R.order, "additive_moduli": list(R.moduli),
           "commutative": bool(R.is_commutative)}
    if R.order <= 4096:
        U = units(R)
        out["units"] = {"order": U.order, "invariant_factors": invariant_factors(U) if R.is_commutative else None}
    return out


def cmd_describe(ns) -> int:
    try:
        case = load_case(ns.spec, ns.bound, ns.seed)
        desc = {"id": case.id, "kind": case.kind, "description": case.description}
        if case.kind == "hilbert90":
            phi = case.coalgebra_map()
            desc["field"] = {"order": phi.source.field.q, **phi.source.field.json()}
            for label, C in (("domain", phi.source), ("codomain", phi.target)):
                desc[label] = {"dim": C.dim, "cocommutative": C.cocommutative, "grouplike": C.is_grouplike}
            desc["map"] = {"matrix": phi.matrix.tolist(), "surjective": phi.is_surjective()}
        else:
            h = case.ring_hom()
            desc["source"] = _ring_summary(h.source)
            desc["target"] = _ring_summary(h.target)
            desc["hom"] = {"table": h.table.tolist(), "injective": len(set(h.table.tolist())) == h.source.order}
    except DescentKitError as exc:
        print(f"error: {_error_name(exc)}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if ns.emit == "json":
        _emit(_dump(desc), ns.out)
    else:
        text = []
        for k, v in desc.items():
            text.append(f"{k}: {json.dumps(v, sort_keys=True)}")
        _emit("\n".join(text) + "\n", ns.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--emit", choices=("json", "text"), default="json")
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--bound", type=int, metavar="N", help="element-table bound for constructed rings")
    common.add_argument("--seed", type=int, default=None, metavar="K")
    common.add_argument("--timing", action="store_true", help="include wall times (breaks byte-identical output)")

    p = argparse.ArgumentParser(prog="descentkit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="verb", required=True)

    v = sub.add_parser("verify", parents=[common], help="run case specs (default: the bundled cases)")
    v.add_argument("specs", nargs="*")
    v.add_argument("--jobs", type=int, default=1)
    v.add_argument("--advisory-ok", action="store_true", help="treat unverified hypotheses as success")
    v.set_defaults(fn=cmd_verify)

    s = sub.add_parser("selftest", parents=[common], help="run the acceptance matrix")
    s.add_argument("--only", action="append", metavar="TAGS", help="criterion numbers or tags, comma separated")
    s.set_defaults(fn=cmd_selftest)

    d = sub.add_parser("describe", parents=[common], help="print the objects a spec constructs")
    d.add_argument("spec")
    d.set_defaults(fn=cmd_describe)
    return p


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        ns = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    if ns.verb == "selftest" and ns.seed is None:
        ns.seed = 0
    if ns.bound is not None and ns.bound < 1:
        print("error: --bound must be positive", file=sys.stderr)
        return EXIT_USAGE
    return ns.fn(ns)


if __name__ == "__main__":
    sys.exit(main())
