"""Command-line surface.

Subcommands: check, construct, enumerate, percolate, experiment, render,
verify-trace, bounds.  Exit codes: 0 success, 1 adverse verdict (e.g.
`check` on a non-solution, `verify-trace` on a broken trace), 2 usage or
input errors.  File formats are the library's: position JSON
{"dims": [...], "black": [[...], ...]}, trace JSON {"dims", "direction",
"start", "moves"}, Latin text (n lines of n space-separated symbols).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from . import constructions, enumeration, latin, percolation, symmetry
from .engine import (
    Trace,
    TraceVerificationError,
    greedy_final,
    is_solution,
    trace_end,
    verify_trace,
)
from .grid import GridShape
from .position import (
    Position,
    bounds_report,
    is_base_position,
    is_convex,
    is_perfect,
    render_layers,
)

EXIT_OK = 0
EXIT_VERDICT = 1
EXIT_USAGE = 2


class _InputError(Exception):
    """Bad usage or malformed input; reported on stderr with exit code 2."""


def _read_text(path: str) -> str:
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise _InputError(f"{path}: {exc.strerror or exc}") from exc


def _load_json(path: str) -> dict:
    text = _read_text(path)
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise _InputError(
            f"{path}: line {exc.lineno} column {exc.colno}: {exc.msg}"
        ) from exc


def _load_position(path: str) -> Position:
    try:
        return Position.from_json_dict(_load_json(path))
    except ValueError as exc:
        raise _InputError(f"{path}: {exc}") from exc


def _load_trace(path: str) -> Trace:
    try:
        return Trace.from_json_dict(_load_json(path))
    except ValueError as exc:
        raise _InputError(f"{path}: {exc}") from exc


def _parse_shape(text: str) -> GridShape:
    try:
        dims = tuple(int(tok) for tok in text.split(","))
        return GridShape(dims)
    except ValueError as exc:
        raise _InputError(f"bad --shape {text!r}: {exc}") from exc


def _yn(flag: bool) -> str:
    return "yes" if flag else "no"


def _emit(args, payload: dict, text: str) -> None:
    print(json.dumps(payload) if args.json else text)


# -- subcommand handlers -----------------------------------------------------------


def _cmd_check(args) -> int:
    if args.latin:
        try:
            square = latin.LatinHypercube.from_text(_read_text(args.latin))
        except ValueError as exc:
            raise _InputError(f"{args.latin}: {exc}") from exc
        pos = latin.position_from_latin(square)
    else:
        pos = _load_position(args.position)
    base = is_base_position(pos)
    solution = base and is_solution(pos)
    perfect = base and is_perfect(pos)
    payload = {
        "black": pos.black_count,
        "base": base,
        "solution": solution,
        "perfect": perfect,
    }
    _emit(args, payload, f"solution: {_yn(solution)}, perfect: {_yn(perfect)}")
    return EXIT_OK if solution else EXIT_VERDICT


def _cmd_construct(args) -> int:
    kind = args.kind
    n = args.n
    if n is None:
        raise _InputError("--n is required")
    try:
        if kind == "cyclic":
            pos = constructions.cyclic_base(n)
            obj = pos.to_json_dict()
        elif kind == "cc":
            pos = constructions.shifted_cyclic_base(n, args.s or 0)
            obj = pos.to_json_dict()
        elif kind == "corridor":
            t = (n - 1).bit_length()
            if n < 2 or 2**t != n:
                raise _InputError("corridor needs --n a power of two (the side 2^t)")
            pos = constructions.corridor(t)
            obj = pos.to_json_dict()
        elif kind == "nho":
            pos = Position.from_coords(
                GridShape((n, n, n)), constructions.nested_heap(n)
            )
            obj = pos.to_json_dict()
        elif kind == "dnh":
            if args.s is None:
                raise _InputError("kind dnh requires --s")
            pos = Position.from_coords(
                GridShape((n, n, n)), constructions.nested_hexagon(n, args.s)
            )
            obj = pos.to_json_dict()
        elif kind == "trace-cyc":
            trace = constructions.cyclic_solution_trace(n)
            obj = trace.to_json_dict()
            pos = trace_end(trace)
        else:  # pragma: no cover - argparse restricts choices
            raise _InputError(f"unknown kind {kind!r}")
    except ValueError as exc:
        raise _InputError(str(exc)) from exc
    text = json.dumps(obj)
    if args.out:
        Path(args.out).write_text(text + "\n")
        if args.ascii:
            print(render_layers(pos))
    elif args.ascii:
        print(render_layers(pos))
    else:
        print(text)
    return EXIT_OK


def _table(rows: list[tuple[str, int]]) -> str:
    width = max(len(label) for label, _ in rows)
    return "\n".join(f"{label.ljust(width)}  {value}" for label, value in rows)


def _cmd_enumerate(args) -> int:
    shape = _parse_shape(args.shape)
    flag = True if args.long_running else None
    try:
        if args.perfect:
            if not (shape.is_hypercube and shape.d == 3):
                raise _InputError("--perfect expects a cubic shape n,n,n")
            n = shape.dims[0]
            cat = enumeration.enumerate_perfect_solutions(
                n, long_running=flag, threads=args.threads
            )
            rows = [
                ("# Latin squares", enumeration.latin_square_total(n)),
                ("# perfect solutions", cat.total),
                ("# perfect solutions up to isometry", cat.classes),
            ]
            mode = "perfect"
        else:
            cat = enumeration.enumerate_all_solutions(
                shape,
                screen_depth=args.screen_depth,
                threads=args.threads,
                long_running=flag,
            )
            rows = [
                ("# all solutions", cat.total),
                ("# all solutions up to isometry", cat.classes),
            ]
            mode = "all"
    except ValueError as exc:
        raise _InputError(str(exc)) from exc
    reps = []
    for rep in cat.class_reps:
        orbit, _stab = symmetry.orbit_and_stabilizer(rep)
        reps.append({"black": [list(c) for c in rep.black_coords()], "orbit": orbit})
    payload = {
        "shape": list(shape.dims),
        "mode": mode,
        "total": cat.total,
        "classes": cat.classes,
        "class_reps": reps,
    }
    summary = _table(rows)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "catalogue.json").write_text(json.dumps(payload) + "\n")
        (out / "summary.txt").write_text(summary + "\n")
    print(json.dumps(payload) if args.json else summary)
    return EXIT_OK


def _cmd_percolate(args) -> int:
    pos = _load_position(args.position)
    convex = is_convex(pos)
    g = greedy_final(pos)
    b = percolation.bootstrap_closure(pos)
    m = percolation.modified_bootstrap_closure(pos)
    agree = g == b == m
    payload = {
        "start": pos.black_count,
        "convex": convex,
        "greedy": g.black_count,
        "bootstrap": b.black_count,
        "modified": m.black_count,
        "closures_agree": agree,
    }
    text = "\n".join(
        [
            f"start: {pos.black_count} cells, convex: {_yn(convex)}",
            f"greedy closure: {g.black_count} cells",
            f"bootstrap closure: {b.black_count} cells",
            f"modified bootstrap closure: {m.black_count} cells",
            f"closures agree: {_yn(agree)}",
        ]
    )
    _emit(args, payload, text)
    # agreement is guaranteed on convex starts; disagreement there is a
    # genuine adverse verdict
    return EXIT_VERDICT if convex and not agree else EXIT_OK


def _cmd_experiment(args) -> int:
    try:
        report = latin.solution_fraction_experiment(
            args.n, samples=args.samples, seed=args.seed
        )
    except ValueError as exc:
        raise _InputError(str(exc)) from exc
    payload = {
        "order": report.order,
        "samples": report.samples,
        "hits": report.hits,
        "exact": str(report.exact) if report.exact is not None else None,
        "fraction": float(report.fraction),
    }
    if report.exact is not None:
        text = f"order {report.order}: exact solution fraction {report.exact} = {float(report.fraction):.6g}"
    else:
        text = (
            f"order {report.order}: {report.hits}/{report.samples} sampled Latin "
            f"squares are solutions ({float(report.fraction):.6g})"
        )
    _emit(args, payload, text)
    return EXIT_OK


def _cmd_render(args) -> int:
    pos = _load_position(args.position)
    try:
        print(render_layers(pos))
    except ValueError as exc:
        raise _InputError(str(exc)) from exc
    return EXIT_OK


def _cmd_verify_trace(args) -> int:
    trace = _load_trace(args.trace)
    try:
        end = verify_trace(trace)
    except TraceVerificationError as exc:
        payload = {"ok": False, "step": exc.index, "reason": exc.reason}
        _emit(args, payload, f"invalid: {exc}")
        return EXIT_VERDICT
    payload = {
        "ok": True,
        "moves": len(trace.moves),
        "end_black": end.black_count,
        "end_full": end.is_full(),
    }
    _emit(
        args,
        payload,
        f"ok: {len(trace.moves)} moves, end position has {end.black_count} black cells",
    )
    return EXIT_OK


def _cmd_bounds(args) -> int:
    shape = _parse_shape(args.shape)
    rep = bounds_report(shape)
    payload = {
        "shape": list(shape.dims),
        "min_black": rep.min_black,
        "facial_min": rep.facial_min,
        "projection_min": rep.projection_min,
    }
    parts = [f"min_black {rep.min_black}"]
    if rep.facial_min is not None:
        parts.append(f"facial >= {rep.facial_min}")
    if rep.projection_min is not None:
        parts.append(f"projection >= {rep.projection_min}")
    _emit(args, payload, ", ".join(parts))
    return EXIT_OK


# -- parser -------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="dismantler",
        description="Greedy dismantling of box grids: checks, constructions, "
        "catalogues, percolation comparisons.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="decide solution/perfect for a position or Latin square")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--latin", metavar="FILE", help="Latin square text file")
    src.add_argument("--position", metavar="FILE", help="position JSON file")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("construct", help="emit a constructed position or trace")
    p.add_argument(
        "--kind",
        required=True,
        choices=["cyclic", "cc", "corridor", "nho", "dnh", "trace-cyc"],
    )
    p.add_argument("--n", type=int, required=True, help="grid side (corridor: a power of two)")
    p.add_argument("--s", type=int, default=None, help="shift (cc, dnh)")
    p.add_argument("--ascii", action="store_true", help="print ASCII layers instead of JSON")
    p.add_argument("--out", metavar="FILE", help="write the JSON here")
    p.set_defaults(func=_cmd_construct)

    p = sub.add_parser("enumerate", help="catalogue solutions of a shape")
    p.add_argument("--shape", required=True, help="comma-separated sides, e.g. 4,4,4")
    p.add_argument("--perfect", action="store_true", help="perfect solutions only (Latin scan)")
    p.add_argument("--long-running", action="store_true", help="allow multi-hour jobs")
    p.add_argument("--threads", type=int, default=os.cpu_count() or 1)
    p.add_argument("--screen-depth", type=int, default=5)
    p.add_argument("--out", metavar="DIR", help="write catalogue.json and summary.txt here")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_enumerate)

    p = sub.add_parser("percolate", help="compare greedy/bootstrap/modified closures")
    p.add_argument("--position", required=True, metavar="FILE")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_percolate)

    p = sub.add_parser("experiment", help="solution fraction of random Latin squares")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--samples", type=int, default=10000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_experiment)

    p = sub.add_parser("render", help="ASCII layers of a 3-dim position")
    p.add_argument("--position", required=True, metavar="FILE")
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("verify-trace", help="replay a trace, validating every step")
    p.add_argument("--trace", required=True, metavar="FILE")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_verify_trace)

    p = sub.add_parser("bounds", help="closed-form lower bounds for a shape")
    p.add_argument("--shape", required=True)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=_cmd_bounds)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
