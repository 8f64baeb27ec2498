"""Command-line front end: ``canext <command> -i model.json [options]``.

Exit codes: 0 success, 1 malformed input, 2 invalid monodromy model,
3 numeric verification failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from typing import Optional, Sequence

from . import __version__
from .exact import parse_rational
from .monodromy import ModelError, NumericPoint, model_from_json, orbit_equal
from .sheet import (
    DependentDirections,
    InvalidRelation,
    SheetPresentation,
    adapted_coordinates,
    arc_point,
    boundary_contact,
    components_through_point,
    limit_set,
    present_sheet,
    stabilizer_lattice,
    verify_point,
    verify_sheet,
)

EXIT_OK, EXIT_INPUT, EXIT_INVALID, EXIT_NUMERIC = 0, 1, 2, 3

COMMANDS = ("validate", "log", "stabilizer", "equations", "limits", "verify", "arc", "orbit", "components")


class InputError(ValueError):
    pass


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated integers, got {text!r}")


def _rat_list(text: str) -> tuple:
    try:
        return tuple(parse_rational(x.strip()) for x in text.split(",") if x.strip())
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"expected comma separated rationals, got {text!r}")


def _complex_list(text: str) -> tuple[complex, ...]:
    try:
        return tuple(complex(x.strip().replace(" ", "")) for x in text.split(",") if x.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma separated complex numbers, got {text!r}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-i", "--input", help="model JSON file")
    common.add_argument("--h", action="append", type=_rat_list, default=[], help="fiber vector, e.g. 0,1 (repeatable)")
    common.add_argument("--h-file", help="JSON file with a list of fiber vectors")
    common.add_argument("--samples", type=int, default=100)
    common.add_argument("--tol", type=float, default=1e-9)
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--bound", type=int, default=10, help="orbit search bound")
    common.add_argument("--h-bound", type=int, default=5, help="fiber enumeration bound for components")
    common.add_argument("--output", help="write to this path instead of standard output")
    common.add_argument("--format", choices=("json", "text"), default="json")

    parser = argparse.ArgumentParser(prog="canext", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check a monodromy model")
    sub.add_parser("log", parents=[common], help="nilpotent logarithms N_j = -log T_j")
    sub.add_parser("stabilizer", parents=[common], help="stabilizer lattice S, rank data and A")
    sub.add_parser("equations", parents=[common], help="full local equations of the sheet closure")
    sub.add_parser("limits", parents=[common], help="boundary contact and limit set over the origin")
    p = sub.add_parser("verify", parents=[common], help="sample the sheet and check all residuals")
    p.add_argument("--presentation", help="equations JSON to verify instead of recomputing")
    p = sub.add_parser("arc", parents=[common], help="arc table for t = 2^-m")
    p.add_argument("--a", type=_int_list, help="positive relation (default: boundary contact vector)")
    p.add_argument("--w", type=_complex_list, help="arc offsets w (default: zeros)")
    p.add_argument("--m-max", type=int, default=20)
    sub.add_parser("orbit", parents=[common], help="bounded search for T^a h0 = h1 (give --h twice)")
    p = sub.add_parser("components", parents=[common], help="sheet closures through a point over the origin")
    p.add_argument("--point", type=_complex_list, required=True, help="fiber coordinates v of the point")
    return parser


def _load_json(path: str):
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{path} is not valid JSON: {exc}") from exc


def _fibers(args, d: int) -> list[tuple]:
    hs = list(args.h)
    if args.h_file:
        data = _load_json(args.h_file)
        if not isinstance(data, list):
            raise InputError("--h-file must hold a list of vectors")
        hs.extend(tuple(parse_rational(x) for x in h) for h in data)
    for h in hs:
        if len(h) != d:
            raise InputError(f"fiber vector {','.join(map(str, h))} has length {len(h)}, expected {d}")
    return hs


def _one_fiber(args, d: int) -> tuple:
    hs = _fibers(args, d)
    if len(hs) != 1:
        raise InputError(f"{args.command} needs exactly one --h")
    return hs[0]


def _hstr(h) -> list[str]:
    return [str(x) for x in h]


def _complex_json(z: complex) -> list[float]:
    return [z.real, z.imag]


def _stabilizer_entry(model, h) -> dict:
    S = stabilizer_lattice(model, h)
    A, _, k = adapted_coordinates(model, S)
    return {"h": _hstr(h), "S": [list(b) for b in S.vectors], "rank_S": S.rank, "k": k, "A": A.tolist()}


def _run(args) -> tuple[object, int]:
    if args.command == "verify" and args.presentation and not args.input:
        raise InputError("verify needs -i/--input for sampling the sheet")
    if not args.input:
        raise InputError("-i/--input is required")
    raw = _load_json(args.input)
    try:
        model = model_from_json(raw)
    except ModelError as exc:
        return {"valid": False, "error": str(exc)}, EXIT_INVALID

    cmd = args.command
    if cmd == "validate":
        return {"valid": True, "n": model.n, "d": model.d}, EXIT_OK
    if cmd == "log":
        return {"n": model.n, "d": model.d, "N": [m.to_strings() for m in model.N]}, EXIT_OK
    if cmd == "stabilizer":
        entries = [_stabilizer_entry(model, h) for h in _fibers(args, model.d)]
        if not entries:
            raise InputError("stabilizer needs at least one --h")
        return (entries[0] if len(entries) == 1 else entries), EXIT_OK
    if cmd == "equations":
        hs = _fibers(args, model.d)
        if not hs:
            raise InputError("equations needs at least one --h")
        pres = [present_sheet(model, h).to_json() for h in hs]
        return (pres[0] if len(pres) == 1 else pres), EXIT_OK
    if cmd == "limits":
        out = []
        for h in _fibers(args, model.d):
            lim = limit_set(model, h)
            out.append({"h": _hstr(h), "contact": lim.to_json()["contact"], "limit_set": lim.to_json()})
        if not out:
            raise InputError("limits needs at least one --h")
        return (out[0] if len(out) == 1 else out), EXIT_OK
    if cmd == "verify":
        if args.samples < 1 or args.tol <= 0:
            raise InputError("--samples must be positive and --tol > 0")
        if args.presentation:
            pres = SheetPresentation.from_json(_load_json(args.presentation))
            if pres.n != model.n or pres.d != model.d:
                raise InputError("presentation does not match the model dimensions")
        else:
            pres = present_sheet(model, _one_fiber(args, model.d))
        report, _ = verify_sheet(model, pres, args.samples, args.seed, args.tol)
        body = {"h": _hstr(pres.h), "samples": args.samples, "seed": args.seed, "tol": args.tol}
        body.update(report.to_json())
        return body, (EXIT_OK if report.passed else EXIT_NUMERIC)
    if cmd == "arc":
        h = _one_fiber(args, model.d)
        a = args.a
        if a is None:
            a = boundary_contact(stabilizer_lattice(model, h))
            if a is None:
                return {"h": _hstr(h), "contact": None, "arc": []}, EXIT_OK
        w = args.w or (0j,) * model.n
        if len(w) != model.n:
            raise InputError(f"--w needs {model.n} entries")
        pres = present_sheet(model, h)
        limit = arc_point(model, h, a, w, 0)
        rows, ok = [], True
        for m in range(1, args.m_max + 1):
            t = 2.0**-m
            pt = arc_point(model, h, a, w, t)
            rep = verify_point(pres, pt, args.tol)
            ok = ok and rep.passed
            rows.append({"m": m, "t": t, "distance": pt.distance(limit), "max_residual": rep.max_residual, "pass": rep.passed})
        body = {"h": _hstr(h), "a": list(a), "w": [_complex_json(complex(x)) for x in w], "limit": limit.to_json(), "arc": rows}
        return body, (EXIT_OK if ok else EXIT_NUMERIC)
    if cmd == "orbit":
        hs = _fibers(args, model.d)
        if len(hs) != 2:
            raise InputError("orbit needs --h twice")
        if args.bound < 1:
            raise InputError("--bound must be positive")
        eq = orbit_equal(model, hs[0], hs[1], args.bound)
        return {"h0": _hstr(hs[0]), "h1": _hstr(hs[1]), "bound": args.bound, "result": "equal" if eq else "not-equal-within-bound"}, EXIT_OK
    if cmd == "components":
        if len(args.point) != model.d:
            raise InputError(f"--point needs {model.d} coordinates")
        if args.h_bound < 1 or args.bound < 1:
            raise InputError("bounds must be positive")
        pt = NumericPoint((0j,) * model.n, args.point)
        reps = components_through_point(model, pt, args.h_bound, args.bound)
        return {
            "point": [_complex_json(x) for x in pt.v],
            "h_bound": args.h_bound,
            "orbit_bound": args.bound,
            "representatives": [list(h) for h in reps],
        }, EXIT_OK
    raise InputError(f"unknown command {cmd}")


def _is_leaf(val) -> bool:
    if isinstance(val, dict):
        return "text" in val
    if isinstance(val, list):
        return not any(isinstance(x, (dict, list)) and not _is_leaf(x) for x in val)
    return True


def _text(obj, indent: int = 0) -> str:
    pad = "  " * indent
    if isinstance(obj, dict) and "text" not in obj:
        lines = []
        for key, val in obj.items():
            if _is_leaf(val) and not (isinstance(val, list) and any(isinstance(x, dict) for x in val)):
                lines.append(f"{pad}{key}: {_flat(val)}")
            else:
                lines.append(f"{pad}{key}:")
                lines.append(_text(val, indent + 1))
        return "\n".join(lines)
    if isinstance(obj, list):
        return "\n".join(
            f"{pad}- {_flat(x)}" if _is_leaf(x) else f"{pad}-\n" + _text(x, indent + 1) for x in obj
        )
    return pad + _flat(obj)


def _flat(val) -> str:
    if isinstance(val, dict) and "text" in val:
        return val["text"]
    return json.dumps(val) if isinstance(val, (list, dict)) else str(val)


def render(obj, fmt: str) -> str:
    if fmt == "text":
        return _text(obj) + "\n"
    return json.dumps(obj, indent=2) + "\n"


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        obj, code = _run(args)
    except (InputError, DependentDirections, InvalidRelation, KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, ModelError):
            obj, code = {"valid": False, "error": str(exc)}, EXIT_INVALID
        else:
            print(f"canext: error: {exc}", file=sys.stderr)
            return EXIT_INPUT
    text = render(obj, args.format)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return code


if __name__ == "__main__":
    sys.exit(main())
