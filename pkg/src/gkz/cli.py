"""Command-line entry point ``gkz``.

Exit codes: 0 success, 2 invalid input, 3 numeric-domain failure.  On
failure nothing is written to standard output.
"""
from __future__ import annotations

import argparse
import io
import itertools
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Sequence

import jsonschema
import numpy as np

from .equations import verify_all
from .errors import NumericDomainError, ValidationError
from .integral import QuadratureConfig, evaluate_gg
from .lattice import IntegerMatrix, integer_kernel_basis
from .model import GkzData, SpectralVector, build_gkz_data, solve_spectral_affine
from .oscillator import formal_gamma, verify_annihilation
from .whittaker import eval_whittaker_max, eval_whittaker_min

__all__ = ["PROBLEM_SCHEMA", "Problem", "emit_grid", "load_problem", "main", "parse_grid"]

_PAIR = {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
_INT_ROWS = {"type": "array", "items": {"type": "array", "items": {"type": "integer"}}}

PROBLEM_SCHEMA = {
    "type": "object",
    "properties": {
        "A": _INT_ROWS,
        "lattice": _INT_ROWS,
        "gamma": {"type": "array", "items": _PAIR},
        "c": {"type": "array", "items": _PAIR},
        "u": {"type": "array", "items": {"type": "number", "exclusiveMinimum": 0}},
        "quadrature": {
            "type": "object",
            "properties": {
                "points_per_dim": {"type": "integer", "minimum": 2},
                "tail_tolerance": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "max_halfwidth": {"type": "number", "exclusiveMinimum": 0},
                "refinement": {"type": "integer", "minimum": 1},
            },
            "additionalProperties": False,
        },
        "task": {"enum": ["lattice", "eval", "verify", "whittaker", "weyl-check"]},
    },
    "required": ["A"],
    "not": {"required": ["gamma", "c"]},
    "additionalProperties": False,
}


class Problem:
    """A validated problem file."""

    def __init__(self, raw: dict):
        self.raw = raw
        if raw["A"]:
            width = len(raw["A"][0])
        elif raw.get("lattice"):
            width = len(raw["lattice"][0])
        elif raw.get("u") or raw.get("gamma"):
            width = len(raw.get("u") or raw["gamma"])
        else:
            width = 0
        if width < 1:
            raise ValidationError("cannot determine N: A has no rows and no u, gamma or lattice is given")
        A = IntegerMatrix.from_rows(raw["A"], width)
        lattice = IntegerMatrix.from_rows(raw["lattice"], width) if "lattice" in raw else None
        self.A = A
        self.data: GkzData = build_gkz_data(A, lattice)
        self.cfg = QuadratureConfig(**raw.get("quadrature", {}))

    def spectral(self) -> SpectralVector:
        if "gamma" in self.raw:
            gamma = SpectralVector(tuple(complex(re, im) for re, im in self.raw["gamma"]))
            if len(gamma) != self.data.N:
                raise ValidationError(f"gamma must have length {self.data.N}")
            return gamma
        if "c" in self.raw:
            c = [complex(re, im) for re, im in self.raw["c"]]
            if len(c) != self.data.m:
                raise ValidationError(f"c must have length {self.data.m}")
            return solve_spectral_affine(self.data, c)[0]
        raise ValidationError("the problem needs either gamma or c")

    def arguments(self) -> list[float]:
        if "u" not in self.raw:
            raise ValidationError("the problem needs u")
        u = [float(v) for v in self.raw["u"]]
        if len(u) != self.data.N:
            raise ValidationError(f"u must have length {self.data.N}")
        return u


def load_problem(path: str | Path, task: str | None = None) -> Problem:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ValidationError(f"cannot read {path}: {exc.strerror}") from exc
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"{path}:{exc.lineno}:{exc.colno}: malformed JSON: {exc.msg}") from exc
    try:
        jsonschema.validate(raw, PROBLEM_SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ValidationError(f"{path}: schema violation at {where}: {exc.message}") from exc
    if task is not None and raw.get("task", task) != task:
        raise ValidationError(f"{path}: file is for task {raw['task']!r}, not {task!r}")
    return Problem(raw)


def _g17(x: float) -> str:
    return format(float(x), ".17g")


def parse_grid(text: str) -> np.ndarray:
    """``lo:hi:n`` to ``n`` strictly increasing points."""
    parts = text.split(":")
    if len(parts) != 3:
        raise ValidationError(f"grid must be lo:hi:n, got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError as exc:
        raise ValidationError(f"grid must be lo:hi:n, got {text!r}") from exc
    if n < 1:
        raise ValidationError("empty grid")
    if n == 1:
        if lo != hi:
            raise ValidationError("a single-point grid needs lo == hi")
        return np.array([lo])
    if not hi > lo:
        raise ValidationError("grid points must be strictly increasing (duplicates are rejected)")
    return np.linspace(lo, hi, n)


def emit_grid(kind: str, ell: int, lam: Sequence[complex], points: Sequence, cfg: QuadratureConfig | None = None) -> str:
    """CSV text: grid variables, then value re/im, then err.

    ``points`` holds scalars for ``max`` and ``ell+1``-vectors for ``min``.
    """
    if len(points) == 0:
        raise ValidationError("empty grid")
    keys = [tuple(np.atleast_1d(p).tolist()) for p in points]
    if len(set(keys)) != len(keys):
        raise ValidationError("duplicate grid points")
    out = io.StringIO()
    if kind == "max":
        out.write("x,re,im,err\n")
    elif kind == "min":
        out.write(",".join([f"x{i + 1}" for i in range(ell + 1)] + ["re", "im", "err"]) + "\n")
    else:
        raise ValidationError(f"unknown Whittaker type {kind!r}")
    for p in points:
        if kind == "max":
            value, err = eval_whittaker_max(ell, lam, float(p), cfg, with_error=True)
            cols = [float(p)]
        else:
            x = [float(v) for v in p]
            value, err = eval_whittaker_min(ell, lam, x, cfg, with_error=True)
            cols = x
        out.write(",".join(_g17(v) for v in cols + [value.real, value.imag, err]) + "\n")
    return out.getvalue()


def _parse_complex_list(text: str) -> list[complex]:
    try:
        return [complex(v.strip().replace(" ", "")) for v in text.split(",")]
    except ValueError as exc:
        raise ValidationError(f"cannot parse {text!r} as a comma-separated list of numbers") from exc


def _dump(obj) -> str:
    return json.dumps(obj, allow_nan=False)


def _cmd_lattice(args) -> str:
    problem = load_problem(args.file, "lattice")
    return _dump(integer_kernel_basis(problem.A).to_list())


def _cmd_eval(args) -> str:
    problem = load_problem(args.file, "eval")
    cfg = problem.cfg
    if args.points_per_dim is not None or args.tol is not None:
        cfg = QuadratureConfig(
            points_per_dim=cfg.points_per_dim if args.points_per_dim is None else args.points_per_dim,
            tail_tolerance=cfg.tail_tolerance if args.tol is None else args.tol,
            max_halfwidth=cfg.max_halfwidth,
            refinement=cfg.refinement,
        )
    value, err = evaluate_gg(problem.data, problem.spectral(), problem.arguments(), cfg)
    return _dump({"value": [value.real, value.imag], "err": err})


def _cmd_verify(args) -> str:
    problem = load_problem(args.file, "verify")
    if not args.step > 0:
        raise ValidationError("step must be positive")
    reports = verify_all(problem.data, problem.spectral(), problem.arguments(), args.step, problem.cfg)
    return _dump([r.to_json() for r in reports])


def _cmd_whittaker(args) -> str:
    lam = _parse_complex_list(args.lam)
    ell = args.rank
    if ell < 1:
        raise ValidationError("rank must be at least 1")
    if len(lam) != ell + 1:
        raise ValidationError(f"lambda must have {ell + 1} entries")
    if args.x is not None:
        values = [v.real for v in _parse_complex_list(args.x)]
        if args.type == "max":
            if len(values) != 1:
                raise ValidationError("--x takes one value for --type max")
            points = [values[0]]
        else:
            if len(values) != ell + 1:
                raise ValidationError(f"--x takes {ell + 1} values for --type min")
            points = [values]
    else:
        grid = parse_grid(args.grid)
        # for the minimal-parabolic family the grid runs along x1 with the rest at 0
        points = list(grid) if args.type == "max" else [[g] + [0.0] * ell for g in grid]
    return emit_grid(args.type, ell, lam, points).rstrip("\n")


def _weyl_gamma(N: int) -> tuple[Fraction, ...]:
    rng = np.random.default_rng(20240229)
    return tuple(Fraction(int(rng.integers(-40, 41)), int(rng.integers(1, 13))) for _ in range(N))


def _cmd_weyl(args) -> str:
    if args.n < 1 or args.lmax < 0:
        raise ValidationError("need --n >= 1 and --lmax >= 0")
    gamma = formal_gamma(args.n) if args.symbolic else _weyl_gamma(args.n)
    report = [
        {"l": list(l), "N": args.n, "annihilated": verify_annihilation(l, gamma)}
        for l in itertools.product(range(-args.lmax, args.lmax + 1), repeat=args.n)
    ]
    return _dump(report)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ValidationError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gkz", description="GKZ / GG hypergeometric data, integrals and certificates.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("lattice", help="print the canonical relation-lattice basis of A")
    p.add_argument("file")
    p.set_defaults(func=_cmd_lattice)

    p = sub.add_parser("eval", help="evaluate the GG integral")
    p.add_argument("file")
    p.add_argument("--points-per-dim", type=int, default=None, help="base grid points per axis")
    p.add_argument("--tol", type=float, default=None, help="tail tolerance")
    p.set_defaults(func=_cmd_eval)

    p = sub.add_parser("verify", help="residuals of every equation of the system")
    p.add_argument("file")
    p.add_argument("--step", type=float, default=1e-3, help="finite-difference step h")
    p.set_defaults(func=_cmd_verify)

    p = sub.add_parser("whittaker", help="Whittaker-function presets as CSV")
    p.add_argument("--type", choices=["min", "max"], required=True)
    p.add_argument("--rank", type=int, required=True, help="rank ell >= 1")
    p.add_argument("--lambda", dest="lam", required=True, help="ell+1 comma-separated numbers, complex written as 1+0.5j")
    where = p.add_mutually_exclusive_group(required=True)
    where.add_argument("--x", help="one point: ell+1 values for min, a scalar for max")
    where.add_argument("--grid", help="lo:hi:n, varying x (x1 for min, others at 0)")
    p.set_defaults(func=_cmd_whittaker)

    p = sub.add_parser("weyl-check", help="exact annihilation certificates")
    p.add_argument("--n", type=int, required=True, help="number of variables")
    p.add_argument("--lmax", type=int, required=True, help="check every l with |l_i| <= lmax")
    p.add_argument("--symbolic", action="store_true", help="use formal symbolic parameters")
    p.set_defaults(func=_cmd_weyl)
    return parser


_VALUE_FLAGS = ("--x", "--grid", "--lambda")


def _glue_values(argv: Sequence[str]) -> list[str]:
    """Turn ``--grid -1:1:3`` into ``--grid=-1:1:3`` so negative values parse."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    try:
        args = build_parser().parse_args(_glue_values(argv))
        if args.func is _cmd_eval and (
            (args.points_per_dim is not None and args.points_per_dim < 2) or (args.tol is not None and not 0 < args.tol < 1)
        ):
            raise ValidationError("--points-per-dim must be >= 2 and --tol in (0, 1)")
        text = args.func(args)
    except ValidationError as exc:
        print(f"gkz: error: {exc}", file=sys.stderr)
        return 2
    except NumericDomainError as exc:
        print(f"gkz: numeric error: {exc}", file=sys.stderr)
        return 3
    except SystemExit as exc:  # --help
        return int(exc.code or 0)
    sys.stdout.write(text + "\n")
    return 0


if __name__ == "__main__":
    sys.exit(main())
