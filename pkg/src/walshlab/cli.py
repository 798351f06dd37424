"""Command-line front end.

Every subcommand prints one report, as JSON (validated by
``schemas/report.json``) or as CSV with reals in 17 significant digits.
Exit codes: 0 success, 2 invalid parameters, 1 internal error.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from . import counterexamples as cx
from . import variation as var
from .dyadic import DyadicRational
from .funcrep import GridFunction2D, PiecewiseLinear1D, SeparableFunction2D
from .series import cesaro_kernel_grid, cesaro_mean, partial_sum
from .walsh import STRATEGIES, check_lowest, dirichlet_at, dirichlet_grid
from .weights import FAMILIES, by_name


class ValidationError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # one line, exit code 2
        raise ValidationError(message)


def _real(x: float) -> str:
    return f"{x:.17g}"


# ------------------------------------------------------------ arguments


def _dyadic(text: str) -> DyadicRational:
    try:
        return DyadicRational.parse(text)
    except (ValueError, ZeroDivisionError) as exc:
        raise argparse.ArgumentTypeError(f"invalid dyadic point {text!r}: {exc}") from None


FUNCTIONS = ("xy", "ramp", "tent", "step", "indicator", "checkerboard", "random", "gN", "hN", "file")


def build_function(args: argparse.Namespace):
    """Test functions addressable from the command line."""
    name, res = args.function, args.resolution
    one = PiecewiseLinear1D.constant(1.0)
    if name == "xy":
        ident = PiecewiseLinear1D.identity()
        return SeparableFunction2D.product(ident, ident)
    if name == "ramp":
        return SeparableFunction2D.product(PiecewiseLinear1D.identity().refine(res), one)
    if name == "tent":
        tent = PiecewiseLinear1D.from_callable(lambda x: 1 - np.abs(2 * x - 1), max(res, 1))
        return SeparableFunction2D.product(tent, one)
    if name == "step":
        return GridFunction2D.from_callable(lambda x, y: (x >= 0.5) + 0.0 * y, max(res, 1))
    if name == "indicator":
        return GridFunction2D.from_callable(lambda x, y: ((x >= 0.5) & (y >= 0.5)) * 1.0, max(res, 1))
    if name == "checkerboard":
        n = 1 << res
        i = np.arange(n)
        return GridFunction2D(res, np.where((i[:, None] + i[None, :]) % 2 == 0, 1.0, -1.0))
    if name == "random":
        return GridFunction2D.random(res, np.random.default_rng(args.seed))
    if name == "gN":
        return cx.build_gN(args.N)
    if name == "hN":
        return cx.build_hN(args.N, args.alpha, args.beta)
    if name == "file":
        if not args.input:
            raise ValidationError("--function file needs --input")
        return GridFunction2D.from_csv(Path(args.input).read_text())
    raise ValidationError(f"unknown function {name!r}")


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--output", default=None, help="file path (default: standard output)")
    p.add_argument("--seed", type=int, default=0, help="seed for generated inputs")


def _add_function(p: argparse.ArgumentParser) -> None:
    p.add_argument("--function", choices=FUNCTIONS, default="xy")
    p.add_argument("--resolution", type=int, default=2)
    p.add_argument("--N", type=int, default=2, help="construction parameter for gN / hN")
    p.add_argument("--input", default=None, help="grid CSV for --function file")


def _add_lambda(p: argparse.ArgumentParser, default: str = "harmonic") -> None:
    p.add_argument("--lambda", dest="lam", choices=FAMILIES, default=default)
    p.add_argument("--gamma", type=float, default=0.5, help="exponent of the power family")
    p.add_argument("--lambda-alpha", type=float, default=0.3, help="alpha of the cesaro family")
    p.add_argument("--lambda-beta", type=float, default=0.3, help="beta of the cesaro family")


def _lambda(args: argparse.Namespace):
    return by_name(args.lam, gamma=args.gamma, alpha=args.lambda_alpha, beta=args.lambda_beta)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="walshlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("kernel", help="Dirichlet or Cesàro kernel cell values")
    p.add_argument("--type", choices=("dirichlet", "cesaro"), default="dirichlet")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--scale", type=int, required=True)
    p.add_argument("--alpha", type=float, default=1.0, help="Cesàro order")
    p.add_argument("--strategy", choices=STRATEGIES, default="recursive")
    _add_common(p)

    p = sub.add_parser("partial-sum", help="rectangular partial sum S_{rows,cols}(x, y)")
    _add_function(p)
    p.add_argument("--rows", type=int, required=True)
    p.add_argument("--cols", type=int, required=True)
    p.add_argument("--x", type=_dyadic, default=DyadicRational.zero())
    p.add_argument("--y", type=_dyadic, default=DyadicRational.zero())
    p.add_argument("--strategy", choices=("coeff", "kernel"), default="coeff")
    p.add_argument("--alpha", type=float, default=0.3, help="order for --function hN")
    p.add_argument("--beta", type=float, default=0.3, help="order for --function hN")
    _add_common(p)

    p = sub.add_parser("cesaro", help="Cesàro means sigma^{alpha,beta}_{n,m}(x, y)")
    _add_function(p)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--alpha", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--x", type=_dyadic, default=DyadicRational.zero())
    p.add_argument("--y", type=_dyadic, default=DyadicRational.zero())
    p.add_argument("--strategy", choices=("definition", "kernel"), default="definition")
    _add_common(p)

    p = sub.add_parser("variation", help="generalized variations with certified bounds")
    _add_function(p)
    p.add_argument("--functional", choices=VARIATION_FUNCTIONALS, default="V1")
    p.add_argument("--mode", choices=var.MODES, default="exact")
    p.add_argument("--n", type=int, default=1, help="interval count (vsharp) or shift (tail)")
    p.add_argument("--alpha", type=float, default=0.3, help="order for --function hN")
    p.add_argument("--beta", type=float, default=0.3, help="order for --function hN")
    _add_lambda(p)
    _add_common(p)

    p = sub.add_parser("probe", help="divergence probes at the origin")
    p.add_argument("--family", choices=("partial-sum", "cesaro"), required=True)
    p.add_argument("--n-max", type=int, required=True)
    p.add_argument("--alpha", type=float, default=0.3)
    p.add_argument("--beta", type=float, default=0.3)
    _add_lambda(p, default="sqrtlog")
    _add_common(p)

    p = sub.add_parser("check", help="built-in identity checks")
    p.add_argument("which", choices=("lowest", "kernels", "tev"))
    p.add_argument("--n", type=int, default=3)
    p.add_argument("--grid-scale", type=int, default=None)
    p.add_argument("--start-exponent", type=int, default=None)
    p.add_argument("--scale", type=int, default=10, help="grid scale for the kernel check")
    p.add_argument("--alpha", type=float, default=0.3, help="order for the tev check")
    _add_common(p)
    return parser


VARIATION_FUNCTIONALS = ("V1", "V2", "V12", "sharp1", "sharp2", "star", "partial", "bv", "vsharp1", "vsharp2",
                         "tail1", "tail2")


# ------------------------------------------------------------ commands


Report = tuple[dict[str, Any], list[str], list[list[Any]]]


def _kernel(args) -> Report:
    if args.n < 1 or args.scale < 0:
        raise ValidationError("--n must be positive and --scale nonnegative")
    if args.type == "dirichlet":
        vals = [int(v) for v in dirichlet_grid(args.n, args.scale, args.strategy)]
    else:
        ks = max(0, (args.n - 1).bit_length())
        if args.scale < ks:
            raise ValidationError(f"K_{args.n} is not constant on cells at scale {args.scale}; use --scale >= {ks}")
        vals = [float(v) for v in cesaro_kernel_grid(args.n, args.alpha, args.scale)]
    cells = [f"{j}/2^{args.scale}" for j in range(len(vals))]
    payload = {"command": "kernel", "type": args.type, "n": args.n, "scale": args.scale, "values": vals}
    if args.type == "cesaro":
        payload["alpha"] = args.alpha
    return payload, ["cell", "value"], [[c, v] for c, v in zip(cells, vals)]


def _partial_sum(args) -> Report:
    f = build_function(args)
    value = partial_sum(f, args.rows, args.cols, args.x, args.y, strategy=args.strategy)
    payload = {"command": "partial-sum", "function": args.function, "rows": args.rows, "cols": args.cols,
               "x": str(args.x), "y": str(args.y), "strategy": args.strategy, "value": value}
    return payload, ["rows", "cols", "x", "y", "value"], [[args.rows, args.cols, str(args.x), str(args.y), value]]


def _cesaro(args) -> Report:
    f = build_function(args)
    value = cesaro_mean(f, args.n, args.m, args.alpha, args.beta, args.x, args.y, strategy=args.strategy)
    payload = {"command": "cesaro", "function": args.function, "n": args.n, "m": args.m, "alpha": args.alpha,
               "beta": args.beta, "x": str(args.x), "y": str(args.y), "strategy": args.strategy, "value": value}
    return payload, ["n", "m", "alpha", "beta", "value"], [[args.n, args.m, args.alpha, args.beta, value]]


def _variation(args) -> Report:
    f = build_function(args)
    lam = _lambda(args)
    fn, mode = args.functional, args.mode
    if fn in ("vsharp1", "vsharp2"):
        if args.n < 1:
            raise ValidationError("--n must be positive")
        v = var.v_sharp(f, int(fn[-1]), args.n)
        result = var.VariationResult(v, v, True)
    elif fn == "V1":
        result = var.lambda_var_1(f, lam, mode)
    elif fn == "V2":
        result = var.lambda_var_2(f, lam, mode)
    elif fn == "V12":
        result = var.lambda_var_12(f, lam, lam, mode)
    elif fn in ("sharp1", "sharp2"):
        result = var.sharp_var(f, int(fn[-1]), lam, mode)
    elif fn in ("tail1", "tail2"):
        if args.n < 1:
            raise ValidationError("--n must be positive")
        result = var.tail_sharp_var(f, int(fn[-1]), lam, args.n, mode)
    elif fn == "star":
        result = var.star_var(f, lam, mode)
    elif fn == "partial":
        result = var.partial_lambda_var(f, lam, mode)
    else:
        result = var.lambda_bv(f, lam, lam, mode)
    body = result.to_json()
    payload = {"command": "variation", "functional": fn, "function": args.function, "lambda": lam.describe(),
               "mode": mode, **body}
    if fn.startswith(("vsharp", "tail")):
        payload["n"] = args.n
    if result.parts:
        payload["parts"] = result.parts
    rows = [[fn, lam.name, mode, result.lower, result.upper, result.exact]]
    return payload, ["functional", "lambda", "mode", "lower", "upper", "exact"], rows


def _probe(args) -> Report:
    if args.n_max < 1:
        raise ValidationError("--n-max must be positive")
    lam = _lambda(args)
    if args.family == "partial-sum":
        reports = [cx.probe_partial_sum(N, lam) for N in range(1, args.n_max + 1)]
    else:
        reports = [cx.probe_cesaro(N, args.alpha, args.beta, lam) for N in range(1, args.n_max + 1)]
    payload = {"command": "probe", "family": args.family, "reports": [r.to_json() for r in reports]}
    header = ["N", "functional_value", "bound_check", "variation_upper", "growth_ratio"]
    rows = [[r.N, r.functional_value, r.bound_check, r.variation_upper, r.growth_ratio] for r in reports]
    return payload, header, rows


def _check(args) -> Report:
    if args.which == "lowest":
        rep = check_lowest(args.n, args.grid_scale, args.start_exponent)
        payload = {"command": "check", "check": "lowest", "n": rep.n, "grid_scale": rep.grid_scale,
                   "start_exponent": rep.start_exponent, "min_product": float(rep.min_product),
                   "min_product_exact": str(rep.min_product), "argmin": str(rep.argmin), "holds": rep.holds}
        return payload, ["n", "min_product", "argmin", "holds"], [[rep.n, float(rep.min_product), str(rep.argmin),
                                                                   rep.holds]]
    if args.which == "kernels":
        if not 1 <= args.n <= 4096 or not 0 <= args.scale <= 16:
            raise ValidationError("kernel check needs 1 <= --n <= 4096 and 0 <= --scale <= 16")
        nums = np.arange(1 << args.scale)
        mismatches = 0
        for n in range(1, args.n + 1):
            ref = dirichlet_at(n, nums, args.scale, "direct")
            for s in STRATEGIES[1:]:
                mismatches += int(np.count_nonzero(dirichlet_at(n, nums, args.scale, s) != ref))
        payload = {"command": "check", "check": "kernels", "n": args.n, "scale": args.scale,
                   "mismatches": mismatches, "holds": mismatches == 0}
        return payload, ["n", "scale", "mismatches", "holds"], [[args.n, args.scale, mismatches, mismatches == 0]]
    rep = cx.tev_band_integrals(args.n, args.alpha)
    holds = bool(rep.slope >= 0.8 * args.alpha)
    payload = {"command": "check", "check": "tev", **rep.to_json(), "holds": holds}
    rows = [[m, v] for m, v in enumerate(rep.integrals.tolist(), start=1)]
    return payload, ["m", "band_integral"], rows


COMMANDS = {"kernel": _kernel, "partial-sum": _partial_sum, "cesaro": _cesaro, "variation": _variation,
            "probe": _probe, "check": _check}


# ------------------------------------------------------------ output


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    return obj


def render(payload: dict, header: list[str], rows: list[list[Any]], fmt: str) -> str:
    if fmt == "json":
        return json.dumps(_jsonable(payload), indent=2, allow_nan=False) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_real(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return buf.getvalue()


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        payload, header, rows = COMMANDS[args.command](args)
        text = render(payload, header, rows, args.format)
    except (ValidationError, argparse.ArgumentTypeError, ValueError) as exc:
        print(f"walshlab: error: {str(exc).splitlines()[0] if str(exc) else type(exc).__name__}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001 - report and map to exit code 1
        print(f"walshlab: internal error: {type(exc).__name__}: {exc}".splitlines()[0], file=sys.stderr)
        return 1
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
