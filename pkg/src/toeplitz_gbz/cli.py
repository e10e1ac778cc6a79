"""Batch command-line front end.

Every command reads a symbol from a JSON config (``--config``) or uses the
built-in 2-periodic example (``--prototype``), runs one computation and writes
a CSV or JSON dataset.  Exit codes: 0 success, 2 configuration error,
3 numerical failure, 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import gbz, io, lattice, limits, modes
from .errors import GBZError
from .linalg import eig_dense
from .sets import SpectralSet, Table
from .symbol import (
    SymbolCoefficients,
    coefficients_from_pairs,
    ellipse_geometry,
    evaluate,
    is_collapsed,
    prototype_symbol,
)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3
EXIT_IO = 4

# commands that need nonzero off-diagonal coefficients
GBZ_COMMANDS = {
    "symbol-info", "obc-limit", "toeplitz-sample", "gbz-locate", "classify",
    "winding", "convergence", "decay", "modes-render",
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    symbol: SymbolCoefficients
    params: dict[str, Any] = field(default_factory=dict)
    seed: int = 0

    def get(self, name: str, default=None):
        val = self.params.get(name)
        return default if val is None else val


def _parse_complex_list(raw, where: str) -> list[complex]:
    if not isinstance(raw, list):
        raise ConfigError(f"{where}: expected a list of [re, im] pairs")
    for i, item in enumerate(raw):
        ok = isinstance(item, (int, float)) or (
            isinstance(item, list) and len(item) == 2 and all(isinstance(v, (int, float)) for v in item)
        )
        if not ok:
            raise ConfigError(f"{where}[{i}]: expected [re, im], got {item!r}")
    return coefficients_from_pairs(raw)


def symbol_from_config(obj: dict) -> SymbolCoefficients:
    if not isinstance(obj, dict):
        raise ConfigError("symbol: expected an object with diag/upper/lower")
    lists = {}
    for key in ("diag", "upper", "lower"):
        if key not in obj:
            raise ConfigError(f"symbol.{key}: missing")
        lists[key] = _parse_complex_list(obj[key], f"symbol.{key}")
    k = len(lists["diag"])
    if k < 1:
        raise ConfigError("symbol.diag: need k >= 1 entries")
    for key in ("upper", "lower"):
        if len(lists[key]) != k:
            raise ConfigError(f"symbol.{key}: length {len(lists[key])} does not match k={k}")
    L = obj.get("spatial_period", 1.0)
    if not isinstance(L, (int, float)) or not L > 0:
        raise ConfigError("symbol.spatial_period: must be a positive number")
    return SymbolCoefficients(lists["diag"], lists["upper"], lists["lower"], float(L))


def load_config(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError:
        raise
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from exc


def _complex_arg(text: str) -> complex:
    parts = text.split(",")
    try:
        if len(parts) == 2:
            return complex(float(parts[0]), float(parts[1]))
        return complex(text.replace(" ", ""))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected 're,im' or a complex literal, got {text!r}")


def _floats(text: str, n: int, name: str) -> list[float]:
    try:
        vals = [float(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"{name}: expected {n} comma-separated numbers")
    if len(vals) != n:
        raise argparse.ArgumentTypeError(f"{name}: expected {n} comma-separated numbers")
    return vals


def _rect_arg(text: str) -> list[float]:
    return _floats(text, 4, "--rect")


def _res_arg(text: str) -> list[int]:
    try:
        nx, ny = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError("--res: expected NXxNY, e.g. 200x200")
    return [nx, ny]


def _int_list_arg(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise argparse.ArgumentTypeError("expected comma-separated integers")


def _as_complex_param(val, name: str) -> complex:
    if isinstance(val, complex):
        return val
    if isinstance(val, (int, float)):
        return complex(val)
    if isinstance(val, list) and len(val) == 2:
        return complex(float(val[0]), float(val[1]))
    raise ConfigError(f"{name}: expected [re, im]")


def _require_int(cfg: RunConfig, name: str, default=None, minimum: int = 1) -> int:
    val = cfg.get(name, default)
    if val is None:
        raise ConfigError(f"{name}: required for this command")
    if not isinstance(val, int) or isinstance(val, bool):
        raise ConfigError(f"{name}: expected an integer, got {val!r}")
    if val < minimum:
        raise ConfigError(f"{name}: must be >= {minimum}, got {val}")
    return val


# ---- commands -------------------------------------------------------------


def cmd_symbol_info(cfg: RunConfig):
    s = cfg.symbol
    e = ellipse_geometry(s)
    major, minor = e.semi_axes(0.0)
    coll = lattice.collapsed_symbol(s)
    pair = lambda z: [z.real, z.imag]  # noqa: E731
    return {
        "k": s.k,
        "spatial_period": s.spatial_period,
        "delta": e.delta,
        "zeta": e.zeta,
        "K": pair(e.K),
        "A_plus": e.A_plus,
        "A_minus": e.A_minus,
        "semi_axes": [major, minor],
        "collapsed": is_collapsed(s),
        "obc_phase": limits.obc_phase(s),
        "collapsed_symbol": {
            "diag": [pair(v) for v in coll.diag],
            "upper": [pair(v) for v in coll.upper],
            "lower": [pair(v) for v in coll.lower],
        },
    }


def cmd_finite_spectrum(cfg: RunConfig):
    m = _require_int(cfg, "m")
    mode = cfg.get("via_collapse", "auto")
    via = {"auto": None, "on": True, "off": False, True: True, False: False}.get(mode, "bad")
    if via == "bad":
        raise ConfigError(f"via_collapse: expected auto/on/off, got {mode!r}")
    return limits.finite_obc_spectrum(cfg.symbol, m, via)


def cmd_circulant_spectrum(cfg: RunConfig):
    m = _require_int(cfg, "m", minimum=2)
    if cfg.get("dense", False):
        eigs = eig_dense(lattice.circulant_matrix(cfg.symbol, m).matrix).eigenvalues
        params = np.column_stack([np.full(eigs.size, m), np.full(eigs.size, math.nan)])
        return SpectralSet(eigs, "FinitePBC", params, ("m", ""))
    return limits.pbc_spectrum(cfg.symbol, m)


def cmd_laurent_sample(cfg: RunConfig):
    return limits.laurent_spectrum_sample(cfg.symbol, _require_int(cfg, "n_alpha", 4001, 16))


def cmd_obc_limit(cfg: RunConfig):
    return limits.obc_limit_set(cfg.symbol, _require_int(cfg, "n_alpha", 4001, 16))


def cmd_toeplitz_sample(cfg: RunConfig):
    return gbz.toeplitz_spectrum_sample(
        cfg.symbol,
        _require_int(cfg, "n_alpha", 256, 8),
        _require_int(cfg, "n_beta", 16, 1),
        bool(cfg.get("full_zone", False)),
    )


def _lambda(cfg: RunConfig) -> complex:
    val = cfg.get("lambda")
    if val is None:
        raise ConfigError("lambda: required for this command")
    return _as_complex_param(val, "lambda")


def cmd_gbz_locate(cfg: RunConfig):
    q1, q2 = gbz.locate_quasiperiodicities(cfg.symbol, _lambda(cfg))
    rows = [(name, q.alpha, q.beta, q.z.real, q.z.imag) for name, q in (("primary", q1), ("conjugate", q2))]
    return Table(["which", "alpha", "beta", "z_re", "z_im"], rows)


def cmd_classify(cfg: RunConfig):
    lam = _lambda(cfg)
    c = gbz.classify(cfg.symbol, lam)
    return Table(["re", "im", "tag", "winding"], [(lam.real, lam.imag, c.tag.value, c.winding)])


def cmd_winding(cfg: RunConfig):
    lam = _lambda(cfg)
    w = gbz.winding_number(cfg.symbol, lam, _require_int(cfg, "n_points", 256, gbz.MIN_WINDING_POINTS))
    return Table(["re", "im", "winding"], [(lam.real, lam.imag, w)])


def cmd_pseudospectrum(cfg: RunConfig):
    m = _require_int(cfg, "m")
    rect = cfg.get("rect", [-3.0, 3.0, -3.0, 3.0])
    res = cfg.get("res", [200, 200])
    if not (isinstance(rect, list) and len(rect) == 4):
        raise ConfigError("rect: expected [x0, x1, y0, y1]")
    if not (isinstance(res, list) and len(res) == 2):
        raise ConfigError("res: expected [nx, ny]")
    try:
        return limits.pseudospectrum_grid(cfg.symbol, m, tuple(rect), tuple(res))
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def cmd_convergence(cfg: RunConfig):
    m_list = cfg.get("m_list", [10, 50, 200])
    if not (isinstance(m_list, list) and m_list and all(isinstance(m, int) and m >= 1 for m in m_list)):
        raise ConfigError("m_list: expected a list of positive integers")
    if any(b <= a for a, b in zip(m_list, m_list[1:])):
        raise ConfigError("m_list: must be strictly increasing")
    targets = cfg.get("targets", ["OBC", "PBC"])
    return limits.convergence_study(cfg.symbol, m_list, targets, _require_int(cfg, "n_alpha", 4001, 16))


def cmd_decay(cfg: RunConfig):
    return modes.decay_table(cfg.symbol, _require_int(cfg, "m", 20, 4))


def _random_interior_lambda(s: SymbolCoefficients, seed: int) -> complex:
    rng = np.random.default_rng(seed)
    delta = ellipse_geometry(s).delta
    alpha = rng.uniform(-np.pi, np.pi)
    beta = rng.uniform(0.1, 0.9) * delta / 2
    eigs = np.linalg.eigvals(evaluate(s, np.exp(beta - 1j * alpha)))
    return complex(eigs[rng.integers(eigs.size)])


def cmd_modes_render(cfg: RunConfig):
    s = cfg.symbol
    lam = _as_complex_param(cfg.get("lambda"), "lambda") if cfg.get("lambda") is not None \
        else _random_interior_lambda(s, cfg.seed)
    ev = modes.symbolic_eigenvector(s, lam, _require_int(cfg, "m_render", 40, 2))
    rows = [(i, i // s.k, v.real, v.imag, abs(v)) for i, v in enumerate(ev.vector)]
    return Table(["site", "cell", "re", "im", "abs"], rows)


COMMANDS = {
    "symbol-info": cmd_symbol_info,
    "finite-spectrum": cmd_finite_spectrum,
    "circulant-spectrum": cmd_circulant_spectrum,
    "laurent-sample": cmd_laurent_sample,
    "obc-limit": cmd_obc_limit,
    "toeplitz-sample": cmd_toeplitz_sample,
    "gbz-locate": cmd_gbz_locate,
    "classify": cmd_classify,
    "winding": cmd_winding,
    "pseudospectrum": cmd_pseudospectrum,
    "convergence": cmd_convergence,
    "decay": cmd_decay,
    "modes-render": cmd_modes_render,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--config", help="JSON config with a 'symbol' object and parameters")
    src.add_argument("--prototype", action="store_true", help="use the built-in 2-periodic example")
    common.add_argument("--out", default="-", help="output file (default: stdout)")
    common.add_argument("--format", choices=("csv", "json"), default=None)
    common.add_argument("--seed", type=int, default=None)

    parser = argparse.ArgumentParser(prog="gbz-spectra", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p = {name: sub.add_parser(name, parents=[common]) for name in COMMANDS}

    for name in ("finite-spectrum", "circulant-spectrum", "pseudospectrum", "decay"):
        p[name].add_argument("--m", type=int)
    p["finite-spectrum"].add_argument("--via-collapse", choices=("auto", "on", "off"))
    p["circulant-spectrum"].add_argument("--dense", action="store_true", default=None,
                                         help="eigensolve the assembled ring instead of the blocks")
    for name in ("laurent-sample", "obc-limit", "toeplitz-sample", "convergence"):
        p[name].add_argument("--n-alpha", type=int)
    p["toeplitz-sample"].add_argument("--n-beta", type=int)
    p["toeplitz-sample"].add_argument("--full-zone", action="store_true", default=None)
    for name in ("gbz-locate", "classify", "winding", "modes-render"):
        p[name].add_argument("--lambda", dest="lambda", type=_complex_arg, metavar="RE,IM")
    p["winding"].add_argument("--n-points", type=int)
    p["pseudospectrum"].add_argument("--rect", type=_rect_arg, metavar="X0,X1,Y0,Y1")
    p["pseudospectrum"].add_argument("--res", type=_res_arg, metavar="NXxNY")
    p["convergence"].add_argument("--m-list", type=_int_list_arg, metavar="M1,M2,...")
    p["modes-render"].add_argument("--m-render", type=int)
    return parser


_NON_PARAMS = {"command", "config", "prototype", "out", "format", "seed"}


def make_config(args: argparse.Namespace) -> tuple[RunConfig, dict]:
    raw: dict = {}
    if args.config:
        raw = load_config(args.config)
        if not isinstance(raw, dict):
            raise ConfigError(f"{args.config}: top level must be a JSON object")
        symbol = symbol_from_config(raw.get("symbol"))
    elif args.prototype:
        symbol = prototype_symbol()
    else:
        raise ConfigError("no symbol given: pass --config FILE or --prototype")
    params = {k: v for k, v in raw.items() if k not in ("symbol", "seed", "output")}
    if "lambda" in params and params["lambda"] is not None:
        params["lambda"] = _as_complex_param(params["lambda"], "lambda")
    for key, val in vars(args).items():
        if key in _NON_PARAMS or val is None:
            continue
        params[key] = val
    seed = args.seed if args.seed is not None else raw.get("seed", 0)
    if not isinstance(seed, int):
        raise ConfigError("seed: expected an integer")
    return RunConfig(symbol, params, seed), raw


_VALUE_FLAGS = ("--rect", "--lambda")


def _glue_negative_values(argv: list[str]) -> list[str]:
    """Turn ``--rect -3,3,-3,3`` into ``--rect=-3,3,-3,3`` so argparse keeps the value."""
    out: list[str] = []
    it = iter(argv)
    for tok in it:
        if tok in _VALUE_FLAGS:
            nxt = next(it, None)
            out.append(tok if nxt is None else f"{tok}={nxt}")
        else:
            out.append(tok)
    return out


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(_glue_negative_values(argv))
    try:
        cfg, raw = make_config(args)
        if args.command in GBZ_COMMANDS and cfg.symbol.reciprocal_degenerate:
            raise ConfigError("symbol: command requires nonzero upper and lower coefficients")
        fmt = args.format or raw.get("format") or ("json" if args.command == "symbol-info" else "csv")
        if fmt not in ("csv", "json"):
            raise ConfigError(f"format: expected csv or json, got {fmt!r}")
        dataset = COMMANDS[args.command](cfg)
        io.emit(dataset, fmt, args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (GBZError, np.linalg.LinAlgError, ArithmeticError) as exc:
        print(f"numerical failure in {type(exc).__module__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ValueError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    return EXIT_OK


def main() -> None:
    try:
        code = run()
        sys.stdout.flush()
    except BrokenPipeError:
        # downstream pager or head closed early
        sys.stderr.close()
        code = EXIT_OK
    sys.exit(code)


if __name__ == "__main__":
    main()
