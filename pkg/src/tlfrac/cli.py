"""``tlfrac`` command-line front end.

Exit codes: 0 ok, 2 input error, 3 solver error, 4 IO error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .dyadic import HolderExpansion, dyadic_grid, expand, takagi_landsberg
from .fraccalc import dm_sequence, frac_deriv_expansion_left, frac_deriv_expansion_right, frac_integral_expansion
from .oracle import exact_linear
from .solvers import (
    LinearRSProblem,
    SolverError,
    VolterraProblem,
    assemble,
    solve_linear_rs,
    solve_volterra,
)
from .stieltjes import rs_integral
from .tables import TABLE1_LEVELS, TABLE2_P, reproduce_table1, reproduce_table2
from .xoshiro import Xoshiro256

EXIT_OK, EXIT_INPUT, EXIT_SOLVER, EXIT_IO = 0, 2, 3, 4

COMMANDS = (
    "expand",
    "eval",
    "frac-int",
    "frac-deriv",
    "rs-integral",
    "solve-volterra",
    "solve-linear",
    "dm-sequence",
    "repro-table1",
    "repro-table2",
    "figure-data",
)

FIGURE_LEVEL = 10
FIGURE_DRIVER_DEPTH = 7


class InputError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    command: str
    params: dict = field(default_factory=dict)
    out: Path | None = None
    fmt: str = "csv"

    def get(self, name: str, default=None):
        v = self.params.get(name)
        return default if v is None else v

    def need(self, name: str):
        v = self.params.get(name)
        if v is None:
            raise InputError(f"{self.command} requires --{name.replace('_', '-')}")
        return v


def num(x: float) -> str:
    return f"{float(x):.17g}"


def _safe_fn(expr: str):
    """Compile a vectorised function of ``t`` from an expression like ``t*(1-t)``."""
    names = {k: getattr(np, k) for k in ("sin", "cos", "exp", "log", "sqrt", "abs", "minimum", "maximum", "where", "pi")}
    names["np"] = np
    try:
        code = compile(expr, "<fn>", "eval")
    except SyntaxError as exc:
        raise InputError(f"cannot parse --fn {expr!r}: {exc.msg}") from None
    for name in code.co_names:
        if name not in names and name != "t":
            raise InputError(f"--fn may not reference {name!r}")

    def f(t):
        return np.broadcast_to(np.asarray(eval(code, {"__builtins__": {}}, {**names, "t": t}), dtype=float), np.shape(t))

    return f


def _source(cfg: RunConfig, prefix: str = "") -> HolderExpansion:
    """Expansion from ``--in`` JSON, ``--takagi`` or ``--fn`` (with ``--H`` and ``--p``)."""
    path = cfg.get(prefix + "input")
    if path:
        try:
            return HolderExpansion.from_json(Path(path).read_text())
        except (KeyError, json.JSONDecodeError) as exc:
            raise InputError(f"malformed expansion file {path}: {exc}") from None
    h = cfg.need(prefix + "H")
    p = cfg.need("p")
    if prefix == "" and cfg.get("takagi"):
        return takagi_landsberg(h, p)
    expr = cfg.get(prefix + "fn")
    if expr is None:
        raise InputError(f"{cfg.command} needs an input: --{prefix}in FILE, --{prefix}fn EXPR" + (" or --takagi" if not prefix else ""))
    return expand(_safe_fn(expr), h, p)


def _write_rows(cfg: RunConfig, header: list[str], rows: list[list], meta: dict | None = None) -> None:
    """Emit a table as CSV (shortest round-trip floats, LF endings) or JSON, to ``--out`` or stdout."""
    if cfg.fmt == "json":
        text = json.dumps({**(meta or {}), "columns": header, "rows": rows}) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([repr(float(v)) if isinstance(v, (float, np.floating)) else v for v in r])
        text = buf.getvalue()
    _emit(cfg.out, text)


def _emit(out: Path | None, text: str) -> None:
    if out is None:
        sys.stdout.write(text)
        return
    with open(out, "w", newline="") as fh:
        fh.write(text)


def _print_value(cfg: RunConfig, name: str, value: float) -> None:
    if cfg.fmt == "json":
        _emit(cfg.out, json.dumps({name: float(value)}) + "\n")
    else:
        _emit(cfg.out, num(value) + "\n")


# -- commands -----------------------------------------------------------------


def cmd_expand(cfg: RunConfig) -> None:
    x = _source(cfg)
    if cfg.fmt == "json":
        _emit(cfg.out, x.to_json() + "\n")
        return
    rows = [["f0", "", "", x.f0], ["f1", "", "", x.f1]]
    for m, lev in enumerate(x.levels):
        rows += [["c", m, k, float(c)] for k, c in enumerate(lev)]
    _write_rows(cfg, ["kind", "m", "k", "value"], rows)


def cmd_eval(cfg: RunConfig) -> None:
    x = _source(cfg)
    t = cfg.get("t")
    if t is not None:
        _print_value(cfg, "value", x(t))
        return
    grid = dyadic_grid(cfg.get("grid_level", 10))
    _write_rows(cfg, ["t", "value"], [[float(s), float(v)] for s, v in zip(grid, x(grid))])


def cmd_frac_int(cfg: RunConfig) -> None:
    x = _source(cfg)
    _print_value(cfg, "value", frac_integral_expansion(x, cfg.need("alpha"), cfg.need("t")))


def cmd_frac_deriv(cfg: RunConfig) -> None:
    x = _source(cfg)
    alpha, t, T = cfg.need("alpha"), cfg.need("t"), cfg.get("T")
    if T is None:
        v = frac_deriv_expansion_left(x, alpha, t)
    else:
        v = frac_deriv_expansion_right(x, alpha, t, T)
    _print_value(cfg, "value", v)


def cmd_rs_integral(cfg: RunConfig) -> None:
    f = _source(cfg)
    g = _source(cfg, "g")
    _print_value(cfg, "value", rs_integral(f, g, cfg.need("t")))


def _solution_out(cfg: RunConfig, sol, extra: dict) -> None:
    if cfg.fmt == "json":
        d = json.loads(sol.expansion.to_json())
        _emit(cfg.out, json.dumps({"x1": sol.x1, "p": sol.system_level, **extra, "expansion": d}) + "\n")
        return
    rows = [["x0", "", "", sol.expansion.f0], ["x1", "", "", sol.x1]]
    for m, lev in enumerate(sol.expansion.levels):
        rows += [["c", m, k, float(c)] for k, c in enumerate(lev)]
    rows += [[k, "", "", float(v)] for k, v in extra.items()]
    _write_rows(cfg, ["kind", "m", "k", "value"], rows)


def _dump_system(cfg: RunConfig, prob) -> None:
    stem = cfg.get("dump")
    if stem:
        assemble(prob, cfg.need("p")).dump(stem)


def cmd_solve_volterra(cfg: RunConfig) -> None:
    h, alpha = cfg.need("H"), cfg.need("alpha")
    p = cfg.need("p")
    extra = {}
    if cfg.get("fn") is None:
        # benchmark with exact solution t^H
        if not 0 < h < alpha < 1:
            raise InputError(f"need 0 < H < alpha < 1, got H={h}, alpha={alpha}")
        g = expand(lambda t: t**h * (1 - t**alpha), h, max(p, cfg.get("ext", p)) + 1)
        theta = cfg.get("theta", math.gamma(alpha + h + 1) / math.gamma(h + 1))
        x0 = cfg.get("x0", 0.0)
        prob = VolterraProblem(x0, theta, alpha, g)
        sol = solve_volterra(prob, p, cfg.get("ext"))
        if cfg.get("theta") is None and x0 == 0:
            grid = dyadic_grid(p + 1)
            extra["sup_error"] = float(np.max(np.abs(sol(grid) - grid**h)))
    else:
        g = expand(_safe_fn(cfg.need("fn")), h, max(p, cfg.get("ext", p)) + 1)
        prob = VolterraProblem(cfg.get("x0", 0.0), cfg.need("theta"), alpha, g)
        sol = solve_volterra(prob, p, cfg.get("ext"))
    _dump_system(cfg, prob)
    _solution_out(cfg, sol, extra)


def _random_driver(seed: int, hurst: float, depth: int = FIGURE_DRIVER_DEPTH) -> HolderExpansion:
    """Driver with coefficients uniform on [-1, 1] through ``depth`` (xoshiro256** stream)."""
    gen = Xoshiro256(seed)
    draws = gen.uniform_pm1((1 << (depth + 1)) - 1)
    return HolderExpansion.from_flat(hurst, 0.0, 0.0, draws)


def _linear_driver(cfg: RunConfig, h: float, p: int) -> tuple[HolderExpansion, object]:
    """Driver expansion and a callable evaluating the driver itself."""
    seed = cfg.get("seed")
    if seed is not None:
        g = _random_driver(seed, h)
        if g.max_level < p:
            g = HolderExpansion(h, 0.0, 0.0, g.levels + tuple(np.zeros(1 << m) for m in range(g.max_level + 1, p + 1)))
        return g, g
    if cfg.get("fn") is not None:
        fn = _safe_fn(cfg.need("fn"))
    else:
        fn = lambda t: 0.5**h - np.abs(t - 0.5) ** h
    return expand(fn, h, max(p, cfg.get("ext", p)) + 1), fn


def cmd_solve_linear(cfg: RunConfig) -> None:
    h, p = cfg.need("H"), cfg.need("p")
    g, gfn = _linear_driver(cfg, h, p)
    x0, beta, gamma = cfg.get("x0", 1.0), cfg.need("beta"), cfg.need("gamma")
    prob = LinearRSProblem(x0, beta, gamma, cfg.get("alpha", 0.5), g)
    sol = solve_linear_rs(prob, p, cfg.get("ext"))
    grid = dyadic_grid(cfg.get("grid_level", 14))
    exact = exact_linear(x0, beta, gamma, gfn)
    _dump_system(cfg, prob)
    _solution_out(cfg, sol, {"sup_error": float(np.max(np.abs(sol(grid) - exact(grid))))})


def cmd_dm_sequence(cfg: RunConfig) -> None:
    m0, M = cfg.need("m0"), cfg.need("M")
    d = dm_sequence(cfg.need("H"), m0, cfg.need("k0"), M)
    _write_rows(cfg, ["m", "d_m", "partial_sum"], [[m0 + i, float(v), float(s)] for i, (v, s) in enumerate(zip(d, np.cumsum(d)))])


def cmd_repro_table1(cfg: RunConfig) -> None:
    rows = reproduce_table1(levels=TABLE1_LEVELS, grid_level=cfg.get("grid_level"))
    out = [[r.p, r.hurst, r.alpha, r.error, r.published, r.rel_dev] for r in rows]
    _write_rows(cfg, ["p", "H", "alpha", "error", "published", "rel_dev"], out)
    if cfg.out is not None:
        for r in rows:
            print(f"p={r.p:2d} H={r.hurst:<5} alpha={r.alpha:<5} error={r.error:.3e} published={r.published:.3e} rel_dev={r.rel_dev:.2%}")


def cmd_repro_table2(cfg: RunConfig) -> None:
    rows = reproduce_table2(grid_level=cfg.get("grid_level", 14))
    out = [[r.hurst, r.sup_error, r.published_sup, r.coeff_dev, r.published_coeff] for r in rows]
    _write_rows(cfg, ["H", "sup_error", "published_sup_error", "coeff_dev", "published_coeff_dev"], out, {"p": TABLE2_P})
    if cfg.out is not None:
        for r in rows:
            print(
                f"H={r.hurst:<5} sup={r.sup_error:.5f} (published {r.published_sup:.5f}) "
                f"coeff={r.coeff_dev:.5f} (published {r.published_coeff:.5f})"
            )


def figure_curves(seed: int, true_h: float, hursts: list[float], p: int, beta: float, gamma: float, x0: float):
    """Curves of the driver, the exact solution and ``X_p`` for each assumed ``H``.

    The driver's coefficients are fixed by ``seed``; solving with an assumed
    ``H`` reinterprets the same coefficients with that ``H``'s level weights,
    which is how a mis-specified ``H`` enters.
    """
    truth = _random_driver(seed, true_h)
    grid = dyadic_grid(FIGURE_LEVEL)
    gv = truth(grid)
    xv = exact_linear(x0, beta, gamma, truth)(grid)
    out = {}
    for h in hursts:
        assumed = HolderExpansion(h, 0.0, 0.0, truth.levels)
        if assumed.max_level < p:
            raise InputError(f"driver depth {assumed.max_level} below p={p}")
        sol = solve_linear_rs(LinearRSProblem(x0, beta, gamma, 0.5, assumed), p, FIGURE_LEVEL - 1)
        out[h] = (sol(grid), float(np.max(np.abs(sol(grid) - xv))))
    return grid, gv, xv, out


def cmd_figure_data(cfg: RunConfig) -> None:
    seed = cfg.get("seed")
    if seed is None:
        raise InputError("figure-data requires --seed")
    true_h = cfg.get("H", 0.51)
    hursts = [true_h] + [h for h in (cfg.get("H_mis") or [0.8]) if h != true_h]
    p = cfg.get("p", 6)
    grid, gv, xv, curves = figure_curves(seed, true_h, hursts, p, cfg.get("beta", -2.0), cfg.get("gamma", 3.0), cfg.get("x0", 1.0))
    outdir = cfg.out or Path(".")
    outdir.mkdir(parents=True, exist_ok=True)
    summary = []
    for h, (xp, err) in curves.items():
        rows = [[float(t), float(a), float(b), float(c)] for t, a, b, c in zip(grid, gv, xv, xp)]
        _write_rows(RunConfig(cfg.command, cfg.params, outdir / f"figure_H{h:g}.{cfg.fmt}", cfg.fmt), ["t", "g", "X", "X_p"], rows, {"H": h})
        summary.append([h, err])
    _write_rows(RunConfig(cfg.command, cfg.params, outdir / f"figure_summary.{cfg.fmt}", cfg.fmt), ["H", "sup_error"], summary, {"true_H": true_h, "seed": seed})
    for h, err in summary:
        print(f"H={h:g} sup|X-X_p|={num(err)}")


HANDLERS = {
    "expand": cmd_expand,
    "eval": cmd_eval,
    "frac-int": cmd_frac_int,
    "frac-deriv": cmd_frac_deriv,
    "rs-integral": cmd_rs_integral,
    "solve-volterra": cmd_solve_volterra,
    "solve-linear": cmd_solve_linear,
    "dm-sequence": cmd_dm_sequence,
    "repro-table1": cmd_repro_table1,
    "repro-table2": cmd_repro_table2,
    "figure-data": cmd_figure_data,
}


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="tlfrac", description="Takagi-Landsberg fractional calculus toolkit")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--H", type=float, help="Hurst / Holder exponent")
    ap.add_argument("--alpha", type=float)
    ap.add_argument("--p", type=int, help="truncation / system level")
    ap.add_argument("--ext", type=int, help="extension level for solver output")
    ap.add_argument("--beta", type=float)
    ap.add_argument("--gamma", type=float)
    ap.add_argument("--theta", type=float)
    ap.add_argument("--x0", type=float)
    ap.add_argument("--t", type=float)
    ap.add_argument("--T", type=float)
    ap.add_argument("--grid-level", type=int)
    ap.add_argument("--seed", type=int)
    ap.add_argument("--out", type=Path)
    ap.add_argument("--format", choices=("csv", "json"), default="csv")
    ap.add_argument("--takagi", action="store_true", help="use the Takagi-Landsberg function x^H")
    ap.add_argument("--fn", help="function of t, e.g. 't*(1-t)'")
    ap.add_argument("--in", dest="input", help="expansion JSON file")
    ap.add_argument("--gH", type=float, help="Hurst exponent of the integrator (rs-integral)")
    ap.add_argument("--gfn", help="integrator function of t (rs-integral)")
    ap.add_argument("--gin", dest="ginput", help="integrator expansion JSON file (rs-integral)")
    ap.add_argument("--m0", type=int)
    ap.add_argument("--k0", type=int)
    ap.add_argument("--M", type=int)
    ap.add_argument("--H-mis", type=float, nargs="+", dest="H_mis", help="mis-specified H values (figure-data)")
    ap.add_argument("--dump", help="write the assembled system to STEM.csv / STEM.json")
    return ap


def parse_config(argv: list[str] | None = None) -> RunConfig:
    ns = build_parser().parse_args(argv)
    params = {k: v for k, v in vars(ns).items() if k not in ("command", "out", "format")}
    return RunConfig(ns.command, params, ns.out, ns.format)


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_config(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    try:
        HANDLERS[cfg.command](cfg)
    except SolverError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except OSError as exc:
        print(f"io error: {exc}", file=sys.stderr)
        return EXIT_IO
    except (ValueError, ArithmeticError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
