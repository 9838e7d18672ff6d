"""Command-line front end: single-point evaluations, sweeps, CSV emission, and
a validation battery.

CSV conventions: `#`-prefixed metadata lines (version, command, seed, axis
names), a mandatory header row, numbers serialized with 17 significant digits
(floats round-trip exactly), empty fields where a column does not apply, and
an `inf` sentinel for unbounded ratios. Output is a pure function of argv, so
identical invocations produce byte-identical files.

Exit codes: 0 success, 1 usage/parameter error, 2 validation failure.
"""

from __future__ import annotations

import argparse
import io
import math
import os
import sys

import numpy as np

from . import __version__
from .achievability import (
    McConfig,
    StrategyParams,
    UpperSearchConfig,
    achievable_rate_alpha1,
    capacity,
    lmmse_x,
    mc_lmmse_check,
    upper_bound_mmse,
)
from .core import FeasibilityError, ParameterError, ProblemParams, feasible
from .lower_bounds import (
    GammaSearchConfig,
    SigmaSuSearchConfig,
    lb_sup_gamma,
    lower_bound_mmse,
    old_lower_bound,
)
from .witsenhausen import (
    SweepTable,
    cost_ratio_surface,
    mmse_ratio_surface,
    mmse_vs_rate,
    power_for_mmse_many,
    ratio_with_conventions,
)

THREADS_ENV = "EMBEDBOUNDS_THREADS"

SWEEP_COLUMNS = (
    "axis1",
    "axis2",
    "lower",
    "upper",
    "ratio",
    "sigma_su_star",
    "gamma_star",
    "alpha_star",
    "beta_star",
)


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 on usage errors, not argparse's 2
        raise UsageError(message)


def _fmt(x) -> str:
    if x is None:
        return ""
    x = float(x)
    if math.isnan(x):
        return ""
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def write_sweep_csv(table: SweepTable, fh, argv, seed=None) -> None:
    fh.write("# embedbounds-csv v1\n")
    fh.write(f"# version={__version__}\n")
    fh.write(f"# command=embedbounds {' '.join(argv)}\n")
    if seed is not None:
        fh.write(f"# seed={seed}\n")
    fh.write(f"# axis1={table.axis1_name}\n")
    fh.write(f"# axis2={table.axis2_name}\n")
    for key in sorted(table.meta):
        fh.write(f"# {key}={table.meta[key]}\n")
    fh.write(",".join(SWEEP_COLUMNS) + "\n")
    for i, x1 in enumerate(table.axis1):
        for j, x2 in enumerate(table.axis2):
            row = (
                x1,
                x2,
                table.lower[i, j],
                table.upper[i, j],
                table.ratio[i, j],
                table.sigma_su_star[i, j],
                table.gamma_star[i, j],
                table.alpha_star[i, j],
                table.beta_star[i, j],
            )
            fh.write(",".join(_fmt(v) for v in row) + "\n")


def _parse_field(s: str) -> float:
    return float("nan") if s == "" else float(s)


def read_sweep_csv(fh) -> SweepTable:
    """Parse a sweep CSV back into a SweepTable with identical values."""
    meta = {}
    header = None
    rows = []
    for line in fh:
        line = line.rstrip("\n")
        if not line:
            continue
        if line.startswith("#"):
            body = line[1:].strip()
            if "=" in body:
                k, v = body.split("=", 1)
                meta[k] = v
            continue
        if header is None:
            header = line.split(",")
            if tuple(header) != SWEEP_COLUMNS:
                raise ParameterError(f"unexpected CSV header: {header}")
            continue
        rows.append([_parse_field(s) for s in line.split(",")])
    if header is None or not rows:
        raise ParameterError("CSV contains no data rows")
    data = np.array(rows)
    axis1 = _unique_keep_order(data[:, 0])
    axis2 = _unique_keep_order(data[:, 1])
    n1, n2 = axis1.size, axis2.size
    if n1 * n2 != data.shape[0]:
        raise ParameterError("CSV rows do not form a full grid")
    grids = [data[:, k].reshape(n1, n2) for k in range(2, 9)]
    return SweepTable(
        axis1_name=meta.get("axis1", "axis1"),
        axis2_name=meta.get("axis2", "axis2"),
        axis1=axis1,
        axis2=axis2,
        lower=grids[0],
        upper=grids[1],
        ratio=grids[2],
        sigma_su_star=grids[3],
        gamma_star=grids[4],
        alpha_star=grids[5],
        beta_star=grids[6],
        meta=meta,
    )


def _unique_keep_order(values: np.ndarray) -> np.ndarray:
    seen = {}
    for v in values:
        if v not in seen:
            seen[v] = None
    return np.array(list(seen))


def _write_simple_csv(fh, argv, columns, row, seed=None) -> None:
    fh.write("# embedbounds-csv v1\n")
    fh.write(f"# version={__version__}\n")
    fh.write(f"# command=embedbounds {' '.join(argv)}\n")
    if seed is not None:
        fh.write(f"# seed={seed}\n")
    fh.write(",".join(columns) + "\n")
    fh.write(",".join(_fmt(v) for v in row) + "\n")


def _emit(text: str, out_path) -> None:
    if out_path is None or out_path == "-":
        sys.stdout.write(text)
    else:
        with open(out_path, "w", newline="") as fh:
            fh.write(text)


def _log_axis(lo: float, hi: float, n: int) -> np.ndarray:
    if n == 1 and lo == hi and lo > 0:
        return np.array([lo])
    if not (lo > 0 and hi > lo and n >= 2):
        raise UsageError("grid needs 0 < min < max and n >= 2 (or min == max with n = 1)")
    return np.power(10.0, np.linspace(math.log10(lo), math.log10(hi), n))


def _search_cfgs(args):
    g = GammaSearchConfig(coarse_points=args.gamma_points) if args.gamma_points else GammaSearchConfig()
    s = SigmaSuSearchConfig(grid_points=args.su_points) if args.su_points else SigmaSuSearchConfig()
    u = UpperSearchConfig(beta_points=args.beta_points) if args.beta_points else UpperSearchConfig()
    return s, g, u


def build_parser() -> _Parser:
    p = _Parser(prog="embedbounds", description=__doc__)
    sub = p.add_subparsers(dest="cmd", required=True)

    def add_common(sp, point=False):
        sp.add_argument("--out", default=None, help="output CSV path (default stdout)")
        sp.add_argument("--threads", type=int, default=None,
                        help=f"worker threads (default ${THREADS_ENV} or 1)")
        sp.add_argument("--su-points", type=int, default=None)
        sp.add_argument("--gamma-points", type=int, default=None)
        sp.add_argument("--beta-points", type=int, default=None)
        if point:
            sp.add_argument("--sigma", type=float, required=True)
            sp.add_argument("--power", type=float, required=True)
            sp.add_argument("--rate", type=float, default=0.0)

    for name in ("point", "lower", "upper"):
        add_common(sub.add_parser(name, help=f"{name} bound at one (sigma, P, R)"), point=True)

    sp = sub.add_parser("capacity", help="perfect-recovery capacity C(P)")
    add_common(sp)
    sp.add_argument("--sigma", type=float, required=True)
    sp.add_argument("--power", type=float, required=True)

    sp = sub.add_parser("cost-ratio", help="weighted-cost ratio surface over (k, sigma)")
    add_common(sp)
    sp.add_argument("--bound", choices=("new", "legacy"), default="new")
    sp.add_argument("--kmin", type=float, default=1e-2)
    sp.add_argument("--kmax", type=float, default=1e2)
    sp.add_argument("--smin", type=float, default=1e-2)
    sp.add_argument("--smax", type=float, default=1e2)
    sp.add_argument("--n", type=int, default=81, help="points per axis")
    sp.add_argument("--n2", type=int, default=None, help="sigma-axis points (default --n)")

    sp = sub.add_parser("mmse-ratio", help="MMSE-bound ratio surface over (P, sigma)")
    add_common(sp)
    sp.add_argument("--bound", choices=("new", "legacy"), default="new")
    sp.add_argument("--rate", type=float, default=0.0)
    sp.add_argument("--pmin", type=float, default=1e-2)
    sp.add_argument("--pmax", type=float, default=1e1)
    sp.add_argument("--smin", type=float, default=1e-1)
    sp.add_argument("--smax", type=float, default=1e1)
    sp.add_argument("--n", type=int, default=61)
    sp.add_argument("--n2", type=int, default=None)

    sp = sub.add_parser("power-ratio", help="required-power ratio over (target MMSE, sigma)")
    add_common(sp)
    sp.add_argument("--rate", type=float, default=0.0)
    sp.add_argument("--mmin", type=float, default=0.02)
    sp.add_argument("--mmax", type=float, default=0.98)
    sp.add_argument("--smin", type=float, default=1e-1)
    sp.add_argument("--smax", type=float, default=1e1)
    sp.add_argument("--n", type=int, default=25)
    sp.add_argument("--n2", type=int, default=None)

    sp = sub.add_parser("rate-sweep", help="MMSE bounds vs rate at fixed (sigma, P)")
    add_common(sp)
    sp.add_argument("--sigma", type=float, required=True)
    sp.add_argument("--power", type=float, required=True)
    sp.add_argument("--rmin", type=float, default=0.0)
    sp.add_argument("--rmax", type=float, default=None,
                    help="default: the feasibility limit (1/2)log2(1+P)")
    sp.add_argument("--n", type=int, default=33)

    sp = sub.add_parser("validate", help="run the oracle/invariant battery")
    add_common(sp)
    sp.add_argument("--seed", type=int, required=True,
                    help="RNG seed (Monte Carlo checks require it)")
    sp.add_argument("--trials", type=int, default=200,
                    help="random points per property check")
    return p


def _threads(args) -> int:
    if args.threads is not None:
        return max(1, args.threads)
    env = os.environ.get(THREADS_ENV)
    return max(1, int(env)) if env else 1


def run(argv) -> int:
    argv = list(argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return _dispatch(args, argv)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (ParameterError, FeasibilityError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1


def _dispatch(args, argv) -> int:
    buf = io.StringIO()
    s_cfg, g_cfg, u_cfg = _search_cfgs(args)

    if args.cmd in ("point", "lower", "upper"):
        params = ProblemParams(args.sigma, args.power, args.rate)
        cols = ["sigma", "power", "rate", "lower", "upper", "ratio",
                "sigma_su_star", "gamma_star", "alpha_star", "beta_star"]
        low = up = None
        lsu = lg = ua = ub = usu = None
        if args.cmd in ("point", "lower"):
            r = lower_bound_mmse(params, s_cfg, g_cfg)
            low, lsu, lg = r.value, r.sigma_su_star, r.gamma_star
        if args.cmd in ("point", "upper"):
            r = upper_bound_mmse(params, u_cfg)
            up, ua, ub, usu = r.value, r.alpha_star, r.beta_star, r.sigma_su_star
        ratio = float(ratio_with_conventions(up, low)) if args.cmd == "point" else None
        su_star = lsu if lsu is not None else usu
        _write_simple_csv(buf, argv, cols,
                          (args.sigma, args.power, args.rate, low, up, ratio,
                           su_star, lg, ua, ub))
        _emit(buf.getvalue(), args.out)
        return 0

    if args.cmd == "capacity":
        c, su = capacity(args.sigma, args.power)
        r1 = achievable_rate_alpha1(args.sigma, args.power)
        _write_simple_csv(buf, argv,
                          ["sigma", "power", "capacity", "sigma_su_star", "rate_alpha1"],
                          (args.sigma, args.power, c, su, r1))
        _emit(buf.getvalue(), args.out)
        return 0

    if args.cmd == "cost-ratio":
        k_grid = _log_axis(args.kmin, args.kmax, args.n)
        s_grid = _log_axis(args.smin, args.smax, args.n2 or args.n)
        table = cost_ratio_surface(k_grid, s_grid, args.bound,
                                   su_cfg=s_cfg, g_cfg=g_cfg, u_cfg=u_cfg,
                                   threads=_threads(args))
        write_sweep_csv(table, buf, argv)
        _emit(buf.getvalue(), args.out)
        return 0

    if args.cmd == "mmse-ratio":
        p_grid = _log_axis(args.pmin, args.pmax, args.n)
        s_grid = _log_axis(args.smin, args.smax, args.n2 or args.n)
        table = mmse_ratio_surface(p_grid, s_grid, args.rate, args.bound,
                                   su_cfg=s_cfg, g_cfg=g_cfg, u_cfg=u_cfg,
                                   threads=_threads(args))
        write_sweep_csv(table, buf, argv)
        _emit(buf.getvalue(), args.out)
        return 0

    if args.cmd == "power-ratio":
        if not (0.0 <= args.mmin < args.mmax):
            raise UsageError("need 0 <= mmin < mmax")
        m_grid = np.linspace(args.mmin, args.mmax, args.n)
        s_grid = _log_axis(args.smin, args.smax, args.n2 or args.n)
        n1, n2 = m_grid.size, s_grid.size
        p_lo = np.empty((n1, n2))
        p_up = np.empty((n1, n2))
        for j, s in enumerate(s_grid):
            p_lo[:, j] = power_for_mmse_many(float(s), m_grid, args.rate, "lower",
                                             su_cfg=s_cfg, g_cfg=g_cfg, u_cfg=u_cfg)
            p_up[:, j] = power_for_mmse_many(float(s), m_grid, args.rate, "upper",
                                             su_cfg=s_cfg, g_cfg=g_cfg, u_cfg=u_cfg)
        nanfill = np.full((n1, n2), np.nan)
        table = SweepTable(
            axis1_name="mmse", axis2_name="sigma", axis1=m_grid, axis2=s_grid,
            lower=p_lo, upper=p_up, ratio=ratio_with_conventions(p_up, p_lo),
            sigma_su_star=nanfill, gamma_star=nanfill,
            alpha_star=nanfill, beta_star=nanfill,
            meta={"rate": repr(args.rate), "quantity": "power"},
        )
        write_sweep_csv(table, buf, argv)
        _emit(buf.getvalue(), args.out)
        return 0

    if args.cmd == "rate-sweep":
        r_max = args.rmax
        if r_max is None:
            r_max = 0.5 * math.log2(1.0 + args.power)
        rates = np.linspace(args.rmin, r_max, args.n)
        table = mmse_vs_rate(args.sigma, args.power, rates,
                             su_cfg=s_cfg, g_cfg=g_cfg, u_cfg=u_cfg)
        write_sweep_csv(table, buf, argv)
        _emit(buf.getvalue(), args.out)
        return 0

    if args.cmd == "validate":
        ok = _validate(args.seed, args.trials)
        return 0 if ok else 2

    raise UsageError(f"unknown subcommand {args.cmd}")


def _validate(seed: int, trials: int) -> bool:
    """Quick oracle/invariant battery; prints one line per check."""
    rng = np.random.default_rng(seed)
    checks = []

    def check(name, fn):
        try:
            detail = fn()
            checks.append((name, True, detail or ""))
        except AssertionError as e:
            checks.append((name, False, str(e)))

    def tightness_p0():
        for s in (0.1, 1.0, 10.0):
            expect = s * s / (s * s + 1.0)
            lo = lower_bound_mmse(ProblemParams(s, 0.0, 0.0)).value
            up = upper_bound_mmse(ProblemParams(s, 0.0, 0.0)).value
            assert abs(lo - expect) <= 1e-12 and abs(up - expect) <= 1e-12, \
                f"sigma={s}: lower={lo!r} upper={up!r} expected={expect!r}"
        return "lower = upper = sigma^2/(sigma^2+1) at P=0"

    def boundary():
        assert feasible(ProblemParams(1.0, 1.0, 0.5))
        assert not feasible(ProblemParams(1.0, 1.0 - 1e-6, 0.5))
        lower_bound_mmse(ProblemParams(1.0, 1.0, 0.5))
        upper_bound_mmse(ProblemParams(1.0, 1.0, 0.5))
        try:
            lower_bound_mmse(ProblemParams(1.0, 1.0 - 1e-6, 0.5))
            raise AssertionError("infeasible point did not raise")
        except FeasibilityError:
            pass
        return "P = 2^{2R}-1 evaluable; below it raises"

    def capacity_equality():
        for _ in range(max(10, trials // 10)):
            s = float(rng.uniform(0.1, 10.0))
            p = float(rng.uniform(0.1, 10.0))
            c, _ = capacity(s, p)
            r1 = achievable_rate_alpha1(s, p)
            assert abs(c - r1) <= 1e-9, f"sigma={s} P={p}: C={c!r} alpha1={r1!r}"
            assert c <= 0.5 * math.log2(1.0 + p) + 1e-12
        return "capacity matches the alpha=1 rate; AWGN bound holds"

    def dominance():
        for _ in range(trials):
            s = float(rng.uniform(0.05, 20.0))
            p = float(rng.uniform(0.0, 20.0))
            new = lower_bound_mmse(ProblemParams(s, p, 0.0)).value
            old = old_lower_bound(s, p)
            assert new >= old - 1e-12, f"sigma={s} P={p}: new={new!r} old={old!r}"
        return "new lower bound dominates the legacy bound"

    def sandwich():
        for _ in range(trials):
            s = float(rng.uniform(0.1, 10.0))
            p = float(rng.uniform(0.0, 10.0))
            r = float(rng.uniform(0.0, 0.5 * math.log2(1.0 + p))) if p > 0 else 0.0
            params = ProblemParams(s, p, r)
            lo = lower_bound_mmse(params).value
            up = upper_bound_mmse(params).value
            assert up >= lo - 1e-9 * max(1.0, up), f"{params}: lower={lo!r} upper={up!r}"
        return "upper bound never below lower bound"

    def sup_consistency():
        for _ in range(max(10, trials // 10)):
            s = float(rng.uniform(0.2, 5.0))
            p = float(rng.uniform(0.0, 5.0))
            params = ProblemParams(s, p, 0.0)
            su = float(rng.uniform(-s * math.sqrt(p), s * math.sqrt(p))) if p > 0 else 0.0
            v, _ = lb_sup_gamma(params, su)
            from .lower_bounds import lb_inner

            assert v >= lb_inner(params, su, 1.0) - 1e-15
        return "sup over gamma dominates gamma = 1"

    def monte_carlo():
        for _ in range(2):
            s = float(rng.uniform(0.5, 2.0))
            p = float(rng.uniform(0.5, 2.0))
            sp = StrategyParams(float(rng.uniform(0.2, 0.9)),
                                float(rng.uniform(0.0, 0.5)) * min(1.0, math.sqrt(p) / s))
            closed = lmmse_x(s, p, sp)
            est, se = mc_lmmse_check(s, p, sp, McConfig(200_000, int(rng.integers(1 << 30))))
            assert abs(est - closed) <= 5.0 * se, \
                f"closed={closed!r} mc={est!r} se={se!r}"
        return "closed-form LMMSE within 5 standard errors of Monte Carlo"

    def conventions():
        r = ratio_with_conventions(np.array([0.0, 1.0, 2.0]), np.array([0.0, 0.0, 1.0]))
        assert r[0] == 1.0 and np.isinf(r[1]) and r[2] == 2.0
        return "0/0 -> 1 and x/0 -> inf"

    check("p0-tightness", tightness_p0)
    check("feasibility-boundary", boundary)
    check("capacity-equality", capacity_equality)
    check("legacy-dominance", dominance)
    check("bound-sandwich", sandwich)
    check("sup-consistency", sup_consistency)
    check("lmmse-monte-carlo", monte_carlo)
    check("ratio-conventions", conventions)

    all_ok = True
    for name, ok, detail in checks:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
        all_ok &= ok
    print(f"{sum(ok for _, ok, _ in checks)}/{len(checks)} checks passed (seed={seed})")
    return all_ok


def main() -> None:
    sys.exit(run(sys.argv[1:]))


if __name__ == "__main__":
    main()
