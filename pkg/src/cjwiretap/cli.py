"""
Command-line front end.

Subcommands
-----------
sdof      exact s.d.o.f. grid as CSV (or JSON)
verify    invariant battery over seeded channels, JSON report
simulate  structured-receiver Monte Carlo error counts, CSV
slope     secrecy-rate sweep and regressed d.o.f. slope, JSON

Exit codes: 0 success, 1 invariant or all-trial failure, 2 usage or I/O error.
"""
import argparse
import csv
import io
import itertools
import json
import sys

import numpy as np

from .channel import AntennaConfig, compute_rho, derive_seed, randn_c, rho_psd_margins, sample_channel
from .dof import theorem2_sdof
from .errors import WiretapError, ZeroSdof
from .linalg import Tolerance, rank_tol
from .metrics import gaussian_leakage, leakage_ceiling, run_sweep
from .receiver import build_projection, measure_errors
from .schemes import ALL_CASES, build_precoders, canonical_configs, select_scheme
from .signaling import DEFAULT_EPSILON, power_check, structured_params

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


# Representative configurations per case; general cases fall back to the
# smallest configuration that selects them.
REPRESENTATIVE = {
    "Sym1": (4, 4, 2, 1), "Sym2": (4, 4, 2, 3), "Sym3": (3, 3, 3, 2), "Sym4": (4, 4, 3, 5),
    "Sym5": (4, 4, 2, 5), "Sym6": (2, 2, 3, 2), "Sym7": (4, 4, 5, 4), "Sym8": (3, 3, 4, 4),
    "Sym9": (2, 2, 3, 5), "Sym10": (2, 2, 3, 4),
}


def case_configs():
    out = {c: AntennaConfig(*t) for c, t in REPRESENTATIVE.items()}
    for c, cfg in canonical_configs().items():
        out.setdefault(c, cfg)
    return {c: out[c] for c in ALL_CASES if c in out}


def parse_range(text, name):
    """``"3"`` gives [3]; ``"0..8"`` gives 0..8 inclusive."""
    text = str(text).strip()
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            vals = list(range(int(lo), int(hi) + 1))
        else:
            vals = [int(text)]
    except ValueError:
        raise UsageError("--{0}: cannot parse {1!r}".format(name, text))
    if not vals:
        raise UsageError("--{0}: empty range {1!r}".format(name, text))
    return vals


def parse_float_range(text, name):
    try:
        lo, hi = (float(x) for x in str(text).split("..", 1))
    except ValueError:
        raise UsageError("--{0}: expected lo..hi, got {1!r}".format(name, text))
    if not hi > lo:
        raise UsageError("--{0}: empty range {1!r}".format(name, text))
    return lo, hi


def power_grid(args):
    """Strictly increasing power grid from --power-grid or --p-decades."""
    if args.power_grid:
        try:
            grid = [float(x) for x in str(args.power_grid).split(",") if x.strip()]
        except ValueError:
            raise UsageError("--power-grid: cannot parse {0!r}".format(args.power_grid))
    else:
        lo, hi = parse_float_range(args.p_decades, "p-decades")
        if args.points_per_decade <= 0:
            raise UsageError("--points-per-decade must be positive")
        n = int(round((hi - lo) * args.points_per_decade)) + 1
        grid = list(np.logspace(lo, hi, n))
    if len(grid) < 1 or any(p <= 0 for p in grid) or any(b <= a for a, b in zip(grid, grid[1:])):
        raise UsageError("power grid must be positive and strictly increasing")
    return grid


def single_config(args):
    vals = [parse_range(getattr(args, k), k) for k in ("nt", "nr", "ne", "nc")]
    if any(len(v) != 1 for v in vals):
        raise UsageError("this subcommand needs a single antenna configuration")
    try:
        return AntennaConfig(*(v[0] for v in vals))
    except ValueError as exc:
        raise UsageError(str(exc))


def select_cases(args):
    if not args.cases:
        return list(ALL_CASES)
    wanted = [w.strip().lower() for w in str(args.cases).split(",") if w.strip()]
    out = []
    for c in ALL_CASES:
        cl = c.lower()
        if any(cl == w or cl.split("-")[0] == w for w in wanted):
            out.append(c)
    if not out:
        raise UsageError("--cases {0!r} matches no case".format(args.cases))
    return out


def emit(text, args):
    if args.out in (None, "-"):
        sys.stdout.write(text)
        return
    try:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError("cannot write {0}: {1}".format(args.out, exc))


def to_csv(header, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    return buf.getvalue()


def to_json(obj):
    return json.dumps(obj, indent=2, allow_nan=False) + "\n"


def cmd_sdof(args):
    if args.fig2 is not None:
        n = int(args.fig2)
        if n < 1:
            raise UsageError("--fig2 needs N >= 1")
        grid = [(n, n, n, c) for c in range(0, 2 * n + 1)]
    else:
        ranges = [parse_range(getattr(args, k), k) for k in ("nt", "nr", "ne", "nc")]
        grid = list(itertools.product(*ranges))
    rows = []
    for t in grid:
        try:
            cfg = AntennaConfig(*t)
        except ValueError as exc:
            raise UsageError(str(exc))
        v = theorem2_sdof(cfg)
        rows.append(list(t) + [v.numerator, v.denominator])
    header = ["nt", "nr", "ne", "nc", "sdof_num", "sdof_den"]
    if args.format == "json":
        emit(to_json([dict(zip(header, r)) for r in rows]), args)
    else:
        emit(to_csv(header, rows), args)
    return EXIT_OK


def _verify_case(case, cfg, args, tol):
    plan = select_scheme(cfg)
    records, failed = [], set()
    for s in range(args.seeds):
        ch_seed = derive_seed(args.seed, ALL_CASES.index(case), s)
        ch = sample_channel(cfg, ch_seed)
        rec = {"case": case, "seed": ch_seed}
        try:
            pp = build_precoders(ch, plan, tol, check=False)
        except WiretapError as exc:
            rec.update(align_residual=None, invis_residual=None, rx_rank=None,
                       expected_rank=min(plan.d + plan.g, cfg.nr), failures=["build: " + str(exc)])
            failed.add("precoder_build")
            records.append(rec)
            continue
        fails = list(pp.failures)
        if plan.structured:
            try:
                ps = build_projection(ch, pp, plan, tol)
                if ps.b_rank != cfg.nr - 1:
                    fails.append("post_cancellation_rank")
            except WiretapError as exc:
                fails.append("projection: " + str(exc))
            for p in (1e3, 1e6, 1e9):
                c = structured_params(plan, pp, p, args.epsilon)
                if not (c.a * c.q) ** 2 <= c.gamma ** 2 * p:
                    fails.append("power_scaling")
                try:
                    power_check(plan, pp, c, p)
                except WiretapError:
                    fails.append("power_budget")
        else:
            for p in np.logspace(0, 14, 8):
                try:
                    leak = gaussian_leakage(ch, pp, plan, p, tol)
                except WiretapError:
                    fails.append("leakage_alignment")
                    break
                if leak > leakage_ceiling(plan) + 1e-9:
                    fails.append("leakage_ceiling")
                    break
        rec.update(align_residual=pp.align_residual, invis_residual=pp.invis_residual,
                   rx_rank=pp.rx_matrix_rank, expected_rank=pp.expected_rank, failures=fails)
        failed.update(f.split(":")[0] for f in fails)
        records.append(rec)
    return records, failed


def _generic_rank_check(args, tol):
    bad = 0
    for k, (N, K, M) in enumerate([(3, 5, 2), (2, 6, 4), (4, 7, 3)]):
        for s in range(args.seeds):
            rng = np.random.default_rng(derive_seed(args.seed, 1000, k, s))
            E1, E2 = randn_c(rng, N, K), randn_c(rng, K, M)
            if rank_tol(E1 @ E2, tol) != min(N, M):
                bad += 1
    return bad


def _rho_check(args):
    worst = np.inf
    for k, t in enumerate([(2, 2, 2, 2), (3, 2, 1, 4), (4, 4, 3, 5)]):
        for s in range(args.seeds):
            ch = sample_channel(AntennaConfig(*t), derive_seed(args.seed, 2000, k, s))
            worst = min(worst, min(rho_psd_margins(ch, compute_rho(ch))))
    return float(worst)


def cmd_verify(args):
    tol = Tolerance(rank_rel_tol=args.rank_tol)
    configs = case_configs()
    records, checks = [], {}
    for case in select_cases(args):
        recs, failed = _verify_case(case, configs[case], args, tol)
        records.extend(recs)
        checks[case] = {"config": list(configs[case].as_tuple()), "passed": not failed,
                        "failed": sorted(failed)}
    rank_bad = _generic_rank_check(args, tol)
    checks["generic_rank"] = {"passed": rank_bad == 0, "failed_trials": rank_bad}
    worst = _rho_check(args)
    checks["rho_admissibility"] = {"passed": worst >= -1e-9, "min_eigenvalue": worst}
    failing = sorted(k for k, v in checks.items() if not v["passed"])
    emit(to_json({"ok": not failing, "failing_checks": failing, "checks": checks, "records": records}), args)
    if failing:
        sys.stderr.write("verify: failing checks: {0}\n".format(", ".join(failing)))
        return EXIT_FAIL
    return EXIT_OK


def cmd_simulate(args):
    cfg = single_config(args)
    try:
        plan = select_scheme(cfg)
    except ZeroSdof as exc:
        raise UsageError(str(exc))
    if not plan.structured:
        raise UsageError("simulate needs a configuration with structured signaling, {0} is {1}".format(cfg, plan.case_id))
    grid = power_grid(args)
    rows, ok = [], 0
    for j in range(args.channels):
        ch_seed = derive_seed(args.seed, j)
        ch = sample_channel(cfg, ch_seed)
        try:
            pp = build_precoders(ch, plan)
            reps = measure_errors(ch, pp, plan, grid, args.trials, derive_seed(args.seed, j, 7), args.epsilon)
        except WiretapError as exc:
            sys.stderr.write("simulate: channel {0} skipped: {1}\n".format(ch_seed, exc))
            continue
        ok += 1
        for r in reps:
            rows.append([plan.case_id, ch_seed, repr(r.p), r.trials, r.joint_errors, r.stream_errors, repr(r.d_min)])
    if ok == 0:
        sys.stderr.write("simulate: every channel draw failed\n")
        return EXIT_FAIL
    rows.sort(key=lambda r: (r[0], r[1], float(r[2])))
    emit(to_csv(["case", "seed", "P", "trials", "joint_errors", "stream_errors", "dmin"], rows), args)
    return EXIT_OK


def cmd_slope(args):
    cfg = single_config(args)
    grid = power_grid(args)
    try:
        res = run_sweep(cfg, grid, args.trials, args.seed, args.epsilon, args.channels, args.window)
    except WiretapError as exc:
        sys.stderr.write("slope: {0}: {1}\n".format(type(exc).__name__, exc))
        return EXIT_FAIL
    points = [{"p": r.p, "i_main": r.i_main, "i_leak": r.i_leak, "r_s": r.r_s,
               "i_main_kind": "exact" if r.exact else "fano_bound"} for r in res.points]
    if args.format == "csv":
        emit(to_csv(["p", "i_main", "i_leak", "r_s"],
                    [[repr(r.p), repr(r.i_main), repr(r.i_leak), repr(r.r_s)] for r in res.points]), args)
    else:
        nt, nr, ne, nc = cfg.as_tuple()
        emit(to_json({"cfg": {"nt": nt, "nr": nr, "ne": ne, "nc": nc}, "case": res.case_id,
                      "slope": res.slope, "ci": res.slope_ci,
                      "theory_num": res.theory_sdof.numerator, "theory_den": res.theory_sdof.denominator,
                      "channels_ok": res.channels_ok, "points": points}), args)
    return EXIT_OK


COMMANDS = {"sdof": cmd_sdof, "verify": cmd_verify, "simulate": cmd_simulate, "slope": cmd_slope}


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of option defaults; flags override it")
    common.add_argument("--nt", default="2", help="transmitter antennas, value or range a..b")
    common.add_argument("--nr", default="2", help="receiver antennas, value or range a..b")
    common.add_argument("--ne", default="2", help="eavesdropper antennas, value or range a..b")
    common.add_argument("--nc", default="2", help="jammer antennas, value or range a..b")
    common.add_argument("--p-decades", default="2..10", help="log10 power range lo..hi")
    common.add_argument("--points-per-decade", type=float, default=2.0)
    common.add_argument("--power-grid", default=None, help="explicit comma-separated powers")
    common.add_argument("--trials", type=int, default=200)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--epsilon", type=float, default=DEFAULT_EPSILON)
    common.add_argument("--channels", type=int, default=1, help="channel draws per sweep")
    common.add_argument("--window", type=float, default=0.5, help="regression window fraction")
    common.add_argument("--out", default=None, help="output path (default stdout)")
    common.add_argument("--format", choices=["csv", "json"], default=None)
    common.add_argument("--cases", default=None, help="comma-separated case ids or families")

    parser = argparse.ArgumentParser(prog="cjwiretap", description=__doc__.split("\n")[1])
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("sdof", parents=[common], help="exact s.d.o.f. table")
    p.add_argument("--fig2", type=int, default=None, metavar="N",
                   help="rows nt=nr=ne=N, nc=0..2N")
    p = sub.add_parser("verify", parents=[common], help="invariant battery")
    p.add_argument("--seeds", type=int, default=100, help="channels per case")
    p.add_argument("--rank-tol", type=float, default=1e-10, help="relative rank tolerance")
    sub.add_parser("simulate", parents=[common], help="structured receiver error counts")
    sub.add_parser("slope", parents=[common], help="secrecy-rate slope")
    return parser


def parse_args(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.config:
        try:
            with open(args.config) as fh:
                conf = json.load(fh)
        except (OSError, ValueError) as exc:
            raise UsageError("cannot read config {0}: {1}".format(args.config, exc))
        conf = {k.replace("-", "_"): v for k, v in conf.items()}
        sub = parser._subparsers._group_actions[0].choices[args.command]
        sub.set_defaults(**conf)
        args = parser.parse_args(argv)
    if args.format is None:
        args.format = "json" if args.command in ("verify", "slope") else "csv"
    for k in ("trials", "channels"):
        if getattr(args, k) < 0:
            raise UsageError("--{0} must be nonnegative".format(k))
    if getattr(args, "seeds", 0) < 0:
        raise UsageError("--seeds must be nonnegative")
    return args


def main(argv=None):
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args)
    except UsageError as exc:
        sys.stderr.write("error: {0}\n".format(exc))
        return EXIT_USAGE
    except ValueError as exc:
        sys.stderr.write("error: {0}\n".format(exc))
        return EXIT_USAGE
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
