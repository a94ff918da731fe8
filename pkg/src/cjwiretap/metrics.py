"""
Secrecy-rate evaluation, slope regression and sweep orchestration.

Gaussian schemes are evaluated in closed form through log-determinants.
Structured schemes use a Fano lower bound driven by measured error rates.
"""
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil
from typing import Optional

import numpy as np
from scipy import stats

from .channel import AntennaConfig, derive_seed, sample_channel
from .dof import theorem2_sdof
from .errors import AlignmentBroken, InsufficientGrid, WiretapError, ZeroSdof
from .linalg import DEFAULT_TOL
from .receiver import measure_errors
from .schemes import build_precoders, select_scheme
from .signaling import DEFAULT_EPSILON, gaussian_alpha, structured_params


def _cov_logdet(p_bar, *mats):
    """
    ``log2 det(I + p_bar sum_k M_k M_k^H)``.

    Evaluated as ``sum log2(1 + p_bar s_i^2)`` over the singular values of
    ``[M_1, M_2, ...]``; forming ``M M^H`` explicitly would leave rounding
    noise of order eps ||M||^2 in its null directions, which large powers
    amplify into spurious bits.
    """
    mats = [M for M in mats if M.size]
    if not mats or p_bar == 0:
        return 0.0
    s = np.linalg.svd(np.hstack(mats), compute_uv=False)
    return float(np.sum(np.log2(1.0 + p_bar * s ** 2)))


def gaussian_main_mi(ch, pp, plan, p):
    """
    ``I(X_t; Y_r)`` in bits, jamming treated as noise.

    ``log det(I + P̄ M_s M_s^H + P̄ M_j M_j^H) - log det(I + P̄ M_j M_j^H)``
    with ``M_s = H_t P_t`` and ``M_j`` the receiver-visible jamming columns.
    """
    p_bar = p / gaussian_alpha(pp)
    Ms = ch.ht @ pp.p_t
    Mj = ch.hc @ pp.p_c[:, :plan.g]
    return _cov_logdet(p_bar, Ms, Mj) - _cov_logdet(p_bar, Mj)


def gaussian_eve_mi(ch, pp, p):
    """
    Exact ``I(X_t; Y_e)`` in bits for Gaussian streams, any precoders.
    """
    p_bar = p / gaussian_alpha(pp)
    return (_cov_logdet(p_bar, ch.gt @ pp.p_t, ch.gc @ pp.p_c)
            - _cov_logdet(p_bar, ch.gc @ pp.p_c))


def gaussian_leakage(ch, pp, plan, p, tol=DEFAULT_TOL):
    """
    Leakage to the eavesdropper under perfect alignment.

    ``log det(I + 2 P̄ G G^H) - log det(I + P̄ G G^H)`` with ``G = G_c P_c``,
    which is at most the number of aligned streams.

    Raises
    ------
    AlignmentBroken
        If ``G_t P_t[:, :l]`` differs from ``G_c P_c`` beyond tolerance.
    """
    l = plan.l
    if l == 0:
        return 0.0
    resid = float(np.linalg.norm(ch.gt @ pp.p_t[:, :l] - ch.gc @ pp.p_c))
    if resid > tol.residual_abs_tol:
        raise AlignmentBroken("alignment residual {0:.3g}".format(resid))
    p_bar = p / gaussian_alpha(pp)
    Gt = ch.gc @ pp.p_c
    return _cov_logdet(2 * p_bar, Gt) - _cov_logdet(p_bar, Gt)


def leakage_ceiling(plan):
    """
    Per-case leakage ceiling in bits.

    Gaussian cases leak at most one bit per aligned stream, that is l.
    Structured cases leak at most 2l - 1 bits: one real and l - 1 complex
    aligned dimensions. For the odd-N joint-null case this equals N.
    """
    return plan.l if not plan.structured else 2 * plan.l - 1


def structured_leakage_bound(plan):
    """Leakage ceiling ``2l - 1`` of a structured plan, in bits."""
    if not plan.structured:
        raise ValueError("plan {0} uses Gaussian signaling".format(plan.case_id))
    return leakage_ceiling(plan)


def fano_main_bound(q, d, pe1, pe2):
    """``(1 - pe1) log2(2q+1) + 2 (d-1) (1 - pe2) log2(2q+1) - 2``."""
    lq = np.log2(2 * q + 1)
    return (1 - pe1) * lq + 2 * (d - 1) * (1 - pe2) * lq - 2


def _report_for(reports, p):
    for r in reports:
        if np.isclose(r.p, p, rtol=1e-12):
            return r
    raise ValueError("no decode report at P={0}".format(p))


def structured_rate_lower_bound(c, plan, reports, p):
    """
    Fano secrecy-rate lower bound from measured error rates.

    Parameters
    ----------
    c : StructuredConstellation
    plan : SchemePlan
    reports : list of DecodeReport
    p : float

    Returns
    -------
    float
        ``max(0, fano_main_bound - (2l - 1))`` in bits.
    """
    r = _report_for(reports, p)
    pe1 = r.u1_errors / r.trials
    pe2 = r.stream_errors / r.trials
    return max(0.0, fano_main_bound(c.q, plan.d, pe1, pe2) - structured_leakage_bound(plan))


@dataclass
class RatePoint:
    """
    Secrecy-rate evaluation at one power.

    ``i_main`` is exact for Gaussian schemes and a Fano lower bound for
    structured ones (``exact`` tells which); ``i_leak`` is the leakage
    upper bound. ``r_s = max(0, i_main - i_leak)``.
    """
    p: float
    i_main: float
    i_leak: float
    r_s: float
    exact: bool = True


def rate_point(p, i_main, i_leak, exact=True):
    return RatePoint(float(p), float(i_main), float(i_leak), max(0.0, float(i_main) - float(i_leak)), exact)


def dof_slope(points, window=0.5):
    """
    Least-squares slope of ``r_s`` against ``log2 p`` over the top of the grid.

    Parameters
    ----------
    points : list of RatePoint
    window : float
        Fraction of the grid (highest powers) used in the fit.

    Returns
    -------
    slope, ci : float
        Slope and half-width of its 95% confidence interval.

    Raises
    ------
    InsufficientGrid
        Fewer than 4 points or less than 3 decades in the window.
    """
    pts = sorted(points, key=lambda r: r.p)
    k = int(ceil(len(pts) * window))
    sel = pts[len(pts) - k:]
    if len(sel) < 4:
        raise InsufficientGrid("need at least 4 points in the window, got {0}".format(len(sel)))
    x = np.log2([r.p for r in sel])
    if (x[-1] - x[0]) * np.log10(2) < 3 - 1e-9:
        raise InsufficientGrid("window spans fewer than 3 decades")
    y = np.array([r.r_s for r in sel])
    fit = stats.linregress(x, y)
    ci = float(stats.t.ppf(0.975, len(sel) - 2) * fit.stderr)
    return float(fit.slope), ci


@dataclass
class SweepResult:
    cfg: AntennaConfig
    case_id: str
    points: list
    slope: float
    slope_ci: float
    theory_sdof: Fraction
    channels_ok: int
    failures: list = field(default_factory=list)
    reports: Optional[list] = None


def _zero_points(ch, p_grid):
    nt, _, _, nc = ch.cfg.as_tuple()
    Pt = np.eye(nt) / np.sqrt(nt)
    Pc = np.eye(nc) / np.sqrt(nc) if nc else np.zeros((0, 0))
    out = []
    for p in p_grid:
        i_main = _cov_logdet(p, ch.ht @ Pt, ch.hc @ Pc) - _cov_logdet(p, ch.hc @ Pc) if nc else _cov_logdet(p, ch.ht @ Pt)
        i_eve = _cov_logdet(p, ch.gt @ Pt, ch.gc @ Pc) - _cov_logdet(p, ch.gc @ Pc) if nc else _cov_logdet(p, ch.gt @ Pt)
        out.append((i_main, i_eve))
    return out


def _gaussian_points(ch, pp, plan, p_grid, tol):
    return [(gaussian_main_mi(ch, pp, plan, p), gaussian_leakage(ch, pp, plan, p, tol)) for p in p_grid]


def _structured_points(ch, pp, plan, p_grid, trials, seed, epsilon, tol):
    reports = measure_errors(ch, pp, plan, p_grid, trials, seed, epsilon, tol)
    out = []
    for r in reports:
        c = structured_params(plan, pp, r.p, epsilon)
        i_main = fano_main_bound(c.q, plan.d, r.u1_errors / r.trials, r.stream_errors / r.trials)
        out.append((i_main, float(structured_leakage_bound(plan))))
    return out, reports


def run_sweep(cfg, p_grid, trials=200, seed=0, epsilon=DEFAULT_EPSILON, n_channels=1,
              window=0.5, tol=DEFAULT_TOL):
    """
    Evaluate secrecy rates over a power grid and regress the d.o.f. slope.

    Parameters
    ----------
    cfg : AntennaConfig or tuple
    p_grid : sequence of float
    trials : int
        Monte Carlo trials per power (structured schemes only).
    seed : int
    epsilon : float
    n_channels : int
        Channel draws averaged; channel j uses ``derive_seed(seed, j)``.
    window : float
        Regression window fraction.

    Returns
    -------
    SweepResult

    Raises
    ------
    WiretapError
        The last per-channel error when every channel draw fails.
    """
    cfg = cfg if isinstance(cfg, AntennaConfig) else AntennaConfig(*cfg)
    p_grid = sorted(float(p) for p in p_grid)
    theory = theorem2_sdof(cfg)
    try:
        plan = select_scheme(cfg)
        case_id = plan.case_id
    except ZeroSdof:
        plan, case_id = None, "Zero"
    acc = np.zeros((len(p_grid), 2))
    ok, failures, all_reports, last_exc = 0, [], [], None
    for j in range(n_channels):
        ch_seed = derive_seed(seed, j)
        ch = sample_channel(cfg, ch_seed)
        try:
            if plan is None:
                vals = _zero_points(ch, p_grid)
            else:
                pp = build_precoders(ch, plan, tol)
                if plan.structured:
                    vals, reps = _structured_points(ch, pp, plan, p_grid, trials, derive_seed(seed, j, 7), epsilon, tol)
                    all_reports.append((ch_seed, reps))
                else:
                    vals = _gaussian_points(ch, pp, plan, p_grid, tol)
        except WiretapError as exc:
            failures.append((ch_seed, type(exc).__name__, str(exc)))
            last_exc = exc
            continue
        acc += np.array(vals)
        ok += 1
    if ok == 0:
        raise last_exc
    acc /= ok
    exact = plan is None or not plan.structured
    points = [rate_point(p, m, lk, exact) for p, (m, lk) in zip(p_grid, acc)]
    slope, ci = dof_slope(points, window)
    return SweepResult(cfg, case_id, points, slope, ci, theory, ok, failures,
                       all_reports if all_reports else None)
