"""
Secure degrees of freedom: closed forms, converse bounds and their envelope.

Values are exact ``fractions.Fraction`` objects with denominator 1 or 2.
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .channel import AntennaConfig
from .errors import RangeError


def pos(x):
    """Positive part ``[x]^+``."""
    return x if x > 0 else x * 0


def _cfg(cfg):
    return cfg if isinstance(cfg, AntennaConfig) else AntennaConfig(*cfg)


def theorem1_sdof(n, ne, nc):
    """
    S.d.o.f. with `n` antennas at both transmitter and receiver.

    Parameters
    ----------
    n, ne, nc : int
        Transmitter/receiver, eavesdropper and jammer antenna counts.
        ``nc`` above ``n + ne`` is clamped.

    Returns
    -------
    Fraction
    """
    if n < 1 or ne < 1 or nc < 0:
        raise ValueError("need n, ne >= 1 and nc >= 0")
    nc = min(nc, n + ne)
    half_min = Fraction(min(n, ne), 2)
    if nc <= ne - half_min:
        return pos(Fraction(n + nc - ne))
    if nc <= max(n, ne):
        return n - half_min
    return Fraction(n + nc - ne, 2)


@dataclass(frozen=True)
class Thresholds:
    n1: Fraction
    n2: int
    n3: int


def thresholds(cfg):
    """Branch thresholds N1 <= N2 <= N3 of the general s.d.o.f. formula."""
    nt, nr, ne, _ = _cfg(cfg).as_tuple()
    ind = 1 if ne > nt else 0
    n1 = min(Fraction(ne), pos(Fraction(nr, 2) + Fraction(ne - nt, 2 - ind)))
    n2 = nr + max(ne - nt, 0)
    n3 = max(n2, 2 * min(nt, nr) + ne - nt)
    return Thresholds(n1, n2, n3)


def theorem2_sdof(cfg):
    """
    S.d.o.f. for arbitrary antenna counts.

    ``nc`` above N3 is clamped. When N3 == N2 the second branch extends
    over the (empty) third range.

    Parameters
    ----------
    cfg : AntennaConfig or tuple (nt, nr, ne, nc)

    Returns
    -------
    Fraction
    """
    cfg = _cfg(cfg)
    nt, nr, ne, nc = cfg.as_tuple()
    th = thresholds(cfg)
    nc = min(nc, th.n3)
    if nc <= th.n1:
        return min(Fraction(nr), pos(Fraction(nc + nt - ne)))
    if nc <= th.n2:
        return min(Fraction(nt), Fraction(nr), Fraction(nr + max(nt - ne, 0), 2))
    return min(Fraction(nt), Fraction(nr), Fraction(nc + nt - ne, 2))


def upper_bound_full_coop(cfg):
    """
    Full-cooperation bound ``min(nr, [nc + nt - ne]^+)``, valid for nc <= ne.
    """
    nt, nr, ne, nc = _cfg(cfg).as_tuple()
    if nc > ne:
        raise RangeError("full-cooperation bound needs nc <= ne, got nc={0}, ne={1}".format(nc, ne))
    return min(Fraction(nr), pos(Fraction(nc + nt - ne)))


def secrecy_reliability_range(cfg):
    """Half-open range (lo, hi] of nc where the secrecy/reliability bound holds."""
    nt, nr, ne, _ = _cfg(cfg).as_tuple()
    return nr + max(ne - nt, 0), 2 * min(nt, nr) + ne - nt


def upper_bound_secrecy_reliability(cfg):
    """
    Bound ``(nc + nt - ne) / 2`` from combining secrecy and reliability.
    """
    cfg = _cfg(cfg)
    nt, _, ne, nc = cfg.as_tuple()
    lo, hi = secrecy_reliability_range(cfg)
    if not lo < nc <= hi:
        raise RangeError("bound needs {0} < nc <= {1}, got nc={2}".format(lo, hi, nc))
    return Fraction(nc + nt - ne, 2)


def converse_envelope(cfg):
    """
    Upper envelope obtained by combining the two converse bound families.

    The s.d.o.f. cannot decrease when jammer antennas are added, so a bound
    established at some nc' >= nc also holds at nc. The secrecy/reliability
    bound is extended to its left endpoint N2 by continuity and then carried
    leftwards as a flat segment; the trivial bound min(nt, nr) always holds.

    Parameters
    ----------
    cfg : AntennaConfig or tuple

    Returns
    -------
    Fraction
    """
    cfg = _cfg(cfg)
    nt, nr, ne, nc = cfg.as_tuple()
    lo, hi = secrecy_reliability_range(cfg)
    nc = min(nc, max(lo, hi))
    bounds = [Fraction(min(nt, nr))]
    if nc <= ne:
        bounds.append(min(Fraction(nr), pos(Fraction(nc + nt - ne))))
    at = max(nc, lo)
    if at <= hi:
        bounds.append(Fraction(at + nt - ne, 2))
    return min(bounds)


def converse_rate_curve(ch, rho, p_grid):
    """
    Finite-power secrecy-rate upper bound, up to an additive constant.

    Evaluates ``(N/2) log2(1 + h^2 P) + ((Nc - Ne)/2) log2(rho^2 + P)``
    where ``h^2`` is the largest receive-row energy.

    Parameters
    ----------
    ch : ChannelInstance
        Symmetric channel with ne <= N <= nc <= N + ne.
    rho : RhoBudget
    p_grid : sequence of float

    Returns
    -------
    list of (float, float)
    """
    nt, nr, ne, nc = ch.cfg.as_tuple()
    if nt != nr or ne > nt or not nt <= nc <= nt + ne:
        raise RangeError("rate curve needs n_t = n_r = N, ne <= N <= nc <= N + ne")
    h2 = float(np.max(np.sum(np.abs(ch.ht) ** 2, axis=1) + np.sum(np.abs(ch.hc) ** 2, axis=1)))
    out = []
    for p in p_grid:
        r = 0.5 * nt * np.log2(1 + h2 * p) + 0.5 * (nc - ne) * np.log2(rho.rho ** 2 + p)
        out.append((float(p), float(r)))
    return out
