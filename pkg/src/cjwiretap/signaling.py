"""
Gaussian and structured (scaled-integer) stream generation and power accounting.
"""
from dataclasses import dataclass
from math import floor
from typing import Optional

import numpy as np

from .channel import randn_c
from .errors import BudgetViolation, PowerTooSmall

DEFAULT_EPSILON = 0.05


def gaussian_alpha(pp):
    """
    Power normalizer ``max(sum ||p_t,i||^2, sum ||p_c,i||^2)``.

    With the jammer columns being unit identity columns this is the
    familiar ``max(l, sum ||p_t,i||^2)``.
    """
    return max(float(np.sum(np.abs(pp.p_t) ** 2)), float(np.sum(np.abs(pp.p_c) ** 2)))


def structured_weight(p):
    """``||p_1||^2 + 2 sum_{i>=2} ||p_i||^2``: one real stream, the rest complex."""
    n2 = np.sum(np.abs(p) ** 2, axis=0)
    if n2.size == 0:
        return 0.0
    return float(n2[0] + 2 * n2[1:].sum())


@dataclass
class GaussianStreams:
    """
    Gaussian information and jamming symbols.

    ``u_t`` and ``v_c`` have shape (d,) and (l,) for a single draw or
    (batch, d) and (batch, l) for a batch.
    """
    u_t: np.ndarray
    v_c: np.ndarray
    p_bar: float
    alpha: float


def gaussian_draw(plan, pp, p, seed, batch=None):
    """
    Draw i.i.d. CN(0, P/alpha) streams.

    Parameters
    ----------
    plan : SchemePlan
    pp : PrecoderPair
    p : float
        Power budget.
    seed : int
    batch : int, optional
        Number of independent draws; None gives a single draw.

    Returns
    -------
    GaussianStreams
    """
    if plan.structured:
        raise ValueError("plan {0} uses structured signaling".format(plan.case_id))
    alpha = gaussian_alpha(pp)
    p_bar = p / alpha
    rng = np.random.default_rng(seed)
    shape = () if batch is None else (batch,)
    u = randn_c(rng, *shape, plan.d) * np.sqrt(p_bar)
    v = randn_c(rng, *shape, plan.l) * np.sqrt(p_bar)
    return GaussianStreams(u, v, p_bar, alpha)


@dataclass(frozen=True)
class StructuredConstellation:
    """
    Scaled-integer signaling parameters.

    Symbols are ``a * k`` with ``k`` in ``{-q, ..., q}``; the first
    information and first jamming stream are real, other streams draw real
    and imaginary parts independently.
    """
    q: int
    a: float
    epsilon: float
    gamma: float
    p: float

    def values(self):
        return self.a * np.arange(-self.q, self.q + 1)


def structured_params(plan, pp, p, epsilon=DEFAULT_EPSILON):
    """
    Constellation size and scale for power `p`.

    ``q = floor(P^((1-eps)/(2+eps)))`` and ``a = gamma P^(3 eps / (2 (2+eps)))``,
    which together give ``a^2 q^2 <= gamma^2 P``.

    Parameters
    ----------
    plan : SchemePlan
    pp : PrecoderPair
    p : float
    epsilon : float

    Returns
    -------
    StructuredConstellation

    Raises
    ------
    PowerTooSmall
        If ``q < 1``.
    """
    if not plan.structured:
        raise ValueError("plan {0} uses Gaussian signaling".format(plan.case_id))
    if not epsilon > 0:
        raise ValueError("epsilon must be positive")
    w = max(structured_weight(pp.p_t), structured_weight(pp.p_c))
    gamma = 1.0 / np.sqrt(w)
    q = int(floor(p ** ((1 - epsilon) / (2 + epsilon)))) if p > 0 else 0
    if q < 1:
        raise PowerTooSmall("P={0} gives q=0 at epsilon={1}".format(p, epsilon))
    a = gamma * p ** (3 * epsilon / (2 * (2 + epsilon)))
    # guard against one-ulp overshoot when P^x is an exact integer
    while (a * q) ** 2 > gamma ** 2 * p:
        a = np.nextafter(a, 0.0)
    return StructuredConstellation(q, float(a), float(epsilon), float(gamma), float(p))


def _pam(rng, c, shape, complex_valued):
    k = rng.integers(-c.q, c.q + 1, size=shape)
    if not complex_valued:
        return c.a * k.astype(complex)
    k2 = rng.integers(-c.q, c.q + 1, size=shape)
    return c.a * (k + 1j * k2)


def structured_draw(c, plan, seed, batch=None):
    """
    Draw scaled-integer streams.

    Returns
    -------
    u_t, v_c : np.ndarray
        Shapes (d,) and (l,), or with a leading batch axis.
    """
    rng = np.random.default_rng(seed)
    lead = () if batch is None else (batch,)
    u = np.concatenate([_pam(rng, c, lead + (1,), False),
                        _pam(rng, c, lead + (plan.d - 1,), True)], axis=-1)
    v = np.concatenate([_pam(rng, c, lead + (min(plan.l, 1),), False),
                        _pam(rng, c, lead + (max(plan.l - 1, 0),), True)], axis=-1)
    return u, v


@dataclass
class PowerReport:
    """
    Transmit and jamming power against the budget.

    ``tx_power`` and ``jam_power`` are the expected powers used for the
    budget check. Structured signaling uses the ``a^2 q^2`` per real
    dimension bound; ``*_exact`` hold the exact uniform second moment.
    ``empirical_*`` are batch means when a Gaussian batch was supplied.
    """
    tx_power: float
    jam_power: float
    budget: float
    margin: float
    tx_exact: Optional[float] = None
    jam_exact: Optional[float] = None
    empirical_tx: Optional[float] = None
    empirical_tx_stderr: Optional[float] = None
    empirical_jam: Optional[float] = None
    empirical_jam_stderr: Optional[float] = None


def _empirical(P, s):
    if s.ndim < 2 or s.shape[0] < 2:
        return None, None
    e = np.sum(np.abs(s @ P.T) ** 2, axis=-1)
    return float(e.mean()), float(e.std(ddof=1) / np.sqrt(e.size))


def power_check(plan, pp, signal, p):
    """
    Verify the average power constraint of both transmitters.

    Parameters
    ----------
    plan : SchemePlan
    pp : PrecoderPair
    signal : GaussianStreams or StructuredConstellation
    p : float
        Power budget.

    Returns
    -------
    PowerReport

    Raises
    ------
    BudgetViolation
        If the expected power exceeds ``p`` by more than ``1e-6 p``.
    """
    if isinstance(signal, GaussianStreams):
        tx = signal.p_bar * float(np.sum(np.abs(pp.p_t) ** 2))
        jam = signal.p_bar * float(np.sum(np.abs(pp.p_c) ** 2))
        et, ets = _empirical(pp.p_t, np.asarray(signal.u_t))
        ej, ejs = _empirical(pp.p_c, np.asarray(signal.v_c))
        rep = PowerReport(tx, jam, p, p - max(tx, jam), empirical_tx=et, empirical_tx_stderr=ets,
                          empirical_jam=ej, empirical_jam_stderr=ejs)
    else:
        c = signal
        wt, wc = structured_weight(pp.p_t), structured_weight(pp.p_c)
        peak = c.a ** 2 * c.q ** 2
        second = c.a ** 2 * c.q * (c.q + 1) / 3.0
        tx, jam = wt * peak, wc * peak
        rep = PowerReport(tx, jam, p, p - max(tx, jam), tx_exact=wt * second, jam_exact=wc * second)
    if rep.margin < -1e-6 * p:
        raise BudgetViolation("power {0:.6g} exceeds budget {1:.6g}".format(max(rep.tx_power, rep.jam_power), p))
    return rep
