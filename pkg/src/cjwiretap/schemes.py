"""
Achievable-scheme selection and precoder construction.

Three geometric constructions cover every case:

``tx_null_align``
    The jammer sends along fixed directions (identity columns, plus
    directions in N(H_c) that the receiver cannot see); the transmitter
    aligns its first l streams with them at the eavesdropper through
    ``G_t^+ G_c`` and sends its remaining streams in N(G_t).
``joint_null``
    Stacked precoders ``[P_t; P_c]`` span part of N([G_t, -G_c]), so each
    information stream lands on top of a jamming stream at the eavesdropper.
``joint_null_invisible``
    As ``joint_null``, but some columns also satisfy ``H_c P_c = 0`` so
    their jamming is invisible at the receiver.
"""
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .channel import AntennaConfig
from .dof import theorem2_sdof, thresholds
from .errors import DegenerateChannel, ZeroSdof
from .linalg import DEFAULT_TOL, null_space_basis, pseudo_inverse, rank_tol

GAUSSIAN = "gaussian"
STRUCTURED = "structured"

SYM_CASES = ["Sym{0}".format(k) for k in range(1, 11)]
GEN_CASES = (["GenI", "GenII"] + ["GenIII-{0}".format(k) for k in range(1, 6)]
             + ["GenIV"] + ["GenV-{0}".format(k) for k in range(1, 6)])
ALL_CASES = SYM_CASES + GEN_CASES
STRUCTURED_CASES = ["Sym3", "Sym5", "Sym8", "Sym10", "GenIII-3", "GenIII-5", "GenV-3", "GenV-5"]


@dataclass(frozen=True)
class SchemePlan:
    """
    Selected achievable scheme.

    Attributes
    ----------
    case_id : str
        ``Sym1`` .. ``Sym10`` for nt == nr, otherwise ``GenI`` .. ``GenV-5``.
    cfg : AntennaConfig
    d : int
        Information streams.
    l : int
        Jamming streams, all aligned with information at the eavesdropper.
    g : int
        Jamming streams visible at the receiver (the first g columns of P_c).
    signaling : str
        ``"gaussian"`` or ``"structured"``.
    construction : str
        Geometric construction, see the module docstring.
    nc_used : int
        Jammer antennas in use; the rest stay silent.
    target : Fraction
        S.d.o.f. the scheme achieves.
    """
    case_id: str
    cfg: AntennaConfig
    d: int
    l: int
    g: int
    signaling: str
    construction: str
    nc_used: int
    target: Fraction

    @property
    def structured(self):
        return self.signaling == STRUCTURED

    @property
    def family(self):
        return self.case_id.split("-")[0]


def _classify(cfg):
    """Return (general case id, d, l, g, construction, nc_used)."""
    nt, nr, ne, nc = cfg.as_tuple()
    n3 = thresholds(cfg).n3
    if nt >= ne:
        if nr <= nt - ne:
            return "GenI", nr, 0, 0, "tx_null_align", 0
        if nr >= nt + ne:
            k = min(nc, ne)
            return "GenII", k + nt - ne, k, k, "tx_null_align", k
        k = min(nc, n3)
        if 2 * k <= nr + ne - nt:
            return "GenIII-1", k + nt - ne, k, k, "tx_null_align", k
        if k <= nr:
            s = nr + nt - ne
            if s % 2 == 0:
                l = (nr + ne - nt) // 2
                return "GenIII-2", s // 2, l, l, "tx_null_align", k
            l = (nr + ne - nt + 1) // 2
            return "GenIII-3", (s + 1) // 2, l, l, "tx_null_align", k
        s = k + nt - ne
        if s % 2 == 0:
            d, l, sub = s // 2, (k + ne - nt) // 2, "GenIII-4"
        else:
            d, l, sub = (s + 1) // 2, (k + ne - nt + 1) // 2, "GenIII-5"
        return sub, d, l, l - (k - nr), "tx_null_align", k
    if nr >= 2 * nt:
        k = min(nc, ne)
        d = max(k + nt - ne, 0)
        return "GenIV", d, d, d, "joint_null", k
    k = min(nc, n3)
    if 2 * k <= nr + 2 * (ne - nt):
        d = max(k + nt - ne, 0)
        return "GenV-1", d, d, d, "joint_null", k
    if k <= nr + ne - nt:
        if nr % 2 == 0:
            return "GenV-2", nr // 2, nr // 2, nr // 2, "joint_null", k
        d = (nr + 1) // 2
        return "GenV-3", d, d, d, "joint_null", k
    s = k + nt - ne
    d, sub = (s // 2, "GenV-4") if s % 2 == 0 else ((s + 1) // 2, "GenV-5")
    n_invisible = nt + k - ne - nr
    return sub, d, d, d - n_invisible, "joint_null_invisible", k


_SYM_NAME = {"GenIII-{0}".format(k): "Sym{0}".format(k) for k in range(1, 6)}
_SYM_NAME.update({"GenV-{0}".format(k): "Sym{0}".format(k + 5) for k in range(1, 6)})


def select_scheme(cfg):
    """
    Pick the achievable scheme for `cfg`.

    Parameters
    ----------
    cfg : AntennaConfig or tuple

    Returns
    -------
    SchemePlan

    Raises
    ------
    ZeroSdof
        If the configuration has zero s.d.o.f.
    """
    cfg = cfg if isinstance(cfg, AntennaConfig) else AntennaConfig(*cfg)
    target = theorem2_sdof(cfg)
    if target == 0:
        raise ZeroSdof("configuration {0} has zero s.d.o.f.".format(cfg))
    case, d, l, g, construction, nc_used = _classify(cfg)
    if cfg.symmetric:
        case = _SYM_NAME[case]
    signaling = STRUCTURED if target.denominator == 2 else GAUSSIAN
    achieved = d - Fraction(1, 2) if signaling == STRUCTURED else Fraction(d)
    if achieved != target:
        raise AssertionError("case {0} gives {1}, expected {2}".format(case, achieved, target))
    return SchemePlan(case, cfg, d, l, g, signaling, construction, nc_used, target)


@dataclass
class PrecoderPair:
    """
    Transmit and jammer precoders with their certificates.

    Attributes
    ----------
    p_t : np.ndarray
        Shape (nt, d). The first l columns are aligned with ``p_c``.
    p_c : np.ndarray
        Shape (nc, l). The first g columns are visible at the receiver.
    align_residual : float
        ``||G_t P_t[:, :l] - G_c P_c||_F``.
    invis_residual : float
        Largest of ``||G_t p||`` over transmit columns meant to be null at
        the eavesdropper and ``||H_c p||`` over jamming columns meant to be
        null at the receiver.
    rx_matrix_rank : int
    expected_rank : int
        ``min(d + g, nr)``.
    tx_rank : int
    """
    p_t: np.ndarray
    p_c: np.ndarray
    align_residual: float
    invis_residual: float
    rx_matrix_rank: int
    expected_rank: int
    tx_rank: int
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures


def _unit_pairs(pt, pc):
    """Scale aligned column pairs so each stacked column has unit norm."""
    s = np.sqrt(np.sum(np.abs(pt) ** 2, axis=0) + np.sum(np.abs(pc) ** 2, axis=0))
    if np.any(s == 0):
        raise DegenerateChannel("zero precoder column")
    return pt / s, pc / s


def _unit_cols(p):
    s = np.linalg.norm(p, axis=0)
    if np.any(s == 0):
        raise DegenerateChannel("zero precoder column")
    return p / s


def _build_tx_null_align(ch, plan, tol):
    nt, _, ne, k = ch.cfg.as_tuple()
    d, l, g = plan.d, plan.l, plan.g
    n_null = d - l
    if n_null:
        nb = null_space_basis(ch.gt, tol)
        if nb.shape[1] < n_null:
            raise DegenerateChannel("N(G_t) has dimension {0} < {1}".format(nb.shape[1], n_null))
        p_tn = nb[:, :n_null]
    else:
        p_tn = np.zeros((nt, 0), dtype=complex)
    p_ci = np.eye(k, g, dtype=complex)
    if l > g:
        nb = null_space_basis(ch.hc, tol)
        if nb.shape[1] < l - g:
            raise DegenerateChannel("N(H_c) has dimension {0} < {1}".format(nb.shape[1], l - g))
        p_c = np.hstack([p_ci, nb[:, :l - g]])
    else:
        p_c = p_ci
    p_ta = pseudo_inverse(ch.gt, tol) @ ch.gc @ p_c
    if l:
        p_ta, p_c = _unit_pairs(p_ta, p_c)
    return np.hstack([p_ta, p_tn]), p_c


def _build_joint_null(ch, plan, tol):
    nt = ch.cfg.nt
    G = np.hstack([ch.gt, -ch.gc])
    Q = null_space_basis(G, tol)
    if Q.shape[1] < plan.d:
        raise DegenerateChannel("N([G_t, -G_c]) has dimension {0} < {1}".format(Q.shape[1], plan.d))
    Q = Q[:, :plan.d]
    return Q[:nt], Q[nt:]


def _build_joint_null_invisible(ch, plan, tol):
    nt, nr, _, k = ch.cfg.as_tuple()
    G = np.hstack([ch.gt, -ch.gc])
    Gp = np.vstack([G, np.hstack([np.zeros((nr, nt)), ch.hc])])
    Qp = null_space_basis(Gp, tol)
    n_inv = plan.l - plan.g
    if Qp.shape[1] != n_inv:
        raise DegenerateChannel("N(G') has dimension {0}, expected {1}".format(Qp.shape[1], n_inv))
    basis = null_space_basis(G, tol)
    resid = basis - Qp @ (Qp.conj().T @ basis)
    U, s, _ = np.linalg.svd(resid, full_matrices=False)
    if plan.g and (s.size < plan.g or s[plan.g - 1] <= tol.rank_rel_tol * max(s[0], 1.0)):
        raise DegenerateChannel("N(G) does not extend N(G') by {0} directions".format(plan.g))
    Q = np.hstack([U[:, :plan.g], Qp])
    return Q[:nt], Q[nt:]


_BUILDERS = {
    "tx_null_align": _build_tx_null_align,
    "joint_null": _build_joint_null,
    "joint_null_invisible": _build_joint_null_invisible,
}


def receive_matrix(ch, pp, plan):
    """
    Effective receive matrix ``[H_t P_t, H_c P_c[:, :g]]``.

    Parameters
    ----------
    ch : ChannelInstance
    pp : PrecoderPair
    plan : SchemePlan

    Returns
    -------
    np.ndarray
        Shape (nr, d + g).
    """
    if plan.d < 1:
        raise ZeroSdof("plan has no information streams")
    return np.hstack([ch.ht @ pp.p_t, ch.hc @ pp.p_c[:, :plan.g]])


def certify(ch, plan, p_t, p_c, tol=DEFAULT_TOL):
    """
    Compute the alignment, invisibility and rank certificates.

    Returns
    -------
    PrecoderPair
        With ``failures`` listing the names of violated checks.
    """
    l, g = plan.l, plan.g
    align = float(np.linalg.norm(ch.gt @ p_t[:, :l] - ch.gc @ p_c)) if l else 0.0
    invis = 0.0
    if plan.construction == "tx_null_align" and p_t.shape[1] > l:
        invis = max(invis, float(np.linalg.norm(ch.gt @ p_t[:, l:], axis=0).max()))
    if p_c.shape[1] > g:
        invis = max(invis, float(np.linalg.norm(ch.hc @ p_c[:, g:], axis=0).max()))
    rx = np.hstack([ch.ht @ p_t, ch.hc @ p_c[:, :g]])
    rx_rank = rank_tol(rx, tol)
    expected = min(plan.d + g, plan.cfg.nr)
    tx_rank = rank_tol(p_t, tol)
    failures = []
    if not align < tol.residual_abs_tol:
        failures.append("alignment")
    if not invis < tol.residual_abs_tol:
        failures.append("invisibility")
    if rx_rank != expected:
        failures.append("receive_rank")
    if tx_rank != plan.d:
        failures.append("transmit_rank")
    return PrecoderPair(p_t, p_c, align, invis, rx_rank, expected, tx_rank, failures)


def build_precoders(ch, plan, tol=DEFAULT_TOL, check=True):
    """
    Construct precoders for `plan` on channel `ch`.

    Parameters
    ----------
    ch : ChannelInstance
    plan : SchemePlan
    tol : Tolerance
    check : bool
        If True, raise when a certificate fails; otherwise report the
        failures on the returned pair.

    Returns
    -------
    PrecoderPair

    Raises
    ------
    DegenerateChannel
        If a certificate fails (a probability-zero event for random channels).
    """
    if ch.cfg != plan.cfg:
        raise ValueError("channel {0} does not match plan {1}".format(ch.cfg, plan.cfg))
    sub = ch.restrict_jammer(plan.nc_used)
    p_t, p_c = _BUILDERS[plan.construction](sub, plan, tol)
    p_c = np.vstack([p_c, np.zeros((plan.cfg.nc - plan.nc_used, p_c.shape[1]), dtype=complex)])
    pp = certify(ch, plan, p_t, p_c, tol)
    if check and pp.failures:
        raise DegenerateChannel("certificate failed: {0}".format(", ".join(pp.failures)))
    return pp


def canonical_configs(max_antennas=5):
    """
    Smallest configuration for every case id.

    Configurations are scanned in order of total antenna count and then
    lexicographically, so the result is deterministic.

    Returns
    -------
    dict
        Maps case id to AntennaConfig.
    """
    found = {}
    cands = []
    for nt in range(1, max_antennas + 1):
        for nr in range(1, max_antennas + 1):
            for ne in range(1, max_antennas + 1):
                for nc in range(0, thresholds((nt, nr, ne, 0)).n3 + 1):
                    cands.append((nt + nr + ne + nc, (nt, nr, ne, nc)))
    for _, t in sorted(cands):
        cfg = AntennaConfig(*t)
        if theorem2_sdof(cfg) == 0:
            continue
        case = select_scheme(cfg).case_id
        found.setdefault(case, cfg)
    return {c: found[c] for c in ALL_CASES if c in found}
