"""
Legitimate receiver pipelines.

Gaussian schemes are decoded by zero-forcing the effective receive matrix.
Structured schemes project the observation onto a direction ``b`` that
cancels all but one information and one jamming stream, decode that pair
from the resulting scalar ``f1 U_1 + f2 V_1 + noise``, cancel it, and
zero-force the remaining ``nr - 1`` dimensions.
"""
from dataclasses import dataclass, field

import numpy as np

from .channel import derive_seed, randn_c
from .errors import AmbiguousPoint, DegenerateChannel, SingularMatrix, TooLarge
from .linalg import DEFAULT_TOL, orth_complement_vector, pseudo_inverse, rank_tol
from .schemes import receive_matrix
from .signaling import structured_draw, structured_params, DEFAULT_EPSILON

ENUM_GUARD = 10 ** 7
TIE_TOL = 1e-12


def zero_forcing_decode(ch, pp, plan, y_r, tol=DEFAULT_TOL):
    """
    Invert the effective receive matrix and keep the information streams.

    Parameters
    ----------
    ch : ChannelInstance
    pp : PrecoderPair
    plan : SchemePlan
    y_r : np.ndarray
        Observation of shape (nr,) or (batch, nr).

    Returns
    -------
    np.ndarray
        Estimates of shape (d,) or (batch, d).

    Raises
    ------
    SingularMatrix
        If the receive matrix does not have full column rank.
    """
    M = receive_matrix(ch, pp, plan)
    if rank_tol(M, tol) < M.shape[1]:
        raise SingularMatrix("receive matrix {0}x{1} is rank deficient".format(*M.shape))
    x = np.asarray(y_r) @ pseudo_inverse(M, tol).T
    return x[..., :plan.d]


@dataclass
class ProjectionStage:
    """
    First receiver stage of a structured scheme.

    Attributes
    ----------
    b : np.ndarray
        Unit vector orthogonal to every receive direction except the first
        information and first jamming direction.
    d_matrix : np.ndarray
        ``[[b^H], [0, I_{nr-1}]]``.
    f1, f2 : complex
        ``b^H a_1`` and ``b^H h_c,1``.
    a_rest : np.ndarray
        Rows 2..nr of the first information and jamming directions,
        stacked as columns, shape (nr - 1, 2).
    b_matrix : np.ndarray
        Rows 2..nr of the remaining directions, shape (nr - 1, nr - 1).
    """
    b: np.ndarray
    d_matrix: np.ndarray
    f1: complex
    f2: complex
    a_rest: np.ndarray
    b_matrix: np.ndarray
    b_rank: int


def build_projection(ch, pp, plan, tol=DEFAULT_TOL):
    """
    Build the projection stage for a structured plan.

    Raises
    ------
    DegenerateChannel
        If ``|f1|`` or ``|f2|`` is below 1e-9 or ``b`` cannot be formed.
    """
    if not plan.structured:
        raise ValueError("plan {0} uses Gaussian signaling".format(plan.case_id))
    A = ch.ht @ pp.p_t
    Hv = ch.hc @ pp.p_c[:, :plan.g]
    nr = A.shape[0]
    others = np.hstack([A[:, 1:], Hv[:, 1:]])
    if others.shape[1] != nr - 1:
        raise AssertionError("expected {0} directions to cancel, got {1}".format(nr - 1, others.shape[1]))
    try:
        b = orth_complement_vector(others, tol)
    except Exception as exc:
        raise DegenerateChannel("no projection direction: {0}".format(exc))
    f1 = complex(np.vdot(b, A[:, 0]))
    f2 = complex(np.vdot(b, Hv[:, 0]))
    if abs(f1) < 1e-9 or abs(f2) < 1e-9:
        raise DegenerateChannel("projected gains too small: |f1|={0:.3g}, |f2|={1:.3g}".format(abs(f1), abs(f2)))
    D = np.eye(nr, dtype=complex)
    D[0] = b.conj()
    B = others[1:]
    b_rank = rank_tol(B, tol) if B.size else 0
    return ProjectionStage(b, D, f1, f2, np.stack([A[1:, 0], Hv[1:, 0]], axis=1), B, b_rank)


def _real_map_smin(z):
    """Smallest singular value of the real map (u, v) -> u + z v."""
    M = np.array([[1.0, z.real], [0.0, z.imag]])
    return float(np.linalg.svd(M, compute_uv=False)[-1])


def _unit_dmin(z, q):
    """
    ``min |du + z dv|`` over nonzero integer pairs with |du|, |dv| <= 2q.

    For fixed dv the optimal du is the clipped rounding of ``-Re(z dv)``, so
    only dv needs scanning. Pairs with ``|dv| > delta / s_min`` cannot beat
    the current bound ``delta`` and are skipped.
    """
    r = 2 * q
    best = min(1.0, abs(z)) if abs(z) > 0 else 0.0
    if best == 0.0:
        return 0.0
    s_min = _real_map_smin(z)
    w = r if s_min < 1e-300 else int(min(r, np.floor(best / s_min + 1e-9)))
    if w < 1:
        return best
    dv = np.arange(1, w + 1, dtype=float)
    x = -(z.real * dv)
    du = np.clip(np.rint(x), -r, r)
    dist = np.hypot(du - x, z.imag * dv)
    return float(min(best, dist.min()))


@dataclass
class ScaleConstellation:
    """
    Received scalar constellation ``a (f1 u + f2 v)``, u, v in {-q..q}.
    """
    f1: complex
    f2: complex
    a: float
    q: int
    d_min: float

    def points(self):
        """
        Enumerate all points as (value, (u, v)).

        Raises
        ------
        TooLarge
            If ``(2q + 1)^2`` exceeds the enumeration guard.
        """
        n = 2 * self.q + 1
        if n * n > ENUM_GUARD:
            raise TooLarge("{0} points exceed the guard {1}".format(n * n, ENUM_GUARD))
        ks = range(-self.q, self.q + 1)
        return [(self.a * (self.f1 * u + self.f2 * v), (u, v)) for u in ks for v in ks]


def min_distance(ps, c):
    """
    Exact minimum distance of the projected two-stream constellation.

    Parameters
    ----------
    ps : ProjectionStage or tuple (f1, f2)
    c : StructuredConstellation or tuple (q, a)

    Returns
    -------
    ScaleConstellation

    Raises
    ------
    TooLarge
        If the difference range 4q + 1 exceeds the guard.
    """
    f1, f2 = (ps.f1, ps.f2) if isinstance(ps, ProjectionStage) else ps
    q, a = (c.q, c.a) if hasattr(c, "q") else c
    if 4 * q + 1 > ENUM_GUARD:
        raise TooLarge("difference range {0} exceeds the guard {1}".format(4 * q + 1, ENUM_GUARD))
    f1, f2 = complex(f1), complex(f2)
    dm = a * abs(f1) * _unit_dmin(f2 / f1, q)
    return ScaleConstellation(f1, f2, float(a), int(q), float(dm))


def _nearest_pair(t, z, q, s_min):
    """
    Nearest (u, v) in {-q..q}^2 to ``t`` under ``(u, v) -> u + z v``.

    Returns the best pair, its distance and the distance of the runner-up.
    """
    if s_min > 1e-12:
        v_star = t.imag / z.imag
        u_star = t.real - z.real * v_star
        v0 = int(np.clip(np.rint(v_star), -q, q))
        u0 = int(np.clip(np.rint(u_star), -q, q))
        delta = abs(t - u0 - z * v0)
        half = delta / s_min + 1e-9
        lo = max(-q, int(np.ceil(v_star - half)))
        hi = min(q, int(np.floor(v_star + half)))
        if lo > hi:
            lo = hi = v0
    else:
        lo, hi = -q, q
    v = np.arange(lo, hi + 1)
    r = t - z * v
    x = r.real
    u = np.clip(np.rint(x), -q, q)
    dist = np.hypot(x - u, r.imag)
    # runner-up within the same v: the next integer on the other side of x
    u_alt = np.clip(np.where(x >= u, u + 1, u - 1), -q, q)
    dist_alt = np.where(u_alt != u, np.hypot(x - u_alt, r.imag), np.inf)
    i = int(np.argmin(dist))
    best = dist[i]
    others = np.concatenate([np.delete(dist, i), dist_alt])
    second = float(others.min()) if others.size else np.inf
    return int(u[i]), int(v[i]), float(best), second


def hard_decision_decode(ps, c, y):
    """
    Map a projected scalar observation to the nearest ``a (f1 u + f2 v)``.

    Parameters
    ----------
    ps : ProjectionStage
    c : StructuredConstellation
    y : complex

    Returns
    -------
    (int, int)
        Integer indices (u, v) in {-q..q}; the symbols are ``a u``, ``a v``.

    Raises
    ------
    AmbiguousPoint
        If two constellation points are equally near within 1e-12.
    """
    scale = c.a * ps.f1
    z = ps.f2 / ps.f1
    u, v, best, second = _nearest_pair(complex(y) / scale, z, c.q, _real_map_smin(z))
    if (second - best) * abs(scale) <= TIE_TOL:
        raise AmbiguousPoint("observation {0} is equidistant from two points".format(y))
    return u, v


def slice_pam(x, c):
    """Nearest scaled integer per real and imaginary component, clipped to {-q..q}."""
    re = np.clip(np.rint(np.real(x) / c.a), -c.q, c.q)
    im = np.clip(np.rint(np.imag(x) / c.a), -c.q, c.q)
    return c.a * (re + 1j * im)


def full_structured_decode(ch, pp, plan, ps, c, y_r, tol=DEFAULT_TOL):
    """
    Projection, pair decoding, cancellation and zero-forcing.

    Returns
    -------
    np.ndarray
        Estimates of the d information symbols.

    Raises
    ------
    SingularMatrix
        If the post-cancellation matrix is rank deficient.
    AmbiguousPoint
        Propagated from the pair decoder.
    """
    y_r = np.asarray(y_r, dtype=complex)
    u1, v1 = hard_decision_decode(ps, c, np.vdot(ps.b, y_r))
    out = np.empty(plan.d, dtype=complex)
    out[0] = c.a * u1
    if plan.d == 1 and ps.b_matrix.shape[0] == 0:
        return out
    if ps.b_rank < ps.b_matrix.shape[1]:
        raise SingularMatrix("post-cancellation matrix is rank deficient")
    rest = y_r[1:] - ps.a_rest @ np.array([c.a * u1, c.a * v1])
    x = np.linalg.solve(ps.b_matrix, rest)
    out[1:] = slice_pam(x[:plan.d - 1], c)
    return out


@dataclass
class DecodeReport:
    """
    Monte Carlo error counts at one power.

    Attributes
    ----------
    symbol_errors : int
        Trials with any information symbol wrong.
    u1_errors : int
        Trials with U_1 wrong.
    joint_errors : int
        Trials with the pair (U_1, V_1) wrong.
    stream_errors : int
        Trials with any of U_2..U_d wrong.
    per_stream_errors : list of int
        Errors per information stream.
    ambiguous : int
        Trials whose pair decision hit an exact tie (counted as errors).
    """
    p: float
    q: int
    a: float
    d_min: float
    trials: int
    symbol_errors: int
    u1_errors: int
    joint_errors: int
    stream_errors: int
    per_stream_errors: list = field(default_factory=list)
    ambiguous: int = 0


def measure_errors(ch, pp, plan, p_grid, trials, seed, epsilon=DEFAULT_EPSILON, tol=DEFAULT_TOL):
    """
    Monte Carlo symbol error counts of the structured receiver.

    Parameters
    ----------
    ch : ChannelInstance
    pp : PrecoderPair
    plan : SchemePlan
    p_grid : sequence of float
    trials : int
    seed : int
    epsilon : float

    Returns
    -------
    list of DecodeReport
        One per power; empty if ``trials == 0``.
    """
    if trials <= 0:
        return []
    ps = build_projection(ch, pp, plan, tol)
    if ps.b_rank < ps.b_matrix.shape[1]:
        raise SingularMatrix("post-cancellation matrix is rank deficient")
    reports = []
    for i, p in enumerate(p_grid):
        c = structured_params(plan, pp, p, epsilon)
        dm = min_distance(ps, c).d_min
        rng_seed = derive_seed(seed, i)
        u, v = structured_draw(c, plan, rng_seed, batch=trials)
        z = randn_c(np.random.default_rng(derive_seed(seed, i, 1)), trials, plan.cfg.nr)
        Y = u @ (ch.ht @ pp.p_t).T + v @ (ch.hc @ pp.p_c).T + z
        per = np.zeros(plan.d, dtype=int)
        sym = u1e = joint = stream = amb = 0
        for k in range(trials):
            try:
                u1, v1 = hard_decision_decode(ps, c, np.vdot(ps.b, Y[k]))
            except AmbiguousPoint:
                amb += 1
                sym += 1
                u1e += 1
                joint += 1
                stream += 1
                per += 1
                continue
            wrong_pair = abs(c.a * u1 - u[k, 0]) > c.a / 2 or abs(c.a * v1 - v[k, 0]) > c.a / 2
            est = np.empty(plan.d, dtype=complex)
            est[0] = c.a * u1
            if plan.d > 1:
                rest = Y[k, 1:] - ps.a_rest @ np.array([c.a * u1, c.a * v1])
                est[1:] = slice_pam(np.linalg.solve(ps.b_matrix, rest)[:plan.d - 1], c)
            bad = np.abs(est - u[k]) > c.a / 2
            per += bad
            sym += bool(bad.any())
            u1e += bool(bad[0])
            joint += bool(wrong_pair)
            stream += bool(bad[1:].any())
        reports.append(DecodeReport(float(p), c.q, c.a, dm, trials, sym, u1e, joint, stream,
                                    per.tolist(), amb))
    return reports
