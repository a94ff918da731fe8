"""
Antenna configurations, random channel draws and noise.

The model is

    Y_r = H_t X_t + H_c X_c + Z_r
    Y_e = G_t X_t + G_c X_c + Z_e

with ``Z_r``, ``Z_e`` circularly symmetric unit-variance Gaussian noise.
"""
import json
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class AntennaConfig:
    """
    Antenna counts at the transmitter, receiver, eavesdropper and jammer.
    """
    nt: int
    nr: int
    ne: int
    nc: int

    def __post_init__(self):
        for name in ("nt", "nr", "ne", "nc"):
            val = getattr(self, name)
            if int(val) != val:
                raise ValueError("{0} must be an integer".format(name))
            object.__setattr__(self, name, int(val))
        if min(self.nt, self.nr, self.ne) < 1 or self.nc < 0:
            raise ValueError("need nt, nr, ne >= 1 and nc >= 0, got {0}".format(self.as_tuple()))

    @property
    def symmetric(self):
        return self.nt == self.nr

    @property
    def n(self):
        """Common transmitter/receiver antenna count, or None."""
        return self.nt if self.symmetric else None

    def as_tuple(self):
        return (self.nt, self.nr, self.ne, self.nc)

    def __str__(self):
        return "({0},{1},{2},{3})".format(*self.as_tuple())


def derive_seed(*keys):
    """
    Map a tuple of nonnegative integers to an independent 63-bit seed.
    """
    ss = np.random.SeedSequence([int(k) for k in keys])
    return int(ss.generate_state(2, dtype=np.uint64)[0] >> np.uint64(1))


def randn_c(rng, *shape):
    """Standard circularly symmetric complex Gaussian samples."""
    return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)


@dataclass
class ChannelInstance:
    """
    The four channel matrices of one draw.

    Attributes
    ----------
    ht : np.ndarray
        Transmitter to receiver, shape (nr, nt).
    hc : np.ndarray
        Jammer to receiver, shape (nr, nc).
    gt : np.ndarray
        Transmitter to eavesdropper, shape (ne, nt).
    gc : np.ndarray
        Jammer to eavesdropper, shape (ne, nc).
    seed : int
    """
    ht: np.ndarray
    hc: np.ndarray
    gt: np.ndarray
    gc: np.ndarray
    seed: int = 0

    def __post_init__(self):
        for name in ("ht", "hc", "gt", "gc"):
            M = np.asarray(getattr(self, name), dtype=complex)
            if M.ndim != 2:
                raise ValueError("{0} must be 2-D".format(name))
            if not np.all(np.isfinite(M)):
                raise ValueError("{0} has non-finite entries".format(name))
            setattr(self, name, M)
        nr, nt = self.ht.shape
        ne = self.gt.shape[0]
        nc = self.hc.shape[1]
        if self.hc.shape[0] != nr or self.gt.shape[1] != nt or self.gc.shape != (ne, nc):
            raise ValueError("inconsistent channel dimensions")

    @property
    def cfg(self):
        return AntennaConfig(self.ht.shape[1], self.ht.shape[0], self.gt.shape[0], self.hc.shape[1])

    def restrict_jammer(self, k):
        """Copy that keeps only the first `k` jammer antennas."""
        return ChannelInstance(self.ht, self.hc[:, :k], self.gt, self.gc[:, :k], self.seed)

    def to_json(self):
        def enc(M):
            return [[[float(z.real), float(z.imag)] for z in row] for row in M]
        nt, nr, ne, nc = self.cfg.as_tuple()
        return json.dumps({"nt": nt, "nr": nr, "ne": ne, "nc": nc, "seed": int(self.seed),
                           "ht": enc(self.ht), "hc": enc(self.hc),
                           "gt": enc(self.gt), "gc": enc(self.gc)})

    @classmethod
    def from_json(cls, text):
        obj = json.loads(text) if isinstance(text, str) else text

        def dec(rows, shape):
            M = np.zeros(shape, dtype=complex)
            for i, row in enumerate(rows):
                for j, (re, im) in enumerate(row):
                    M[i, j] = complex(re, im)
            return M
        nt, nr, ne, nc = obj["nt"], obj["nr"], obj["ne"], obj["nc"]
        return cls(dec(obj["ht"], (nr, nt)), dec(obj["hc"], (nr, nc)),
                   dec(obj["gt"], (ne, nt)), dec(obj["gc"], (ne, nc)), int(obj["seed"]))


def sample_channel(cfg, seed):
    """
    Draw i.i.d. CN(0, 1) channel matrices for `cfg`.

    Parameters
    ----------
    cfg : AntennaConfig
    seed : int

    Returns
    -------
    ChannelInstance
    """
    rng = np.random.default_rng(seed)
    nt, nr, ne, nc = cfg.as_tuple()
    ht = randn_c(rng, nr, nt)
    hc = randn_c(rng, nr, nc)
    gt = randn_c(rng, ne, nt)
    gc = randn_c(rng, ne, nc)
    return ChannelInstance(ht, hc, gt, gc, seed)


def awgn(length, seed):
    """Unit-variance circularly symmetric complex Gaussian noise vector."""
    if length < 1:
        raise ValueError("length must be >= 1")
    return randn_c(np.random.default_rng(seed), length)


@dataclass(frozen=True)
class NoiseDraw:
    z_r: np.ndarray
    z_e: np.ndarray


def draw_noise(cfg, seed):
    rng = np.random.default_rng(seed)
    return NoiseDraw(randn_c(rng, cfg.nr), randn_c(rng, cfg.ne))


@dataclass(frozen=True)
class RhoBudget:
    """
    Noise-splitting parameter for the converse: K_t = K_c = rho^2 I.
    """
    rho: float

    @property
    def k_t_scale(self):
        return self.rho ** 2

    @property
    def k_c_scale(self):
        return self.rho ** 2


def _norm2(M):
    return float(np.linalg.norm(M, 2)) if M.size else 0.0


def compute_rho(ch):
    """
    Largest admissible rho, ``1 / max(||H_c||, sqrt(||G_t||^2 + ||G_c||^2))``.
    """
    denom = max(_norm2(ch.hc), np.hypot(_norm2(ch.gt), _norm2(ch.gc)))
    if denom == 0:
        raise ValueError("all cross channels are zero")
    return RhoBudget(1.0 / denom)


def rho_psd_margins(ch, rho):
    """
    Minimum eigenvalues of the three covariance-validity matrices.

    Returns
    -------
    tuple of float
        For ``I - rho^2 G_t G_t^H``, ``I - rho^2 H_c H_c^H`` and
        ``I - rho^2 (G_t G_t^H + G_c G_c^H)``.
    """
    r2 = rho.rho ** 2 if isinstance(rho, RhoBudget) else float(rho) ** 2
    gtg = ch.gt @ ch.gt.conj().T
    hch = ch.hc @ ch.hc.conj().T
    gcg = ch.gc @ ch.gc.conj().T
    mats = (np.eye(ch.cfg.ne) - r2 * gtg,
            np.eye(ch.cfg.nr) - r2 * hch,
            np.eye(ch.cfg.ne) - r2 * (gtg + gcg))
    return tuple(float(np.linalg.eigvalsh(M).min()) for M in mats)
