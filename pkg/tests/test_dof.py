from fractions import Fraction as F

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cjwiretap.channel import AntennaConfig, compute_rho, sample_channel, ChannelInstance
from cjwiretap.dof import (converse_envelope, converse_rate_curve, theorem1_sdof, theorem2_sdof,
                           thresholds, upper_bound_full_coop, upper_bound_secrecy_reliability)
from cjwiretap.errors import RangeError
from oracles import sdof_by_table


def test_theorem1_examples():
    assert theorem1_sdof(4, 4, 2) == 2
    assert theorem1_sdof(4, 4, 8) == 4
    assert theorem1_sdof(1, 1, 1) == F(1, 2)
    assert theorem1_sdof(2, 3, 1) == 0


def test_theorem1_fig2_row():
    assert [theorem1_sdof(4, 4, c) for c in range(9)] == [0, 1, 2, 2, 2, F(5, 2), 3, F(7, 2), 4]


def test_theorem1_clamps():
    assert theorem1_sdof(3, 2, 50) == theorem1_sdof(3, 2, 5)


def test_theorem2_examples():
    assert theorem2_sdof((5, 2, 3, 0)) == 2
    assert theorem2_sdof((2, 2, 2, 2)) == 1
    assert theorem2_sdof((1, 1, 1, 1)) == F(1, 2)


def test_values_are_exact_halves():
    for nt in range(1, 5):
        for nr in range(1, 5):
            for ne in range(1, 5):
                for nc in range(0, 10):
                    v = theorem2_sdof((nt, nr, ne, nc))
                    assert isinstance(v, F) and v.denominator in (1, 2)


def test_full_coop_bound():
    assert upper_bound_full_coop((4, 4, 4, 2)) == 2
    assert upper_bound_full_coop((2, 2, 3, 0)) == 0
    assert upper_bound_full_coop((5, 2, 3, 3)) == 2
    with pytest.raises(RangeError):
        upper_bound_full_coop((2, 2, 2, 3))


def test_secrecy_reliability_bound():
    assert upper_bound_secrecy_reliability((4, 4, 4, 5)) == F(5, 2)
    assert upper_bound_secrecy_reliability((4, 4, 2, 5)) == F(7, 2)
    with pytest.raises(RangeError):
        upper_bound_secrecy_reliability((3, 3, 3, 3))


def test_envelope_examples():
    assert converse_envelope((4, 4, 4, 3)) == 2 == theorem1_sdof(4, 4, 3)
    assert converse_envelope((2, 2, 3, 1)) == 0


def grid(nmax=6):
    for nt in range(1, nmax + 1):
        for nr in range(1, nmax + 1):
            for ne in range(1, nmax + 1):
                n3 = thresholds((nt, nr, ne, 0)).n3
                for nc in range(0, n3 + 1):
                    yield AntennaConfig(nt, nr, ne, nc)


def test_grid_theorem2_equals_envelope_and_theorem1():
    mism = []
    for cfg in grid():
        t2 = theorem2_sdof(cfg)
        if t2 != converse_envelope(cfg):
            mism.append(cfg)
        if cfg.symmetric and t2 != theorem1_sdof(cfg.nt, cfg.ne, cfg.nc):
            mism.append(cfg)
    assert mism == []


def test_symmetric_matches_case_table():
    for n in range(1, 7):
        for ne in range(1, 7):
            for nc in range(0, n + ne + 3):
                assert theorem1_sdof(n, ne, nc) == sdof_by_table(n, n, ne, nc)


def test_thresholds_ordered():
    for cfg in grid():
        th = thresholds(cfg)
        assert th.n1 <= th.n2 <= th.n3


cfgs = st.builds(AntennaConfig, st.integers(1, 8), st.integers(1, 8), st.integers(1, 8), st.integers(0, 20))


@settings(max_examples=300, deadline=None)
@given(cfgs)
def test_monotone_and_bounded(cfg):
    v = theorem2_sdof(cfg)
    assert 0 <= v <= min(cfg.nt, cfg.nr)
    nxt = theorem2_sdof(AntennaConfig(cfg.nt, cfg.nr, cfg.ne, cfg.nc + 1))
    assert nxt >= v


@settings(max_examples=200, deadline=None)
@given(cfgs)
def test_saturates_at_n3(cfg):
    n3 = thresholds(cfg).n3
    top = theorem2_sdof(AntennaConfig(cfg.nt, cfg.nr, cfg.ne, n3))
    assert top == min(cfg.nt, cfg.nr)
    assert theorem2_sdof(AntennaConfig(cfg.nt, cfg.nr, cfg.ne, n3 + 5)) == top


@settings(max_examples=200, deadline=None)
@given(cfgs)
def test_flat_between_n1_and_n2(cfg):
    th = thresholds(cfg)
    vals = {theorem2_sdof(AntennaConfig(cfg.nt, cfg.nr, cfg.ne, c))
            for c in range(0, th.n2 + 1) if c > th.n1}
    assert len(vals) <= 1


def test_two_slopes_of_theorem1():
    for n in range(1, 7):
        for ne in range(1, 7):
            for nc in range(0, n + ne):
                step = theorem1_sdof(n, ne, nc + 1) - theorem1_sdof(n, ne, nc)
                first = nc + 1 <= ne - F(min(n, ne), 2) and n + nc - ne >= 0
                third = nc >= max(n, ne)
                if first:
                    assert step == 1
                if third:
                    assert step == F(1, 2)


def test_rate_curve_slope():
    for t in [(4, 4, 2, 5), (3, 3, 3, 4), (2, 2, 2, 3)]:
        cfg = AntennaConfig(*t)
        ch = sample_channel(cfg, 0)
        pts = converse_rate_curve(ch, compute_rho(ch), 2.0 ** np.linspace(20, 60, 41))
        x = np.log2([p for p, _ in pts])
        y = np.array([r for _, r in pts])
        slope = np.polyfit(x, y, 1)[0]
        assert abs(slope - (cfg.nt + cfg.nc - cfg.ne) / 2) < 0.02


def test_rate_curve_small_power():
    cfg = AntennaConfig(2, 2, 2, 2)
    ch = sample_channel(cfg, 1)

    class Unit:
        rho = 1.0
    (p, r), = converse_rate_curve(ch, Unit, [1e-6])
    assert r >= 0
    h2 = np.max(np.sum(np.abs(ch.ht) ** 2, 1) + np.sum(np.abs(ch.hc) ** 2, 1))
    assert np.isclose(r, np.log2(1 + h2 * 1e-6) + 0.0 * np.log2(1 + 1e-6), rtol=1e-6)


def test_rate_curve_gain_doubling():
    cfg = AntennaConfig(3, 3, 2, 4)
    ch = sample_channel(cfg, 2)
    rho = compute_rho(ch)
    big = ChannelInstance(2 * ch.ht, 2 * ch.hc, ch.gt, ch.gc)
    p = [1e12]
    shift = converse_rate_curve(big, rho, p)[0][1] - converse_rate_curve(ch, rho, p)[0][1]
    assert 0 < shift <= cfg.nt + 1e-9


def test_rate_curve_range():
    ch = sample_channel(AntennaConfig(2, 2, 2, 1), 0)
    with pytest.raises(RangeError):
        converse_rate_curve(ch, compute_rho(ch), [1.0])
