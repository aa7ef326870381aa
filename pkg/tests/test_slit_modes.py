import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from slitwave import oracle
from slitwave.core import Particle, SlitGeometry
from slitwave.slit_modes import (
    ModeIndex,
    SlitSide,
    Truncation,
    in_slit_wavefunction,
    longitudinal_factor,
    longitudinal_wavenumber,
    mode_coefficients,
)

A_REF18, D_REF18 = 47.5e-9, 52.5e-9


def _geom(a=A_REF18, d=D_REF18, b=10e-6, c=0.0):
    return SlitGeometry(width_a_m=a, length_b_m=b, thickness_c_m=c, gap_d_m=d, screen_L_m=1.25)


def _projection(geom, amp, m_odd, n_odd, kernel):
    """(4/ab) * double integral of amp * sin(n_odd pi x/b) * kernel(m_odd pi y/a) over the left slit."""
    a, b = geom.width_a_m, geom.length_b_m
    lo, hi = geom.left_aperture
    spec = oracle.QuadratureSpec(abs_tol=1e-30, rel_tol=1e-13)
    ix, _ = oracle.integrate_1d(lambda x: np.sin(n_odd * math.pi * x / b), 0.0, b, spec,
                                omega=n_odd * math.pi / b)
    iy, _ = oracle.integrate_1d(lambda y: kernel(m_odd * math.pi * y / a), lo, hi, spec,
                                omega=m_odd * math.pi / a)
    return 4 / (a * b) * amp * ix * iy


@pytest.mark.parametrize("m,n", [(0, 0), (1, 0), (0, 1), (3, 2), (7, 5)])
def test_coefficients_match_quadrature(m, n):
    g = _geom()
    D, Dp = mode_coefficients(ModeIndex(m, n), g, 1.0)
    qd = _projection(g, 1.0, 2 * m + 1, 2 * n + 1, np.cos)
    qdp = _projection(g, 1.0, 2 * m + 1, 2 * n + 1, np.sin)
    assert D == pytest.approx(float(np.real(qd)), rel=1e-10)
    assert Dp == pytest.approx(float(np.real(qdp)), rel=1e-10)


def test_coefficient_ground_mode_value():
    D, _ = mode_coefficients(ModeIndex(0, 0), _geom(), 1.0)
    assert D == pytest.approx(-16 / math.pi**2 * math.sin(math.pi * 52.5 / 95), rel=1e-14)


def test_even_harmonics_vanish():
    g = _geom()
    for n_even in (2, 4):
        assert abs(_projection(g, 1.0, 1, n_even, np.cos)) < 1e-9


def test_zero_gap_kills_cosine_coefficient():
    g = _geom(d=0.0)
    for m, n in [(0, 0), (4, 1), (9, 3)]:
        assert mode_coefficients(ModeIndex(m, n), g, 2.5)[0] == 0.0


def test_coefficient_ratio():
    g = _geom()
    D0, _ = mode_coefficients(ModeIndex(0, 0), g, 1.0)
    D1, _ = mode_coefficients(ModeIndex(1, 0), g, 1.0)
    x = math.pi * g.gap_d_m / (2 * g.width_a_m)
    assert abs(D1 / D0) == pytest.approx(abs(math.sin(3 * x) / (3 * math.sin(x))), rel=1e-13)


def test_longitudinal_factor_propagating_and_flat():
    p = Particle(2.4e-12)
    assert longitudinal_factor(ModeIndex(3, 2), _geom(c=0.0), p) == 1 + 0j
    f = longitudinal_factor(ModeIndex(3, 2), _geom(c=50e-9), p)
    assert abs(abs(f) - 1) < 1e-12


def test_longitudinal_factor_evanescent():
    p = Particle(2.4e-12)
    g = _geom(c=1e-9)
    mn = ModeIndex(20000, 0)  # (2m+1) pi/a > k
    f = longitudinal_factor(mn, g, p)
    mpmath.mp.dps = 40
    k = 2 * mpmath.pi / mpmath.mpf("2.4e-12")
    q = (2 * mn.m + 1) * mpmath.pi / mpmath.mpf(g.width_a_m)
    pn = mpmath.pi / mpmath.mpf(g.length_b_m)
    expected = mpmath.exp(-mpmath.sqrt(q**2 + pn**2 - k**2) * mpmath.mpf(g.thickness_c_m))
    assert abs(f.imag) < 1e-15
    assert 0 < abs(f) < 1
    assert abs(f) == pytest.approx(float(expected), rel=1e-10)
    assert longitudinal_wavenumber(mn.m, mn.n, g, p).imag > 0


def _walls(geom):
    lo_l, hi_l = geom.left_aperture
    lo_r, hi_r = geom.right_aperture
    return [(SlitSide.LEFT, lo_l), (SlitSide.LEFT, hi_l), (SlitSide.RIGHT, lo_r), (SlitSide.RIGHT, hi_r)]


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 300), st.integers(1, 60), st.floats(0, 1))
def test_wall_nulls(m_max, n_max, frac):
    g = _geom()
    p = Particle(2.4e-12)
    tr = Truncation(m_max, n_max, m_cap=max(m_max, 16384))
    x = frac * g.length_b_m
    for side, y in _walls(g):
        assert in_slit_wavefunction(x, y, 0.0, side, g, p, tr, 1.6e12) == 0
    lo, hi = g.left_aperture
    y = 0.5 * (lo + hi)
    assert in_slit_wavefunction(0.0, y, 0.0, SlitSide.LEFT, g, p, tr, 1.0) == 0
    assert in_slit_wavefunction(g.length_b_m, y, 0.0, SlitSide.LEFT, g, p, tr, 1.0) == 0


def test_center_reconstructs_amplitude():
    g = _geom()
    p = Particle(2.4e-12)
    A = 1.6e12
    for side, (lo, hi) in [(SlitSide.LEFT, g.left_aperture), (SlitSide.RIGHT, g.right_aperture)]:
        v = in_slit_wavefunction(g.length_b_m / 2, 0.5 * (lo + hi), 0.0, side, g, p, Truncation(200, 200), A)
        assert abs(v - A) / A < 0.02


def test_center_error_decreases_under_doubling():
    g = _geom()
    p = Particle(2.4e-12)
    lo, hi = g.left_aperture
    errs = []
    for m in (25, 50, 100, 200):
        v = in_slit_wavefunction(g.length_b_m / 2, 0.5 * (lo + hi), 0.0, SlitSide.LEFT, g, p,
                                 Truncation(m, 200, m_cap=16384), 1.0)
        errs.append(abs(v - 1))
    assert all(e2 < e1 for e1, e2 in zip(errs, errs[1:]))


def test_trig_bracket_form_agrees():
    """The wall-distance evaluation equals the expanded D cos + D' sin sum."""
    g = _geom()
    p = Particle(2.4e-12)
    tr = Truncation(20, 5)
    for side, (lo, hi) in [(SlitSide.LEFT, g.left_aperture), (SlitSide.RIGHT, g.right_aperture)]:
        x, y = 0.3 * g.length_b_m, lo + 0.27 * (hi - lo)
        total = 0.0
        for m in range(tr.m_max + 1):
            for n in range(tr.n_max + 1):
                D, Dp = mode_coefficients(ModeIndex(m, n), g, 1.0)
                q, pn = (2 * m + 1) * math.pi / g.width_a_m, (2 * n + 1) * math.pi / g.length_b_m
                total += math.sin(pn * x) * (D * math.cos(q * y) + side.bracket_sign * Dp * math.sin(q * y))
        v = in_slit_wavefunction(x, y, 0.0, side, g, p, tr, 1.0)
        assert v.real == pytest.approx(total, rel=1e-10, abs=1e-12)


@given(st.floats(0.01, 0.99), st.floats(0.01, 0.99))
@settings(max_examples=25, deadline=None)
def test_left_right_mirror(fx, fy):
    g = _geom()
    p = Particle(2.4e-12)
    tr = Truncation(40, 10)
    lo, hi = g.right_aperture
    x, y = fx * g.length_b_m, lo + fy * (hi - lo)
    right = in_slit_wavefunction(x, y, 0.0, SlitSide.RIGHT, g, p, tr, 1.0)
    left = in_slit_wavefunction(x, -y, 0.0, SlitSide.LEFT, g, p, tr, 1.0)
    assert left == pytest.approx(right, rel=1e-9, abs=1e-12)


def test_outside_point_rejected():
    g = _geom()
    with pytest.raises(ValueError):
        in_slit_wavefunction(1e-6, 0.0, 0.0, SlitSide.LEFT, g, Particle(2.4e-12), Truncation(4, 4), 1.0)


def test_truncation_validation():
    with pytest.raises(ValueError):
        Truncation(0, 4)
    with pytest.raises(ValueError):
        Truncation(4, 4, tail_tol=0)
    assert Truncation(512, 64).doubled().m_max == 1024
