import math

import pytest
from hypothesis import given, strategies as st

from slitwave.core import (
    CoherenceConfig,
    DomainError,
    Particle,
    ScreenPoint,
    SlitGeometry,
    alpha_from_visibility,
    lambda_from_alpha,
    make_preset,
    sin_beta_from_position,
)


def test_sin_beta_examples():
    assert sin_beta_from_position(0.0, 1.25) == 0.0
    assert sin_beta_from_position(1.25, 1.25) == pytest.approx(math.sqrt(2) / 2, rel=1e-15)
    assert sin_beta_from_position(30e-6, 1.25) == pytest.approx(2.4e-5, rel=1e-9)
    s = 30e-6
    assert sin_beta_from_position(s, 1.25) == pytest.approx(s / math.sqrt(1.25**2 + s**2), rel=1e-12)


@given(st.floats(-10.0, 10.0, allow_nan=False), st.floats(1e-3, 10.0))
def test_sin_beta_odd_and_bounded(s, L):
    v = sin_beta_from_position(s, L)
    assert sin_beta_from_position(-s, L) == -v
    assert abs(v) < 1


@given(st.floats(0, 1e-2), st.floats(1e-9, 1e-2), st.floats(0.1, 5.0))
def test_sin_beta_increasing(s, ds, L):
    assert sin_beta_from_position(s + ds, L) > sin_beta_from_position(s, L)


@given(st.floats(-0.05, 0.05), st.floats(0.5, 3.0), st.floats(-0.1, 0.1))
def test_screen_point_direction_cosines(s, L, sin_alpha):
    pt = ScreenPoint.at(s, L, sin_alpha)
    assert pt.cos_theta > 0
    assert abs(pt.cos_theta**2 + pt.sin_alpha**2 + pt.sin_beta**2 - 1) < 1e-12
    assert pt.r_m == pytest.approx(math.hypot(L, s))


@given(st.floats(1e-13, 1e-6))
def test_wavenumber(lam):
    p = Particle(lam)
    assert abs(p.wavenumber() * lam - 2 * math.pi) < 1e-12


def test_particle_rejects_bad_wavelength():
    with pytest.raises(DomainError):
        Particle(0.0)


def test_geometry_validation():
    g = SlitGeometry(width_a_m=47.5e-9, gap_d_m=52.5e-9, screen_L_m=1.25)
    assert g.center_separation_m == pytest.approx(100e-9)
    assert g.left_aperture == (-52.5e-9 / 2 - 47.5e-9, -52.5e-9 / 2)
    with pytest.raises(DomainError, match="paraxial"):
        SlitGeometry(width_a_m=1e-3, gap_d_m=1e-3, screen_L_m=1.0)
    with pytest.raises(DomainError):
        SlitGeometry(width_a_m=-1e-9, screen_L_m=1.0)
    with pytest.raises(DomainError):
        SlitGeometry(width_a_m=1e-9, gap_d_m=-1e-9, screen_L_m=1.0)


def test_coherence_config():
    c = CoherenceConfig(math.sqrt(0.5), math.sqrt(0.5), 0.5)
    assert c.lambda_t() == pytest.approx(0.4)
    with pytest.raises(DomainError):
        CoherenceConfig(0.915, 0.40345, 1.0)
    with pytest.raises(DomainError):
        CoherenceConfig(1.0, 0.0, 1.5)


def test_lambda_from_alpha():
    assert lambda_from_alpha(0.0) == 0.0
    assert lambda_from_alpha(1.0) == 1.0
    assert lambda_from_alpha(0.5) == pytest.approx(0.4, abs=1e-15)
    with pytest.raises(DomainError):
        lambda_from_alpha(1.01)


@given(st.floats(0, 1), st.floats(0, 1))
def test_lambda_monotone_in_unit_interval(a, b):
    la, lb = lambda_from_alpha(a), lambda_from_alpha(b)
    assert 0 <= la <= 1
    if a < b:
        assert la <= lb


@given(st.floats(0, 1))
def test_visibility_alpha_round_trip(nu):
    assert abs(lambda_from_alpha(alpha_from_visibility(nu)) - nu) < 1e-12


def test_alpha_from_visibility_examples():
    assert alpha_from_visibility(0.0) == 0.0
    assert alpha_from_visibility(1.0) == 1.0
    assert alpha_from_visibility(0.53) == pytest.approx(math.sqrt(0.53 / 1.47), rel=1e-15)
    with pytest.raises(DomainError):
        alpha_from_visibility(-0.1)


def test_presets(ref18, ref19):
    assert ref18.geometry.gap_d_m == 52.5e-9
    assert ref19.particle.wavelength_m == 4.8e-12
    for p in (ref18, ref19):
        c = p.coherence
        assert abs(c.c1**2 + c.c2**2 - 1) < 1e-4
        assert 0 <= c.alpha_abs <= 1
        assert c.lambda_t() == pytest.approx(p.visibility_nu, abs=1e-12)
    # stored verbatim, not renormalised
    assert ref18.coherence.c2 == 0.40345


def test_unknown_preset_lists_known_names():
    with pytest.raises(DomainError, match="ref18, ref19"):
        make_preset("ref20")
