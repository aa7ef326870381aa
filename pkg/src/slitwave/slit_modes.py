"""Modal solution inside each slit.

Inside a slit the incoming plane wave of amplitude ``A`` is expanded in the
odd eigenmodes of the rectangular box. With ``q_m = (2m+1)*pi/a`` and
``p_n = (2n+1)*pi/b`` the exit-face wavefunction is::

    psi = sum_{m,n} D'_{mn}-style coefficient * sin(p_n x) * bracket_m(y) * exp(i kz_{mn} z)

where the bracket ``sin(q_m d/2) cos(q_m y) +/- cos(q_m d/2) sin(q_m y)`` reduces
to ``sin(q_m (y + d/2))`` (left) and ``sin(q_m (d/2 - y))`` (right). Both equal
``-sin(q_m * u)`` with ``u`` the distance to the nearer aperture wall, which is
how they are evaluated here so the walls are exact zeros.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .core import DomainError, Particle, SlitGeometry

DEFAULT_M_MAX = 512
DEFAULT_N_MAX = 64
DEFAULT_TAIL_TOL = 1e-3
M_CAP = 16384


@dataclass(frozen=True)
class ModeIndex:
    m: int
    n: int

    def __post_init__(self):
        if self.m < 0 or self.n < 0:
            raise DomainError(f"mode indices must be non-negative, got ({self.m}, {self.n})")


@dataclass(frozen=True)
class Truncation:
    """Mode-sum truncation. Indices run over ``0..m_max`` and ``0..n_max`` inclusive.

    ``tail_tol`` and ``m_cap`` drive the adaptive doubling of ``m_max`` used
    by screen scans.
    """

    m_max: int = DEFAULT_M_MAX
    n_max: int = DEFAULT_N_MAX
    tail_tol: float = DEFAULT_TAIL_TOL
    m_cap: int = M_CAP

    def __post_init__(self):
        if self.m_max < 1 or self.n_max < 1:
            raise DomainError("m_max and n_max must be >= 1")
        if not self.tail_tol > 0:
            raise DomainError("tail_tol must be positive")
        if self.m_cap < self.m_max:
            raise DomainError("m_cap must be >= m_max")

    def doubled(self) -> "Truncation":
        return Truncation(min(2 * self.m_max, self.m_cap), self.n_max, self.tail_tol, self.m_cap)


class SlitSide(enum.Enum):
    LEFT = "left"
    RIGHT = "right"

    def aperture(self, geom: SlitGeometry) -> tuple[float, float]:
        return geom.left_aperture if self is SlitSide.LEFT else geom.right_aperture

    @property
    def bracket_sign(self) -> float:
        """Sign in front of the sine-kernel term of the bracket."""
        return 1.0 if self is SlitSide.LEFT else -1.0


def transverse_wavenumbers(m_max: int, a: float) -> np.ndarray:
    return (2 * np.arange(m_max + 1) + 1) * math.pi / a


def axial_wavenumbers(n_max: int, b: float) -> np.ndarray:
    return (2 * np.arange(n_max + 1) + 1) * math.pi / b


def mode_coefficients(mn: ModeIndex, geom: SlitGeometry, amplitude: float) -> tuple[float, float]:
    """Projections ``(D, D')`` of the constant ``amplitude`` on the cosine and sine modes."""
    h = (2 * mn.m + 1) * (2 * mn.n + 1) * math.pi**2
    phase = (2 * mn.m + 1) * math.pi * geom.gap_d_m / (2.0 * geom.width_a_m)
    base = -16.0 * amplitude / h
    return base * math.sin(phase), base * math.cos(phase)


def longitudinal_wavenumber(m, n, geom: SlitGeometry, particle: Particle):
    """``kz`` for modes ``(m, n)``; imaginary with positive part for evanescent modes."""
    k = particle.wavenumber()
    q = (2 * np.asarray(m) + 1) * math.pi / geom.width_a_m
    p = (2 * np.asarray(n) + 1) * math.pi / geom.length_b_m
    rad = k * k - p * p - q * q
    return np.where(rad >= 0, np.sqrt(np.abs(rad)) + 0j, 1j * np.sqrt(np.abs(rad)))


def longitudinal_factor(mn: ModeIndex, geom: SlitGeometry, particle: Particle, z: float | None = None) -> complex:
    """``exp(i kz z)`` evaluated at the exit face ``z = c`` unless ``z`` is given."""
    z = geom.thickness_c_m if z is None else z
    if z == 0:
        return 1 + 0j
    kz = complex(longitudinal_wavenumber(mn.m, mn.n, geom, particle))
    return complex(np.exp(1j * kz * z))


def longitudinal_factors(trunc: Truncation, geom: SlitGeometry, particle: Particle, z: float | None = None) -> np.ndarray:
    """Matrix of ``exp(i kz z)`` with shape ``(n_max+1, m_max+1)``."""
    z = geom.thickness_c_m if z is None else z
    if z == 0:
        return np.ones((trunc.n_max + 1, trunc.m_max + 1), dtype=complex)
    n = np.arange(trunc.n_max + 1)[:, None]
    m = np.arange(trunc.m_max + 1)[None, :]
    return np.exp(1j * longitudinal_wavenumber(m, n, geom, particle) * z)


def _sin_odd_harmonics(dist: float, width: float, count: int) -> np.ndarray:
    # sin((2j+1) pi dist/width), symmetric about the interval midpoint; dist == 0 gives exact zeros
    return np.sin((2 * np.arange(count) + 1) * (math.pi * dist / width))


def in_slit_wavefunction(
    x: float,
    y: float,
    z: float,
    side: SlitSide,
    geom: SlitGeometry,
    particle: Particle,
    trunc: Truncation,
    amplitude: float,
) -> complex:
    """Truncated modal wavefunction at ``(x, y, z)`` inside ``side``'s slit.

    The global time phase is dropped.
    """
    lo, hi = side.aperture(geom)
    a, b, c = geom.width_a_m, geom.length_b_m, geom.thickness_c_m
    if not (lo <= y <= hi and 0.0 <= x <= b and 0.0 <= z <= max(c, 0.0)):
        raise DomainError(f"point ({x}, {y}, {z}) lies outside the {side.value} slit")

    y_dist = min(y - lo, hi - y)
    x_dist = min(x, b - x)
    ym = -_sin_odd_harmonics(y_dist, a, trunc.m_max + 1)
    xn = _sin_odd_harmonics(x_dist, b, trunc.n_max + 1)
    odd_m = 2 * np.arange(trunc.m_max + 1) + 1
    odd_n = 2 * np.arange(trunc.n_max + 1) + 1
    coef = -16.0 * amplitude / (np.outer(odd_n, odd_m) * math.pi**2)
    if z != 0:
        coef = coef * longitudinal_factors(trunc, geom, particle, z)
    terms = (xn[:, None] * coef) * ym[None, :]
    return complex(terms.sum())
