"""Propagation of the slit-exit wave to the screen.

The free-particle kernel with the small-aperture path length
``R^2 ~ r^2 - 2 r sin(alpha) x0 - 2 r sin(beta) y0 - 2 r cos(theta) c`` turns the
surface integral over each aperture into products of one-dimensional
Fourier integrals of the slit modes, which are evaluated in closed form here.
"""
from __future__ import annotations

import math
import warnings
from typing import Sequence

import numpy as np

from .core import Particle, ScreenPoint, SlitGeometry, SlitwaveError
from .slit_modes import SlitSide, Truncation, longitudinal_factors

#: below this relative distance from resonance the analytic limit is used
RESONANCE_SWITCH = 1e-8
#: |s|/L beyond which a point is flagged as outside the paraxial regime
PARAXIAL_SOFT_LIMIT = 0.01

# (1/i)^{3/2} written out; unit modulus
KERNEL_PHASE = complex(-math.sqrt(2) / 2, -math.sqrt(2) / 2)


class ConvergenceError(SlitwaveError):
    """The mode sum did not settle before the truncation cap."""

    def __init__(self, message, tail_estimate, s=None, m_max=None):
        super().__init__(message)
        self.tail_estimate = tail_estimate
        self.s = s
        self.m_max = m_max


def _interval_transform(v, lo, hi, q=None):
    """``int_lo^hi exp(-i v y) dy`` for array ``v``.

    Written as ``width * exp(-i v mid) * sinc(v width / 2)``, which has no
    cancellation as ``v -> 0``. If ``q`` is given, entries with
    ``|v| < RESONANCE_SWITCH * q`` take the resonance limit ``width * exp(-i v mid)``.
    """
    v = np.asarray(v, dtype=float)
    width = hi - lo
    mid = 0.5 * (lo + hi)
    x = 0.5 * v * width
    out = width * np.exp(-1j * v * mid) * np.sinc(x / math.pi)
    if q is not None:
        near = np.abs(v) < RESONANCE_SWITCH * np.asarray(q)
        if np.any(near):
            out = np.where(near, width * np.exp(-1j * v * mid), out)
    return out


def _sine_cosine_transforms(freq, q, lo, hi):
    """Closed forms of ``int exp(-i f y) cos(q y) dy`` and ``int exp(-i f y) sin(q y) dy``."""
    e_minus = _interval_transform(freq - q, lo, hi, q)
    e_plus = _interval_transform(freq + q, lo, hi, q)
    return 0.5 * (e_minus + e_plus), -0.5j * (e_minus - e_plus)


def axial_integral(n: int, u: float, b: float) -> complex:
    """``int_0^b exp(-i u x) sin((2n+1) pi x / b) dx``."""
    q = (2 * n + 1) * math.pi / b
    return complex(_sine_cosine_transforms(np.float64(u), q, 0.0, b)[1])


def transverse_integrals(m: int, w: float, y_lo: float, y_hi: float, a: float) -> tuple[complex, complex]:
    """Cosine and sine kernel integrals ``int exp(-i w y) {cos,sin}((2m+1) pi y / a) dy`` over ``[y_lo, y_hi]``."""
    q = (2 * m + 1) * math.pi / a
    c, s = _sine_cosine_transforms(np.float64(w), q, y_lo, y_hi)
    return complex(c), complex(s)


def limit_transverse_integrals(m: int, w: float, y_lo: float, y_hi: float, a: float) -> tuple[complex, complex]:
    """Resonance-limit branch of :func:`transverse_integrals`, forced regardless of ``w``."""
    q = (2 * m + 1) * math.pi / a
    width, mid = y_hi - y_lo, 0.5 * (y_lo + y_hi)
    v_res = w - q if w >= 0 else w + q
    v_far = w + q if w >= 0 else w - q
    e_res = width * np.exp(-1j * v_res * mid)
    e_far = _interval_transform(v_far, y_lo, y_hi)
    e_minus, e_plus = (e_res, e_far) if w >= 0 else (e_far, e_res)
    return complex(0.5 * (e_minus + e_plus)), complex(-0.5j * (e_minus - e_plus))


def kernel_prefactor(point: ScreenPoint, particle: Particle, c: float) -> complex:
    k = particle.wavenumber()
    r = point.r_m
    value = KERNEL_PHASE * (k / (2 * math.pi * r)) ** 1.5 * np.exp(1j * (k * r / 2))
    if c != 0:
        value = value * np.exp(-1j * (k * point.cos_theta * c))
    return complex(value)


def _mode_weights(m_lo, m_hi, n_max, geom, particle, amplitude):
    """``-16 A / ((2m+1)(2n+1) pi^2) * exp(i kz c)``, shape ``(n_max+1, m_hi-m_lo)``."""
    odd_m = 2 * np.arange(m_lo, m_hi) + 1
    odd_n = 2 * np.arange(n_max + 1) + 1
    w = -16.0 * amplitude / (np.outer(odd_n, odd_m) * math.pi**2)
    if geom.thickness_c_m != 0:
        full = longitudinal_factors(Truncation(max(m_hi - 1, 1), n_max, m_cap=max(m_hi - 1, 1)), geom, particle)
        w = w * full[:, m_lo:m_hi]
    return w


def mode_sum_block(side, w, u, geom, particle, amplitude, m_lo, m_hi, n_max):
    """Contribution of transverse modes ``m_lo <= m < m_hi`` to the amplitude (without prefactor).

    ``w = k sin(beta)`` and ``u = k sin(alpha)`` are arrays over screen points.
    """
    w = np.atleast_1d(np.asarray(w, dtype=float))
    u = np.broadcast_to(np.asarray(u, dtype=float), w.shape)
    if amplitude == 0 or m_hi <= m_lo:
        return np.zeros(w.shape, dtype=complex)
    a, b = geom.width_a_m, geom.length_b_m
    lo, hi = side.aperture(geom)
    q = (2 * np.arange(m_lo, m_hi) + 1) * math.pi / a
    p = (2 * np.arange(n_max + 1) + 1) * math.pi / b
    ix = _sine_cosine_transforms(u[:, None], p[None, :], 0.0, b)[1]
    iy_cos, iy_sin = _sine_cosine_transforms(w[:, None], q[None, :], lo, hi)
    half = q * geom.gap_d_m / 2
    bracket = np.sin(half) * iy_cos + side.bracket_sign * np.cos(half) * iy_sin
    weights = _mode_weights(m_lo, m_hi, n_max, geom, particle, amplitude)
    return np.einsum("pm,pm->p", ix @ weights, bracket)


def _wavenumbers(points: Sequence[ScreenPoint], particle: Particle):
    k = particle.wavenumber()
    w = np.array([k * pt.sin_beta for pt in points])
    u = np.array([k * pt.sin_alpha for pt in points])
    return w, u


def _warn_paraxial(points, geom):
    far = [pt.s_m for pt in points if abs(pt.s_m) > PARAXIAL_SOFT_LIMIT * geom.screen_L_m]
    if far:
        warnings.warn(
            f"{len(far)} screen point(s) beyond |s| = {PARAXIAL_SOFT_LIMIT} L; the small-angle expansion degrades",
            stacklevel=3,
        )


class ModeSeries:
    """Running partial sums of one slit's amplitude at a fixed set of screen points.

    ``extend`` adds transverse modes, so doubling the truncation costs only
    the new modes and the summation order is fixed by the sequence of
    ``m_max`` values, not by how points are distributed over workers.
    """

    def __init__(self, side, points, geom, particle, amplitude, n_max):
        self.side = side
        self.points = list(points)
        self.geom = geom
        self.particle = particle
        self.amplitude = amplitude
        self.n_max = n_max
        self.m_max = -1
        self._w, self._u = _wavenumbers(self.points, particle)
        self._sum = np.zeros(len(self.points), dtype=complex)
        self._prefactor = np.array(
            [kernel_prefactor(pt, particle, geom.thickness_c_m) for pt in self.points]
        )

    def extend(self, m_max: int) -> np.ndarray:
        if m_max > self.m_max:
            self._sum = self._sum + mode_sum_block(
                self.side, self._w, self._u, self.geom, self.particle, self.amplitude,
                self.m_max + 1, m_max + 1, self.n_max,
            )
            self.m_max = m_max
        return self.amplitudes

    @property
    def amplitudes(self) -> np.ndarray:
        return self._prefactor * self._sum


def diffraction_amplitudes(side, points, geom, particle, trunc: Truncation, amplitude: float) -> np.ndarray:
    """Amplitudes at ``points`` for the fixed truncation ``trunc``."""
    points = list(points)
    _warn_paraxial(points, geom)
    return ModeSeries(side, points, geom, particle, amplitude, trunc.n_max).extend(trunc.m_max)


def diffraction_amplitude(
    side: SlitSide,
    point: ScreenPoint,
    geom: SlitGeometry,
    particle: Particle,
    trunc: Truncation,
    amplitude: float,
    adaptive: bool = False,
) -> complex:
    """Diffraction amplitude of one slit at one screen point.

    With ``adaptive=True`` the transverse truncation is doubled from
    ``trunc.m_max`` until successive values differ by less than
    ``trunc.tail_tol`` relative, raising :class:`ConvergenceError` at ``trunc.m_cap``.
    """
    _warn_paraxial([point], geom)
    series = ModeSeries(side, [point], geom, particle, amplitude, trunc.n_max)
    value = series.extend(trunc.m_max)[0]
    if not adaptive or amplitude == 0:
        return complex(value)
    m = trunc.m_max
    while True:
        if m >= trunc.m_cap:
            raise ConvergenceError(
                f"amplitude at s={point.s_m!r} not converged at m_max={m} (tail estimate {tail:.3g})",
                tail_estimate=tail, s=point.s_m, m_max=m,
            )
        m = min(2 * m, trunc.m_cap)
        new = series.extend(m)[0]
        tail = abs(new - value) / max(abs(new), np.finfo(float).tiny)
        value = new
        if tail < trunc.tail_tol:
            return complex(value)
