"""Brute-force quadrature used to check the closed forms.

Nothing here imports the propagation or slit-mode code: the integrands are
rebuilt from the expanded formulas (coefficients ``D``, ``D'`` times the
cosine/sine brackets, the small-aperture kernel phase) and integrated with
an adaptive Gauss-Kronrod rule on panels no wider than a quarter period of
the fastest oscillation.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Particle, ScreenPoint, SlitGeometry, SlitwaveError

# Kronrod 15-point nodes (non-negative half) and weights, with the embedded
# 7-point Gauss weights on the odd-indexed nodes.
_XGK = np.array([
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327,
])
NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
K_WEIGHTS = np.concatenate([_WGK[:-1], _WGK[::-1]])
G_WEIGHTS = np.zeros(15)
G_WEIGHTS[1:7:2] = _WG[:3]
G_WEIGHTS[7] = _WG[3]
G_WEIGHTS[9:15:2] = _WG[2::-1]

EPS = np.finfo(float).eps


class QuadratureError(SlitwaveError):
    def __init__(self, message, value, err_est):
        super().__init__(message)
        self.value = value
        self.err_est = err_est


@dataclass(frozen=True)
class QuadratureSpec:
    abs_tol: float = 1e-300
    rel_tol: float = 1e-12
    max_subdivisions: int = 200_000

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")


@dataclass(frozen=True)
class Rectangle:
    x_lo: float
    x_hi: float
    y_lo: float
    y_hi: float

    def __post_init__(self):
        if not (self.x_lo < self.x_hi and self.y_lo < self.y_hi):
            raise ValueError(f"degenerate rectangle {self}")

    @property
    def area(self):
        return (self.x_hi - self.x_lo) * (self.y_hi - self.y_lo)


def _initial_panels(lo, hi, omega):
    n = 1 if not omega else max(1, math.ceil(4 * (hi - lo) * abs(omega) / (2 * math.pi)))
    edges = np.linspace(lo, hi, n + 1)
    return edges[:-1], edges[1:]


def integrate_1d(f, lo, hi, spec: QuadratureSpec = QuadratureSpec(), omega: float = 0.0):
    """Adaptive G7-K15 quadrature of ``f`` over ``[lo, hi]``.

    ``f`` takes a 1-D array of nodes and returns values with the nodes along
    the first axis; trailing axes are integrated together and converge in
    the max norm. ``omega`` is the largest angular frequency present, used to
    pre-split the interval into quarter-period panels.

    Returns ``(value, err_est)``.
    """
    if not lo < hi:
        raise ValueError(f"need lo < hi, got {lo}, {hi}")
    a, b = _initial_panels(lo, hi, omega)
    done_val = 0.0
    done_err = 0.0
    done_abs = 0.0
    while True:
        half = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        x = (mid[:, None] + half[:, None] * NODES[None, :]).ravel()
        fx = np.asarray(f(x))
        fx = fx.reshape((len(a), 15) + fx.shape[1:])
        kron = np.einsum("j,pj...->p...", K_WEIGHTS, fx) * _expand(half, fx.ndim - 2)
        gauss = np.einsum("j,pj...->p...", G_WEIGHTS, fx) * _expand(half, fx.ndim - 2)
        resabs = np.einsum("j,pj...->p...", K_WEIGHTS, np.abs(fx)) * _expand(half, fx.ndim - 2)
        err = _norm(kron - gauss)
        floor = 50 * EPS * _norm(resabs)

        total = done_val + kron.sum(axis=0)
        total_abs = done_abs + _norm(resabs).sum()
        tol = max(spec.abs_tol, spec.rel_tol * float(np.max(np.abs(total))), 100 * EPS * total_abs)
        err_now = done_err + np.maximum(err, floor).sum()
        if err_now <= tol:
            return total, float(err_now)

        # keep panels within their share of the tolerance or at roundoff, bisect the rest
        share = tol * (b - a) / (hi - lo)
        keep = (err <= share) | (err <= floor)
        refine = ~keep
        if not refine.any():
            # every remaining panel is at its share or at roundoff level
            return total, float(err_now)
        if len(a) + refine.sum() > spec.max_subdivisions:
            raise QuadratureError(
                f"subdivision budget {spec.max_subdivisions} exhausted; error estimate {err_now:.3g}",
                total, float(err_now),
            )
        done_val = done_val + kron[keep].sum(axis=0)
        done_err += float(np.maximum(err, floor)[keep].sum())
        done_abs += float(_norm(resabs)[keep].sum())
        ra, rb = a[refine], b[refine]
        rm = 0.5 * (ra + rb)
        a = np.concatenate([ra, rm])
        b = np.concatenate([rm, rb])


def _expand(half, extra_dims):
    return half.reshape(half.shape + (1,) * extra_dims)


def _norm(v):
    v = np.abs(v)
    return v.reshape(v.shape[0], -1).max(axis=1) if v.ndim > 1 else v


def integrate_aperture_2d(
    integrand,
    aperture: Rectangle,
    spec: QuadratureSpec = QuadratureSpec(),
    omega_x: float = 0.0,
    omega_y: float = 0.0,
    chunk: int = 2_000_000,
):
    """Iterated adaptive quadrature over a rectangle.

    ``integrand(x, y)`` receives 1-D node arrays and returns the tensor grid
    of values with shape ``(len(x), len(y))``. Returns ``(value, err_est)``.
    """
    inner_err = [0.0]

    def outer(y):
        out = np.empty(len(y), dtype=complex)
        step = max(1, chunk // 4096)
        for i in range(0, len(y), step):
            yy = y[i:i + step]
            val, err = integrate_1d(
                lambda x: integrand(x, yy), aperture.x_lo, aperture.x_hi, spec, omega_x
            )
            out[i:i + step] = val
            inner_err[0] = max(inner_err[0], err)
        return out

    value, err = integrate_1d(outer, aperture.y_lo, aperture.y_hi, spec, omega_y)
    return complex(value), float(err + inner_err[0] * (aperture.y_hi - aperture.y_lo))


# ---- integrands rebuilt from the expanded formulas ---------------------------

def axial_integral(n, u, b, spec: QuadratureSpec = QuadratureSpec()):
    """Quadrature of ``int_0^b exp(-i u x) sin((2n+1) pi x/b) dx``."""
    q = (2 * n + 1) * math.pi / b

    def f(x):
        return np.exp(-1j * u * x) * np.sin(q * x)

    return integrate_1d(f, 0.0, b, spec, omega=abs(u) + q)


def transverse_integrals(m, w, y_lo, y_hi, a, spec: QuadratureSpec = QuadratureSpec()):
    """Quadrature of the cosine and sine kernel integrals; returns ``((cos, err), (sin, err))``."""
    q = (2 * m + 1) * math.pi / a

    def f(y):
        e = np.exp(-1j * w * y)
        return np.stack([e * np.cos(q * y), e * np.sin(q * y)], axis=-1)

    val, err = integrate_1d(f, y_lo, y_hi, spec, omega=abs(w) + q)
    return (complex(val[0]), err), (complex(val[1]), err)


def exit_wavefunction_grid(left, x, y, geom: SlitGeometry, particle: Particle, m_max, n_max, amplitude):
    """Slit-exit wavefunction on the tensor grid ``x`` by ``y``, summed in the expanded D cos + D' sin form.

    Uses ``D sin(p x) cos(q y) +/- D' sin(p x) sin(q y)`` with the longitudinal
    phase ``exp(i sqrt(k^2 - p^2 - q^2) c)``.
    """
    a, b, c, d = geom.width_a_m, geom.length_b_m, geom.thickness_c_m, geom.gap_d_m
    k = 2 * math.pi / particle.wavelength_m
    mm = np.arange(m_max + 1)
    nn = np.arange(n_max + 1)
    q = (2 * mm + 1) * math.pi / a
    p = (2 * nn + 1) * math.pi / b
    h = np.outer(2 * nn + 1, 2 * mm + 1) * math.pi**2
    D = -16 * amplitude / h * np.sin((2 * mm + 1) * math.pi * d / (2 * a))[None, :]
    Dp = -16 * amplitude / h * np.cos((2 * mm + 1) * math.pi * d / (2 * a))[None, :]
    if c:
        rad = k * k - p[:, None] ** 2 - q[None, :] ** 2
        kz = np.where(rad >= 0, np.sqrt(np.abs(rad)) + 0j, 1j * np.sqrt(np.abs(rad)))
        phase = np.exp(1j * kz * c)
        D, Dp = D * phase, Dp * phase
    sx = np.sin(np.outer(x, p))
    cy = np.cos(np.outer(q, y))
    sy = np.sin(np.outer(q, y))
    sign = 1.0 if left else -1.0
    return (sx @ D) @ cy + sign * ((sx @ Dp) @ sy)


def propagated_amplitude(
    left: bool,
    point: ScreenPoint,
    geom: SlitGeometry,
    particle: Particle,
    m_max: int,
    n_max: int,
    amplitude: float,
    spec: QuadratureSpec = QuadratureSpec(rel_tol=1e-10),
):
    """Direct quadrature of kernel times exit wavefunction over one aperture.

    The kernel is ``(k/(2 pi i r))^{3/2} exp(i k R^2 / (2 r))`` with
    ``R^2 = r^2 - 2 r sin(alpha) x0 - 2 r sin(beta) y0 - 2 r cos(theta) c``.
    The ``r^2`` part is a phase of order 1e12 rad; it is split off and taken
    as ``exp(1j * (k * r / 2))`` because only its reduction modulo 2 pi
    matters and that is set by the rounding of ``k * r``.
    """
    k = 2 * math.pi / particle.wavelength_m
    r = point.r_m
    c = geom.thickness_c_m
    const = (k / (2j * math.pi * r)) ** 1.5 * np.exp(1j * (k * r / 2))
    const *= np.exp(1j * k * (-2 * r * point.cos_theta * c) / (2 * r))
    ky = k * point.sin_beta
    kx = k * point.sin_alpha

    def integrand(x, y):
        psi = exit_wavefunction_grid(left, x, y, geom, particle, m_max, n_max, amplitude)
        return psi * np.exp(-1j * kx * x)[:, None] * np.exp(-1j * ky * y)[None, :]

    if left:
        y_lo, y_hi = -geom.gap_d_m / 2 - geom.width_a_m, -geom.gap_d_m / 2
    else:
        y_lo, y_hi = geom.gap_d_m / 2, geom.gap_d_m / 2 + geom.width_a_m
    rect = Rectangle(0.0, geom.length_b_m, y_lo, y_hi)
    omega_x = abs(kx) + (2 * n_max + 1) * math.pi / geom.length_b_m
    omega_y = abs(ky) + (2 * m_max + 1) * math.pi / geom.width_a_m
    val, err = integrate_aperture_2d(integrand, rect, spec, omega_x, omega_y)
    return complex(const * val), float(abs(const) * err)
