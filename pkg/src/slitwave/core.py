"""Domain types, experiment presets and screen geometry.

All lengths are SI meters. Every formula downstream depends on the particle
only through its wavenumber ``k = 2*pi/wavelength`` (``2ME/hbar**2 == k**2``),
so mass is carried for reporting and never enters the numerics.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

#: (a + d) / L above this breaks the small-aperture expansion of the path length.
PARAXIAL_LIMIT = 1e-3

#: slack allowed on c1**2 + c2**2 == 1 for the shipped presets
PRESET_WEIGHT_SLACK = 1e-4
WEIGHT_TOL = 1e-12

DEFAULT_LENGTH_B = 10e-6
DEFAULT_THICKNESS_C = 0.0


class SlitwaveError(Exception):
    """Base class for errors raised by this package."""


class DomainError(SlitwaveError, ValueError):
    """Input outside the domain of an operation."""


@dataclass(frozen=True)
class Particle:
    wavelength_m: float
    mass_kg: Optional[float] = None

    def __post_init__(self):
        if not (self.wavelength_m > 0 and math.isfinite(self.wavelength_m)):
            raise DomainError(f"wavelength must be positive, got {self.wavelength_m!r}")

    def wavenumber(self) -> float:
        return 2.0 * math.pi / self.wavelength_m


@dataclass(frozen=True)
class SlitGeometry:
    """Two identical rectangular slits in an opaque plane.

    The left slit spans ``y in [-d/2 - a, -d/2]``, the right one
    ``y in [d/2, d/2 + a]``; both span ``x in [0, b]`` and ``z in [0, c]``.
    """

    width_a_m: float
    length_b_m: float = DEFAULT_LENGTH_B
    thickness_c_m: float = DEFAULT_THICKNESS_C
    gap_d_m: float = 0.0
    screen_L_m: float = 1.0

    def __post_init__(self):
        for name in ("width_a_m", "length_b_m", "screen_L_m"):
            v = getattr(self, name)
            if not (v > 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be positive, got {v!r}")
        for name in ("thickness_c_m", "gap_d_m"):
            v = getattr(self, name)
            if not (v >= 0 and math.isfinite(v)):
                raise DomainError(f"{name} must be non-negative, got {v!r}")
        ratio = (self.width_a_m + self.gap_d_m) / self.screen_L_m
        if ratio >= PARAXIAL_LIMIT:
            raise DomainError(
                f"(a + d)/L = {ratio:.3g} violates the paraxial condition (< {PARAXIAL_LIMIT})"
            )

    @property
    def center_separation_m(self) -> float:
        return self.width_a_m + self.gap_d_m

    @property
    def left_aperture(self) -> tuple[float, float]:
        return (-0.5 * self.gap_d_m - self.width_a_m, -0.5 * self.gap_d_m)

    @property
    def right_aperture(self) -> tuple[float, float]:
        return (0.5 * self.gap_d_m, 0.5 * self.gap_d_m + self.width_a_m)

    def fringe_spacing(self, particle: Particle) -> float:
        """Nominal double-slit fringe period on the screen, ``lambda*L/(a+d)``."""
        return particle.wavelength_m * self.screen_L_m / self.center_separation_m


def lambda_from_alpha(alpha_abs: float) -> float:
    """Quantum coherence degree ``2|alpha|^2 / (1 + |alpha|^2)``."""
    if not 0.0 <= alpha_abs <= 1.0:
        raise DomainError(f"|alpha_t| must lie in [0, 1], got {alpha_abs!r}")
    a2 = alpha_abs * alpha_abs
    return 2.0 * a2 / (1.0 + a2)


def alpha_from_visibility(nu: float) -> float:
    """Invert :func:`lambda_from_alpha`, taking the visibility as the coherence degree."""
    if not 0.0 <= nu <= 1.0:
        raise DomainError(f"visibility must lie in [0, 1], got {nu!r}")
    return math.sqrt(nu / (2.0 - nu))


@dataclass(frozen=True)
class CoherenceConfig:
    c1: float
    c2: float
    alpha_abs: float = 1.0
    weight_tol: float = field(default=WEIGHT_TOL, compare=False, repr=False)

    def __post_init__(self):
        norm = self.c1 * self.c1 + self.c2 * self.c2
        if abs(norm - 1.0) > self.weight_tol:
            raise DomainError(
                f"c1^2 + c2^2 = {norm!r} differs from 1 by more than {self.weight_tol:g}"
            )
        if not 0.0 <= self.alpha_abs <= 1.0:
            raise DomainError(f"|alpha_t| must lie in [0, 1], got {self.alpha_abs!r}")

    @classmethod
    def from_visibility(cls, c1: float, c2: float, nu: float, weight_tol: float = WEIGHT_TOL):
        return cls(c1, c2, alpha_from_visibility(nu), weight_tol=weight_tol)

    def lambda_t(self) -> float:
        return lambda_from_alpha(self.alpha_abs)


def sin_beta_from_position(s: float, L: float) -> float:
    if not L > 0:
        raise DomainError(f"screen distance must be positive, got {L!r}")
    return s / math.hypot(L, s)


@dataclass(frozen=True)
class ScreenPoint:
    """A point on the screen seen from the slit plane.

    ``s_m`` is the transverse coordinate along y. ``sin_alpha`` tilts the point
    out of the standard x = 0 scan plane.
    """

    s_m: float
    r_m: float
    sin_beta: float
    sin_alpha: float
    cos_theta: float

    @classmethod
    def at(cls, s: float, L: float, sin_alpha: float = 0.0) -> "ScreenPoint":
        if not L > 0:
            raise DomainError(f"screen distance must be positive, got {L!r}")
        r = math.hypot(L, s)
        sb = s / r
        c2 = 1.0 - sin_alpha * sin_alpha - sb * sb
        if c2 <= 0.0:
            raise DomainError(f"no forward direction for sin(alpha)={sin_alpha}, sin(beta)={sb}")
        return cls(s, r, sb, sin_alpha, math.sqrt(c2))


@dataclass(frozen=True)
class ExperimentPreset:
    name: str
    geometry: SlitGeometry
    particle: Particle
    A1: float
    A2: float
    coherence: CoherenceConfig
    visibility_nu: float
    note: str = ""


# Published values for the two C60 experiments. Weights are stored verbatim:
# 0.915**2 + 0.40345**2 = 0.9999969 and 0.9075**2 + 0.42**2 = 0.99995625.
_PRESETS = {
    "ref18": dict(
        a=47.5e-9, wavelength=2.4e-12, d=52.5e-9, L=1.25,
        A1=1.6e12, A2=1.7e12, c1=0.915, c2=0.40345, nu=0.53,
        note="C60 double slit, a=47.5 nm, d=52.5 nm, lambda=2.4 pm (reported visibility 0.625; fit uses 0.53)",
    ),
    "ref19": dict(
        a=42e-9, wavelength=4.8e-12, d=86e-9, L=1.25,
        A1=5.35e13, A2=2.1e13, c1=0.9075, c2=0.42, nu=0.88,
        note="C60 double slit, a=42 nm, d=86 nm, lambda=4.8 pm",
    ),
}

PRESET_NAMES = tuple(_PRESETS)


def make_preset(name: str) -> ExperimentPreset:
    try:
        p = _PRESETS[name]
    except KeyError:
        raise DomainError(
            f"unknown preset {name!r}; known presets: {', '.join(PRESET_NAMES)}"
        ) from None
    geom = SlitGeometry(
        width_a_m=p["a"], length_b_m=DEFAULT_LENGTH_B, thickness_c_m=DEFAULT_THICKNESS_C,
        gap_d_m=p["d"], screen_L_m=p["L"],
    )
    coh = CoherenceConfig.from_visibility(p["c1"], p["c2"], p["nu"], weight_tol=PRESET_WEIGHT_SLACK)
    return ExperimentPreset(
        name=name, geometry=geom, particle=Particle(p["wavelength"]),
        A1=p["A1"], A2=p["A2"], coherence=coh, visibility_nu=p["nu"], note=p["note"],
    )
