"""Two-slit intensities, screen scans and fringe visibility."""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .core import (
    CoherenceConfig,
    ExperimentPreset,
    Particle,
    ScreenPoint,
    SlitGeometry,
    SlitwaveError,
)
from .propagation import ConvergenceError, ModeSeries, _warn_paraxial
from .slit_modes import SlitSide, Truncation

# Points per work unit. Fixed so results do not depend on the worker count.
CHUNK = 128
COHERENT = "coherent"
DECOHERED = "decohered"
MODES = (COHERENT, DECOHERED)
NORMALIZATIONS = ("none", "peak")


class VisibilityError(SlitwaveError):
    """The pattern does not resolve a fringe minimum next to the central maximum."""


def coherent_intensity(psi1, psi2, coh: CoherenceConfig):
    """``c1^2 |psi1|^2 + c2^2 |psi2|^2 + 2 c1 c2 Re(psi1* psi2)``; works on arrays."""
    psi1, psi2 = np.asarray(psi1), np.asarray(psi2)
    c1, c2 = coh.c1, coh.c2
    out = c1 * c1 * np.abs(psi1) ** 2 + c2 * c2 * np.abs(psi2) ** 2
    return out + 2 * c1 * c2 * np.real(np.conj(psi1) * psi2)


def decohered_intensity(psi1, psi2, coh: CoherenceConfig):
    """Interference term damped by the coherence degree, scaled by ``1 + |alpha|^2``."""
    psi1, psi2 = np.asarray(psi1), np.asarray(psi2)
    c1, c2 = coh.c1, coh.c2
    a2 = coh.alpha_abs**2
    lam = coh.lambda_t()
    inner = c1 * c1 * np.abs(psi1) ** 2 + c2 * c2 * np.abs(psi2) ** 2
    inner = inner + 2 * c1 * c2 * lam * np.real(np.conj(psi1) * psi2)
    return (1 + a2) * inner


@dataclass(frozen=True)
class ScanGrid:
    s_min: float
    s_max: float
    n_points: int

    def __post_init__(self):
        if not self.s_min < self.s_max:
            raise ValueError(f"s_min must be < s_max, got {self.s_min}, {self.s_max}")
        if self.n_points < 2:
            raise ValueError("n_points must be >= 2")

    def positions(self) -> np.ndarray:
        return np.linspace(self.s_min, self.s_max, self.n_points)

    @property
    def spacing(self) -> float:
        return (self.s_max - self.s_min) / (self.n_points - 1)


@dataclass(frozen=True)
class SimulationConfig:
    """Everything the engine needs for one pattern."""

    geometry: SlitGeometry
    particle: Particle
    A1: float
    A2: float
    coherence: CoherenceConfig
    name: str = "custom"
    sin_alpha: float = 0.0

    @classmethod
    def from_preset(cls, preset: ExperimentPreset) -> "SimulationConfig":
        return cls(preset.geometry, preset.particle, preset.A1, preset.A2, preset.coherence, preset.name)

    def with_coherence(self, **kw) -> "SimulationConfig":
        return replace(self, coherence=replace(self.coherence, **kw))


@dataclass
class DiffractionPattern:
    s_m: np.ndarray
    intensity: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.s_m = np.asarray(self.s_m, dtype=float)
        self.intensity = np.asarray(self.intensity, dtype=float)
        if self.s_m.shape != self.intensity.shape or self.s_m.ndim != 1:
            raise ValueError("positions and intensities must be 1-D arrays of equal length")
        if np.any(np.diff(self.s_m) <= 0):
            raise ValueError("positions must be strictly increasing")
        if not np.all(np.isfinite(self.intensity)) or np.any(self.intensity < 0):
            raise ValueError("intensities must be finite and non-negative")

    def __len__(self):
        return len(self.s_m)

    @property
    def nominal_fringe(self) -> Optional[float]:
        return self.meta.get("fringe_spacing_m")


def _intensity(psi1, psi2, coh, mode):
    if mode == COHERENT:
        out = coherent_intensity(psi1, psi2, coh)
    elif mode == DECOHERED:
        out = decohered_intensity(psi1, psi2, coh)
    else:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    # rounding can leave -1e-30 where the two terms cancel exactly
    return np.maximum(out, 0.0)


class _Chunk:
    def __init__(self, cfg: SimulationConfig, s, n_max: int):
        L = cfg.geometry.screen_L_m
        points = [ScreenPoint.at(x, L, cfg.sin_alpha) for x in s]
        self.left = ModeSeries(SlitSide.LEFT, points, cfg.geometry, cfg.particle, cfg.A1, n_max)
        self.right = ModeSeries(SlitSide.RIGHT, points, cfg.geometry, cfg.particle, cfg.A2, n_max)

    def amplitudes(self, m_max: int):
        return self.left.extend(m_max), self.right.extend(m_max)


def scan_amplitudes(config: SimulationConfig, s, trunc: Truncation, workers: int = 1, levels=None):
    """Yield ``(m_max, psi1, psi2)`` over ``s`` for each truncation level.

    Levels default to ``m_max, 2 m_max, ...`` up to ``m_cap``. Work is split
    into fixed chunks of points so the arithmetic is identical for any
    number of workers.
    """
    s = np.asarray(s, dtype=float)
    if levels is None:
        levels = [trunc.m_max]
        while levels[-1] < trunc.m_cap:
            levels.append(min(2 * levels[-1], trunc.m_cap))
    chunks = [_Chunk(config, s[i:i + CHUNK], trunc.n_max) for i in range(0, len(s), CHUNK)]
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 and len(chunks) > 1 else None
    try:
        for m in levels:
            if pool is None:
                parts = [c.amplitudes(m) for c in chunks]
            else:
                parts = list(pool.map(lambda c: c.amplitudes(m), chunks))
            yield m, np.concatenate([p[0] for p in parts]), np.concatenate([p[1] for p in parts])
    finally:
        if pool is not None:
            pool.shutdown()


def screen_scan(
    config,
    grid: ScanGrid,
    mode: str = DECOHERED,
    normalization: str = "peak",
    trunc: Optional[Truncation] = None,
    workers: int = 1,
    adaptive: bool = True,
) -> DiffractionPattern:
    """Intensity on the screen over ``grid``.

    ``config`` is a :class:`SimulationConfig` or an :class:`ExperimentPreset`.
    With ``adaptive`` the transverse truncation doubles from ``trunc.m_max``
    until the peak-relative change of the pattern drops below ``trunc.tail_tol``;
    reaching ``trunc.m_cap`` first raises :class:`ConvergenceError`.
    """
    if isinstance(config, ExperimentPreset):
        config = SimulationConfig.from_preset(config)
    if normalization not in NORMALIZATIONS:
        raise ValueError(f"normalization must be one of {NORMALIZATIONS}, got {normalization!r}")
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    trunc = trunc or Truncation()
    s = grid.positions()
    _warn_paraxial([ScreenPoint.at(x, config.geometry.screen_L_m) for x in (s[0], s[-1])], config.geometry)

    levels = None if adaptive else [trunc.m_max]
    prev = change = None
    for m_used, psi1, psi2 in scan_amplitudes(config, s, trunc, workers, levels):
        intensity = _intensity(psi1, psi2, config.coherence, mode)
        if not adaptive:
            break
        if prev is not None:
            diff = np.abs(intensity - prev)
            change = diff.max() / max(intensity.max(), np.finfo(float).tiny)
            if change < trunc.tail_tol:
                break
            if m_used >= trunc.m_cap:
                worst = float(s[int(np.argmax(diff))])
                raise ConvergenceError(
                    f"pattern not converged at m_max={m_used}: peak-relative change {change:.3g} "
                    f">= tail_tol {trunc.tail_tol:g}, largest at s={worst:.6g} m",
                    tail_estimate=change, s=worst, m_max=m_used,
                )
        prev = intensity

    if normalization == "peak":
        peak = intensity.max()
        if peak > 0:
            intensity = intensity / peak

    meta = dict(
        name=config.name,
        mode=mode,
        normalization=normalization,
        m_max=m_used,
        n_max=trunc.n_max,
        tail_change=change,
        c1=config.coherence.c1,
        c2=config.coherence.c2,
        alpha_abs=config.coherence.alpha_abs,
        lambda_t=config.coherence.lambda_t(),
        A1=config.A1,
        A2=config.A2,
        wavelength_m=config.particle.wavelength_m,
        a_m=config.geometry.width_a_m,
        b_m=config.geometry.length_b_m,
        c_m=config.geometry.thickness_c_m,
        d_m=config.geometry.gap_d_m,
        L_m=config.geometry.screen_L_m,
        fringe_spacing_m=config.geometry.fringe_spacing(config.particle),
    )
    return DiffractionPattern(s, intensity, meta)


def _strict_local_minima(y):
    return np.nonzero((y[1:-1] < y[:-2]) & (y[1:-1] < y[2:]))[0] + 1


def _strict_local_maxima(y):
    return np.nonzero((y[1:-1] > y[:-2]) & (y[1:-1] > y[2:]))[0] + 1


def central_maximum(pattern: DiffractionPattern, fringe: Optional[float] = None) -> int:
    """Index of the global maximum within one nominal fringe of ``s = 0``."""
    fringe = fringe or pattern.nominal_fringe
    s, y = pattern.s_m, pattern.intensity
    window = np.abs(s) < fringe if fringe else np.ones_like(s, dtype=bool)
    if not window.any():
        raise VisibilityError("scan does not include the region around s = 0")
    idx = np.nonzero(window)[0]
    return int(idx[np.argmax(y[idx])])


def visibility_extrema(pattern: DiffractionPattern, fringe: Optional[float] = None, check_grid: bool = True) -> tuple[int, int]:
    """Indices of the central maximum and the first strict local minimum beyond it.

    The minimum must lie within one nominal fringe of the maximum. With
    ``check_grid`` the scan must sample at least 20 points per fringe.
    """
    fringe = fringe or pattern.nominal_fringe
    return _extrema(pattern.s_m, pattern.intensity, fringe, check_grid)


def _extrema(s, y, fringe, check_grid=True):
    if fringe is not None and check_grid:
        h = float(np.min(np.diff(s)))
        if h > fringe / 20 * (1 + 1e-9):
            raise VisibilityError(
                f"grid spacing {h:.3g} m is coarser than fringe/20 = {fringe / 20:.3g} m; refine the scan"
            )
    window = np.abs(s) < fringe if fringe else np.ones_like(s, dtype=bool)
    if not window.any():
        raise VisibilityError("scan does not include the region around s = 0")
    idx = np.nonzero(window)[0]
    # argmax returns the first of equal values, i.e. the smaller s
    i_max = int(idx[np.argmax(y[idx])])
    minima = _strict_local_minima(y)
    after = minima[minima > i_max]
    if fringe is not None:
        # the envelope zero of a fringe-free pattern is not an interference minimum
        after = after[s[after] - s[i_max] <= fringe]
    if after.size == 0:
        raise VisibilityError(
            "no local minimum within one fringe after the central maximum; "
            "widen the scan range (or interference is fully suppressed)"
        )
    return i_max, int(after[0])


def visibility(pattern: DiffractionPattern, fringe: Optional[float] = None, check_grid: bool = True) -> float:
    """Contrast between the central maximum and the first minimum next to it."""
    fringe = fringe or pattern.nominal_fringe
    return visibility_of(pattern.s_m, pattern.intensity, fringe, check_grid)


def visibility_of(s, intensity, fringe=None, check_grid=True) -> float:
    """:func:`visibility` on bare arrays (e.g. measured counts)."""
    s, y = np.asarray(s, dtype=float), np.asarray(intensity, dtype=float)
    i_max, i_min = _extrema(s, y, fringe, check_grid)
    hi, lo = y[i_max], y[i_min]
    return float((hi - lo) / (hi + lo))


def fringe_spacings(pattern: DiffractionPattern, fringe: Optional[float] = None) -> np.ndarray:
    """Distances from the central maximum to its neighbouring maxima on each side.

    Peak positions are refined by a parabola through the three grid samples
    around each discrete maximum.
    """
    s, y = pattern.s_m, pattern.intensity
    i0 = central_maximum(pattern, fringe)
    peaks = _strict_local_maxima(y)
    left, right = peaks[peaks < i0], peaks[peaks > i0]
    out = []
    for idx in ([left[-1]] if left.size else []) + ([right[0]] if right.size else []):
        out.append(abs(_refine_peak(s, y, idx) - _refine_peak(s, y, i0)))
    if not out:
        raise VisibilityError("no neighbouring maximum found; widen the scan range")
    return np.array(out)


def _refine_peak(s, y, i):
    if i == 0 or i == len(s) - 1:
        return s[i]
    y0, y1, y2 = y[i - 1], y[i], y[i + 1]
    den = y0 - 2 * y1 + y2
    if den == 0:
        return s[i]
    h = s[i + 1] - s[i]
    return s[i] + 0.5 * h * (y0 - y2) / den
