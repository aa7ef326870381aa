"""Matter-wave double-slit diffraction from slit modes, path-integral propagation and decoherence."""
from .core import (
    CoherenceConfig,
    DomainError,
    ExperimentPreset,
    Particle,
    PRESET_NAMES,
    ScreenPoint,
    SlitGeometry,
    SlitwaveError,
    alpha_from_visibility,
    lambda_from_alpha,
    make_preset,
    sin_beta_from_position,
)
from .intensity import (
    DiffractionPattern,
    ScanGrid,
    SimulationConfig,
    coherent_intensity,
    decohered_intensity,
    screen_scan,
    visibility,
)
from .propagation import ConvergenceError, diffraction_amplitude
from .slit_modes import ModeIndex, SlitSide, Truncation, in_slit_wavefunction, mode_coefficients

__version__ = "0.1.0"
