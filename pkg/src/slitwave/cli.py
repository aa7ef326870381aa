"""``slitwave`` command line: scan, verify, compare, preset."""
from __future__ import annotations

import argparse
import math
import os
import re
import sys
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import oracle
from .core import (
    CoherenceConfig,
    DomainError,
    Particle,
    PRESET_NAMES,
    PRESET_WEIGHT_SLACK,
    ScreenPoint,
    SlitGeometry,
    SlitwaveError,
    alpha_from_visibility,
    make_preset,
)
from .intensity import (
    MODES,
    NORMALIZATIONS,
    ScanGrid,
    SimulationConfig,
    VisibilityError,
    fringe_spacings,
    screen_scan,
    visibility,
)
from .propagation import diffraction_amplitude
from .report import compare, read_csv, read_data_csv, write_csv, write_svg, UNIT_SCALE
from .slit_modes import DEFAULT_M_MAX, DEFAULT_N_MAX, DEFAULT_TAIL_TOL, M_CAP, SlitSide, Truncation

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

DEFAULT_RANGE = (-150e-6, 150e-6)
DEFAULT_POINTS = 1501
VERIFY_RTOL = 1e-6

# config-file keys of the physical parameter block and their types
PHYSICS_KEYS = {
    "wavelength_m": float, "mass_kg": float,
    "a_m": float, "b_m": float, "c_m": float, "d_m": float, "L_m": float,
    "A1": float, "A2": float, "c1": float, "c2": float,
    "alpha_abs": float, "nu": float, "weight_tol": float,
}
RUN_KEYS = {
    "preset": str, "s_min_m": float, "s_max_m": float, "points": int,
    "mode": str, "normalize": str, "out": str, "svg": str, "data": str, "data_unit": str,
    "threads": int, "m_max": int, "n_max": int, "tail_tol": float, "name": str,
}


class ConfigError(SlitwaveError, ValueError):
    pass


@dataclass
class RunConfig:
    sim: SimulationConfig
    grid: ScanGrid
    mode: str = "decohered"
    normalize: str = "peak"
    trunc: Truncation = field(default_factory=Truncation)
    out: Optional[str] = None
    svg: Optional[str] = None
    data: Optional[str] = None
    data_unit: str = "um"
    threads: int = 1


def load_config_file(path) -> dict:
    try:
        with open(path, "rb") as fh:
            raw = tomllib.load(fh)
    except OSError as exc:
        raise ConfigError(f"{path}: {exc.strerror}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    out = {}
    for key, val in raw.items():
        if isinstance(val, dict):
            raise ConfigError(f"{path}: {key}: nested tables are not supported")
        kind = PHYSICS_KEYS.get(key) or RUN_KEYS.get(key)
        if kind is None:
            raise ConfigError(f"{path}: {key}: unknown key")
        if kind is float and isinstance(val, (int, float)) and not isinstance(val, bool):
            val = float(val)
        elif kind is int and isinstance(val, int) and not isinstance(val, bool):
            pass
        elif kind is str and isinstance(val, str):
            pass
        else:
            raise ConfigError(f"{path}: {key}: expected {kind.__name__}, got {type(val).__name__}")
        out[key] = val
    return out


def _simulation_from(values: dict, source: str) -> SimulationConfig:
    preset = values.get("preset")
    physics = {k: values[k] for k in PHYSICS_KEYS if k in values}
    if preset and physics:
        raise ConfigError(
            f"{source}: give either a preset or a parameter block, not both "
            f"(found preset={preset!r} and {', '.join(sorted(physics))})"
        )
    if preset:
        return SimulationConfig.from_preset(make_preset(preset))
    required = ["wavelength_m", "a_m", "d_m", "L_m", "A1", "A2", "c1", "c2"]
    missing = [k for k in required if k not in physics]
    if missing:
        raise ConfigError(f"{source}: missing parameter(s) {', '.join(missing)} (or set preset)")
    if ("alpha_abs" in physics) == ("nu" in physics):
        raise ConfigError(f"{source}: set exactly one of alpha_abs, nu")
    try:
        geom = SlitGeometry(
            width_a_m=physics["a_m"],
            length_b_m=physics.get("b_m", 10e-6),
            thickness_c_m=physics.get("c_m", 0.0),
            gap_d_m=physics["d_m"],
            screen_L_m=physics["L_m"],
        )
        particle = Particle(physics["wavelength_m"], physics.get("mass_kg"))
        alpha = physics["alpha_abs"] if "alpha_abs" in physics else alpha_from_visibility(physics["nu"])
        coh = CoherenceConfig(physics["c1"], physics["c2"], alpha, weight_tol=physics.get("weight_tol", 1e-12))
    except DomainError as exc:
        raise ConfigError(f"{source}: {exc}") from None
    return SimulationConfig(geom, particle, physics["A1"], physics["A2"], coh, values.get("name", "custom"))


def _threads(value: Optional[int]) -> int:
    if value is not None:
        return value
    env = os.environ.get("SLITWAVE_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            raise ConfigError(f"SLITWAVE_THREADS: expected an integer, got {env!r}") from None
    return 1


def build_run_config(args) -> RunConfig:
    values = load_config_file(args.config) if getattr(args, "config", None) else {}
    source = args.config or "command line"
    if getattr(args, "preset", None):
        values = {k: v for k, v in values.items() if k not in PHYSICS_KEYS}
        values["preset"] = args.preset
        source = "command line"
    if not values.get("preset") and not any(k in values for k in PHYSICS_KEYS):
        raise ConfigError("no parameters: pass --preset NAME or --config FILE")
    sim = _simulation_from(values, source)

    lo, hi = args.range if getattr(args, "range", None) else (
        values.get("s_min_m", DEFAULT_RANGE[0]), values.get("s_max_m", DEFAULT_RANGE[1]))
    points = args.points if getattr(args, "points", None) else values.get("points", DEFAULT_POINTS)
    try:
        grid = ScanGrid(lo, hi, points)
        trunc = Truncation(
            m_max=args.m_max or values.get("m_max", DEFAULT_M_MAX),
            n_max=args.n_max or values.get("n_max", DEFAULT_N_MAX),
            tail_tol=args.tail_tol or values.get("tail_tol", DEFAULT_TAIL_TOL),
            m_cap=max(M_CAP, args.m_max or values.get("m_max", DEFAULT_M_MAX)),
        )
    except (ValueError, DomainError) as exc:
        raise ConfigError(f"{source}: {exc}") from None

    def pick(name, default=None):
        v = getattr(args, name, None)
        return v if v is not None else values.get(name, default)

    mode = pick("mode", "decohered")
    normalize = pick("normalize", "peak")
    if mode not in MODES:
        raise ConfigError(f"{source}: mode: expected one of {MODES}, got {mode!r}")
    if normalize not in NORMALIZATIONS:
        raise ConfigError(f"{source}: normalize: expected one of {NORMALIZATIONS}, got {normalize!r}")
    data_unit = pick("data_unit", "um")
    if data_unit not in UNIT_SCALE:
        raise ConfigError(f"{source}: data_unit: expected one of {tuple(UNIT_SCALE)}, got {data_unit!r}")
    return RunConfig(
        sim=sim, grid=grid, mode=mode, normalize=normalize, trunc=trunc,
        out=pick("out"), svg=pick("svg"), data=pick("data"), data_unit=data_unit,
        threads=_threads(pick("threads")),
    )


def _summary(pattern, out):
    meta = pattern.meta
    nominal = meta["fringe_spacing_m"]
    print(f"preset/config:   {meta['name']}", file=out)
    print(f"mode:            {meta['mode']} (Lambda_t = {meta['lambda_t']:.4f})", file=out)
    print(f"truncation:      m_max={meta['m_max']} n_max={meta['n_max']}"
          + (f" (last doubling change {meta['tail_change']:.2e})" if meta['tail_change'] is not None else ""),
          file=out)
    print(f"points:          {len(pattern)} over [{pattern.s_m[0] * 1e6:g}, {pattern.s_m[-1] * 1e6:g}] um", file=out)
    try:
        sp = fringe_spacings(pattern)
        print(f"fringe spacing:  {np.mean(sp) * 1e6:.2f} um measured, "
              f"{nominal * 1e6:.2f} um nominal (lambda L/(a+d))", file=out)
    except VisibilityError as exc:
        print(f"fringe spacing:  n/a ({exc}); nominal {nominal * 1e6:.2f} um", file=out)
    try:
        print(f"visibility:      {visibility(pattern):.4f}", file=out)
    except VisibilityError as exc:
        print(f"visibility:      n/a ({exc})", file=out)


def cmd_scan(args, out=None) -> int:
    out = out or sys.stdout
    cfg = build_run_config(args)
    pattern = screen_scan(cfg.sim, cfg.grid, cfg.mode, cfg.normalize, cfg.trunc, workers=cfg.threads)
    if cfg.out:
        write_csv(pattern, cfg.out)
    data = read_data_csv(cfg.data, cfg.data_unit) if cfg.data else None
    if cfg.svg:
        write_svg(pattern, cfg.svg, data, title=f"{pattern.meta['name']} ({cfg.mode})")
    _summary(pattern, out)
    if data is not None:
        print(compare(pattern, *data).summary(), file=out)
    return 0


def verify_points(sim: SimulationConfig, trunc: Truncation, positions, rtol=VERIFY_RTOL, out=None):
    """Closed-form amplitudes against direct quadrature; returns rows ``(s, side, rel_err, ok)``."""
    rows = []
    L = sim.geometry.screen_L_m
    for s in positions:
        pt = ScreenPoint.at(float(s), L, sim.sin_alpha)
        for side, amp in ((SlitSide.LEFT, sim.A1), (SlitSide.RIGHT, sim.A2)):
            cf = diffraction_amplitude(side, pt, sim.geometry, sim.particle, trunc, amp)
            ref, err = oracle.propagated_amplitude(
                side is SlitSide.LEFT, pt, sim.geometry, sim.particle, trunc.m_max, trunc.n_max, amp
            )
            rel = abs(cf - ref) / abs(ref) if ref != 0 else abs(cf)
            ok = rel <= rtol
            rows.append((float(s), side.value, rel, ok))
            if out is not None:
                print(f"s = {s * 1e6:9.3f} um  {side.value:5s}  rel.err = {rel:.3e}  "
                      f"{'PASS' if ok else 'FAIL'}", file=out, flush=True)
    return rows


def cmd_verify(args, out=None) -> int:
    out = out or sys.stdout
    if not args.range:
        args.range = (-100e-6, 100e-6)
    cfg = build_run_config(args)
    n = args.points or 8
    positions = np.linspace(cfg.grid.s_min, cfg.grid.s_max, n)
    print(f"verifying {n} screen point(s), m_max={cfg.trunc.m_max} n_max={cfg.trunc.n_max}, "
          f"tolerance {VERIFY_RTOL:g} relative", file=out)
    rows = verify_points(cfg.sim, cfg.trunc, positions, out=out)
    failed = sum(not r[3] for r in rows)
    print(f"{len(rows) - failed}/{len(rows)} amplitude checks passed", file=out)
    return 0 if failed == 0 else 1


def cmd_compare(args, out=None) -> int:
    out = out or sys.stdout
    if args.model:
        pattern = read_csv(args.model)
        unit = args.data_unit or "um"
    else:
        cfg = build_run_config(args)
        pattern = screen_scan(cfg.sim, cfg.grid, cfg.mode, cfg.normalize, cfg.trunc, workers=cfg.threads)
        unit = cfg.data_unit
    if not args.data:
        raise ConfigError("compare needs --data PATH")
    pos, counts = read_data_csv(args.data, unit)
    report = compare(pattern, pos, counts)
    print(report.summary(), file=out)
    if args.svg:
        write_svg(pattern, args.svg, (pos, counts), title="model vs data")
    return 0


def cmd_preset(args, out=None) -> int:
    out = out or sys.stdout
    if args.action == "list":
        for name in PRESET_NAMES:
            print(f"{name}: {make_preset(name).note}", file=out)
        return 0
    if not args.name:
        raise ConfigError("preset show needs a NAME")
    p = make_preset(args.name)
    g, coh = p.geometry, p.coherence
    print(f"# {p.note}", file=out)
    for key, val in [
        ("preset", f'"{p.name}"'), ("wavelength_m", p.particle.wavelength_m),
        ("a_m", g.width_a_m), ("b_m", g.length_b_m), ("c_m", g.thickness_c_m),
        ("d_m", g.gap_d_m), ("L_m", g.screen_L_m), ("A1", p.A1), ("A2", p.A2),
        ("c1", coh.c1), ("c2", coh.c2), ("nu", p.visibility_nu),
        ("alpha_abs", coh.alpha_abs), ("lambda_t", coh.lambda_t()),
        ("weight_norm", coh.c1**2 + coh.c2**2),
    ]:
        print(f"{key} = {val!r}" if not isinstance(val, str) else f"{key} = {val}", file=out)
    return 0


def _add_run_options(p, verify=False):
    src = p.add_mutually_exclusive_group()
    src.add_argument("--preset", choices=PRESET_NAMES)
    src.add_argument("--config", metavar="PATH", help="TOML file with flat key = value pairs")
    p.add_argument("--range", nargs=2, type=float, metavar=("LO", "HI"), help="screen range in meters")
    p.add_argument("--points", type=int, help="number of screen points")
    p.add_argument("--m-max", type=int, dest="m_max")
    p.add_argument("--n-max", type=int, dest="n_max")
    p.add_argument("--tail-tol", type=float, dest="tail_tol")
    p.add_argument("--threads", type=int, help="worker threads (default $SLITWAVE_THREADS or 1)")
    if not verify:
        p.add_argument("--mode", choices=MODES)
        p.add_argument("--normalize", choices=NORMALIZATIONS)
        p.add_argument("--svg", metavar="PATH")
        p.add_argument("--data", metavar="PATH", help="measured two-column CSV")
        p.add_argument("--data-unit", dest="data_unit", choices=tuple(UNIT_SCALE))


# argparse's default only recognises plain decimals, so "--range -150e-6 150e-6" would fail
_NEGATIVE_NUMBER = re.compile(r"^-(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?$")


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        self._negative_number_matcher = _NEGATIVE_NUMBER


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="slitwave", description="Matter-wave double-slit diffraction")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    scan = sub.add_parser("scan", help="compute a screen pattern")
    _add_run_options(scan)
    scan.add_argument("--out", metavar="PATH", help="pattern CSV")
    scan.set_defaults(func=cmd_scan)

    ver = sub.add_parser("verify", help="check closed-form amplitudes against direct quadrature")
    _add_run_options(ver, verify=True)
    ver.set_defaults(func=cmd_verify)

    cmp_ = sub.add_parser("compare", help="compare a model pattern with measured data")
    _add_run_options(cmp_)
    cmp_.add_argument("--model", metavar="PATH", help="use an existing pattern CSV instead of scanning")
    cmp_.set_defaults(func=cmd_compare)

    pre = sub.add_parser("preset", help="list or show experiment presets")
    pre.add_argument("action", choices=("list", "show"))
    pre.add_argument("name", nargs="?")
    pre.set_defaults(func=cmd_preset)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        with warnings.catch_warnings():
            warnings.simplefilter("always")
            return args.func(args)
    except (SlitwaveError, ValueError, OSError) as exc:
        print(f"slitwave: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
