"""Flat key-value run configuration.

The on-disk format is diff-friendly text, one ``section.key = value`` pair
per line, ``#`` comments. Unknown keys are rejected with the offending line.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from .odelab import OdeControls
from .params import ModelParams, Spacetime
from .pdelab import PdeControls


class ConfigError(ValueError):
    pass


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("true", "yes", "1", "on"):
        return True
    if low in ("false", "no", "0", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_spacetime(text: str) -> str:
    try:
        return Spacetime(text.strip()).value
    except ValueError:
        raise ValueError(f"spacetime must be deSitter or antiDeSitter, got {text!r}")


def _parse_eps_list(text: str) -> tuple[float, ...]:
    vals = tuple(float(tok) for tok in text.replace(",", " ").split())
    if not vals:
        raise ValueError("empty epsilon list")
    return vals


def _parse_frame(text: str):
    if text.strip().lower() == "auto":
        return None
    return float(text)


def _parse_seed(text: str) -> Optional[int]:
    if text.strip().lower() in ("", "none"):
        return None
    return int(text)


# key -> (converter, default)
SCHEMA: dict[str, tuple] = {
    "model.spacetime": (_parse_spacetime, "deSitter"),
    "model.n": (int, 1),
    "model.c": (float, 1.0),
    "model.H": (float, 1.0),
    "model.b": (float, 0.0),
    "model.m2": (float, 0.0),
    "model.beta": (float, 0.0),
    "model.p": (float, 2.0),
    "model.mu": (float, 1.0),
    "model.r_exp": (float, 0.0),
    "model.kappa_poly": (float, 0.0),
    "model.R": (float, 1.0),
    "model.epsilon": (float, 0.1),
    "engine": (str, "ode"),
    "solver.rel_tol": (float, 1e-10),
    "solver.abs_tol": (float, 1e-12),
    "solver.ode_u_cap": (float, 1e12),
    "solver.ode_dt_min": (float, 1e-13),
    "solver.pde_u_cap": (float, 1e10),
    "solver.pde_dt_min": (float, 1e-12),
    "solver.horizon": (float, 20.0),
    "solver.ode_horizon": (float, 1e9),
    "solver.h": (float, 1.0 / 128.0),
    "solver.cfl": (float, 0.5),
    "solver.sample_interval": (float, 0.02),
    "solver.profile": (str, "bump"),
    "solver.nonlinear": (_parse_bool, True),
    "solver.tol_support": (float, 1e-10),
    "solver.frame_c": (_parse_frame, None),
    "iterate.j_max": (int, 20),
    "iterate.k0": (float, 1.0),
    "iterate.k1": (float, 1.0),
    "iterate.frame_c": (float, 1.0),
    "sweep.epsilons": (_parse_eps_list, ()),
    "sweep.eps_start": (float, 2.0 ** -4),
    "sweep.eps_ratio": (float, 0.5),
    "sweep.eps_count": (int, 11),
    "sweep.workers": (int, 1),
    "sweep.drop_largest": (int, 2),
    "sweep.tolerance": (float, -1.0),   # negative: per-law default
    "sweep.r2_min": (float, 0.98),
    "sweep.law": (str, "auto"),
    "sweep.exploratory": (_parse_bool, False),
    "output.dir": (str, "out"),
    "seed": (_parse_seed, None),
}


@dataclass
class RunConfig:
    params: ModelParams
    engine: str
    ode_controls: OdeControls
    pde_controls: PdeControls
    horizon: float          # PDE horizon; the ODE horizon is ode_horizon
    ode_horizon: float
    frame_c: Optional[float]
    j_max: int
    k0: float
    k1: float
    iterate_frame_c: float
    sweep_epsilons: tuple[float, ...]
    sweep_workers: int
    sweep_drop_largest: int
    sweep_tolerance: Optional[float]
    sweep_r2_min: float
    sweep_law: str
    sweep_exploratory: bool
    output_dir: Path
    seed: Optional[int]
    raw: dict = field(default_factory=dict)


def parse_config_text(text: str, source: str = "<config>") -> dict:
    """Parse flat key-value lines into typed values, rejecting unknown keys."""
    values: dict = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.split("#", 1)[0].strip()
        if not stripped:
            continue
        if "=" not in stripped:
            raise ConfigError(f"{source}:{lineno}: expected 'key = value', got {line!r}")
        key, _, raw_value = stripped.partition("=")
        key = key.strip()
        raw_value = raw_value.strip()
        if key not in SCHEMA:
            raise ConfigError(f"{source}:{lineno}: unknown key {key!r}")
        converter = SCHEMA[key][0]
        try:
            values[key] = converter(raw_value)
        except ValueError as exc:
            raise ConfigError(f"{source}:{lineno}: bad value for {key}: {exc}")
    return values


def apply_overrides(values: dict, overrides: list[str]) -> dict:
    """Apply --set key=value pairs on top of parsed config values."""
    for item in overrides:
        if "=" not in item:
            raise ConfigError(f"--set needs key=value, got {item!r}")
        key, _, raw_value = item.partition("=")
        key = key.strip()
        if key not in SCHEMA:
            raise ConfigError(f"--set: unknown key {key!r}")
        converter = SCHEMA[key][0]
        try:
            values[key] = converter(raw_value.strip())
        except ValueError as exc:
            raise ConfigError(f"--set {key}: {exc}")
    return values


def build_config(values: dict) -> RunConfig:
    """Materialize a RunConfig from parsed values plus schema defaults."""
    def get(key):
        return values.get(key, SCHEMA[key][1])

    try:
        params = ModelParams(
            n=get("model.n"), c=get("model.c"), H=get("model.H"),
            b=get("model.b"), m2=get("model.m2"), beta=get("model.beta"),
            p=get("model.p"), mu=get("model.mu"), r_exp=get("model.r_exp"),
            kappa_poly=get("model.kappa_poly"),
            spacetime=Spacetime(get("model.spacetime")),
            R=get("model.R"), epsilon=get("model.epsilon"),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid model parameters: {exc}")

    engine = get("engine")
    if engine not in ("ode", "pde"):
        raise ConfigError(f"engine must be 'ode' or 'pde', got {engine!r}")
    profile = get("solver.profile")
    if profile not in ("bump", "truncatedPoly"):
        raise ConfigError(f"solver.profile must be bump or truncatedPoly, got {profile!r}")

    ode_controls = OdeControls(
        rel_tol=get("solver.rel_tol"), abs_tol=get("solver.abs_tol"),
        u_cap=get("solver.ode_u_cap"), dt_min=get("solver.ode_dt_min"),
    )
    pde_controls = PdeControls(
        h=get("solver.h"), nu_cfl=get("solver.cfl"), horizon=get("solver.horizon"),
        u_cap=get("solver.pde_u_cap"), dt_min=get("solver.pde_dt_min"),
        sample_interval=get("solver.sample_interval"), profile=profile,
        tol_support=get("solver.tol_support"), nonlinear=get("solver.nonlinear"),
        seed=get("seed"),
    )

    eps = get("sweep.epsilons")
    if not eps:
        start, ratio, count = get("sweep.eps_start"), get("sweep.eps_ratio"), get("sweep.eps_count")
        if not 0 < ratio < 1:
            raise ConfigError(f"sweep.eps_ratio must lie in (0, 1), got {ratio}")
        eps = tuple(start * ratio ** k for k in range(count))

    tol = get("sweep.tolerance")
    law = get("sweep.law")
    if law not in ("auto", "powerLaw", "expLaw", "thetaLaw"):
        raise ConfigError(f"sweep.law must be auto/powerLaw/expLaw/thetaLaw, got {law!r}")

    out_dir = Path(get("output.dir"))
    if not math.isfinite(get("solver.horizon")) or get("solver.horizon") <= 0:
        raise ConfigError("solver.horizon must be positive and finite")

    return RunConfig(
        params=params, engine=engine,
        ode_controls=ode_controls, pde_controls=pde_controls,
        horizon=get("solver.horizon"), ode_horizon=get("solver.ode_horizon"),
        frame_c=get("solver.frame_c"),
        j_max=get("iterate.j_max"), k0=get("iterate.k0"), k1=get("iterate.k1"),
        iterate_frame_c=get("iterate.frame_c"),
        sweep_epsilons=eps, sweep_workers=get("sweep.workers"),
        sweep_drop_largest=get("sweep.drop_largest"),
        sweep_tolerance=None if tol < 0 else tol,
        sweep_r2_min=get("sweep.r2_min"), sweep_law=law,
        sweep_exploratory=get("sweep.exploratory"),
        output_dir=out_dir, seed=get("seed"), raw=dict(values),
    )


def load_config(path: Optional[str], overrides: list[str]) -> RunConfig:
    values: dict = {}
    if path is not None:
        text = Path(path).read_text()
        values = parse_config_text(text, source=str(path))
    apply_overrides(values, overrides)
    return build_config(values)
