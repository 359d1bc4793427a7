"""Back-of-envelope decoherence timescales in SI units.

The solver modules work in natural units; this one deliberately does
not.  It converts laboratory numbers (grams, kelvins, centimeters)
into the thermal-wavelength ratio that controls spatial decoherence,
and tabulates localization times for a set of standard environment
scenarios.  Scattering constants for the scenario table are config
inputs: the published order-of-magnitude times are carried along for
display next to the computed values, never as the source of the
constants.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

import numpy as np
from scipy.constants import hbar, k as k_boltzmann

from ..errors import ConfigError

ENVIRONMENTS = (
    "cosmic background radiation",
    "photons at room temperature",
    "best laboratory vacuum",
    "air at normal pressure",
)

# (label, separation in meters); separation equals the object size
OBJECTS = (
    ("dust grain", 1e-5),
    ("large molecule", 1e-8),
)

# Published order-of-magnitude localization times in seconds, shown
# alongside computed values for comparison only.
REFERENCE_SECONDS = {
    ("cosmic background radiation", "dust grain"): 1e0,
    ("cosmic background radiation", "large molecule"): 1e24,
    ("photons at room temperature", "dust grain"): 1e-18,
    ("photons at room temperature", "large molecule"): 1e6,
    ("best laboratory vacuum", "dust grain"): 1e-14,
    ("best laboratory vacuum", "large molecule"): 1e-2,
    ("air at normal pressure", "dust grain"): 1e-31,
    ("air at normal pressure", "large molecule"): 1e-19,
}


@dataclass(frozen=True)
class TimescaleReport:
    tau_d: float  # seconds
    tau_r: float  # seconds
    ratio: float  # tau_r / tau_d
    lambda_db: float  # meters


def thermal_de_broglie_wavelength(mass: float, temperature: float) -> float:
    """hbar / sqrt(2 m k_B T), all SI."""
    if mass <= 0 or temperature <= 0:
        raise ValueError("mass and temperature must be positive")
    return hbar / np.sqrt(2.0 * mass * k_boltzmann * temperature)


def timescale_ratio(
    mass: float, temperature: float, separation: float, relaxation_time: float = 1.0
) -> TimescaleReport:
    """Ratio of relaxation to decoherence time for a separated superposition.

    mass in kg, temperature in K, separation in m.  Absolute times are
    anchored to ``relaxation_time`` (seconds): only the ratio is fixed
    by the inputs.
    """
    if separation <= 0 or relaxation_time <= 0:
        raise ValueError("separation and relaxation_time must be positive")
    lam = thermal_de_broglie_wavelength(mass, temperature)
    ratio = (separation / lam) ** 2
    return TimescaleReport(
        tau_d=relaxation_time / ratio,
        tau_r=relaxation_time,
        ratio=ratio,
        lambda_db=lam,
    )


@dataclass(frozen=True)
class ScenarioEntry:
    environment: str
    object_label: str
    separation: float  # m
    constant_kind: str  # "lambda" (1/(m^2 s)) or "gamma_tot" (1/s)
    constant_value: float
    tau_computed: float  # s
    tau_reference: float  # s, display only


def table1_scenarios(
    constants: Mapping[str, Mapping[str, Mapping[str, float]]],
) -> list[ScenarioEntry]:
    """Localization times for the standard environment/object pairs.

    ``constants[environment][object]`` must supply exactly one of
    ``{"lambda": ...}`` (long-wavelength regime, tau = 1/(lambda dx^2))
    or ``{"gamma_tot": ...}`` (short-wavelength regime, tau = 1/gamma).
    """
    entries = []
    missing = []
    for env in ENVIRONMENTS:
        for label, dx in OBJECTS:
            spec = constants.get(env, {}).get(label)
            if not spec:
                missing.append(f"{env} / {label}")
                continue
            if set(spec) == {"lambda"}:
                value = float(spec["lambda"])
                if value <= 0:
                    raise ConfigError(f"lambda must be positive for {env} / {label}")
                tau = 1.0 / (value * dx**2)
                kind = "lambda"
            elif set(spec) == {"gamma_tot"}:
                value = float(spec["gamma_tot"])
                if value <= 0:
                    raise ConfigError(f"gamma_tot must be positive for {env} / {label}")
                tau = 1.0 / value
                kind = "gamma_tot"
            else:
                raise ConfigError(
                    f"{env} / {label}: supply exactly one of 'lambda' or 'gamma_tot', "
                    f"got {sorted(spec)}"
                )
            entries.append(
                ScenarioEntry(
                    environment=env,
                    object_label=label,
                    separation=dx,
                    constant_kind=kind,
                    constant_value=value,
                    tau_computed=tau,
                    tau_reference=REFERENCE_SECONDS[(env, label)],
                )
            )
    if missing:
        raise ConfigError("missing scattering constants for: " + "; ".join(missing))
    return entries


@dataclass(frozen=True)
class VisibilityCurve:
    pressures: np.ndarray
    visibility: np.ndarray
    v0: float
    log_slope: float  # d ln(V) / d p, exact model value


def visibility_vs_pressure(
    gamma_per_pressure: float, t_transit: float, pressures, v0: float = 1.0
) -> VisibilityCurve:
    """Interference visibility V0 exp(-gamma_per_pressure * p * t_transit)."""
    if gamma_per_pressure < 0 or t_transit < 0 or v0 <= 0:
        raise ValueError("rates, times, and V0 must be nonnegative (V0 positive)")
    p = np.asarray(pressures, dtype=float)
    if np.any(p < 0):
        raise ValueError("pressures must be nonnegative")
    vis = v0 * np.exp(-gamma_per_pressure * p * t_transit)
    p = p.copy()
    p.setflags(write=False)
    vis.setflags(write=False)
    return VisibilityCurve(p, vis, v0, -gamma_per_pressure * t_transit)
