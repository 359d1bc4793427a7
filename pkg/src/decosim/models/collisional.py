"""Collisional (scattering-induced) spatial decoherence.

A gas of incoming particles with momentum distribution rho(q), speed
v(q), and isotropic differential cross section |f(q)|^2 suppresses
position-space coherences pointwise:

    rho(x, x', t) = rho(x, x', 0) exp(-F(x - x') t)

with the localization rate

    F(dx) = int dq rho(q) v(q) int dn dn'/4pi (1 - e^{i q (n - n') . dx}) |f(q)|^2.

F vanishes at dx = 0, grows like Lambda dx^2 for separations small
against the dominant wavelength, and saturates at the total scattering
rate Gamma_tot once single collisions resolve the separation.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad

from ..core import hermiticity_defect
from ..errors import PhysicalityError

GRID_TRACE_TOL = 1e-8
REGIMES = ("full", "short-wavelength", "long-wavelength")
_ANGLE_NODES = 96


@dataclass(frozen=True)
class ScatteringModel:
    """Environment monochromatic-beam data, all functions of momentum q > 0.

    density_of_momenta: number density per momentum interval (1/(length^3 * momentum))
    speed:              particle speed at momentum q (length/time)
    cross_section:      |f(q)|^2, isotropic (area/steradian)
    q_max:              upper limit of the momentum support used in quadrature
    regime:             'full', 'short-wavelength', or 'long-wavelength'
    """

    density_of_momenta: Callable[[float], float]
    speed: Callable[[float], float]
    cross_section: Callable[[float], float]
    q_max: float
    regime: str = "full"

    def __post_init__(self):
        if self.q_max <= 0:
            raise ValueError("q_max must be positive")
        if self.regime not in REGIMES:
            raise ValueError(f"regime must be one of {REGIMES}, got {self.regime!r}")


def total_scattering_rate(model: ScatteringModel) -> float:
    """Gamma_tot = int dq rho(q) v(q) sigma_tot(q) with sigma_tot = 4 pi |f|^2."""
    value, _ = quad(
        lambda q: model.density_of_momenta(q) * model.speed(q) * 4.0 * np.pi * model.cross_section(q),
        0.0,
        model.q_max,
        limit=200,
    )
    return float(value)


def localization_prefactor(model: ScatteringModel) -> float:
    """Lambda = (4 pi / 3) int dq rho(q) v(q) q^2 |f(q)|^2, the small-separation curvature."""
    value, _ = quad(
        lambda q: model.density_of_momenta(q)
        * model.speed(q)
        * q**2
        * 4.0
        * np.pi
        / 3.0
        * model.cross_section(q),
        0.0,
        model.q_max,
        limit=200,
    )
    return float(value)


_GL_CACHE: dict[int, tuple[np.ndarray, np.ndarray]] = {}


def _gl_rule(n: int) -> tuple[np.ndarray, np.ndarray]:
    if n not in _GL_CACHE:
        _GL_CACHE[n] = np.polynomial.legendre.leggauss(n)
    return _GL_CACHE[n]


def _angular_factor(u: float) -> float:
    """int dc dc' (1 - cos(u (c - c'))) over [-1,1]^2, Gauss-Legendre.

    Multiplied by pi |f|^2 this is the angular average of the collision
    integrand for an isotropic cross section (azimuth already integrated).
    The node count scales with the phase argument so the oscillatory
    integrand stays resolved at large separations.
    """
    n = _ANGLE_NODES
    while n < u and n < 8192:
        n *= 2
    nodes, weights = _gl_rule(n)
    phase = u * nodes
    cos_avg = float(weights @ np.cos(phase))
    sin_avg = float(weights @ np.sin(phase))
    # |int dc e^{iuc}|^2 expands the double integral of cos(u(c - c')).
    return 4.0 - (cos_avg**2 + sin_avg**2)


def localization_rate(model: ScatteringModel, separation: float) -> float:
    """Decoherence rate F at a given position-space separation (1/time).

    Dispatches on the model regime: the full angular quadrature, the
    saturated short-wavelength limit Gamma_tot, or the quadratic
    long-wavelength law Lambda * separation^2.
    """
    dx = abs(float(separation))
    if dx == 0.0:
        return 0.0
    if model.regime == "short-wavelength":
        return total_scattering_rate(model)
    if model.regime == "long-wavelength":
        return localization_prefactor(model) * dx**2

    def integrand(q: float) -> float:
        return (
            model.density_of_momenta(q)
            * model.speed(q)
            * np.pi
            * model.cross_section(q)
            * _angular_factor(q * dx)
        )

    value, _ = quad(integrand, 0.0, model.q_max, limit=400)
    return float(value)


@dataclass(frozen=True)
class DecoherenceRates:
    """Summary rates for one scattering environment."""

    total_rate: float  # Gamma_tot, 1/time
    prefactor: float  # Lambda, 1/(time * length^2)

    def coherence_time(self, separation: float) -> float:
        """1 / F(dx) in the long-wavelength law; inf at zero separation."""
        if separation == 0.0:
            return np.inf
        return 1.0 / (self.prefactor * separation**2)


def decoherence_rates(model: ScatteringModel) -> DecoherenceRates:
    return DecoherenceRates(total_scattering_rate(model), localization_prefactor(model))


@dataclass(frozen=True)
class GridState:
    """Position-space density matrix sampled on a uniform grid.

    Normalization is sum(diag) * spacing = 1 within 1e-8; hermiticity
    within 1e-10 of the matrix entries.
    """

    positions: np.ndarray
    matrix: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.positions, dtype=float)
        rho = np.asarray(self.matrix, dtype=complex)
        if x.ndim != 1 or x.size < 2:
            raise ValueError("need a 1-d grid with at least two points")
        steps = np.diff(x)
        if np.any(steps <= 0) or (steps.max() - steps.min()) > 1e-9 * steps.mean():
            raise ValueError("grid must be uniform and increasing")
        if rho.shape != (x.size, x.size):
            raise ValueError(f"matrix shape {rho.shape} does not match grid size {x.size}")
        if hermiticity_defect(rho) > 1e-10:
            raise PhysicalityError("grid density matrix is not Hermitian within 1e-10")
        trace = float(np.real(np.sum(np.diag(rho))) * steps.mean())
        if abs(trace - 1.0) > GRID_TRACE_TOL:
            raise PhysicalityError(f"grid trace {trace!r} deviates from 1 beyond {GRID_TRACE_TOL}")
        x.setflags(write=False)
        rho.setflags(write=False)
        object.__setattr__(self, "positions", x)
        object.__setattr__(self, "matrix", rho)

    @property
    def spacing(self) -> float:
        return float(self.positions[1] - self.positions[0])


def separation_rates(model: ScatteringModel, state: GridState) -> np.ndarray:
    """F(k * spacing) for k = 0 .. n-1, one value per distinct grid separation."""
    n = state.positions.size
    return np.array([localization_rate(model, k * state.spacing) for k in range(n)])


def evolve_collisional(
    state: GridState,
    model: ScatteringModel,
    t: float,
    rates: np.ndarray | None = None,
) -> GridState:
    """Pointwise exponential suppression of off-diagonal coherences.

    The diagonal is untouched (F(0) = 0); precomputed per-separation
    ``rates`` can be passed to amortize the quadrature across times.
    """
    if t < 0:
        raise ValueError("time must be nonnegative")
    if rates is None:
        rates = separation_rates(model, state)
    n = state.positions.size
    idx = np.abs(np.arange(n)[:, None] - np.arange(n)[None, :])
    decay = np.exp(-np.asarray(rates)[idx] * t)
    return GridState(state.positions, state.matrix * decay)


def two_gaussian_superposition(
    positions: np.ndarray, separation: float, sigma: float
) -> GridState:
    """Symmetric coherent superposition of two Gaussian packets, grid normalized."""
    x = np.asarray(positions, dtype=float)
    psi = np.exp(-((x - 0.5 * separation) ** 2) / (4.0 * sigma**2)) + np.exp(
        -((x + 0.5 * separation) ** 2) / (4.0 * sigma**2)
    )
    spacing = x[1] - x[0]
    psi = psi.astype(complex)
    psi /= np.sqrt(np.sum(np.abs(psi) ** 2) * spacing)
    return GridState(x, np.outer(psi, psi.conj()))
