"""High-temperature quantum Brownian motion of a single particle.

Two representations of the same master equation

    drho/dt = -i[H', rho] - i gamma0 [x, {p, rho}] - 2 M gamma0 T [x, [x, rho]]

with H' = p^2/2M + M(W^2 - 2 gamma0 Lambda) x^2 / 2: a truncated
oscillator number basis for bound motion (with an optional
pure-decoherence variant that drops the dissipative term and is then of
Lindblad form), and a uniform position grid with a spectral momentum
operator for the free particle.  The grid evolution splits off the
double-commutator decay, which is diagonal in (x, x') and therefore
applied exactly; an explicit stepper on that stiff term alone would
need two orders of magnitude smaller steps.

Also provides the Wigner transform
    W(x, p) = (1/pi) int dy rho(x + y, x - y) e^{-2 i p y}
for grid and number-basis states.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..core import StateVector, ket, symmetrize
from ..errors import GridResolutionError, PhysicalityError
from .collisional import GridState

WIGNER_NORM_TOL = 1e-6
MIN_N_MAX = 4


def ladder(n_max: int) -> np.ndarray:
    """Annihilation operator on the lowest n_max number states."""
    return np.diag(np.sqrt(np.arange(1, n_max, dtype=float)), 1).astype(complex)


def position_momentum(n_max: int, mass: float, frequency: float) -> tuple[np.ndarray, np.ndarray]:
    a = ladder(n_max)
    x = np.sqrt(1.0 / (2.0 * mass * frequency)) * (a + a.conj().T)
    p = 1j * np.sqrt(mass * frequency / 2.0) * (a.conj().T - a)
    return x, p


@dataclass(frozen=True)
class CaldeiraLeggettGenerator:
    """Number-basis master-equation generator for a damped oscillator.

    ``pure_decoherence`` drops -i gamma0 [x, {p, rho}]; what remains is a
    double-commutator dissipator (Lindblad form, tight positivity
    tolerance).  The full equation is not of Lindblad form and tolerates
    small transient negativity, reflected in a looser default tolerance.
    """

    mass: float
    frequency: float
    gamma0: float
    cutoff: float
    temperature: float
    n_max: int = 60
    pure_decoherence: bool = False
    positivity_tol: float = field(default=0.0)  # resolved in __post_init__
    x: np.ndarray = field(init=False, repr=False)
    p: np.ndarray = field(init=False, repr=False)
    h_eff: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if self.n_max < MIN_N_MAX:
            raise ValueError(f"n_max must be at least {MIN_N_MAX}, got {self.n_max}")
        if self.mass <= 0 or self.frequency <= 0 or self.temperature < 0:
            raise ValueError("need mass > 0, frequency > 0, temperature >= 0")
        x, p = position_momentum(self.n_max, self.mass, self.frequency)
        shifted_sq = self.frequency**2 - 2.0 * self.gamma0 * self.cutoff
        h_eff = p @ p / (2.0 * self.mass) + 0.5 * self.mass * shifted_sq * (x @ x)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "h_eff", h_eff)
        if self.positivity_tol == 0.0:
            object.__setattr__(
                self, "positivity_tol", 1e-6 if self.pure_decoherence else 1e-3
            )

    @property
    def dim(self) -> int:
        return self.n_max

    @property
    def diffusion(self) -> float:
        """D = 2 M gamma0 T, the momentum-diffusion coefficient."""
        return 2.0 * self.mass * self.gamma0 * self.temperature

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        x, p = self.x, self.p
        out = -1j * (self.h_eff @ rho - rho @ self.h_eff)
        if not self.pure_decoherence:
            anti = p @ rho + rho @ p
            out += -1j * self.gamma0 * (x @ anti - anti @ x)
        inner = x @ rho - rho @ x
        out -= self.diffusion * (x @ inner - inner @ x)
        return out

    def stiffness_scale(self) -> float:
        xn = float(np.linalg.norm(self.x, 2))
        pn = float(np.linalg.norm(self.p, 2))
        scale = float(np.linalg.norm(self.h_eff, 2)) + 4.0 * self.diffusion * xn**2
        if not self.pure_decoherence:
            scale += 4.0 * self.gamma0 * xn * pn
        return scale


def caldeira_leggett_generator(
    mass: float,
    frequency: float,
    gamma0: float,
    cutoff: float,
    temperature: float,
    n_max: int = 60,
    pure_decoherence: bool = False,
) -> CaldeiraLeggettGenerator:
    return CaldeiraLeggettGenerator(
        mass, frequency, gamma0, cutoff, temperature, n_max, pure_decoherence
    )


def truncation_tail(rho: np.ndarray, n_tail: int = 5) -> float:
    """Population in the top ``n_tail`` number states; certifies basis truncation."""
    diag = np.real(np.diag(np.asarray(rho)))
    return float(diag[-n_tail:].sum())


def coherent_state(alpha: complex, n_max: int) -> StateVector:
    """Truncated coherent state; renormalized, so keep |alpha|^2 well under n_max."""
    n = np.arange(n_max)
    log_fact = np.concatenate([[0.0], np.cumsum(np.log(np.arange(1, n_max)))])
    amps = np.exp(n * np.log(complex(alpha)) - 0.5 * log_fact - 0.5 * abs(alpha) ** 2)
    return ket(amps)


def cat_state(alpha: complex, n_max: int) -> StateVector:
    """Even superposition of +alpha and -alpha coherent states."""
    plus = coherent_state(alpha, n_max).amplitudes
    minus = coherent_state(-alpha, n_max).amplitudes
    return ket(plus + minus)


# --- free particle on a position grid ------------------------------------

@dataclass(frozen=True)
class FreeParticleGenerator:
    """Grid free-particle pieces: spectral momentum, damping, and exact decay rates."""

    positions: np.ndarray
    mass: float
    gamma0: float
    temperature: float
    p_op: np.ndarray = field(init=False, repr=False)
    kinetic: np.ndarray = field(init=False, repr=False)
    decay_rates: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        x = np.asarray(self.positions, dtype=float)
        if x.ndim != 1 or x.size < 8:
            raise ValueError("need a 1-d grid with at least 8 points")
        h = x[1] - x[0]
        if np.abs(np.diff(x) - h).max() > 1e-9 * h:
            raise ValueError("grid must be uniform")
        n = x.size
        k = 2.0 * np.pi * np.fft.fftfreq(n, d=h)
        f = np.fft.fft(np.eye(n), axis=0)
        finv = np.conj(f.T) / n
        p_op = finv @ (k[:, None] * f)
        kinetic = finv @ ((k**2)[:, None] * f) / (2.0 * self.mass)
        diffusion = 2.0 * self.mass * self.gamma0 * self.temperature
        rates = diffusion * (x[:, None] - x[None, :]) ** 2
        x.setflags(write=False)
        object.__setattr__(self, "positions", x)
        object.__setattr__(self, "p_op", p_op)
        object.__setattr__(self, "kinetic", kinetic)
        object.__setattr__(self, "decay_rates", rates)

    @property
    def dim(self) -> int:
        return self.positions.size

    def drift_rhs(self, rho: np.ndarray) -> np.ndarray:
        """Unitary plus damping part; the decay part is applied exactly elsewhere."""
        out = -1j * (self.kinetic @ rho - rho @ self.kinetic)
        x = self.positions
        anti = self.p_op @ rho + rho @ self.p_op
        out += -1j * self.gamma0 * (x[:, None] * anti - anti * x[None, :])
        return out


def free_particle_generator(
    positions: np.ndarray, mass: float, gamma0: float, temperature: float
) -> FreeParticleGenerator:
    return FreeParticleGenerator(positions, mass, gamma0, temperature)


def evolve_free_particle(
    gen: FreeParticleGenerator,
    state: GridState,
    t_final: float,
    dt: float,
    store_every: int = 10,
) -> tuple[np.ndarray, list[GridState]]:
    """Strang-split integration: exact half-step decay, RK4 drift, half-step decay."""
    if dt <= 0 or t_final <= 0:
        raise ValueError("need dt > 0 and t_final > 0")
    if not np.array_equal(state.positions, gen.positions):
        raise ValueError("state grid does not match the generator grid")
    n_steps = max(1, int(round(t_final / dt)))
    half = np.exp(-0.5 * dt * gen.decay_rates)
    rho = state.matrix.astype(complex)
    times = [0.0]
    frames = [state]
    for step in range(1, n_steps + 1):
        rho = half * rho
        k1 = gen.drift_rhs(rho)
        k2 = gen.drift_rhs(rho + 0.5 * dt * k1)
        k3 = gen.drift_rhs(rho + 0.5 * dt * k2)
        k4 = gen.drift_rhs(rho + dt * k3)
        rho = rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        rho = half * rho
        rho = symmetrize(rho)
        if step % store_every == 0 or step == n_steps:
            times.append(step * dt)
            frames.append(GridState(gen.positions, rho))
    return np.array(times), frames


def position_moments(state: GridState) -> tuple[float, float]:
    """(mean, variance) of position under the grid density matrix."""
    x = state.positions
    prob = np.real(np.diag(state.matrix)) * state.spacing
    mean = float(x @ prob)
    var = float(((x - mean) ** 2) @ prob)
    return mean, var


# --- Wigner transform -----------------------------------------------------

@dataclass(frozen=True)
class WignerGrid:
    """Wigner function samples on an (x, p) rectangle; integrates to 1 within 1e-6."""

    x: np.ndarray
    p: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float)
        p = np.asarray(self.p, dtype=float)
        w = np.asarray(self.values, dtype=float)
        if w.shape != (x.size, p.size):
            raise ValueError(f"values shape {w.shape} does not match grids {(x.size, p.size)}")
        total = float(w.sum() * (x[1] - x[0]) * (p[1] - p[0]))
        if abs(total - 1.0) > WIGNER_NORM_TOL:
            raise PhysicalityError(
                f"Wigner normalization {total!r} deviates from 1 beyond {WIGNER_NORM_TOL}"
            )
        for name, arr in (("x", x), ("p", p), ("values", w)):
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    def negativity_volume(self) -> float:
        dx = float(self.x[1] - self.x[0])
        dp = float(self.p[1] - self.p[0])
        return float(np.abs(self.values[self.values < 0.0]).sum() * dx * dp)


def wigner_transform(state: GridState, boundary_tol: float = 1e-3) -> WignerGrid:
    """Discrete Wigner transform of a grid density matrix.

    The momentum grid spans the Nyquist interval [-pi/2h, pi/2h) of the
    half-coordinate y; weight within 2 rows of the momentum boundary
    above ``boundary_tol`` of the peak raises GridResolutionError.
    """
    x = state.positions
    n = x.size
    h = state.spacing
    rho = state.matrix
    offsets = np.arange(-(n - 1), n)  # y = j h
    gathered = np.zeros((n, offsets.size), dtype=complex)
    for row, j in enumerate(offsets):
        idx = np.arange(n)
        ok = (idx + j >= 0) & (idx + j < n) & (idx - j >= 0) & (idx - j < n)
        gathered[ok, row] = rho[idx[ok] + j, idx[ok] - j]
    p_grid = -np.pi / (2.0 * h) + np.pi / (h * n) * np.arange(n)
    phase = np.exp(-2.0j * np.outer(offsets * h, p_grid))
    w = np.real(gathered @ phase) * (h / np.pi)
    peak = np.abs(w).max()
    edge = np.abs(w[:, [0, 1, -2, -1]]).max()
    if peak > 0 and edge > boundary_tol * peak:
        raise GridResolutionError(
            "momentum content reaches the Nyquist boundary "
            f"(edge/peak = {edge / peak:.2e}); refine the position grid"
        )
    return WignerGrid(x, p_grid, w)


def hermite_functions(n_max: int, xi: np.ndarray) -> np.ndarray:
    """Orthonormal oscillator eigenfunctions phi_n(xi), unit frequency and mass."""
    out = np.zeros((n_max, xi.size))
    out[0] = np.pi**-0.25 * np.exp(-0.5 * xi**2)
    if n_max > 1:
        out[1] = np.sqrt(2.0) * xi * out[0]
    for n in range(2, n_max):
        out[n] = np.sqrt(2.0 / n) * xi * out[n - 1] - np.sqrt((n - 1) / n) * out[n - 2]
    return out


def wigner_from_fock(
    rho: np.ndarray, mass: float, frequency: float, positions: np.ndarray
) -> WignerGrid:
    """Wigner transform of a number-basis density matrix via a position grid."""
    rho = np.asarray(rho, dtype=complex)
    n_max = rho.shape[0]
    x = np.asarray(positions, dtype=float)
    scale = np.sqrt(mass * frequency)
    phi = hermite_functions(n_max, scale * x) * np.sqrt(scale)
    rho_x = phi.T @ rho @ np.conj(phi)
    spacing = x[1] - x[0]
    trace = float(np.real(np.trace(rho_x)) * spacing)
    if abs(trace - 1.0) > 1e-6:
        raise GridResolutionError(
            f"position grid captures trace {trace!r}; widen or refine the grid"
        )
    state = GridState(x, symmetrize(rho_x) / trace)
    return wigner_transform(state)
