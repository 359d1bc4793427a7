"""Time evolution engines: deterministic master equations and diffusive trajectories.

``evolve`` integrates any generator exposing ``rhs``/``dim`` with a
fixed-step classical Runge-Kutta scheme, symmetrizing each step and
enforcing trace and positivity contracts on stored snapshots.
``unravel`` propagates pure-state diffusive trajectories whose ensemble
mean converges to the same master equation; trajectory randomness is
keyed by (master_seed, trajectory_index) with a counter-based bit
generator, and reduction happens in fixed blocks so results are
bitwise reproducible for any worker count.
"""
from __future__ import annotations

import os
import warnings
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .core import DensityMatrix, Operator, StateVector, symmetrize
from .errors import PositivityError

TRACE_DRIFT_TOL = 1e-8
DEFAULT_POSITIVITY_TOL = 1e-6
STIFFNESS_WARN = 0.1
TRAJECTORY_BLOCK = 256  # fixed reduction granularity; never tied to worker count


@dataclass(frozen=True)
class LindbladSpec:
    """Diagonal-form master equation: Hamiltonian plus (operator, rate) pairs.

    Rates are nonnegative and carry units of inverse time; the generator is
      drho/dt = -i[H, rho] + sum_k kappa_k (L rho L^dag - {L^dag L, rho}/2).
    """

    hamiltonian: Operator
    lindblad_terms: tuple[tuple[Operator, float], ...] = ()
    positivity_tol: float = DEFAULT_POSITIVITY_TOL

    def __post_init__(self):
        if not self.hamiltonian.is_hermitian():
            raise ValueError("hamiltonian must be Hermitian within 1e-10")
        terms = []
        for op, rate in self.lindblad_terms:
            if op.dim != self.hamiltonian.dim:
                raise ValueError("Lindblad operator dimension does not match Hamiltonian")
            if rate < 0:
                raise ValueError(f"rates must be nonnegative, got {rate}")
            terms.append((op, float(rate)))
        object.__setattr__(self, "lindblad_terms", tuple(terms))

    @property
    def dim(self) -> int:
        return self.hamiltonian.dim

    def rhs(self, rho: np.ndarray) -> np.ndarray:
        h = self.hamiltonian.entries
        out = -1j * (h @ rho - rho @ h)
        for op, rate in self.lindblad_terms:
            l = op.entries
            l_rho = l @ rho
            ldl = l.conj().T @ l
            out += rate * (l_rho @ l.conj().T - 0.5 * (ldl @ rho + rho @ ldl))
        return out

    def stiffness_scale(self) -> float:
        h_norm = float(np.linalg.norm(self.hamiltonian.entries, 2))
        rates = [
            rate * float(np.linalg.norm(op.entries, 2)) ** 2
            for op, rate in self.lindblad_terms
        ]
        return max([h_norm] + rates) if rates else h_norm


def lindblad_rhs(spec: LindbladSpec, rho) -> np.ndarray:
    """Generator applied to a density matrix (raw array in, raw array out)."""
    mat = rho.entries if isinstance(rho, DensityMatrix) else np.asarray(rho, dtype=complex)
    return spec.rhs(mat)


@dataclass(frozen=True)
class EvolutionResult:
    times: np.ndarray
    states: tuple[DensityMatrix, ...]

    def final(self) -> DensityMatrix:
        return self.states[-1]


def _rk4_step(rhs, rho: np.ndarray, dt: float) -> np.ndarray:
    k1 = rhs(rho)
    k2 = rhs(rho + 0.5 * dt * k1)
    k3 = rhs(rho + 0.5 * dt * k2)
    k4 = rhs(rho + dt * k3)
    return rho + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def evolve(
    generator,
    rho0: DensityMatrix,
    t_final: float,
    dt: float,
    store_every: int = 1,
) -> EvolutionResult:
    """Fixed-step 4th-order integration of a master-equation generator.

    Snapshots (every ``store_every`` steps plus the endpoint) are
    symmetrized and revalidated; a trace drift beyond 1e-8 or an
    eigenvalue below the generator's positivity tolerance aborts.
    """
    if dt <= 0 or t_final < 0:
        raise ValueError("need dt > 0 and t_final >= 0")
    if rho0.dim != generator.dim:
        raise ValueError("initial state dimension does not match the generator")
    scale = getattr(generator, "stiffness_scale", lambda: 0.0)()
    if dt * scale > STIFFNESS_WARN:
        warnings.warn(
            f"dt * stiffness scale = {dt * scale:.3g} > {STIFFNESS_WARN}; "
            "step size is likely too coarse",
            stacklevel=2,
        )
    ptol = getattr(generator, "positivity_tol", DEFAULT_POSITIVITY_TOL)
    n_steps = max(1, int(round(t_final / dt))) if t_final > 0 else 0
    rho = rho0.entries.astype(complex)
    times = [0.0]
    states = [rho0]
    for step in range(1, n_steps + 1):
        rho = symmetrize(_rk4_step(generator.rhs, rho, dt))
        if step % store_every == 0 or step == n_steps:
            t = step * dt
            tr = float(np.real(np.trace(rho)))
            if abs(tr - 1.0) > TRACE_DRIFT_TOL:
                raise PositivityError(f"trace drifted to {tr!r} at t={t:g}")
            lo = float(np.linalg.eigvalsh(rho).min())
            if lo < -ptol:
                raise PositivityError(f"eigenvalue {lo:.3e} below -{ptol:g} at t={t:g}")
            times.append(t)
            # snapshots inherit the generator's positivity tolerance: a
            # non-CP generator transiently dips below the strict floor
            states.append(DensityMatrix(rho, rho0.dims, eig_floor=-ptol))
    return EvolutionResult(np.array(times), tuple(states))


@dataclass(frozen=True)
class TrajectoryConfig:
    """Stochastic run description; all trajectories share dt and t_final."""

    dt: float
    t_final: float
    n_trajectories: int
    master_seed: int

    def __post_init__(self):
        if self.dt <= 0 or self.t_final <= 0:
            raise ValueError("need dt > 0 and t_final > 0")
        if self.n_trajectories < 1:
            raise ValueError("need at least one trajectory")
        if self.master_seed < 0:
            raise ValueError("master_seed must be nonnegative")

    @property
    def n_steps(self) -> int:
        return max(1, int(round(self.t_final / self.dt)))


@dataclass(frozen=True)
class TrajectoryResult:
    times: np.ndarray
    ensemble: tuple[DensityMatrix, ...]
    final_states: np.ndarray  # (n_trajectories, dim) unit vectors, index order


def _trajectory_noise(master_seed: int, index: int, n_steps: int, n_ops: int, dt: float) -> np.ndarray:
    key = np.array([master_seed, index], dtype=np.uint64)
    rng = np.random.Generator(np.random.Philox(key=key))
    return rng.normal(0.0, np.sqrt(dt), size=(n_steps, n_ops))


def _evolve_block(
    h: np.ndarray,
    ops: list[np.ndarray],
    rates: list[float],
    psi0: np.ndarray,
    cfg: TrajectoryConfig,
    indices: range,
    sample_steps: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    n_steps = cfg.n_steps
    b = len(indices)
    d = psi0.size
    psi = np.tile(psi0, (b, 1))
    noise = np.stack(
        [_trajectory_noise(cfg.master_seed, i, n_steps, len(ops), cfg.dt) for i in indices]
    )
    sums = np.zeros((sample_steps.size, d, d), dtype=complex)
    pos = 0
    if sample_steps[pos] == 0:
        sums[pos] = np.einsum("bi,bj->ij", psi, psi.conj())
        pos += 1
    ht = h.T
    for step in range(n_steps):
        drift = -1j * (psi @ ht)
        stoch = np.zeros_like(psi)
        for mu, (l, rate) in enumerate(zip(ops, rates)):
            l_psi = psi @ l.T
            expect = np.einsum("bi,bi->b", psi.conj(), l_psi).real[:, None]
            centered = l_psi - expect * psi
            # drift gets -(rate/2) (L - <L>)^2 psi
            drift -= 0.5 * rate * (centered @ l.T - expect * centered)
            stoch += np.sqrt(rate) * centered * noise[:, step, mu][:, None]
        psi = psi + cfg.dt * drift + stoch
        psi /= np.linalg.norm(psi, axis=1)[:, None]
        if pos < sample_steps.size and sample_steps[pos] == step + 1:
            sums[pos] = np.einsum("bi,bj->ij", psi, psi.conj())
            pos += 1
    return sums, psi


def unravel(
    spec: LindbladSpec,
    psi0: StateVector,
    cfg: TrajectoryConfig,
    store_every: int = 1,
    n_workers: int | None = None,
) -> TrajectoryResult:
    """Diffusive pure-state unraveling of a Lindblad equation with Hermitian operators.

    Euler-Maruyama steps with per-step renormalization; the ensemble
    average over trajectories reproduces ``evolve`` up to O(dt) bias and
    O(1/sqrt(n)) statistics.  Identical master seeds give bitwise
    identical ensembles for any worker count.
    """
    for op, _ in spec.lindblad_terms:
        if not op.is_hermitian():
            raise ValueError("diffusive unraveling is implemented for Hermitian operators only")
    if psi0.dim != spec.dim:
        raise ValueError("initial state dimension does not match the generator")
    if n_workers is None:
        n_workers = int(os.environ.get("DECOSIM_WORKERS", "1"))
    n_steps = cfg.n_steps
    sample_steps = np.unique(
        np.concatenate([np.arange(0, n_steps + 1, store_every), [n_steps]])
    )
    h = spec.hamiltonian.entries
    ops = [op.entries for op, _ in spec.lindblad_terms]
    rates = [rate for _, rate in spec.lindblad_terms]
    blocks = [
        range(lo, min(lo + TRAJECTORY_BLOCK, cfg.n_trajectories))
        for lo in range(0, cfg.n_trajectories, TRAJECTORY_BLOCK)
    ]

    def run(block):
        return _evolve_block(h, ops, rates, psi0.amplitudes, cfg, block, sample_steps)

    if n_workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            results = list(pool.map(run, blocks))
    else:
        results = [run(block) for block in blocks]

    total = np.zeros((sample_steps.size, spec.dim, spec.dim), dtype=complex)
    finals = np.zeros((cfg.n_trajectories, spec.dim), dtype=complex)
    for block, (sums, last) in zip(blocks, results):  # fixed block order
        total += sums
        finals[block.start : block.stop] = last
    total /= cfg.n_trajectories
    times = sample_steps * cfg.dt
    ensemble = tuple(
        DensityMatrix(symmetrize(total[k]), psi0.dims) for k in range(sample_steps.size)
    )
    return TrajectoryResult(times, ensemble, finals)
