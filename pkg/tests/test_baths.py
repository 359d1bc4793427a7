import numpy as np
import pytest

from decosim import (
    OhmicLorentzCutoff,
    QuadratureConfig,
    SampledSpectralDensity,
    bath_kernels,
    effective_spectral_density,
    qbm_coefficients,
    spin_boson_coefficients,
)
from decosim.errors import ConvergenceError

MASS, GAMMA0, CUTOFF = 1.0, 0.02, 8.0
DENSITY = OhmicLorentzCutoff(MASS, GAMMA0, CUTOFF)


def test_density_shape_and_slope():
    w = np.array([0.5, CUTOFF, 40.0])
    vals = DENSITY(w)
    expected = (2 * MASS * GAMMA0 / np.pi) * w * CUTOFF**2 / (CUTOFF**2 + w**2)
    assert np.allclose(vals, expected, rtol=1e-14)
    assert DENSITY.zero_frequency_slope() == pytest.approx(2 * MASS * GAMMA0 / np.pi)


def test_dissipation_kernel_closed_form():
    # eta(tau) = M gamma0 cutoff^2 exp(-cutoff tau) for this density family.
    # Pointwise kernel values from a windowed quadrature of a 1/omega-tail
    # density are only good to ~1% (truncation + taper bias); the half-line
    # coefficient integrals built from the same machinery are tested at 1e-5
    # below, which is where the precision actually matters.
    tau = np.linspace(0.05, 0.6, 40)
    kernels = bath_kernels(DENSITY, 0.0, tau, QuadratureConfig(omega_max=400.0, n_omega=16385))
    expected = MASS * GAMMA0 * CUTOFF**2 * np.exp(-CUTOFF * tau)
    assert np.abs(kernels.eta - expected).max() < 2e-2 * expected.max()


def test_noise_kernel_even_and_real_structure():
    tau = np.linspace(0.0, 1.0, 64)
    k_cold = bath_kernels(DENSITY, 0.0, tau)
    k_warm = bath_kernels(DENSITY, 5.0, tau)
    # thermal weighting only ever raises the zero-time noise level
    assert k_warm.nu[0] > k_cold.nu[0]
    # dissipation kernel is temperature independent
    assert np.abs(k_warm.eta - k_cold.eta).max() < 1e-10 * np.abs(k_cold.eta).max()


def test_pure_dephasing_coefficient_closed_form():
    # int_0^inf nu = (pi/2) * [J(w) coth(w/2T)]_{w->0} = 2 M gamma0 T
    for temperature in (1.0, 2.0, 4.0):
        coeffs = spin_boson_coefficients(DENSITY, temperature, tunneling=0.0)
        assert coeffs.dephasing == pytest.approx(
            2 * MASS * GAMMA0 * temperature, rel=1e-5
        )
        assert coeffs.renormalization == pytest.approx(0.0, abs=1e-12)
        assert coeffs.decay == pytest.approx(0.0, abs=1e-12)


def test_decay_coefficient_closed_form():
    # int_0^inf eta sin(Delta0 t) = (pi/2) J(Delta0)
    delta0 = 1.5
    coeffs = spin_boson_coefficients(DENSITY, 2.0, tunneling=delta0)
    assert coeffs.decay == pytest.approx(0.5 * np.pi * DENSITY(delta0), rel=1e-5)


def test_oscillator_coefficients_closed_forms():
    omega = 1.0
    temperature = 6.0
    coeffs = qbm_coefficients(DENSITY, temperature, omega)
    lorentz = CUTOFF**2 / (CUTOFF**2 + omega**2)
    assert coeffs.damping == pytest.approx(GAMMA0 * lorentz, rel=1e-5)
    # normal diffusion: (pi/2) J(W) coth(W/2T)
    expected_diff = 0.5 * np.pi * DENSITY(omega) / np.tanh(omega / (2 * temperature))
    assert coeffs.normal_diffusion == pytest.approx(expected_diff, rel=1e-5)
    # frequency shift: -(2/M) integral of M gamma0 c^2 e^{-c t} cos(W t)
    expected_shift = -2 * GAMMA0 * CUTOFF**3 / (CUTOFF**2 + omega**2)
    assert coeffs.frequency_shift_sq == pytest.approx(expected_shift, rel=1e-4)


def test_high_temperature_limits():
    omega = 0.5
    coeffs = qbm_coefficients(DENSITY, 200.0, omega)
    assert coeffs.normal_diffusion == pytest.approx(2 * MASS * GAMMA0 * 200.0, rel=5e-3)
    assert coeffs.damping == pytest.approx(GAMMA0, rel=5e-3)


def test_flat_density_rejected_by_decay_check():
    flat = SampledSpectralDensity(np.linspace(0.0, 50.0, 200), np.full(200, 0.3))
    with pytest.raises(ConvergenceError):
        bath_kernels(flat, 1.0, np.linspace(0, 1, 32))


def test_sampled_density_interpolation():
    grid = np.array([0.0, 1.0, 2.0])
    dens = SampledSpectralDensity(grid, np.array([0.0, 2.0, 0.0]))
    assert dens(0.5) == pytest.approx(1.0)
    assert dens(3.0) == 0.0
    assert dens.zero_frequency_slope() == pytest.approx(2.0)


def test_sampled_density_validation():
    with pytest.raises(ValueError):
        SampledSpectralDensity(np.array([1.0, 0.5]), np.array([1.0, 1.0]))
    with pytest.raises(ValueError):
        SampledSpectralDensity(np.array([0.0, 1.0]), np.array([1.0, -1.0]))


def test_effective_density_lies_below_input():
    eff = effective_spectral_density(DENSITY, temperature=3.0)
    raw = DENSITY(eff.omegas)
    assert np.all(eff.values <= raw + 1e-15)
    # T -> 0 recovers the input
    cold = effective_spectral_density(DENSITY, temperature=0.0)
    assert np.allclose(cold.values, DENSITY(cold.omegas))


def test_quadrature_config_validation():
    with pytest.raises(ValueError):
        QuadratureConfig(n_omega=5)
    with pytest.raises(ValueError):
        QuadratureConfig(taper_fraction=1.0)
