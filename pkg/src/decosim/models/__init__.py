"""Concrete open-system models: scattering, oscillator baths, spin baths, estimators."""

from .collisional import (
    DecoherenceRates,
    GridState,
    ScatteringModel,
    decoherence_rates,
    evolve_collisional,
    localization_prefactor,
    localization_rate,
    separation_rates,
    total_scattering_rate,
    two_gaussian_superposition,
)
from .estimates import (
    ScenarioEntry,
    TimescaleReport,
    VisibilityCurve,
    table1_scenarios,
    thermal_de_broglie_wavelength,
    timescale_ratio,
    visibility_vs_pressure,
)
from .qbm import (
    CaldeiraLeggettGenerator,
    FreeParticleGenerator,
    WignerGrid,
    caldeira_leggett_generator,
    cat_state,
    coherent_state,
    evolve_free_particle,
    free_particle_generator,
    position_moments,
    truncation_tail,
    wigner_from_fock,
    wigner_transform,
)
from .spinboson import (
    SpinBosonBornMarkovGenerator,
    SpinBosonExactResult,
    spin_boson_born_markov_generator,
    spin_boson_exact_dephasing,
)
from .spinspin import (
    SpinEnvironment,
    SpinSpinResult,
    spin_spin_exact,
    spin_spin_hamiltonian,
    spin_spin_propagator,
)

__all__ = [
    "DecoherenceRates",
    "GridState",
    "ScatteringModel",
    "decoherence_rates",
    "evolve_collisional",
    "localization_prefactor",
    "localization_rate",
    "separation_rates",
    "total_scattering_rate",
    "two_gaussian_superposition",
    "ScenarioEntry",
    "TimescaleReport",
    "VisibilityCurve",
    "table1_scenarios",
    "thermal_de_broglie_wavelength",
    "timescale_ratio",
    "visibility_vs_pressure",
    "CaldeiraLeggettGenerator",
    "FreeParticleGenerator",
    "WignerGrid",
    "caldeira_leggett_generator",
    "cat_state",
    "coherent_state",
    "evolve_free_particle",
    "free_particle_generator",
    "position_moments",
    "truncation_tail",
    "wigner_from_fock",
    "wigner_transform",
    "SpinBosonBornMarkovGenerator",
    "SpinBosonExactResult",
    "spin_boson_born_markov_generator",
    "spin_boson_exact_dephasing",
    "SpinEnvironment",
    "SpinSpinResult",
    "spin_spin_exact",
    "spin_spin_hamiltonian",
    "spin_spin_propagator",
]
