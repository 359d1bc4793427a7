import numpy as np
import pytest

from decosim.errors import ConfigError
from decosim.models.estimates import (
    ENVIRONMENTS,
    OBJECTS,
    REFERENCE_SECONDS,
    table1_scenarios,
    thermal_de_broglie_wavelength,
    timescale_ratio,
    visibility_vs_pressure,
)

# hbar / sqrt(2 m k_B T) for 1 g at 300 K, frozen from the 2019 SI values
# hbar = 1.0545718176461565e-34, k_B = 1.380649e-23
LAMBDA_1G_300K = 3.664028934082362e-23
RATIO_1G_300K_1CM = 7.448729632423218e40


def test_thermal_wavelength_frozen_value():
    lam = thermal_de_broglie_wavelength(1e-3, 300.0)
    assert lam == pytest.approx(LAMBDA_1G_300K, rel=1e-12)


def test_macroscopic_ratio_frozen_value():
    report = timescale_ratio(1e-3, 300.0, 1e-2)
    assert report.ratio == pytest.approx(RATIO_1G_300K_1CM, rel=1e-12)
    assert report.lambda_db == pytest.approx(LAMBDA_1G_300K, rel=1e-12)
    # ratio is (dx / lambda)^2 by construction
    assert report.ratio == pytest.approx((1e-2 / report.lambda_db) ** 2, rel=1e-12)


def test_decoherence_time_anchored_to_relaxation_time():
    report = timescale_ratio(1e-3, 300.0, 1e-2, relaxation_time=2.5)
    assert report.tau_r == 2.5
    assert report.tau_d == pytest.approx(2.5 / report.ratio, rel=1e-12)


def test_ratio_scales_quadratically_with_separation():
    small = timescale_ratio(1e-6, 10.0, 1e-4)
    large = timescale_ratio(1e-6, 10.0, 3e-4)
    assert large.ratio / small.ratio == pytest.approx(9.0, rel=1e-12)


def test_input_validation():
    with pytest.raises(ValueError):
        thermal_de_broglie_wavelength(0.0, 300.0)
    with pytest.raises(ValueError):
        thermal_de_broglie_wavelength(1.0, -1.0)
    with pytest.raises(ValueError):
        timescale_ratio(1e-3, 300.0, 0.0)
    with pytest.raises(ValueError):
        timescale_ratio(1e-3, 300.0, 1e-2, relaxation_time=0.0)


def _full_constants():
    constants = {}
    for i, env in enumerate(ENVIRONMENTS):
        constants[env] = {}
        for j, (label, _) in enumerate(OBJECTS):
            if (i + j) % 2 == 0:
                constants[env][label] = {"lambda": 10.0 ** (3 * i + j)}
            else:
                constants[env][label] = {"gamma_tot": 10.0 ** (2 * i - j)}
    return constants


def test_scenario_table_computes_both_regimes():
    constants = _full_constants()
    entries = table1_scenarios(constants)
    assert len(entries) == len(ENVIRONMENTS) * len(OBJECTS)
    seps = dict(OBJECTS)
    for entry in entries:
        spec = constants[entry.environment][entry.object_label]
        if entry.constant_kind == "lambda":
            expected = 1.0 / (spec["lambda"] * seps[entry.object_label] ** 2)
        else:
            expected = 1.0 / spec["gamma_tot"]
        assert entry.tau_computed == pytest.approx(expected, rel=1e-12)
        assert entry.tau_reference == REFERENCE_SECONDS[
            (entry.environment, entry.object_label)
        ]


def test_scenario_table_rejects_missing_and_ambiguous_specs():
    constants = _full_constants()
    del constants[ENVIRONMENTS[0]][OBJECTS[1][0]]
    with pytest.raises(ConfigError):
        table1_scenarios(constants)
    constants = _full_constants()
    constants[ENVIRONMENTS[1]][OBJECTS[0][0]] = {"lambda": 1.0, "gamma_tot": 1.0}
    with pytest.raises(ConfigError):
        table1_scenarios(constants)
    constants = _full_constants()
    constants[ENVIRONMENTS[2]][OBJECTS[0][0]] = {"lambda": -2.0}
    with pytest.raises(ConfigError):
        table1_scenarios(constants)


def test_reference_table_is_complete():
    for env in ENVIRONMENTS:
        for label, _ in OBJECTS:
            assert (env, label) in REFERENCE_SECONDS


def test_visibility_is_log_linear_in_pressure():
    curve = visibility_vs_pressure(2.0, 0.003, np.array([0.0, 50.0, 100.0]), v0=0.9)
    assert curve.visibility[0] == pytest.approx(0.9, rel=1e-12)
    logs = np.log(curve.visibility)
    slope = (logs[2] - logs[0]) / 100.0
    assert slope == pytest.approx(curve.log_slope, rel=1e-12)
    assert curve.log_slope == pytest.approx(-2.0 * 0.003, rel=1e-12)
    with pytest.raises(ValueError):
        visibility_vs_pressure(-1.0, 0.003, [0.0, 1.0])
    with pytest.raises(ValueError):
        visibility_vs_pressure(2.0, 0.003, [-1.0, 1.0])
