import math
import warnings

import pytest

from finitebath.spectra import (
    CriticalParams,
    EngineeredParams,
    build_spectrum,
    critical_degenerate,
    critical_gap,
    critical_peak_heat_capacity,
    engineered_interacting,
    engineered_r,
    from_qubit_energies,
    non_interacting_qubits,
)
from finitebath.thermo import Spectrum, gibbs, gibbs_level_weights, heat_capacity, log_partition


def test_engineered_r_n4():
    assert engineered_r(4, 3.0) == pytest.approx([0.015625, 1.015625, 2.015625, 1.015625, 0.015625], abs=1e-15)


def test_engineered_energies_n4():
    spec = engineered_interacting(EngineeredParams(4, 3.0))
    e0 = spec.energies[spec.level_of_tag(0)]
    e1 = spec.energies[spec.level_of_tag(1)]
    assert e0 == pytest.approx(3 * math.log(4), abs=1e-14)
    assert e1 == pytest.approx(math.log(2) - math.log(1.015625), abs=1e-15)
    assert spec.dimension == 16
    assert sorted(spec.degeneracies) == [1, 1, 2, 4, 8]


@pytest.mark.parametrize("n", [2, 3, 5, 16, 100])
def test_engineered_endpoints(n):
    r = engineered_r(n, 2.5)
    assert r[0] == r[n] == float(n) ** -2.5


@pytest.mark.parametrize("n", [4, 9, 64, 1000])
def test_engineered_partition_closed_form(n):
    spec = engineered_interacting(EngineeredParams(n, 3.0))
    closed = 0.5 * (n + n ** -2.0 + 2.0 * n ** -3.0)
    assert math.exp(log_partition(spec, 1.0)) == pytest.approx(closed, rel=1e-10)


@pytest.mark.parametrize("n", [4, 11, 64, 512])
def test_engineered_top_level_is_least_likely(n):
    spec = engineered_interacting(EngineeredParams(n, 3.0))
    log_g = [-e for e in spec.energies]
    top = log_g[spec.level_of_tag(n)]
    assert all(lg >= top for lg in log_g)


def test_engineered_warns_outside_quadratic_regime():
    with pytest.warns(UserWarning):
        engineered_interacting(EngineeredParams(8, 1.5))


def test_engineered_params_validation():
    with pytest.raises(ValueError):
        EngineeredParams(1)
    with pytest.raises(ValueError):
        EngineeredParams(4, alpha=0.0)


def test_critical_gap_n3():
    assert critical_gap(CriticalParams(3, 0.5)) == pytest.approx(math.log(7), abs=1e-15)


@pytest.mark.parametrize("n,a", [(3, 0.5), (10, 0.2), (40, 0.9), (500, 0.6)])
def test_critical_ground_weight(n, a):
    spec = critical_degenerate(CriticalParams(n, a))
    assert gibbs_level_weights(spec, 1.0)[0] == pytest.approx(a, rel=1e-13)


def test_critical_params_validation():
    with pytest.raises(ValueError):
        CriticalParams(3, 0.125)
    with pytest.raises(ValueError):
        CriticalParams(3, 1.0)


def test_critical_peak_heat_capacity_n10():
    a, c = critical_peak_heat_capacity(10)
    target = 0.25 * 100 * math.log(2) ** 2
    assert abs(c / target - 1) < 0.15
    # Brute force over a fine logit grid.
    grid = [1 / (1 + math.exp(-t / 100)) for t in range(-600, 1500)]
    best = max(heat_capacity(critical_degenerate(CriticalParams(10, x)), 1.0) for x in grid if x > 2**-10)
    assert c >= best - 1e-9


def test_non_interacting_binomial():
    spec = non_interacting_qubits(5, 0.5)
    assert spec.degeneracies == (1, 5, 10, 10, 5, 1)
    assert spec.energies == (0.0, 0.5, 1.0, 1.5, 2.0, 2.5)
    with pytest.raises(ValueError):
        non_interacting_qubits(0)


def test_from_qubit_energies_merges():
    spec = from_qubit_energies([1.0, 1.0, 2.0])
    assert spec.energies == (0.0, 1.0, 2.0, 3.0, 4.0)
    assert spec.degeneracies == (1, 2, 2, 2, 1)


@pytest.mark.parametrize("block", [
    {"family": "engineered", "n": 8, "alpha": 3},
    {"family": "critical", "n": 8, "a": 0.5},
    {"family": "noninteracting", "n": 8, "gap": 1},
    {"family": "custom", "energies": [0, 1, 1], "degeneracies": [1, 2, 3]},
])
def test_builders_round_trip_json(block):
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        spec = build_spectrum(block)
    back, _ = Spectrum.from_json(spec.to_json())
    assert back.energies == spec.energies and back.degeneracies == spec.degeneracies
    assert sum(gibbs(spec, 1.0).level_weights) == pytest.approx(1.0, abs=1e-14)


def test_build_spectrum_unknown_family():
    with pytest.raises(ValueError):
        build_spectrum({"family": "ising"})
