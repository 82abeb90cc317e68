import json

import numpy as np
import pytest

from qwmix.experiments import (
    ASSERT_TOL,
    EQUIVALENCE_CEILING,
    AUDIT_DESCRIPTIONS,
    chain_from_spec,
    cycle_threshold_audit,
    experiment_names,
    gap_inequality_audit,
    graph_from_spec,
    grover_complete_graph_sweep,
    hypercube_limit_audit,
    lattice_scaling_sweep,
    loglog_slope,
    make_assertion,
    measurement_equivalence_audit,
    run_experiment,
    tensor_power_identity_audit,
)
from qwmix.graphs import cycle, path


def _check_result_invariants(result):
    for a in result.assertions:
        assert a.holds == (a.lhs <= a.rhs + ASSERT_TOL)
    payload = json.dumps(result.to_dict(), sort_keys=True)
    round_tripped = json.loads(payload)
    assert round_tripped["name"] == result.name


def test_make_assertion_tolerance():
    assert make_assertion("x", 1.0, 1.0).holds
    assert make_assertion("x", 1.0 + 5e-13, 1.0).holds
    assert not make_assertion("x", 1.0 + 5e-12, 1.0).holds


def test_loglog_slope_recovers_power_law():
    xs = np.array([2.0, 4.0, 8.0, 16.0])
    assert loglog_slope(xs, 3.0 * xs**1.7) == pytest.approx(1.7, abs=1e-12)


def test_chain_from_spec():
    assert chain_from_spec("cycle:6").size == 6
    assert chain_from_spec("uniform:4").size == 4
    lazy = chain_from_spec("lazy:cycle:4")
    assert lazy.entries[0, 0] == pytest.approx(0.5)
    with pytest.raises(ValueError):
        chain_from_spec("moebius:4")
    with pytest.raises(ValueError):
        graph_from_spec("cycle")


def test_gap_inequality_audit_holds_on_grid():
    for spec in ("cycle:5", "hypercube:3"):
        P = chain_from_spec(spec)
        for T in (1.0, 5.0, 25.0):
            result = gap_inequality_audit(P, T, [1, 2, 3, 5])
            _check_result_invariants(result)
            assert result.all_hold(), result.failing()


def test_gap_inequality_audit_validates_input():
    with pytest.raises(ValueError):
        gap_inequality_audit(chain_from_spec("cycle:5"), 1.0, [0])
    from qwmix import MarkovChain

    asym = MarkovChain(
        np.array([[0.0, 0.0, 1.0], [1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]), "rot3"
    )
    with pytest.raises(ValueError):
        gap_inequality_audit(asym, 1.0, [1])


def test_measurement_equivalence_cycle7():
    result = measurement_equivalence_audit(chain_from_spec("cycle:7"), 3.0)
    _check_result_invariants(result)
    assert result.all_hold()
    values = dict(result.measurements)
    assert values["tprime_uniform_ct"] == 3.0
    assert values["tprime_exponential"] == 2.0
    assert values["C"] == pytest.approx(2.0 / (3.0 * (1.0 + np.log(7.0))), abs=1e-12)
    assert values["C"] <= EQUIVALENCE_CEILING


def test_measurement_equivalence_complete6():
    result = measurement_equivalence_audit(chain_from_spec("complete:6"), 5.0)
    assert result.all_hold()
    values = dict(result.measurements)
    assert values["C"] <= EQUIVALENCE_CEILING
    assert values["C_prime"] <= EQUIVALENCE_CEILING


def test_measurement_equivalence_inconclusive_diagnosis():
    # tiny horizon forces a NoMix outcome via an effectively frozen walk
    result = measurement_equivalence_audit(chain_from_spec("uniform:12"), 1e-9)
    assert result.assertions == ()
    assert "inconclusive" in result.parameters["diagnosis"]
    assert dict(result.measurements)["tprime_uniform_ct"] is None


def test_cycle_threshold_audit_ct():
    for n in (4, 5, 8):
        result = cycle_threshold_audit(n, "ct")
        _check_result_invariants(result)
        assert result.all_hold(), (n, result.failing())
    with pytest.raises(ValueError):
        cycle_threshold_audit(2, "ct")
    with pytest.raises(ValueError):
        cycle_threshold_audit(5, "szegedy")


def test_cycle_threshold_audit_hadamard_parity():
    result = cycle_threshold_audit(8, "hadamard")
    assert result.all_hold()
    values = dict(result.measurements)
    assert values["parity_leak"] == 0.0
    odd = cycle_threshold_audit(5, "hadamard")
    assert "parity_leak" not in dict(odd.measurements)


def test_tensor_power_identity_audit():
    result = tensor_power_identity_audit(cycle(3), 2, [0.7, 2.3])
    _check_result_invariants(result)
    assert result.all_hold()
    with pytest.raises(ValueError):
        tensor_power_identity_audit(path(3), 2, [1.0])
    with pytest.raises(ValueError):
        tensor_power_identity_audit(cycle(9), 4, [1.0])


def test_lattice_scaling_sweep_growth_branch():
    result = lattice_scaling_sweep([4], [1, 2])
    _check_result_invariants(result)
    assert result.all_hold()
    labels = [a.label for a in result.assertions]
    assert any(label.startswith("tprime_log_growth") for label in labels)
    # no regression assertions with fewer than 4 sizes
    assert not any("slope" in label for label in labels)


def test_grover_sweep_small():
    result = grover_complete_graph_sweep([2, 4, 8])
    _check_result_invariants(result)
    assert result.all_hold()
    values = dict(result.measurements)
    assert values["tprime_N2"] is None
    assert values["classical_tau_N4"] == 2.0
    assert "tprime_slope" not in values  # needs 4 regression points


def test_hypercube_limit_audit_floor_exemption():
    result = hypercube_limit_audit([1, 2])
    _check_result_invariants(result)
    assert result.all_hold()
    labels = [a.label for a in result.assertions]
    assert "limit_nonuniform_d2" in labels
    assert "limit_nonuniform_d1" not in labels
    values = dict(result.measurements)
    assert values["limit_deviation_d1"] <= 1e-12
    assert values["limit_deviation_d2"] == pytest.approx(0.25, abs=1e-12)
    assert values["base_period_d1"] == 2.0


def test_run_experiment_registry():
    assert set(AUDIT_DESCRIPTIONS) == set(experiment_names())
    result = run_experiment(
        "gap_inequality_audit", {"chain": "cycle:5", "T": 2.0, "k_values": [1, 2]}
    )
    assert result.all_hold()
    with pytest.raises(KeyError):
        run_experiment("bogus", {})
    with pytest.raises(ValueError):
        run_experiment("gap_inequality_audit", {"chain": "cycle:5", "T": 2.0})
    with pytest.raises(ValueError):
        run_experiment(
            "gap_inequality_audit",
            {"chain": "cycle:5", "T": 2.0, "k_values": [1], "extra": 1},
        )


def test_results_are_deterministic():
    a = lattice_scaling_sweep([4, 6], [2])
    b = lattice_scaling_sweep([4, 6], [2])
    assert a.to_dict() == b.to_dict()
    assert json.dumps(a.to_dict(), sort_keys=True) == json.dumps(b.to_dict(), sort_keys=True)
