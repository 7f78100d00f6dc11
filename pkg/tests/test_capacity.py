import numpy as np
import pytest

from qentropy.capacity import (
    CapacityEstimate,
    OptimizerConfig,
    additivity_probe,
    check_ce_chi_bound,
    check_eb_ce_bound,
    holevo_quantity,
    optimize_ce,
    optimize_chi,
)
from qentropy.channel import (
    constant_channel,
    dephasing,
    dephasing_mp,
    depolarizing,
    identity_channel,
    random_channel,
    random_mp_channel,
)
from qentropy.entropy import channel_mutual_information, entropy_of_spectrum
from qentropy.linalg import ValidationError
from qentropy.qstate import (
    Ensemble,
    RngStream,
    basis_state,
    flag_purify,
    random_ensemble,
    random_density,
)

FAST = OptimizerConfig(seed=0, restarts=6, max_iters=600)

# qubit depolarizing at p = 1/2: the optimal input is maximally mixed by
# covariance, and the joint output spectrum is (5/8, 1/8, 1/8, 1/8), giving
# 1 + 1 - H(5/8, 1/8, 1/8, 1/8)
CE_DEPOL_HALF = 0.4512050593046015


def _basis_ensemble(d=2, probs=None):
    p = np.full(d, 1 / d) if probs is None else np.asarray(probs, float)
    return Ensemble(p, tuple(basis_state(d, i).density() for i in range(d)))


def test_holevo_orthogonal_inputs_identity():
    assert abs(holevo_quantity(identity_channel(2), _basis_ensemble()) - 1.0) <= 1e-12


def test_holevo_matches_average_entropy_for_pure_outputs():
    gen = RngStream(90).generator()
    ens = random_ensemble(2, 3, gen, rank=1)
    chi = holevo_quantity(identity_channel(2), ens)
    avg = ens.average()
    assert abs(chi - entropy_of_spectrum(avg.spectrum())) <= 1e-9


def test_holevo_vanishes_on_constant_output():
    chi = holevo_quantity(depolarizing(2, 1.0), _basis_ensemble())
    assert abs(chi) <= 1e-10


def test_holevo_weights_matter():
    skew = holevo_quantity(identity_channel(2), _basis_ensemble(probs=[0.25, 0.75]))
    assert abs(skew - 0.8112781244591328) <= 1e-12


def test_holevo_dominated_by_mutual_information():
    # mutual information at the ensemble average dominates the Holevo
    # quantity: discarding the purifying system of a flagged extension only
    # lowers correlations
    gen = RngStream(91).generator()
    for _ in range(40):
        d = int(gen.integers(2, 4))
        ens = random_ensemble(d, int(gen.integers(1, 5)), gen, rank=1)
        d_out = int(gen.integers(2, 4))
        low = -(-d // d_out)  # completeness needs d_out * count >= d
        ch = random_channel(d, d_out, int(gen.integers(low, d + 1)), gen)
        chi = holevo_quantity(ch, ens)
        mi = channel_mutual_information(ens.average(), ch)
        assert mi >= chi - 1e-9


def test_optimize_chi_identity_qubit():
    est = optimize_chi(identity_channel(2), FAST)
    assert abs(est.value - 1.0) <= 1e-3
    assert est.kind == "holevo-lower-bound"
    assert est.argmax_ensemble is not None


def test_optimize_chi_dephasing():
    est = optimize_chi(dephasing(2), FAST)
    assert abs(est.value - 1.0) <= 1e-3


def test_optimize_chi_full_depolarizing_is_zero():
    est = optimize_chi(depolarizing(2, 1.0), OptimizerConfig(seed=0, restarts=2, max_iters=100))
    assert est.value <= 1e-6


def test_optimize_chi_deterministic():
    a = optimize_chi(identity_channel(2), FAST)
    b = optimize_chi(identity_channel(2), FAST)
    assert a.value == b.value
    assert a.restart_values == b.restart_values


def test_optimize_chi_trace_non_decreasing():
    est = optimize_chi(dephasing(2), FAST)
    trace = np.array(est.trace)
    assert np.all(np.diff(trace) >= 0)


def test_optimize_chi_seed_ensemble_is_floor():
    # seeding with the basis ensemble cannot leave the estimate below its chi
    ens = _basis_ensemble()
    ch = dephasing(2)
    seeded = optimize_chi(ch, OptimizerConfig(seed=0, restarts=1, max_iters=50), seeds=(ens,))
    assert seeded.value >= holevo_quantity(ch, ens) - 1e-9


def test_optimize_ce_identity_qubit():
    est = optimize_ce(identity_channel(2), FAST)
    assert abs(est.value - 2.0) <= 1e-3
    assert est.kind == "entanglement-assisted"
    assert est.argmax_state is not None


def test_optimize_ce_identity_qutrit():
    est = optimize_ce(identity_channel(3), FAST)
    assert abs(est.value - 2 * np.log2(3)) <= 2e-3


def test_optimize_ce_depolarizing_half():
    est = optimize_ce(depolarizing(2, 0.5), FAST)
    assert abs(est.value - CE_DEPOL_HALF) <= 1e-4


def test_optimize_ce_full_depolarizing_is_zero():
    est = optimize_ce(depolarizing(2, 1.0), OptimizerConfig(seed=0, restarts=2, max_iters=100))
    assert est.value <= 1e-4


def test_optimize_ce_dephasing_qubit():
    # dephasing leaves a perfect classical bit and nothing more
    est = optimize_ce(dephasing(2), FAST)
    assert abs(est.value - 1.0) <= 1e-3


def test_optimize_ce_dominates_chi():
    gen = RngStream(92).generator()
    for _ in range(5):
        ch = random_channel(2, 2, int(gen.integers(1, 5)), gen)
        ce = optimize_ce(ch, FAST)
        chi = optimize_chi(ch, FAST)
        assert ce.value >= chi.value - 1e-3


def test_optimize_ce_rejects_rectangular():
    gen = RngStream(93).generator()
    ch = random_channel(3, 2, 3, gen)
    with pytest.raises(ValidationError):
        optimize_ce(ch, FAST)


def test_estimate_doc_roundtrip_fields():
    est = optimize_chi(identity_channel(2), OptimizerConfig(seed=0, restarts=2, max_iters=50))
    doc = est.to_doc()
    assert set(doc) == {
        "value", "kind", "restarts_used", "iterations", "converged",
        "trace", "restart_values", "argmax",
    }
    assert doc["argmax"]["kind"] == "ensemble"


def test_check_eb_ce_bound_dephasing_attains_log_d():
    r = check_eb_ce_bound(dephasing_mp(2), FAST)
    assert r.passed
    assert abs(r.lhs - 1.0) <= 1e-3
    assert r.rhs == 1.0


def test_check_eb_ce_bound_random_channels():
    gen = RngStream(94).generator()
    for _ in range(3):
        mp = random_mp_channel(2, 2, int(gen.integers(2, 5)), gen)
        r = check_eb_ce_bound(mp, FAST)
        assert r.passed
        assert r.extras["joint_minus_output_entropy"] >= -1e-9
        assert r.extras["joint_minus_input_entropy"] >= -1e-9


def test_check_eb_ce_bound_rejects_kraus_form():
    with pytest.raises(ValidationError):
        check_eb_ce_bound(identity_channel(2), FAST)


def test_check_ce_chi_bound_identity():
    r = check_ce_chi_bound(identity_channel(2), FAST)
    assert r.passed
    assert r.slack >= -1e-9
    assert abs(r.extras["direct_ce"] - 2.0) <= 1e-3
    assert abs(r.extras["direct_chi"] - 1.0) <= 1e-3


def test_check_ce_chi_bound_random_qubit_channels():
    gen = RngStream(95).generator()
    for _ in range(3):
        ch = random_channel(2, 2, int(gen.integers(1, 5)), gen)
        r = check_ce_chi_bound(ch, FAST)
        assert r.passed
        assert r.slack >= -1e-9


def test_additivity_probe_identity_times_dephasing():
    probe = additivity_probe(
        dephasing_mp(2), identity_channel(2), OptimizerConfig(seed=0, restarts=8, max_iters=600)
    )
    assert probe.passed
    assert abs(probe.extras["chi_eb"] - 1.0) <= 1e-3
    assert abs(probe.extras["chi_other"] - 1.0) <= 1e-3
    assert abs(probe.extras["chi_tensor"] - 2.0) <= 2e-3
    assert abs(probe.extras["gap"]) <= 1e-3


def test_additivity_probe_constant_channels_gap_zero():
    gen = RngStream(96).generator()
    sink_a = constant_channel(random_density(2, gen))
    sink_b = constant_channel(random_density(2, gen))
    probe = additivity_probe(sink_a, sink_b.to_kraus(), OptimizerConfig(seed=0, restarts=2, max_iters=100))
    assert probe.passed
    assert abs(probe.extras["chi_tensor"]) <= 1e-9
    assert abs(probe.extras["gap"]) <= 1e-9


def test_additivity_probe_rejects_kraus_first_factor():
    with pytest.raises(ValidationError):
        additivity_probe(identity_channel(2), identity_channel(2), FAST)


def test_additivity_probe_rejects_oversized_product():
    with pytest.raises(ValidationError):
        additivity_probe(dephasing_mp(4), identity_channel(3), FAST)


def test_optimizer_config_validation():
    with pytest.raises(ValidationError):
        OptimizerConfig(restarts=0)
    with pytest.raises(ValidationError):
        OptimizerConfig(fd_step=0.0)
