"""Acceptance suite: one test per release criterion, one line each.

Each test prints an ``ACCEPTANCE <n> <status>`` line with the measured
numbers, then asserts at the criterion's stated tolerance.  Budgets are
wall-clock on a laptop-class machine.
"""

import time

import numpy as np
from click.testing import CliRunner

from qentropy.capacity import (
    OptimizerConfig,
    additivity_probe,
    check_ce_chi_bound,
    optimize_ce,
    optimize_chi,
)
from qentropy.channel import (
    dephasing,
    dephasing_mp,
    depolarizing,
    identity_channel,
    random_channel,
    random_mp_channel,
)
from qentropy.cli import main
from qentropy.entropy import relative_entropy, von_neumann
from qentropy.inequalities import (
    CORE_NAMES,
    PURIFICATION_DECOMPOSITION,
    FuzzConfig,
    run_fuzz,
)
from qentropy.qstate import DensityOperator, RngStream, basis_state, maximally_mixed

SEED = 20260819


def _line(n, ok, detail):
    print(f"ACCEPTANCE {n} {'pass' if ok else 'FAIL'}: {detail}")
    assert ok, detail


def test_criterion_1_inequality_fuzz_min_slack():
    t0 = time.time()
    reports = run_fuzz(FuzzConfig(seed=SEED, trials=1000, dims=(2, 3, 4), workers=4))
    dt = time.time() - t0
    worst = min(r.min_slack for r in reports if r.min_slack is not None)
    failures = sum(r.failures for r in reports)
    ok = failures == 0 and worst >= -1e-9 and dt < 600
    _line(1, ok, f"7 checkers x 1000 trials, failures={failures}, min slack={worst:.3e}, {dt:.1f}s")


def test_criterion_2_purification_decomposition_500_triples():
    cfg = FuzzConfig(
        seed=SEED, trials=500, dims=(2, 3), inequalities=(PURIFICATION_DECOMPOSITION,), workers=4
    )
    (report,) = run_fuzz(cfg)
    ok = report.failures == 0 and report.min_slack >= -1e-9
    _line(2, ok, f"500 decomposition triples, failures={report.failures}, min slack={report.min_slack:.3e}")


def test_criterion_3_capacity_oracles():
    cfg = OptimizerConfig(seed=SEED, restarts=8, max_iters=800)
    cases = [
        ("ce identity d=2", lambda: optimize_ce(identity_channel(2), cfg), 2.0, 1e-3),
        ("ce identity d=3", lambda: optimize_ce(identity_channel(3), cfg), 2 * np.log2(3), 2e-3),
        ("ce depolarizing p=1 d=2", lambda: optimize_ce(depolarizing(2, 1.0), cfg), 0.0, 1e-4),
        ("chi identity d=2", lambda: optimize_chi(identity_channel(2), cfg), 1.0, 1e-3),
        ("chi dephasing d=2", lambda: optimize_chi(dephasing(2), cfg), 1.0, 1e-3),
    ]
    details = []
    ok = True
    for label, run, want, tol in cases:
        t0 = time.time()
        est = run()
        dt = time.time() - t0
        good = abs(est.value - want) <= tol and dt <= 60
        ok = ok and good
        details.append(f"{label}: {est.value:.6f} (want {want:.6f}+-{tol:g}, {dt:.1f}s)")
    _line(3, ok, "; ".join(details))


def test_criterion_4_eb_capacity_bound():
    cfg = OptimizerConfig(seed=SEED, restarts=3, max_iters=400)
    worst = float("-inf")
    count = 0
    for d, trials in ((2, 200), (3, 50)):
        bound = np.log2(d)
        for t in range(trials):
            gen = RngStream(SEED, d).child(t).generator()
            mp = random_mp_channel(d, d, int(gen.integers(2, d * d + 1)), gen)
            est = optimize_ce(mp, cfg)
            worst = max(worst, est.value - bound)
            count += 1
    attain = optimize_ce(dephasing_mp(2), OptimizerConfig(seed=SEED, restarts=8, max_iters=800))
    ok = worst <= 1e-6 and abs(attain.value - 1.0) <= 1e-3
    _line(4, ok, f"{count} measure-prepare channels, max excess over log2 d = {worst:.3e}; dephasing attains {attain.value:.6f}")


def test_criterion_5_ce_chi_constructive_bound():
    cfg = OptimizerConfig(seed=SEED, restarts=4, max_iters=400)
    worst = float("inf")
    for t in range(100):
        gen = RngStream(SEED, 5).child(t).generator()
        ch = random_channel(2, 2, int(gen.integers(1, 5)), gen)
        r = check_ce_chi_bound(ch, cfg)
        worst = min(worst, r.slack)
        if not r.passed:
            break
    ok = worst >= -1e-9
    _line(5, ok, f"100 random qubit channels, min constructive slack = {worst:.3e}")


def test_criterion_6_additivity_probe_20_pairs():
    t0 = time.time()
    cfg = OptimizerConfig(seed=SEED, restarts=10, max_iters=600)
    worst = 0.0
    for t in range(20):
        gen = RngStream(SEED, 6).child(t).generator()
        eb = random_mp_channel(2, 2, int(gen.integers(2, 5)), gen)
        other = random_channel(2, 2, int(gen.integers(1, 5)), gen)
        probe = additivity_probe(eb, other, cfg)
        worst = max(worst, abs(probe.extras["gap"]))
    dt = time.time() - t0
    ok = worst <= 1e-3 and dt <= 1800
    _line(6, ok, f"20 channel pairs, max |gap| = {worst:.3e}, {dt:.0f}s")


def test_criterion_7_deterministic_reports(tmp_path):
    runner = CliRunner()
    outs = []
    for label, workers in (("a", 1), ("b", 4)):
        out = tmp_path / label
        r1 = runner.invoke(main, [
            "verify-inequalities", "--seed", "17", "--trials", "40",
            "--workers", str(workers), "--out", str(out),
        ])
        assert r1.exit_code == 0, r1.output
        r2 = runner.invoke(main, [
            "capacity", "chi", "--seed", "17", "--zoo", "identity",
            "--restarts", "3", "--max-iters", "200", "--out", str(out),
        ])
        assert r2.exit_code == 0, r2.output
        outs.append(out)
    a, b = outs
    rels = sorted(p.relative_to(a) for p in a.rglob("*.json"))
    same_tree = rels == sorted(p.relative_to(b) for p in b.rglob("*.json"))
    identical = same_tree and all((a / p).read_bytes() == (b / p).read_bytes() for p in rels)
    ok = identical and len(rels) > 8
    _line(7, ok, f"{len(rels)} report/witness files byte-identical across reruns and worker counts")


def test_criterion_8_entropy_units():
    max_err = 0.0
    for d in range(2, 9):
        max_err = max(max_err, abs(von_neumann(maximally_mixed(d)) - np.log2(d)))
    binary = DensityOperator(np.diag([0.25, 0.75]))
    scalar = -(0.25 * np.log2(0.25) + 0.75 * np.log2(0.75))
    max_err = max(max_err, abs(von_neumann(binary) - scalar))
    disjoint = relative_entropy(basis_state(2, 0).density(), basis_state(2, 1).density())
    ok = max_err <= 1e-12 and np.isposinf(disjoint)
    _line(8, ok, f"entropy unit error {max_err:.1e}, support-failure divergence = {disjoint}")
