"""Entropy-inequality checkers and the randomized fuzzing campaign.

Every checker returns a CheckResult with slack = rhs - lhs, where the
inequality asserts lhs <= rhs; pass means slack >= -tol.  Infinite values
follow one convention: an infinite rhs passes automatically, an infinite
lhs against a finite rhs fails.

Check names carry stable equation labels (for example
"Eq13-strong-concavity") so report rows are traceable across runs.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Sequence

import numpy as np

from . import serialize
from .linalg import ValidationError
from .qstate import (
    DensityOperator,
    Ensemble,
    RngStream,
    ginibre,
    make_density,
    pure_decompositions,
    purify,
    random_density,
    random_probs,
)
from .channel import Channel, as_kraus, extend_right, random_channel
from .entropy import (
    EIG_FLOOR,
    channel_mutual_information,
    conditional_entropy,
    relative_entropy,
    von_neumann,
)

DEFAULT_TOL = 1e-9
DEFAULT_MIN_SLACK = -1e-9

MONOTONICITY_CPTP = "Eq3-monotonicity-cptp"
MONOTONICITY_PT = "Eq4-monotonicity-partial-trace"
SSA_I = "Eq5I-strong-subadditivity-I"
SSA_II = "Eq5II-strong-subadditivity-II"
JOINT_CONVEXITY = "Eq6-joint-convexity"
CONDITIONAL_CONCAVITY = "Eq7-conditional-entropy-concavity"
STRONG_CONCAVITY = "Eq13-strong-concavity"
PURIFICATION_DECOMPOSITION = "Eq35-purification-decomposition"

CORE_NAMES = (
    MONOTONICITY_CPTP,
    MONOTONICITY_PT,
    SSA_I,
    SSA_II,
    JOINT_CONVEXITY,
    CONDITIONAL_CONCAVITY,
    STRONG_CONCAVITY,
)
ALL_NAMES = CORE_NAMES + (PURIFICATION_DECOMPOSITION,)


@dataclass(frozen=True)
class CheckResult:
    """One inequality evaluation: lhs <= rhs with slack = rhs - lhs."""

    name: str
    lhs: float
    rhs: float
    slack: float
    passed: bool
    tol: float = DEFAULT_TOL
    extras: dict = field(default_factory=dict)
    witness: dict | None = None

    def to_doc(self) -> dict:
        return {
            "name": self.name,
            "lhs": serialize._finite(self.lhs),
            "rhs": serialize._finite(self.rhs),
            "slack": serialize._finite(self.slack),
            "passed": self.passed,
            "tol": self.tol,
            "extras": {k: serialize._finite(v) for k, v in sorted(self.extras.items())},
        }


def _result(name: str, lhs: float, rhs: float, tol: float, extras: dict | None = None) -> CheckResult:
    lhs, rhs = float(lhs), float(rhs)
    if np.isinf(rhs):
        slack, passed = float("inf"), True
    elif np.isinf(lhs):
        slack, passed = float("-inf"), False
    else:
        slack = rhs - lhs
        passed = slack >= -tol
    return CheckResult(name, lhs, rhs, slack, passed, tol, extras or {})


def check_monotonicity_cptp(
    rho: DensityOperator,
    sigma: DensityOperator,
    ch: Channel,
    tol: float = DEFAULT_TOL,
    floor: float = EIG_FLOOR,
) -> CheckResult:
    """Relative entropy never increases under a channel."""
    lhs = relative_entropy(ch.apply(rho), ch.apply(sigma), floor=floor)
    rhs = relative_entropy(rho, sigma, floor=floor)
    return _result(MONOTONICITY_CPTP, lhs, rhs, tol)


def check_monotonicity_partial_trace(
    rho: DensityOperator,
    sigma: DensityOperator,
    dims: tuple[int, ...] | None = None,
    tol: float = DEFAULT_TOL,
    floor: float = EIG_FLOOR,
) -> CheckResult:
    """Relative entropy never increases when a subsystem is discarded."""
    if dims is not None:
        rho, sigma = rho.with_dims(dims), sigma.with_dims(dims)
    if rho.dims != sigma.dims or len(rho.dims) != 2:
        raise ValidationError("need two states with one shared bipartite signature")
    lhs = relative_entropy(rho.reduced(0), sigma.reduced(0), floor=floor)
    rhs = relative_entropy(rho, sigma, floor=floor)
    return _result(MONOTONICITY_PT, lhs, rhs, tol)


def check_ssa_I(
    rho: DensityOperator,
    dims: tuple[int, ...] | None = None,
    tol: float = DEFAULT_TOL,
    floor: float = EIG_FLOOR,
) -> CheckResult:
    """S(A) + S(B) <= S(AC) + S(BC) for a tripartite state."""
    if dims is not None:
        rho = rho.with_dims(dims)
    if len(rho.dims) != 3:
        raise ValidationError(f"need a tripartite signature, got {rho.dims}")
    lhs = von_neumann(rho.reduced(0), floor=floor) + von_neumann(rho.reduced(1), floor=floor)
    rhs = von_neumann(rho.reduced((0, 2)), floor=floor) + von_neumann(rho.reduced((1, 2)), floor=floor)
    return _result(SSA_I, lhs, rhs, tol)


def check_ssa_II(
    rho: DensityOperator,
    dims: tuple[int, ...] | None = None,
    tol: float = DEFAULT_TOL,
    floor: float = EIG_FLOOR,
) -> CheckResult:
    """S(ABC) + S(B) <= S(AB) + S(BC) for a tripartite state."""
    if dims is not None:
        rho = rho.with_dims(dims)
    if len(rho.dims) != 3:
        raise ValidationError(f"need a tripartite signature, got {rho.dims}")
    lhs = von_neumann(rho, floor=floor) + von_neumann(rho.reduced(1), floor=floor)
    rhs = von_neumann(rho.reduced((0, 1)), floor=floor) + von_neumann(rho.reduced((1, 2)), floor=floor)
    return _result(SSA_II, lhs, rhs, tol)


def check_joint_convexity(
    rhos: Ensemble,
    sigmas: Ensemble,
    tol: float = DEFAULT_TOL,
    floor: float = EIG_FLOOR,
) -> CheckResult:
    """S(sum p rho_i || sum p sigma_i) <= sum p S(rho_i || sigma_i), shared weights."""
    if rhos.size != sigmas.size or rhos.dims != sigmas.dims:
        raise ValidationError("the two ensembles must pair up member for member")
    if not np.allclose(rhos.probs, sigmas.probs, atol=1e-12):
        raise ValidationError("joint convexity needs one shared weight vector")
    lhs = relative_entropy(rhos.average(), sigmas.average(), floor=floor)
    rhs = 0.0
    for p, r, s in zip(rhos.probs, rhos.states, sigmas.states):
        term = relative_entropy(r, s, floor=floor)
        if np.isinf(term):
            rhs = float("inf")
            break
        rhs += p * term
    return _result(JOINT_CONVEXITY, lhs, rhs, tol)


def check_concavity_conditional(
    ens: Ensemble,
    tol: float = DEFAULT_TOL,
    floor: float = EIG_FLOOR,
) -> CheckResult:
    """Conditional entropy of the mixture dominates the mixture of conditional entropies."""
    if len(ens.dims) != 2:
        raise ValidationError(f"need bipartite members, got signature {ens.dims}")
    lhs = sum(p * conditional_entropy(s, floor=floor) for p, s in zip(ens.probs, ens.states))
    rhs = conditional_entropy(ens.average(), floor=floor)
    return _result(CONDITIONAL_CONCAVITY, lhs, rhs, tol)


def check_strong_concavity(
    probs,
    rhos_a: Sequence[DensityOperator],
    rhos_b: Sequence[DensityOperator],
    tol: float = DEFAULT_TOL,
    floor: float = EIG_FLOOR,
) -> CheckResult:
    """Entropy of sum_i p_i rho_A^i x rho_B^i dominates both one-sided mixtures.

    lhs is the max of (sum p S(A_i) + S(sum p B_i)) and its mirror; the two
    one-sided slacks are reported in extras.
    """
    p = np.asarray(probs, dtype=float)
    if p.size != len(rhos_a) or p.size != len(rhos_b) or p.size == 0:
        raise ValidationError("need one weight per state pair")
    da, db = rhos_a[0].dim, rhos_b[0].dim
    joint = sum(
        w * np.kron(a.matrix, b.matrix) for w, a, b in zip(p, rhos_a, rhos_b)
    )
    rhs = von_neumann(DensityOperator(joint, (da, db)), floor=floor)
    avg_a = DensityOperator(sum(w * a.matrix for w, a in zip(p, rhos_a)), (da,))
    avg_b = DensityOperator(sum(w * b.matrix for w, b in zip(p, rhos_b)), (db,))
    mean_sa = float(sum(w * von_neumann(a, floor=floor) for w, a in zip(p, rhos_a)))
    mean_sb = float(sum(w * von_neumann(b, floor=floor) for w, b in zip(p, rhos_b)))
    side_a = mean_sa + von_neumann(avg_b, floor=floor)
    side_b = mean_sb + von_neumann(avg_a, floor=floor)
    extras = {"slack_mixed_b": rhs - side_a, "slack_mixed_a": rhs - side_b}
    return _result(STRONG_CONCAVITY, max(side_a, side_b), rhs, tol, extras)


def check_purification_decomposition(
    rho: DensityOperator,
    decomp: Ensemble,
    ch: Channel,
    tol: float = DEFAULT_TOL,
    floor: float = EIG_FLOOR,
) -> CheckResult:
    """Global output entropy of a purification dominates the decomposition
    average of member output entropies: sum_j q_j S(ch(psi_j)) <= S((ch x Id) psi)."""
    recon = decomp.average()
    if rho.dim != recon.dim or float(np.abs(recon.matrix - rho.matrix).max()) > 1e-8:
        raise ValidationError("the ensemble does not decompose the given state")
    k = as_kraus(ch)
    lhs = float(sum(q * von_neumann(k.apply(s), floor=floor) for q, s in zip(decomp.probs, decomp.states)))
    psi = purify(rho if len(rho.dims) == 1 else rho.with_dims((rho.dim,)))
    omega = extend_right(k, rho.dim).apply(psi.density(), out_dims=(k.d_out, rho.dim))
    rhs = von_neumann(omega, floor=floor)
    return _result(PURIFICATION_DECOMPOSITION, lhs, rhs, tol)


# ---------------------------------------------------------------------------
# fuzzing campaign


@dataclass(frozen=True)
class FuzzConfig:
    """Campaign settings.  ``min_slack`` is the smallest accepted slack; a
    trial fails when its slack drops below it (default -1e-9)."""

    seed: int
    trials: int = 1000
    dims: tuple[int, ...] = (2, 3, 4)
    max_members: int = 5
    min_slack: float = DEFAULT_MIN_SLACK
    witness_keep: int = 10
    workers: int = 1
    out_dir: str | None = None
    inequalities: tuple[str, ...] = CORE_NAMES

    def __post_init__(self):
        if self.trials < 1:
            raise ValidationError("trials must be positive")
        if not self.dims or min(self.dims) < 2 or max(self.dims) > 4:
            raise ValidationError(f"fuzz dims must lie in [2, 4], got {self.dims}")
        unknown = [n for n in self.inequalities if n not in ALL_NAMES]
        if unknown:
            raise ValidationError(f"unknown inequalities: {unknown}; known: {list(ALL_NAMES)}")
        if self.workers < 1:
            raise ValidationError("workers must be positive")


@dataclass(frozen=True)
class FuzzReport:
    """Aggregate of one inequality's campaign.  min/mean slack are over the
    finite slacks; auto_passes counts trials with infinite rhs."""

    inequality: str
    seed: int
    trials: int
    failures: int
    auto_passes: int
    min_slack: float | None
    mean_slack: float | None
    min_slack_trial: int | None
    witnesses: tuple[str, ...]
    min_slack_accepted: float

    def to_doc(self) -> dict:
        return {
            "inequality": self.inequality,
            "seed": self.seed,
            "trials": self.trials,
            "failures": self.failures,
            "auto_passes": self.auto_passes,
            "min_slack": self.min_slack,
            "mean_slack": self.mean_slack,
            "min_slack_trial": self.min_slack_trial,
            "witnesses": list(self.witnesses),
            "min_slack_accepted": self.min_slack_accepted,
        }


def _rand_state(gen, dim: int, dims=None) -> DensityOperator:
    rank = int(gen.integers(1, dim + 1))
    state = random_density(dim, gen, rank=rank)
    return state if dims is None else state.with_dims(dims)


def _rand_channel(gen, d_in: int, d_out: int | None = None) -> "Channel":
    dout = d_in if d_out is None else d_out
    count = int(gen.integers(1, d_in * dout + 1))
    return random_channel(d_in, dout, count, gen)


def _rand_divergence_pair(gen, dim: int, dims=None):
    """Arguments for a relative entropy.  Independent states almost surely
    have non-nested supports when sigma is rank deficient, which makes the
    divergence infinite and the trial vacuous; three draws out of four we
    therefore force supp(rho) inside supp(sigma), keeping rank-deficient
    sigma in play with a finite rhs."""
    if gen.random() < 0.25:
        rho, sigma = _rand_state(gen, dim), _rand_state(gen, dim)
    else:
        s = int(gen.integers(1, dim + 1))
        if s == dim:
            rho, sigma = _rand_state(gen, dim), random_density(dim, gen, rank=dim)
        else:
            v = np.linalg.qr(ginibre(gen, dim, s))[0]
            tau_r = random_density(s, gen, rank=int(gen.integers(1, s + 1)))
            tau_s = random_density(s, gen, rank=s)
            rho = make_density(v @ tau_r.matrix @ v.conj().T)
            sigma = make_density(v @ tau_s.matrix @ v.conj().T)
    if dims is not None:
        rho, sigma = rho.with_dims(dims), sigma.with_dims(dims)
    return rho, sigma


def _sample_monotonicity_cptp(gen, cfg, tol, floor):
    d = int(gen.choice(cfg.dims))
    rho, sigma = _rand_divergence_pair(gen, d)
    ch = _rand_channel(gen, d)
    result = check_monotonicity_cptp(rho, sigma, ch, tol=tol, floor=floor)
    witness = {"rho": serialize.to_doc(rho), "sigma": serialize.to_doc(sigma), "channel": serialize.to_doc(ch)}
    return result, witness


def _sample_monotonicity_pt(gen, cfg, tol, floor):
    da, dc = (int(gen.choice(cfg.dims)) for _ in range(2))
    sig = (da, dc)
    rho, sigma = _rand_divergence_pair(gen, da * dc, sig)
    result = check_monotonicity_partial_trace(rho, sigma, tol=tol, floor=floor)
    witness = {"rho": serialize.to_doc(rho), "sigma": serialize.to_doc(sigma)}
    return result, witness


def _sample_tripartite(checker):
    def sample(gen, cfg, tol, floor):
        sig = tuple(int(gen.choice(cfg.dims)) for _ in range(3))
        total = int(np.prod(sig))
        rho = _rand_state(gen, total, sig)
        result = checker(rho, tol=tol, floor=floor)
        return result, {"rho": serialize.to_doc(rho)}

    return sample


def _sample_joint_convexity(gen, cfg, tol, floor):
    d = int(gen.choice(cfg.dims))
    k = int(gen.integers(1, cfg.max_members + 1))
    probs = random_probs(k, gen)
    rhos, sigmas = [], []
    for _ in range(k):
        r = _rand_state(gen, d)
        s = _rand_state(gen, d)
        # joint convexity is vacuous with infinite member terms; resample sigma
        while np.isinf(relative_entropy(r, s, floor=floor)):
            s = _rand_state(gen, d)
        rhos.append(r)
        sigmas.append(s)
    ens_r = Ensemble(probs, tuple(rhos))
    ens_s = Ensemble(probs, tuple(sigmas))
    result = check_joint_convexity(ens_r, ens_s, tol=tol, floor=floor)
    witness = {"rhos": serialize.to_doc(ens_r), "sigmas": serialize.to_doc(ens_s)}
    return result, witness


def _sample_conditional_concavity(gen, cfg, tol, floor):
    da, db = (int(gen.choice(cfg.dims)) for _ in range(2))
    k = int(gen.integers(1, cfg.max_members + 1))
    ens = Ensemble(
        random_probs(k, gen),
        tuple(_rand_state(gen, da * db, (da, db)) for _ in range(k)),
    )
    result = check_concavity_conditional(ens, tol=tol, floor=floor)
    return result, {"ensemble": serialize.to_doc(ens)}


def _sample_strong_concavity(gen, cfg, tol, floor):
    da, db = (int(gen.choice(cfg.dims)) for _ in range(2))
    k = int(gen.integers(1, cfg.max_members + 1))
    probs = random_probs(k, gen)
    rhos_a = tuple(_rand_state(gen, da) for _ in range(k))
    rhos_b = tuple(_rand_state(gen, db) for _ in range(k))
    result = check_strong_concavity(probs, rhos_a, rhos_b, tol=tol, floor=floor)
    witness = {
        "probs": [float(p) for p in probs],
        "rhos_a": [serialize.to_doc(s) for s in rhos_a],
        "rhos_b": [serialize.to_doc(s) for s in rhos_b],
    }
    return result, witness


def _sample_purification_decomposition(gen, cfg, tol, floor):
    allowed = [d for d in cfg.dims if d <= 3] or [2]
    d = int(gen.choice(allowed))
    rank = int(gen.integers(1, d + 1))
    rho = random_density(d, gen, rank=rank)
    size = int(gen.integers(rank, d + 2))
    decomp = pure_decompositions(rho, gen, size=size)
    ch = _rand_channel(gen, d)
    result = check_purification_decomposition(rho, decomp, ch, tol=tol, floor=floor)
    witness = {
        "rho": serialize.to_doc(rho),
        "decomposition": serialize.to_doc(decomp),
        "channel": serialize.to_doc(ch),
    }
    return result, witness


SAMPLERS: dict[str, Callable] = {
    MONOTONICITY_CPTP: _sample_monotonicity_cptp,
    MONOTONICITY_PT: _sample_monotonicity_pt,
    SSA_I: _sample_tripartite(check_ssa_I),
    SSA_II: _sample_tripartite(check_ssa_II),
    JOINT_CONVEXITY: _sample_joint_convexity,
    CONDITIONAL_CONCAVITY: _sample_conditional_concavity,
    STRONG_CONCAVITY: _sample_strong_concavity,
    PURIFICATION_DECOMPOSITION: _sample_purification_decomposition,
}


def run_trial(name: str, cfg: FuzzConfig, trial: int, floor: float = EIG_FLOOR):
    """One deterministic trial: the RNG stream depends only on (seed, inequality, trial)."""
    registry_index = ALL_NAMES.index(name)
    gen = RngStream(cfg.seed, registry_index).child(trial).generator()
    tol = -cfg.min_slack
    return SAMPLERS[name](gen, cfg, tol, floor)


def run_fuzz(cfg: FuzzConfig) -> list[FuzzReport]:
    """Run the campaign; returns one report per configured inequality.

    Trials use independent per-trial RNG streams and are aggregated in trial
    order, so reports are identical for any worker count.  When ``out_dir``
    is set, reports land in reports/<inequality>/<seed>.json and retained
    witnesses in witnesses/<inequality>/<seed>-t<trial>.json.
    """
    reports = []
    for name in cfg.inequalities:
        def one(trial: int):
            return run_trial(name, cfg, trial)

        if cfg.workers > 1:
            with ThreadPoolExecutor(max_workers=cfg.workers) as pool:
                outcomes = list(pool.map(one, range(cfg.trials)))
        else:
            outcomes = [one(t) for t in range(cfg.trials)]

        failures = sum(1 for r, _ in outcomes if not r.passed)
        finite = [(r.slack, t) for t, (r, _) in enumerate(outcomes) if np.isfinite(r.slack)]
        auto_passes = sum(1 for r, _ in outcomes if r.passed and np.isinf(r.slack))
        if finite:
            min_slack, min_trial = min(finite)
            mean_slack = float(np.mean([s for s, _ in finite]))
        else:
            min_slack, min_trial, mean_slack = None, None, None

        by_slack = sorted(range(cfg.trials), key=lambda t: (_slack_key(outcomes[t][0].slack), t))
        keep = set(by_slack[: cfg.witness_keep])
        keep.update(t for t in range(cfg.trials) if not outcomes[t][0].passed)
        keep = sorted(keep)

        witness_paths = []
        if cfg.out_dir is not None:
            base = Path(cfg.out_dir)
            for t in keep:
                result, inputs = outcomes[t]
                rel = f"witnesses/{name}/{cfg.seed}-t{t}.json"
                serialize.save_json(base / rel, {"trial": t, "result": result.to_doc(), "inputs": inputs})
                witness_paths.append(rel)
        else:
            witness_paths = [f"trial:{t}" for t in keep]

        report = FuzzReport(
            inequality=name,
            seed=cfg.seed,
            trials=cfg.trials,
            failures=failures,
            auto_passes=auto_passes,
            min_slack=min_slack,
            mean_slack=mean_slack,
            min_slack_trial=min_trial,
            witnesses=tuple(witness_paths),
            min_slack_accepted=cfg.min_slack,
        )
        if cfg.out_dir is not None:
            serialize.save_json(Path(cfg.out_dir) / "reports" / name / f"{cfg.seed}.json", report.to_doc())
        reports.append(report)
    return reports


def _slack_key(slack: float) -> float:
    if np.isnan(slack):
        return float("inf")
    return slack
