"""Capacity quantities and bound checks: Holevo quantity, its optimization
over input ensembles, entanglement-assisted mutual-information optimization,
and the bound/additivity probes built on them.

Both optimizers do multi-start finite-difference gradient ascent with an
adaptive step and deterministic per-restart randomness; the selected result
is always the sequential best (max by value, earliest restart wins ties).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .linalg import ValidationError
from .qstate import DensityOperator, Ensemble, PureState, RngStream, make_density, pure_decompositions
from .channel import Channel, KrausChannel, as_kraus, tensor_channels
from .entropy import EIG_FLOOR, channel_mutual_information, relative_entropy, von_neumann

HOLEVO_FORM_ATOL = 1e-9
CAPACITY_BOUND_TOL = 1e-6
THEOREM_TOL = 1e-9
DIRECT_BOUND_TOL = 1e-3
ADDITIVITY_GAP_HIGH = 1e-3
ADDITIVITY_GAP_LOW = -1e-2
CONVERGENCE_SPREAD = 1e-4

EB_CE_BOUND = "Eq32-eb-ce-bound"
CE_CHI_BOUND = "Eq36-ce-chi-bound"
ADDITIVITY = "Eq23-additivity"


@dataclass(frozen=True)
class OptimizerConfig:
    """Knobs for the multi-start ascent.

    ``ensemble_size`` of None means d_in**2 pure states; ``obj_tol`` is the
    bits of objective improvement under which an ascent counts as converged.
    """

    seed: int = 0
    restarts: int = 20
    max_iters: int = 2000
    obj_tol: float = 1e-8
    fd_step: float = 1e-6
    ensemble_size: int | None = None
    init_step: float = 0.25
    step_grow: float = 1.6
    step_shrink: float = 0.5
    min_step: float = 1e-13

    def __post_init__(self):
        if self.restarts < 1 or self.max_iters < 1:
            raise ValidationError("restarts and max_iters must be positive")
        if min(self.obj_tol, self.fd_step, self.init_step, self.min_step) <= 0:
            raise ValidationError("step and tolerance settings must be positive")


@dataclass(frozen=True)
class CapacityEstimate:
    """Optimizer output: a lower-bound estimate plus its search history."""

    value: float
    kind: str
    restarts_used: int
    iterations: int
    converged: bool
    trace: tuple[float, ...]
    restart_values: tuple[float, ...]
    argmax_ensemble: Ensemble | None = None
    argmax_state: DensityOperator | None = None

    def to_doc(self) -> dict:
        from . import serialize

        argmax = self.argmax_ensemble if self.argmax_ensemble is not None else self.argmax_state
        return {
            "value": self.value,
            "kind": self.kind,
            "restarts_used": self.restarts_used,
            "iterations": self.iterations,
            "converged": self.converged,
            "trace": list(self.trace),
            "restart_values": list(self.restart_values),
            "argmax": None if argmax is None else serialize.to_doc(argmax),
        }


def holevo_quantity(ch: Channel, ens: Ensemble, floor: float = EIG_FLOOR) -> float:
    """Holevo quantity of the output ensemble, in bits.

    Computed two ways, as the average output relative entropy to the output
    mean and as output-mean entropy minus mean output entropy; the two must
    agree within 1e-9 or an ArithmeticError is raised.  The output mean
    dominates every member output (avg >= p_i out_i), so the divergences are
    finite; the relative-entropy support check is bypassed accordingly.
    """
    outs = [ch.apply(s) for s in ens.states]
    avg = ch.apply(ens.average())
    mean_entropy = 0.0
    divergence = 0.0
    for p, out in zip(ens.probs, outs):
        if p <= 1e-12:
            # weight too small to matter and liable to sit outside avg's support
            continue
        mean_entropy += p * von_neumann(out, floor=floor)
        divergence += p * relative_entropy(out, avg, floor=floor, kernel_tol=float("inf"))
    difference = von_neumann(avg, floor=floor) - mean_entropy
    if not np.isfinite(divergence) or abs(divergence - difference) > HOLEVO_FORM_ATOL:
        raise ArithmeticError(
            f"holevo forms disagree: divergence {divergence!r} vs entropy difference {difference!r}"
        )
    return difference


def _entropies_of_spectra(lams: np.ndarray, floor: float) -> np.ndarray:
    safe = np.where(lams > floor, lams, 1.0)
    vals = -(np.where(lams > floor, lams, 0.0) * np.log2(safe)).sum(axis=-1)
    return np.maximum(vals, 0.0)


def _fd_gradient(f, x: np.ndarray, fx: float, h: float) -> np.ndarray:
    g = np.empty_like(x)
    for i in range(x.size):
        orig = x[i]
        x[i] = orig + h
        g[i] = (f(x) - fx) / h
        x[i] = orig
    return g


def _ascend(f, x0: np.ndarray, cfg: OptimizerConfig) -> tuple[np.ndarray, float, int, tuple[float, ...], bool]:
    """Adaptive-step gradient ascent with forward differences.

    Returns (x, value, iterations, accepted-value trace, converged); accepted
    objective values are non-decreasing by construction.
    """
    x = np.array(x0, dtype=float)
    fx = f(x)
    trace = [fx]
    step = cfg.init_step
    small_gains = 0
    it = 0
    for it in range(1, cfg.max_iters + 1):
        g = _fd_gradient(f, x, fx, cfg.fd_step)
        norm = float(np.linalg.norm(g))
        if not np.isfinite(norm) or norm == 0.0:
            return x, fx, it, tuple(trace), True
        direction = g / norm
        gain = 0.0
        improved = False
        while step >= cfg.min_step:
            cand = x + step * direction
            fc = f(cand)
            if fc > fx:
                gain = fc - fx
                x, fx = cand, fc
                trace.append(fx)
                step *= cfg.step_grow
                improved = True
                break
            step *= cfg.step_shrink
        if not improved:
            return x, fx, it, tuple(trace), True
        if gain < cfg.obj_tol:
            small_gains += 1
            if small_gains >= 2:
                return x, fx, it, tuple(trace), True
        else:
            small_gains = 0
    return x, fx, it, tuple(trace), False


def _softmax(logits: np.ndarray) -> np.ndarray:
    w = np.exp(logits - logits.max())
    return w / w.sum()


def _chi_objective(stack: np.ndarray, m: int, d_in: int, floor: float = EIG_FLOOR):
    nv = 2 * m * d_in

    def f(x: np.ndarray) -> float:
        parts = x[:nv].reshape(m, d_in, 2)
        vecs = parts[..., 0] + 1j * parts[..., 1]
        norms = np.maximum(np.linalg.norm(vecs, axis=1), 1e-150)
        psis = vecs / norms[:, None]
        probs = _softmax(x[nv:])
        branch = np.einsum("kab,mb->mka", stack, psis)
        outs = np.einsum("mka,mkb->mab", branch, branch.conj())
        avg = np.einsum("m,mab->ab", probs, outs)
        lams = np.linalg.eigvalsh(np.concatenate([outs, avg[None]], axis=0))
        entropies = _entropies_of_spectra(lams, floor)
        return float(entropies[-1] - probs @ entropies[:-1])

    return f


def _ensemble_params(ens: Ensemble, d_in: int) -> tuple[np.ndarray, int]:
    from .qstate import _dominant_eigenvector

    m = ens.size
    x = np.empty(2 * m * d_in + m)
    parts = x[: 2 * m * d_in].reshape(m, d_in, 2)
    for j, s in enumerate(ens.states):
        v = _dominant_eigenvector(s, f"seed ensemble member {j}")
        parts[j, :, 0] = v.real
        parts[j, :, 1] = v.imag
    x[2 * m * d_in:] = np.log(np.maximum(ens.probs, 1e-12))
    return x, m


def _params_ensemble(x: np.ndarray, m: int, d_in: int) -> Ensemble:
    nv = 2 * m * d_in
    parts = x[:nv].reshape(m, d_in, 2)
    vecs = parts[..., 0] + 1j * parts[..., 1]
    norms = np.maximum(np.linalg.norm(vecs, axis=1), 1e-150)
    psis = vecs / norms[:, None]
    states = tuple(PureState(v, (d_in,)).density() for v in psis)
    return Ensemble(_softmax(x[nv:]), states)


def optimize_chi(
    ch: Channel,
    cfg: OptimizerConfig = OptimizerConfig(),
    seeds: Sequence[Ensemble] = (),
) -> CapacityEstimate:
    """Maximize the Holevo quantity over ensembles of pure input states.

    Parameters are unnormalized complex vectors (normalized on evaluation)
    plus logits mapped to the simplex; ``seeds`` run as extra leading
    restarts.  The value is a lower bound on the one-shot Holevo capacity.
    """
    k = as_kraus(ch)
    stack = k.stack()
    d_in = k.d_in
    m_default = cfg.ensemble_size if cfg.ensemble_size is not None else d_in * d_in
    if m_default < 1:
        raise ValidationError("ensemble size must be positive")

    starts: list[tuple[np.ndarray, int]] = [_ensemble_params(s, d_in) for s in seeds]
    for r in range(cfg.restarts):
        gen = RngStream(cfg.seed, r).generator()
        x0 = np.empty(2 * m_default * d_in + m_default)
        x0[: 2 * m_default * d_in] = gen.standard_normal(2 * m_default * d_in)
        x0[2 * m_default * d_in:] = 0.5 * gen.standard_normal(m_default)
        starts.append((x0, m_default))

    best = None
    finals = []
    total_iters = 0
    for x0, m in starts:
        f = _chi_objective(stack, m, d_in)
        x, val, iters, trace, ok = _ascend(f, x0, cfg)
        finals.append(val)
        total_iters += iters
        if best is None or val > best[0]:
            best = (val, x, m, trace, ok)

    value, x, m, trace, ok = best
    if value < -THEOREM_TOL or value > np.log2(k.d_out) + CAPACITY_BOUND_TOL:
        raise ArithmeticError(f"holevo estimate {value!r} escapes [0, log2 d_out]")
    ranked = sorted(finals, reverse=True)
    agreed = len(finals) >= 2 and ranked[0] - ranked[1] <= CONVERGENCE_SPREAD
    return CapacityEstimate(
        value=float(max(value, 0.0)),
        kind="holevo-lower-bound",
        restarts_used=len(starts),
        iterations=total_iters,
        converged=bool(ok and (agreed or len(finals) == 1)),
        trace=trace,
        restart_values=tuple(finals),
        argmax_ensemble=_params_ensemble(x, m, d_in),
    )


def _ce_objective(stack: np.ndarray, ext_stack: np.ndarray, d: int, floor: float = EIG_FLOOR):
    def f(x: np.ndarray) -> float:
        parts = x.reshape(d, d, 2)
        ell = parts[..., 0] + 1j * parts[..., 1]
        weight = float((np.abs(ell) ** 2).sum())
        if weight < 1e-280:
            return float("-inf")
        rho = (ell @ ell.conj().T) / weight
        psi = ell.ravel() / np.sqrt(weight)
        out = np.einsum("kab,bc,kdc->ad", stack, rho, stack.conj())
        branch = np.einsum("kab,b->ka", ext_stack, psi)
        joint = np.einsum("ka,kb->ab", branch, branch.conj())
        lams_small = np.linalg.eigvalsh(np.stack([rho, out]))
        s_in, s_out = _entropies_of_spectra(lams_small, floor)
        s_joint = _entropies_of_spectra(np.linalg.eigvalsh(joint)[None, :], floor)[0]
        return float(s_in + s_out - s_joint)

    return f


def optimize_ce(ch: Channel, cfg: OptimizerConfig = OptimizerConfig()) -> CapacityEstimate:
    """Maximize input entropy + output entropy - joint output entropy over
    input states rho = L L^dagger / Tr(L L^dagger).

    Restart 0 starts from L = I (the maximally mixed input); the rest are
    random.  The objective is concave in rho, so multi-start agreement within
    1e-4 is required for converged.  Square channels only.
    """
    k = as_kraus(ch)
    if k.d_in != k.d_out:
        raise ValidationError(f"entanglement-assisted optimization needs a square channel, got {k.d_in} -> {k.d_out}")
    d = k.d_in
    stack = k.stack()
    eye = np.eye(d)
    ext_stack = np.stack([np.kron(op, eye) for op in k.kraus])
    f = _ce_objective(stack, ext_stack, d)

    starts = []
    x_eye = np.zeros((d, d, 2))
    x_eye[..., 0] = np.eye(d)
    starts.append(x_eye.ravel())
    for r in range(1, cfg.restarts):
        gen = RngStream(cfg.seed, r).generator()
        starts.append(gen.standard_normal(2 * d * d))

    best = None
    finals = []
    total_iters = 0
    for x0 in starts:
        x, val, iters, trace, ok = _ascend(f, x0, cfg)
        finals.append(val)
        total_iters += iters
        if best is None or val > best[0]:
            best = (val, x, trace, ok)

    value, x, trace, ok = best
    if value < -THEOREM_TOL or value > 2 * np.log2(d) + CAPACITY_BOUND_TOL:
        raise ArithmeticError(f"mutual-information estimate {value!r} escapes [0, 2 log2 d]")
    parts = x.reshape(d, d, 2)
    ell = parts[..., 0] + 1j * parts[..., 1]
    rho = ell @ ell.conj().T
    rho /= np.trace(rho).real
    ranked = sorted(finals, reverse=True)
    agreed = len(finals) >= 2 and ranked[0] - ranked[1] <= CONVERGENCE_SPREAD
    return CapacityEstimate(
        value=float(max(value, 0.0)),
        kind="entanglement-assisted",
        restarts_used=len(starts),
        iterations=total_iters,
        converged=bool(ok and (agreed or len(finals) == 1)),
        trace=trace,
        restart_values=tuple(finals),
        argmax_state=make_density(rho),
    )


def _check_result(name: str, lhs: float, rhs: float, tol: float, extras: dict, passed: bool):
    from .inequalities import CheckResult

    return CheckResult(name, float(lhs), float(rhs), float(rhs - lhs), bool(passed), tol, extras)


def check_eb_ce_bound(ch, cfg: OptimizerConfig = OptimizerConfig()):
    """Entanglement assistance cannot beat log2 d on a measure-and-prepare
    channel; also checks that at the found argmax both the input entropy and
    the output entropy stay below the joint output entropy."""
    from .channel import MeasurePrepareChannel

    if not isinstance(ch, MeasurePrepareChannel):
        raise ValidationError("the bound is a measure-and-prepare statement; pass that channel form")
    from .qstate import purify
    from .channel import extend_right

    est = optimize_ce(ch, cfg)
    k = as_kraus(ch)
    rho = est.argmax_state
    s_in = von_neumann(rho)
    s_out = von_neumann(k.apply(rho))
    psi = purify(rho)
    omega = extend_right(k, rho.dim).apply(psi.density(), out_dims=(k.d_out, rho.dim))
    s_joint = von_neumann(omega)
    lhs = est.value
    rhs = float(np.log2(k.d_in))
    extras = {
        "joint_minus_output_entropy": s_joint - s_out,
        "joint_minus_input_entropy": s_joint - s_in,
        "converged": float(est.converged),
    }
    passed = (
        rhs - lhs >= -CAPACITY_BOUND_TOL
        and extras["joint_minus_output_entropy"] >= -THEOREM_TOL
        and extras["joint_minus_input_entropy"] >= -THEOREM_TOL
    )
    return _check_result(EB_CE_BOUND, lhs, rhs, CAPACITY_BOUND_TOL, extras, passed)


def check_ce_chi_bound(ch, cfg: OptimizerConfig = OptimizerConfig()):
    """Entanglement-assisted value against log2 d + Holevo quantity.

    Primary (theorem-level) check: at the entanglement-assisted argmax rho,
    mutual information <= log2 d + holevo(eigendecomposition of rho), with
    every term computed directly.  The optimizer-vs-optimizer comparison is
    recorded in extras with a looser 1e-3 margin.
    """
    k = as_kraus(ch)
    if k.d_in != k.d_out:
        raise ValidationError("the bound comparison needs a square channel")
    ce = optimize_ce(ch, cfg)
    rho = ce.argmax_state
    decomp = pure_decompositions(rho)
    lhs = channel_mutual_information(rho, k)
    rhs = float(np.log2(k.d_in)) + holevo_quantity(k, decomp)
    chi = optimize_chi(ch, cfg)
    direct_slack = chi.value + float(np.log2(k.d_in)) - ce.value
    extras = {
        "direct_ce": ce.value,
        "direct_chi": chi.value,
        "direct_slack": direct_slack,
    }
    passed = (rhs - lhs >= -THEOREM_TOL) and direct_slack >= -DIRECT_BOUND_TOL
    return _check_result(CE_CHI_BOUND, lhs, rhs, THEOREM_TOL, extras, passed)


def _product_ensemble(a: Ensemble, b: Ensemble) -> Ensemble:
    probs = np.outer(a.probs, b.probs).ravel()
    states = []
    for sa in a.states:
        for sb in b.states:
            states.append(make_density(np.kron(sa.matrix, sb.matrix)))
    return Ensemble(probs, tuple(states))


def additivity_probe(
    eb_channel,
    other: Channel,
    cfg: OptimizerConfig = OptimizerConfig(),
    tensor_restarts: int | None = None,
):
    """Estimate chi(other x eb) - chi(other) - chi(eb).

    The tensor run allows entangled input ensembles and is seeded with the
    product of the factor argmax ensembles, so it starts at least at the
    product strategy; a gap above 1e-3 would contradict additivity for a
    measure-and-prepare factor, a gap below -1e-2 flags non-convergence.
    """
    from .channel import MeasurePrepareChannel

    if not isinstance(eb_channel, MeasurePrepareChannel):
        raise ValidationError("additivity probe needs a measure-and-prepare first factor")
    ka, kb = as_kraus(other), as_kraus(eb_channel)
    if ka.d_in * kb.d_in > 9:
        raise ValidationError(f"tensor input dimension {ka.d_in * kb.d_in} exceeds the supported 9")
    est_other = optimize_chi(other, cfg)
    est_eb = optimize_chi(eb_channel, cfg)
    seed_ens = _product_ensemble(est_other.argmax_ensemble, est_eb.argmax_ensemble)
    tensor = tensor_channels(ka, kb)
    t_restarts = tensor_restarts if tensor_restarts is not None else max(2, cfg.restarts // 5)
    t_cfg = replace(cfg, restarts=t_restarts)
    est_tensor = optimize_chi(tensor, t_cfg, seeds=(seed_ens,))
    gap = est_tensor.value - est_other.value - est_eb.value
    extras = {
        "chi_tensor": est_tensor.value,
        "chi_other": est_other.value,
        "chi_eb": est_eb.value,
        "gap": gap,
    }
    passed = ADDITIVITY_GAP_LOW <= gap <= ADDITIVITY_GAP_HIGH
    return _check_result(
        ADDITIVITY, est_tensor.value, est_other.value + est_eb.value, ADDITIVITY_GAP_HIGH, extras, passed
    )
