"""Quantum channels: Kraus form, measure-and-prepare form, tensor products,
identity extensions, Choi matrices, random sampling, and a small zoo.

When a channel is tensored or extended, it always acts on the first
(most significant) factor unless stated otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from . import linalg
from .linalg import ValidationError
from .qstate import DensityOperator, RngStream, _rng, ginibre, make_density, random_density

COMPLETENESS_ATOL = 1e-9
POVM_PSD_ATOL = 1e-10
POVM_SUM_ATOL = 1e-9
SPECTRUM_FLOOR = 1e-12
PPT_ATOL = 1e-9


@dataclass(frozen=True)
class KrausChannel:
    """Completely positive trace-preserving map given by Kraus operators."""

    kraus: tuple[np.ndarray, ...]

    def __post_init__(self):
        ops = tuple(linalg.as_matrix(k) for k in self.kraus)
        if not ops:
            raise ValidationError("a channel needs at least one Kraus operator")
        shape = ops[0].shape
        if any(k.shape != shape for k in ops):
            raise ValidationError("Kraus operators have mismatched shapes")
        stack = np.stack(ops)
        ident = np.einsum("kba,kbc->ac", stack.conj(), stack)
        defect = float(np.abs(ident - np.eye(shape[1])).max())
        if defect > COMPLETENESS_ATOL:
            raise ValidationError(
                f"Kraus completeness defect max |sum K^dagger K - I| = {defect:.3e} exceeds {COMPLETENESS_ATOL:.0e}"
            )
        stack.setflags(write=False)
        object.__setattr__(self, "kraus", tuple(stack))
        object.__setattr__(self, "_stack", stack)

    @property
    def d_in(self) -> int:
        return self.kraus[0].shape[1]

    @property
    def d_out(self) -> int:
        return self.kraus[0].shape[0]

    def stack(self) -> np.ndarray:
        """All Kraus operators as one (count, d_out, d_in) array."""
        return self._stack  # type: ignore[attr-defined]

    def apply_matrix(self, mat: np.ndarray) -> np.ndarray:
        """Raw action sum_k K mat K^dagger without output validation."""
        s = self.stack()
        return np.einsum("kab,bc,kdc->ad", s, mat, s.conj())

    def apply(self, rho: DensityOperator, out_dims: Sequence[int] | None = None) -> DensityOperator:
        if rho.dim != self.d_in:
            raise ValidationError(f"channel expects dimension {self.d_in}, state has {rho.dim}")
        out = self.apply_matrix(rho.matrix)
        return make_density(out, (self.d_out,) if out_dims is None else tuple(out_dims))


@dataclass(frozen=True)
class MeasurePrepareChannel:
    """Measure a POVM, prepare a fixed output state per outcome."""

    povm: tuple[np.ndarray, ...]
    outputs: tuple[DensityOperator, ...]

    def __post_init__(self):
        elements = tuple(linalg.require_hermitian(m, what="POVM element") for m in self.povm)
        outputs = tuple(self.outputs)
        if not elements or len(elements) != len(outputs):
            raise ValidationError("need equally many POVM elements and output states, at least one each")
        d_in = elements[0].shape[0]
        if any(m.shape[0] != d_in for m in elements):
            raise ValidationError("POVM elements have mismatched dimensions")
        for j, m in enumerate(elements):
            wmin = float(np.linalg.eigvalsh(m).min())
            if wmin < -POVM_PSD_ATOL:
                raise ValidationError(f"POVM element {j} has eigenvalue {wmin:.3e} below -{POVM_PSD_ATOL:.0e}")
        total = sum(elements)
        defect = float(np.abs(total - np.eye(d_in)).max())
        if defect > POVM_SUM_ATOL:
            raise ValidationError(f"POVM completeness defect {defect:.3e} exceeds {POVM_SUM_ATOL:.0e}")
        d_out = outputs[0].dim
        if any(s.dim != d_out for s in outputs):
            raise ValidationError("output states have mismatched dimensions")
        object.__setattr__(self, "povm", elements)
        object.__setattr__(self, "outputs", outputs)

    @property
    def d_in(self) -> int:
        return self.povm[0].shape[0]

    @property
    def d_out(self) -> int:
        return self.outputs[0].dim

    @property
    def size(self) -> int:
        return len(self.povm)

    def apply_matrix(self, mat: np.ndarray) -> np.ndarray:
        weights = [np.trace(m @ mat).real for m in self.povm]
        return sum(w * s.matrix for w, s in zip(weights, self.outputs))

    def apply(self, rho: DensityOperator, out_dims: Sequence[int] | None = None) -> DensityOperator:
        if rho.dim != self.d_in:
            raise ValidationError(f"channel expects dimension {self.d_in}, state has {rho.dim}")
        out = self.apply_matrix(rho.matrix)
        return make_density(out, (self.d_out,) if out_dims is None else tuple(out_dims))

    def to_kraus(self, floor: float = SPECTRUM_FLOOR) -> KrausChannel:
        """Equivalent Kraus form via spectral decompositions.

        Each POVM element sum_b nu_b |m_b><m_b| and prepared state
        sum_a mu_a |phi_a><phi_a| contribute operators
        sqrt(mu_a nu_b) |phi_a><m_b|; eigenvalues at or below ``floor`` are
        dropped, so the operator count is sum_k rank(M_k) rank(sigma_k).
        """
        ops = []
        for m, s in zip(self.povm, self.outputs):
            nu, mv = np.linalg.eigh(m)
            mu, pv = np.linalg.eigh(s.matrix)
            for b in range(nu.size):
                if nu[b] <= floor:
                    continue
                bra = mv[:, b].conj()
                for a in range(mu.size):
                    if mu[a] <= floor:
                        continue
                    ops.append(np.sqrt(mu[a] * nu[b]) * np.outer(pv[:, a], bra))
        return KrausChannel(tuple(ops))


Channel = Union[KrausChannel, MeasurePrepareChannel]


def as_kraus(ch: Channel) -> KrausChannel:
    if isinstance(ch, KrausChannel):
        return ch
    if isinstance(ch, MeasurePrepareChannel):
        return ch.to_kraus()
    raise ValidationError(f"expected a channel, got {type(ch).__name__}")


def mp_to_kraus(ch: MeasurePrepareChannel, floor: float = SPECTRUM_FLOOR) -> KrausChannel:
    """Kraus form of a measure-and-prepare channel; see ``to_kraus``."""
    if not isinstance(ch, MeasurePrepareChannel):
        raise ValidationError(f"expected a measure-and-prepare channel, got {type(ch).__name__}")
    return ch.to_kraus(floor=floor)


def tensor_channels(a: Channel, b: Channel) -> KrausChannel:
    """Tensor product acting as a on the first factor and b on the second."""
    ka, kb = as_kraus(a), as_kraus(b)
    return KrausChannel(tuple(np.kron(x, y) for x in ka.kraus for y in kb.kraus))


def extend_right(ch: Channel, dim: int) -> KrausChannel:
    """The map (ch x Id_dim) acting on the first factor."""
    k = as_kraus(ch)
    eye = np.eye(int(dim))
    return KrausChannel(tuple(np.kron(op, eye) for op in k.kraus))


def extend_left(ch: Channel, dim: int) -> KrausChannel:
    """The map (Id_dim x ch) acting on the second factor."""
    k = as_kraus(ch)
    eye = np.eye(int(dim))
    return KrausChannel(tuple(np.kron(eye, op) for op in k.kraus))


def choi(ch: Channel) -> DensityOperator:
    """Normalized Choi state: the channel applied to the first half of a
    maximally entangled pair, with signature (d_out, d_in)."""
    k = as_kraus(ch)
    d = k.d_in
    omega = np.eye(d).ravel() / np.sqrt(d)
    ext = extend_right(k, d)
    vs = np.einsum("kab,b->ka", ext.stack(), omega)
    out = np.einsum("ka,kb->ab", vs, vs.conj())
    return make_density(out, (k.d_out, d))


def is_ppt(state: DensityOperator, subsystem: int = 1, atol: float = PPT_ATOL) -> bool:
    """Whether the partial transpose stays positive semidefinite.

    A necessary condition for a Choi state to belong to a measure-and-prepare
    (entanglement-breaking) channel.
    """
    pt = linalg.partial_transpose(state.matrix, state.dims, subsystem)
    return float(np.linalg.eigvalsh(pt).min()) >= -atol


def random_channel(d_in: int, d_out: int, kraus_count: int, rng) -> KrausChannel:
    """Random channel from a Haar-ish isometry: orthonormalize a Gaussian
    (d_out * kraus_count) x d_in matrix and slice it into Kraus blocks."""
    gen = _rng(rng)
    if d_out * kraus_count < d_in:
        raise ValidationError(
            f"no isometry exists: d_out * kraus_count = {d_out * kraus_count} < d_in = {d_in}"
        )
    g = ginibre(gen, d_out * kraus_count, d_in)
    q, _ = np.linalg.qr(g)
    return KrausChannel(tuple(q[k * d_out:(k + 1) * d_out, :] for k in range(kraus_count)))


def random_mp_channel(d_in: int, d_out: int, size: int, rng, out_rank: int | None = None) -> MeasurePrepareChannel:
    """Random measure-and-prepare channel.

    POVM elements are M_k = B^(-1/2) A_k B^(-1/2) with A_k independent full
    rank Ginibre positives and B their sum; outputs are independent random
    densities.  This is one convenient sampling measure, not a canonical one.
    """
    gen = _rng(rng)
    if size < 1:
        raise ValidationError("need at least one POVM element")
    parts = []
    for _ in range(size):
        g = ginibre(gen, d_in, d_in)
        parts.append(g @ g.conj().T)
    total = sum(parts)
    w, v = np.linalg.eigh(total)
    inv_root = (v / np.sqrt(w)) @ v.conj().T
    povm = []
    for a in parts:
        m = inv_root @ a @ inv_root
        povm.append((m + m.conj().T) / 2.0)
    outputs = tuple(random_density(d_out, gen, rank=out_rank) for _ in range(size))
    return MeasurePrepareChannel(tuple(povm), outputs)


def identity_channel(dim: int) -> KrausChannel:
    return KrausChannel((np.eye(dim),))


def _weyl_unitaries(dim: int) -> list[np.ndarray]:
    shift = np.zeros((dim, dim), dtype=complex)
    for j in range(dim):
        shift[(j + 1) % dim, j] = 1.0
    phase = np.diag(np.exp(2j * np.pi * np.arange(dim) / dim))
    ops = []
    for a in range(dim):
        xa = np.linalg.matrix_power(shift, a)
        for b in range(dim):
            ops.append(xa @ np.linalg.matrix_power(phase, b))
    return ops


def depolarizing(dim: int, p: float) -> KrausChannel:
    """rho -> (1 - p) rho + p I/d, as a mixture of discrete shift/phase unitaries."""
    if not 0.0 <= p <= 1.0:
        raise ValidationError(f"depolarizing weight p = {p!r} outside [0, 1]")
    weyl = _weyl_unitaries(dim)
    w0 = 1.0 - p + p / dim**2
    ops = [np.sqrt(w0) * weyl[0]]
    ops.extend(np.sqrt(p / dim**2) * u for u in weyl[1:])
    return KrausChannel(tuple(ops))


def dephasing(dim: int) -> KrausChannel:
    """Complete dephasing in the computational basis (kills off-diagonals)."""
    eye = np.eye(dim, dtype=complex)
    return KrausChannel(tuple(np.outer(eye[:, j], eye[:, j]) for j in range(dim)))


def dephasing_mp(dim: int) -> MeasurePrepareChannel:
    """Complete dephasing written as measure-in-basis, reprepare-basis-state."""
    eye = np.eye(dim, dtype=complex)
    projectors = tuple(np.outer(eye[:, j], eye[:, j]) for j in range(dim))
    outputs = tuple(DensityOperator(p.copy(), (dim,)) for p in projectors)
    return MeasurePrepareChannel(projectors, outputs)


def cq_channel(outputs: Sequence[DensityOperator]) -> MeasurePrepareChannel:
    """Classical-quantum channel: read the basis index, prepare outputs[index]."""
    k = len(outputs)
    eye = np.eye(k, dtype=complex)
    povm = tuple(np.outer(eye[:, j], eye[:, j]) for j in range(k))
    return MeasurePrepareChannel(povm, tuple(outputs))


def qc_channel(povm: Sequence[np.ndarray]) -> MeasurePrepareChannel:
    """Quantum-classical channel: measure the POVM, record the outcome as a
    basis state."""
    k = len(povm)
    eye = np.eye(k, dtype=complex)
    outputs = tuple(DensityOperator(np.outer(eye[:, j], eye[:, j]), (k,)) for j in range(k))
    return MeasurePrepareChannel(tuple(povm), outputs)


def constant_channel(sigma: DensityOperator, d_in: int | None = None) -> MeasurePrepareChannel:
    """rho -> sigma for every input."""
    d = sigma.dim if d_in is None else int(d_in)
    return MeasurePrepareChannel((np.eye(d, dtype=complex),), (sigma,))
