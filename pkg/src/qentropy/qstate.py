"""States, ensembles, purifications, and reproducible random sampling.

Density operators carry an explicit subsystem dimension signature; the
leftmost subsystem is the most significant index (see ``linalg``).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg
from .linalg import ValidationError

HERMITIAN_ATOL = linalg.HERMITIAN_ATOL
PSD_ATOL = 1e-10
TRACE_ATOL = 1e-10
NORM_ATOL = 1e-12
PROB_SUM_ATOL = 1e-10
RANK_FLOOR = 1e-10
PURITY_ATOL = 1e-8


@dataclass(frozen=True)
class DensityOperator:
    """A positive semidefinite, unit-trace matrix with a subsystem signature.

    ``dims`` defaults to the single-system signature ``(d,)``."""

    matrix: np.ndarray
    dims: tuple[int, ...] | None = None

    def __post_init__(self):
        a = linalg.require_hermitian(self.matrix, atol=HERMITIAN_ATOL, what="density matrix")
        sig = linalg.check_signature(self.dims if self.dims is not None else (a.shape[0],), a.shape[0])
        tr = float(np.trace(a).real)
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValidationError(f"density matrix trace {tr!r} deviates from 1 by {abs(tr - 1.0):.3e}")
        wmin = float(np.linalg.eigvalsh(a).min())
        if wmin < -PSD_ATOL:
            raise ValidationError(f"density matrix minimum eigenvalue {wmin:.3e} is below -{PSD_ATOL:.0e}")
        a = a.copy()
        a.setflags(write=False)
        object.__setattr__(self, "matrix", a)
        object.__setattr__(self, "dims", sig)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def spectrum(self) -> np.ndarray:
        """Eigenvalues, ascending."""
        return np.linalg.eigvalsh(self.matrix)

    def rank(self, floor: float = RANK_FLOOR) -> int:
        return int((self.spectrum() > floor).sum())

    def with_dims(self, dims: Sequence[int]) -> "DensityOperator":
        """Same matrix under a different subsystem signature."""
        return DensityOperator(self.matrix, tuple(dims))

    def reduced(self, keep) -> "DensityOperator":
        """Partial trace keeping the named subsystems."""
        kept = keep if not isinstance(keep, (int, np.integer)) else (int(keep),)
        sub = linalg.partial_trace(self.matrix, self.dims, kept)
        return DensityOperator(sub, tuple(self.dims[i] for i in sorted(set(int(k) for k in kept))))


@dataclass(frozen=True)
class PureState:
    """A unit vector with a subsystem signature (default: one system)."""

    vector: np.ndarray
    dims: tuple[int, ...] | None = None

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=complex)
        if v.ndim != 1:
            raise ValidationError(f"expected a vector, got array of shape {v.shape}")
        sig = linalg.check_signature(self.dims if self.dims is not None else (v.shape[0],), v.shape[0])
        nrm = float(np.linalg.norm(v))
        if abs(nrm - 1.0) > NORM_ATOL:
            raise ValidationError(f"state vector norm {nrm!r} deviates from 1 by {abs(nrm - 1.0):.3e}")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "vector", v)
        object.__setattr__(self, "dims", sig)

    @property
    def dim(self) -> int:
        return self.vector.shape[0]

    def density(self) -> DensityOperator:
        return DensityOperator(np.outer(self.vector, self.vector.conj()), self.dims)

    def reduced(self, keep) -> DensityOperator:
        return self.density().reduced(keep)


@dataclass(frozen=True)
class Ensemble:
    """Probability weights paired with density operators of uniform signature."""

    probs: np.ndarray
    states: tuple[DensityOperator, ...]

    def __post_init__(self):
        p = np.asarray(self.probs, dtype=float)
        states = tuple(self.states)
        if p.ndim != 1 or p.size != len(states) or p.size == 0:
            raise ValidationError("ensemble needs one probability per state and at least one state")
        if p.min() < 0.0:
            raise ValidationError(f"negative ensemble probability {p.min()!r}")
        if abs(p.sum() - 1.0) > PROB_SUM_ATOL:
            raise ValidationError(f"ensemble probabilities sum to {p.sum()!r}, not 1")
        sig = states[0].dims
        if any(s.dims != sig for s in states):
            raise ValidationError("ensemble members have mismatched dimension signatures")
        p = p.copy()
        p.setflags(write=False)
        object.__setattr__(self, "probs", p)
        object.__setattr__(self, "states", states)

    @property
    def size(self) -> int:
        return len(self.states)

    @property
    def dims(self) -> tuple[int, ...]:
        return self.states[0].dims

    def average(self) -> DensityOperator:
        avg = sum(p * s.matrix for p, s in zip(self.probs, self.states))
        return DensityOperator(avg, self.dims)


@dataclass(frozen=True)
class RngStream:
    """A named, reproducible randomness source.

    Identical (seed, stream) pairs at the same derivation depth reproduce
    identical draws; ``child`` derives disjoint substreams deterministically.
    """

    seed: int
    stream: int = 0
    _path: tuple[int, ...] = field(default=(), repr=False)

    def generator(self) -> np.random.Generator:
        key = (*self._path, self.stream)
        return np.random.default_rng(np.random.SeedSequence(self.seed, spawn_key=key))

    def child(self, index: int) -> "RngStream":
        return RngStream(self.seed, int(index), (*self._path, self.stream))


def _rng(rng) -> np.random.Generator:
    if isinstance(rng, RngStream):
        return rng.generator()
    if isinstance(rng, np.random.Generator):
        return rng
    raise ValidationError(f"expected an RngStream or numpy Generator, got {type(rng).__name__}")


def ginibre(gen: np.random.Generator, rows: int, cols: int) -> np.ndarray:
    """Standard complex Gaussian matrix."""
    return (gen.standard_normal((rows, cols)) + 1j * gen.standard_normal((rows, cols))) / np.sqrt(2.0)


def random_density(dim: int, rng, rank: int | None = None) -> DensityOperator:
    """Random state G G^dagger / Tr(G G^dagger) with G a dim x rank Ginibre matrix."""
    gen = _rng(rng)
    r = dim if rank is None else int(rank)
    if not 1 <= r <= dim:
        raise ValidationError(f"rank {r} out of range for dimension {dim}")
    g = ginibre(gen, dim, r)
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    return DensityOperator(rho, (dim,))


def random_pure(dim: int, rng) -> PureState:
    gen = _rng(rng)
    v = gen.standard_normal(dim) + 1j * gen.standard_normal(dim)
    return PureState(v / np.linalg.norm(v), (dim,))


def random_unitary(dim: int, rng) -> np.ndarray:
    """Haar-distributed unitary via QR with the standard phase fix."""
    gen = _rng(rng)
    q, r = np.linalg.qr(ginibre(gen, dim, dim))
    d = np.diagonal(r)
    return q * (d / np.abs(d))


def random_probs(size: int, rng) -> np.ndarray:
    """Simplex point from normalized exponentials of standard Gaussians."""
    gen = _rng(rng)
    w = np.exp(gen.standard_normal(size))
    return w / w.sum()


def random_ensemble(dim: int, size: int, rng, rank: int | None = None) -> Ensemble:
    """Random ensemble: simplex-sampled weights over independent random states."""
    gen = _rng(rng)
    probs = random_probs(size, gen)
    states = tuple(random_density(dim, gen, rank=rank) for _ in range(size))
    return Ensemble(probs, states)


def purify(rho: DensityOperator) -> PureState:
    """Canonical purification onto a reference copy of the system.

    Treats the input as a single system of its total dimension d and returns
    sum_k sqrt(lambda_k) |v_k> x |k> with signature (d, d); the reference is
    the second (least significant) factor.
    """
    d = rho.dim
    w, v = np.linalg.eigh(rho.matrix)
    amps = np.sqrt(np.clip(w, 0.0, None))
    # row-major ravel of M[i, k] = amps[k] v[i, k] is sum_k amps[k] kron(v[:, k], e_k)
    vec = (v * amps).ravel()
    return PureState(vec, (d, d))


def _dominant_eigenvector(state: DensityOperator, what: str) -> np.ndarray:
    w, v = np.linalg.eigh(state.matrix)
    if w[-1] < 1.0 - PURITY_ATOL or (state.dim > 1 and w[-2] > PURITY_ATOL):
        raise ValidationError(f"{what} is not pure: top eigenvalues {w[-1]:.6f}, {w[-2]:.2e}")
    return v[:, -1]


def flag_purify(decomp: Ensemble) -> PureState:
    """Purification of a pure-state ensemble with doubled orthonormal flags.

    For {q_j, |psi_j>} on a d-dimensional system returns
    sum_j sqrt(q_j) |psi_j> x |j> x |j> with signature (d, k, k).  Tracing
    out both flag registers recovers the ensemble average; tracing out the
    system and the first flag leaves diag(q).
    """
    k = decomp.size
    d = decomp.states[0].dim
    vecs = [_dominant_eigenvector(s, f"ensemble member {j}") for j, s in enumerate(decomp.states)]
    vec = np.zeros(d * k * k, dtype=complex)
    for j, (q, v) in enumerate(zip(decomp.probs, vecs)):
        flag = np.zeros(k * k, dtype=complex)
        flag[j * k + j] = 1.0
        vec += np.sqrt(q) * np.kron(v, flag)
    return PureState(vec, (d, k, k))


def pure_decompositions(rho: DensityOperator, rng=None, size: int | None = None) -> Ensemble:
    """Decompose a state into pure states.

    Without an RNG this returns the eigendecomposition ensemble (rank-many
    members).  With an RNG it mixes the scaled eigenvectors through a random
    isometry: sqrt(q_j)|psi_j> = sum_k W_jk sqrt(lambda_k)|v_k> with W a
    size x rank isometry from a QR factorization, giving a randomized
    decomposition with ``size`` members (default: the total dimension).
    """
    d = rho.dim
    w, v = np.linalg.eigh(rho.matrix)
    mask = w > RANK_FLOOR
    lam = w[mask]
    vecs = v[:, mask]
    r = lam.size
    if rng is None:
        probs = lam / lam.sum()
        states = tuple(
            PureState(vecs[:, j], (d,)).density().with_dims(rho.dims) for j in range(r)
        )
        return Ensemble(probs, states)
    gen = _rng(rng)
    m = d if size is None else int(size)
    if m < r:
        raise ValidationError(f"decomposition size {m} is below the state rank {r}")
    q, _ = np.linalg.qr(ginibre(gen, m, r))
    scaled = vecs * np.sqrt(lam)
    # rows of (q @ scaled.T) are the unnormalized member vectors
    unnormalized = q @ scaled.T
    probs = np.maximum((np.abs(unnormalized) ** 2).sum(axis=1), 1e-300)
    states = tuple(
        PureState(unnormalized[j] / np.sqrt(probs[j]), (d,)).density().with_dims(rho.dims)
        for j in range(m)
    )
    return Ensemble(probs / probs.sum(), states)


def make_density(matrix, dims: Sequence[int] | None = None) -> DensityOperator:
    """Validate a matrix into a DensityOperator.

    Rejects non-Hermitian input (naming the offending asymmetry), eigenvalues
    below -1e-10, and traces off by more than 1e-10; eigenvalues in
    [-1e-10, 0) are clipped to zero and the matrix renormalized.
    """
    a = linalg.require_hermitian(matrix, atol=HERMITIAN_ATOL, what="density matrix")
    sig = (a.shape[0],) if dims is None else tuple(dims)
    tr = float(np.trace(a).real)
    if abs(tr - 1.0) > TRACE_ATOL:
        raise ValidationError(f"density matrix trace {tr!r} deviates from 1 by {abs(tr - 1.0):.3e}")
    w, v = np.linalg.eigh(a)
    wmin = float(w.min())
    if wmin < -PSD_ATOL:
        raise ValidationError(f"density matrix minimum eigenvalue {wmin:.3e} is below -{PSD_ATOL:.0e}")
    if wmin < 0.0:
        w = np.clip(w, 0.0, None)
        a = (v * w) @ v.conj().T
        a /= np.trace(a).real
    return DensityOperator(a, sig)


def maximally_mixed(dim: int, dims: Sequence[int] | None = None) -> DensityOperator:
    return DensityOperator(np.eye(dim) / dim, (dim,) if dims is None else tuple(dims))


def basis_state(dim: int, index: int) -> PureState:
    v = np.zeros(dim, dtype=complex)
    v[index] = 1.0
    return PureState(v, (dim,))
