"""Dense complex-matrix helpers: Hermitian eigendecompositions, Kronecker
products, and partial trace / partial transpose over subsystem factorizations.

Subsystem convention: in a dimension signature the leftmost entry is the
slowest-varying (most significant) index, matching ``numpy.kron`` ordering.
All tolerances are module constants and can be overridden per call.
"""

from __future__ import annotations

from typing import Iterable, Sequence

import numpy as np

HERMITIAN_ATOL = 1e-10


class ValidationError(ValueError):
    """An operator or dimension signature failed a structural precondition."""


def as_matrix(m) -> np.ndarray:
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2:
        raise ValidationError(f"expected a matrix, got array of shape {a.shape}")
    return a


def as_square_matrix(m) -> np.ndarray:
    a = as_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    return a


def hermiticity_defect(m) -> float:
    """Largest elementwise deviation max |A - A^dagger|."""
    a = as_square_matrix(m)
    return float(np.abs(a - a.conj().T).max()) if a.size else 0.0


def require_hermitian(m, atol: float = HERMITIAN_ATOL, what: str = "matrix") -> np.ndarray:
    a = as_square_matrix(m)
    defect = hermiticity_defect(a)
    if defect > atol:
        raise ValidationError(
            f"{what} is not Hermitian: max |A - A^dagger| = {defect:.3e} exceeds {atol:.1e}"
        )
    return a


def eigh(m, atol: float = HERMITIAN_ATOL) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix.

    Returns (w, v) with eigenvalues w ascending and unitary v such that
    m = v @ diag(w) @ v^dagger.  Rejects non-Hermitian input.
    """
    a = require_hermitian(m, atol=atol)
    return np.linalg.eigh(a)


def kron(a, b) -> np.ndarray:
    """Kronecker product with the first factor most significant."""
    return np.kron(as_matrix(a), as_matrix(b))


def check_signature(dims: Iterable[int], dim: int) -> tuple[int, ...]:
    """Validate a subsystem dimension signature against a total dimension."""
    sig = tuple(int(d) for d in dims)
    if not sig or any(d < 1 for d in sig):
        raise ValidationError(f"invalid dimension signature {sig}")
    total = 1
    for d in sig:
        total *= d
    if total != dim:
        raise ValidationError(
            f"signature {sig} has total dimension {total}, matrix has dimension {dim}"
        )
    return sig


def _subsystem_tuple(subsystems, n: int, what: str) -> tuple[int, ...]:
    if isinstance(subsystems, (int, np.integer)):
        subsystems = (int(subsystems),)
    subs = tuple(sorted({int(k) for k in subsystems}))
    if not subs:
        raise ValidationError(f"{what} must name at least one subsystem")
    if subs[0] < 0 or subs[-1] >= n:
        raise ValidationError(f"{what} {subs} out of range for {n} subsystems")
    return subs


def partial_trace(m, dims: Sequence[int], keep) -> np.ndarray:
    """Reduced matrix on the kept subsystems, tracing out all others.

    ``keep`` is a subsystem index or an iterable of them; kept subsystems
    retain their original relative order.
    """
    a = as_square_matrix(m)
    sig = check_signature(dims, a.shape[0])
    n = len(sig)
    kept = _subsystem_tuple(keep, n, "keep")
    t = a.reshape(sig + sig)
    row = list(range(n))
    col = [i + n if i in kept else i for i in range(n)]
    out = [i for i in kept] + [i + n for i in kept]
    reduced = np.einsum(t, row + col, out)
    dk = 1
    for i in kept:
        dk *= sig[i]
    return np.ascontiguousarray(reduced.reshape(dk, dk))


def partial_transpose(m, dims: Sequence[int], subsystems) -> np.ndarray:
    """Transpose the chosen subsystem factors, leaving the rest untouched."""
    a = as_square_matrix(m)
    sig = check_signature(dims, a.shape[0])
    n = len(sig)
    subs = _subsystem_tuple(subsystems, n, "subsystems")
    t = a.reshape(sig + sig)
    axes = list(range(2 * n))
    for i in subs:
        axes[i], axes[i + n] = axes[i + n], axes[i]
    return np.ascontiguousarray(t.transpose(axes).reshape(a.shape))
