"""Entropic quantities in bits: von Neumann entropy, relative entropy,
conditional entropy, and channel mutual information.

All logarithms are base 2.  Relative entropy returns ``math.inf`` when the
first argument has weight outside the support of the second.
"""

from __future__ import annotations

import numpy as np

from . import linalg
from .linalg import ValidationError
from .channel import Channel, as_kraus, extend_right
from .qstate import DensityOperator, purify

EIG_FLOOR = 1e-12
KERNEL_MASS_TOL = 1e-9


def entropy_of_spectrum(w, floor: float = EIG_FLOOR) -> float:
    """Shannon entropy -sum w log2 w; weights at or below ``floor`` contribute 0."""
    w = np.asarray(w, dtype=float).ravel()
    kept = w[w > floor]
    if kept.size == 0:
        return 0.0
    return max(float(-(kept * np.log2(kept)).sum()), 0.0)


def von_neumann(rho: DensityOperator, floor: float = EIG_FLOOR) -> float:
    """Von Neumann entropy in bits."""
    return entropy_of_spectrum(np.linalg.eigvalsh(rho.matrix), floor=floor)


def relative_entropy(
    rho: DensityOperator,
    sigma: DensityOperator,
    floor: float = EIG_FLOOR,
    kernel_tol: float = KERNEL_MASS_TOL,
) -> float:
    """Relative entropy S(rho || sigma) in bits, evaluated in sigma's eigenbasis.

    Returns ``inf`` when rho carries more than ``kernel_tol`` weight on
    sigma's numerical kernel (eigenvalues at or below ``floor``).
    """
    if rho.dim != sigma.dim:
        raise ValidationError(f"dimension mismatch: {rho.dim} vs {sigma.dim}")
    mu, v = np.linalg.eigh(sigma.matrix)
    overlap = np.maximum(np.einsum("ji,jk,ki->i", v.conj(), rho.matrix, v).real, 0.0)
    kernel = mu <= floor
    if float(overlap[kernel].sum()) > kernel_tol:
        return float("inf")
    lam = np.linalg.eigvalsh(rho.matrix)
    supported_lam = lam[lam > floor]
    term_rho = float((supported_lam * np.log2(supported_lam)).sum()) if supported_lam.size else 0.0
    supported = ~kernel
    term_sigma = float((overlap[supported] * np.log2(mu[supported])).sum())
    return term_rho - term_sigma


def conditional_entropy(rho: DensityOperator, dims=None, floor: float = EIG_FLOOR) -> float:
    """S(A|B) = S(rho_AB) - S(rho_B) for a bipartite state, in bits."""
    sig = tuple(dims) if dims is not None else rho.dims
    if len(sig) != 2:
        raise ValidationError(f"conditional entropy needs a bipartite signature, got {sig}")
    state = rho if dims is None else rho.with_dims(sig)
    return von_neumann(state, floor=floor) - von_neumann(state.reduced(1), floor=floor)


def channel_mutual_information(rho: DensityOperator, ch: Channel, floor: float = EIG_FLOOR) -> float:
    """S(rho) + S(ch(rho)) - S((ch x Id) psi) for a purification psi of rho.

    The value does not depend on which purification is used.
    """
    k = as_kraus(ch)
    if rho.dim != k.d_in:
        raise ValidationError(f"channel expects dimension {k.d_in}, state has {rho.dim}")
    flat = rho if len(rho.dims) == 1 else rho.with_dims((rho.dim,))
    psi = purify(flat)
    ext = extend_right(k, flat.dim)
    omega = ext.apply(psi.density().with_dims((flat.dim * flat.dim,)), out_dims=(k.d_out, flat.dim))
    return (
        von_neumann(flat, floor=floor)
        + von_neumann(k.apply(flat), floor=floor)
        - von_neumann(omega, floor=floor)
    )
