"""Divided-difference operators for the first variation of the matrix logarithm.

For a PSD matrix ``sigma = U diag(a) U^dagger`` the derivative of ``log`` at
``sigma`` acts as a Hadamard product in the eigenbasis::

    L_sigma(beta)       = U ((U^H beta U) * T) U^H,   T_kl = (log a_k - log a_l) / (a_k - a_l)
    L_sigma^+(beta)     = U ((U^H beta U) * S) U^H,   S_kl = (a_k - a_l) / (log a_k - log a_l)

Both kernels are zeroed outside the support of ``sigma``, which makes
``L^+`` the Moore-Penrose inverse of ``L``. The operators are never formed as
``n^2 x n^2`` matrices.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .linalg import RANK_TOL, Spectrum, eigh, mat_log_pd, mat_log_support, support_mask, trace_inner

#: Relative eigenvalue gap below which the limiting divided difference is used.
DEGENERACY_TOL = 1e-8


def log_divided_differences(values, mask=None):
    """Return ``(tmat, smat)`` for positive eigenvalues `values`.

    Uses ``log(a/b) = 2 atanh((a-b)/(a+b))`` so that
    ``T_kl = 2/(a+b) * g(u)`` with ``u = (a-b)/(a+b)`` and ``g(u) = atanh(u)/u``;
    for ``|u| <= DEGENERACY_TOL`` the limit ``g = 1`` is used, which gives
    exactly ``1/a`` on the diagonal and for equal eigenvalues.
    Rows and columns outside `mask` are zero in both kernels.
    """
    a = np.asarray(values, dtype=float)
    if mask is None:
        mask = np.ones(a.shape, dtype=bool)
    n = a.size
    tmat = np.zeros((n, n))
    smat = np.zeros((n, n))
    s = a[mask]
    ssum = s[:, None] + s[None, :]
    u = (s[:, None] - s[None, :]) / ssum
    near = np.abs(u) <= DEGENERACY_TOL
    u_safe = np.where(near, 0.5, u)
    g = np.where(near, 1.0, np.arctanh(u_safe) / u_safe)
    idx = np.flatnonzero(mask)
    tmat[np.ix_(idx, idx)] = 2.0 * g / ssum
    smat[np.ix_(idx, idx)] = 0.5 * ssum / g
    return tmat, smat


@dataclass(frozen=True)
class DividedDifferenceKernel:
    """Eigenbasis of ``sigma`` together with its ``T`` and ``S`` kernels."""

    basis: Spectrum
    tmat: np.ndarray
    smat: np.ndarray
    support_rank: int

    @property
    def order(self):
        return self.basis.order

    def _sandwich(self, beta, weights):
        beta = np.asarray(beta)
        if beta.shape != (self.order, self.order):
            raise DomainError(f"dimension mismatch: kernel order {self.order}, argument {beta.shape}")
        u = self.basis.vectors
        inner = u.conj().T @ beta @ u
        return u @ (inner * weights) @ u.conj().T


def build_kernel(sigma, tol=RANK_TOL):
    """Eigen-decompose `sigma` and tabulate both divided-difference kernels.

    Raises
    ------
    DomainError
        If `sigma` has an eigenvalue below ``-tol * max(1, lambda_max)`` or
        is numerically zero.
    """
    spec = eigh(sigma)
    top = spec.values[0]
    if top <= 0:
        raise DomainError("sigma is zero or negative; no logarithm derivative exists")
    if spec.values[-1] < -tol * max(1.0, top):
        raise DomainError(f"sigma is not PSD (lambda_min = {spec.values[-1]:.3e})")
    mask = support_mask(spec.values, tol)
    tmat, smat = log_divided_differences(spec.values, mask)
    return DividedDifferenceKernel(spec, tmat, smat, int(mask.sum()))


def apply_L(kernel, beta):
    """First variation ``L_sigma(beta)`` of ``log`` at ``sigma``."""
    return kernel._sandwich(beta, kernel.tmat)


def apply_L_pinv(kernel, beta):
    """Moore-Penrose inverse ``L_sigma^+(beta)`` (the inverse when sigma > 0)."""
    return kernel._sandwich(beta, kernel.smat)


def support_projector(kernel):
    """Orthogonal projector onto the support of ``sigma``."""
    v = kernel.basis.vectors[:, : kernel.support_rank]
    return v @ v.conj().T


def expansion_residual(sigma, xi, rho, t, tol=RANK_TOL):
    """Remainder of the first-order expansion of ``Tr(rho log(sigma + t xi))``.

    Returns ``|Tr rho log(sigma + t xi) - Tr rho log sigma - t Tr rho L_sigma(xi)|``,
    with ``log sigma`` taken on the support. It decays like ``t^2`` for
    full-rank `sigma`, and like ``t^2 |log t|`` when `sigma` is singular, `xi`
    is positive definite on ``ker sigma`` and `rho` vanishes there.
    """
    kernel = build_kernel(sigma, tol)
    if kernel.support_rank < kernel.order:
        null = kernel.basis.vectors[:, kernel.support_rank:]
        xi_null = null.conj().T @ xi @ null
        if np.linalg.eigvalsh(xi_null)[0] <= 0:
            raise DomainError("xi must be positive definite on the kernel of sigma")
        leak = np.linalg.norm(rho @ null)
        if leak > 1e-9 * max(1.0, np.linalg.norm(rho)):
            raise DomainError(f"rho does not vanish on the kernel of sigma (|rho P_ker| = {leak:.3e})")
    try:
        log_perturbed = mat_log_pd(sigma + t * xi)
    except DomainError as exc:
        raise DomainError(f"sigma + t xi is not positive definite at t = {t}") from exc
    log_sigma = mat_log_support(sigma, tol)
    first = trace_inner(rho, apply_L(kernel, xi))
    return abs(trace_inner(rho, log_perturbed) - trace_inner(rho, log_sigma) - t * first)
