"""Dense hermitian linear algebra on multipartite operators.

Matrices are plain ``numpy`` arrays. Where the tensor structure matters the
local dimensions are passed explicitly as ``dims = (n1, ..., ns)`` with the
first factor varying slowest (row-major, the ``np.kron`` convention).
Party labels are 1-based: ``parties=(1,)`` transposes the first factor.
"""

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, EigenError

#: Relative eigenvalue threshold for every rank and kernel decision.
RANK_TOL = 1e-10


def hermitize(m):
    """Return ``(m + m^dagger) / 2`` as a complex array."""
    m = np.asarray(m, dtype=complex)
    return 0.5 * (m + m.conj().T)


def as_hermitian(m, atol=1e-12):
    """Validate that `m` is square and hermitian within `atol`, then symmetrize.

    Raises
    ------
    DomainError
        If `m` is not square or departs from hermiticity by more than `atol`
        in any entry.
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError(f"expected a square matrix, got shape {m.shape}")
    dev = np.max(np.abs(m - m.conj().T), initial=0.0)
    if dev > atol:
        raise DomainError(f"matrix is not hermitian (max |m - m^H| = {dev:.3e} > {atol:.0e})")
    return hermitize(m)


def check_dims(dims, n):
    """Return `dims` as a tuple after checking that it factorizes `n`."""
    dims = tuple(int(d) for d in dims)
    if not dims or any(d < 1 for d in dims):
        raise DomainError(f"dims must be positive integers, got {dims}")
    if int(np.prod(dims)) != n:
        raise DomainError(f"dims {dims} do not multiply to the matrix order {n}")
    return dims


@dataclass(frozen=True)
class Spectrum:
    """Eigen-decomposition with eigenvalues sorted in descending order.

    ``vectors[:, i]`` is the eigenvector for ``values[i]``.
    """

    values: np.ndarray
    vectors: np.ndarray

    @property
    def order(self):
        return self.values.shape[0]

    def reconstruct(self, values=None):
        """``U diag(values) U^dagger``; defaults to the stored eigenvalues."""
        vals = self.values if values is None else values
        return (self.vectors * vals) @ self.vectors.conj().T


def eigh(m):
    """Hermitian eigen-decomposition, eigenvalues descending."""
    try:
        w, v = np.linalg.eigh(m)
    except np.linalg.LinAlgError as exc:
        raise EigenError(f"eigensolver failed for order-{np.shape(m)[0]} matrix: {exc}") from exc
    return Spectrum(w[::-1].copy(), v[:, ::-1].copy())


def eigvalsh(m):
    """Eigenvalues only, descending."""
    try:
        return np.linalg.eigvalsh(m)[::-1]
    except np.linalg.LinAlgError as exc:
        raise EigenError(f"eigensolver failed for order-{np.shape(m)[0]} matrix: {exc}") from exc


def support_mask(values, tol=RANK_TOL):
    """Boolean mask of eigenvalues counted as nonzero (``> tol * lambda_max``)."""
    top = values[0] if values.size else 0.0
    return values > tol * max(top, 0.0)


def mat_log_support(m, tol=RANK_TOL):
    """Matrix logarithm restricted to the support of a PSD matrix.

    Eigenvalues at or below ``tol * lambda_max`` are mapped to 0 instead of
    ``-inf``; for a full-rank input this is the principal logarithm.
    """
    spec = eigh(m)
    if spec.values[0] <= 0 or spec.values[-1] < -tol * max(1.0, spec.values[0]):
        if spec.values[0] <= 0:
            raise DomainError("zero matrix has no logarithm")
        raise DomainError(f"matrix is not PSD (lambda_min = {spec.values[-1]:.3e})")
    mask = support_mask(spec.values, tol)
    logs = np.zeros_like(spec.values)
    logs[mask] = np.log(spec.values[mask])
    return spec.reconstruct(logs)


def mat_power_psd(m, p):
    """``m**p`` for PSD `m`, with negative round-off eigenvalues clipped to 0."""
    spec = eigh(m)
    return spec.reconstruct(np.clip(spec.values, 0.0, None) ** p)


def mat_log_pd(m):
    """Principal logarithm of a positive definite matrix."""
    spec = eigh(m)
    if spec.values[-1] <= 0:
        raise DomainError(f"logarithm needs a positive definite matrix (lambda_min = {spec.values[-1]:.3e})")
    return spec.reconstruct(np.log(spec.values))


def partial_transpose(m, dims, parties=(1,)):
    """Transpose the tensor factors listed in `parties` (1-based)."""
    m = np.asarray(m)
    dims = check_dims(dims, m.shape[0])
    s = len(dims)
    parties = sorted(set(int(p) for p in parties))
    if any(p < 1 or p > s for p in parties):
        raise DomainError(f"party index out of range 1..{s}: {parties}")
    t = m.reshape(dims + dims)
    axes = list(range(2 * s))
    for p in parties:
        axes[p - 1], axes[s + p - 1] = axes[s + p - 1], axes[p - 1]
    return t.transpose(axes).reshape(m.shape)


def trace_inner(a, b):
    """Hilbert-Schmidt inner product ``Tr(a b)`` of two hermitian matrices."""
    a = np.asarray(a)
    b = np.asarray(b)
    if a.shape != b.shape:
        raise DomainError(f"dimension mismatch: {a.shape} vs {b.shape}")
    # Tr(ab) = sum_kl a_kl b_lk = sum_kl a_kl conj(b_kl) for hermitian b
    return float(np.real(np.vdot(b, a)))


def psd_rank(m, tol=RANK_TOL):
    """Return ``(is_psd, rank)`` under the relative tolerance convention.

    The rank counts eigenvalues of magnitude above ``tol * max(1, lambda_max)``,
    which for PSD input is the number of positive ones.
    """
    vals = eigvalsh(m)
    scale = tol * max(1.0, vals[0])
    return bool(vals[-1] >= -scale), int(np.count_nonzero(np.abs(vals) > scale))


def is_density(m, tol=1e-10):
    """True if `m` is PSD (``lambda_min >= -tol``) with unit trace within `tol`."""
    vals = eigvalsh(m)
    return bool(vals[-1] >= -tol and abs(np.sum(vals) - 1.0) <= tol)


def support_basis(m, tol=RANK_TOL):
    """Orthonormal basis (columns) of the numerical range of a PSD matrix."""
    spec = eigh(m)
    return spec.vectors[:, support_mask(spec.values, tol)]


def support_projector_of(m, tol=RANK_TOL):
    """Orthogonal projector onto the numerical support of a PSD matrix."""
    v = support_basis(m, tol)
    return v @ v.conj().T


def ket(*labels, dims):
    """Computational basis vector ``|labels>`` for local dimensions `dims`."""
    out = np.array([1.0 + 0j])
    for label, d in zip(labels, dims):
        e = np.zeros(d, dtype=complex)
        e[label] = 1.0
        out = np.kron(out, e)
    return out


def projector(v):
    """``|v><v|`` for a (not necessarily normalized) vector."""
    v = np.asarray(v, dtype=complex).ravel()
    return np.outer(v, v.conj())
