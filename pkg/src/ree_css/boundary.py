"""Boundary geometry of the PPT set.

``D`` is the set of states whose partial transpose over a chosen cut is PSD.
A state lies on the boundary when either it or its partial transpose is
singular. Supporting hyperplanes are built from kernel vectors ``v`` of
``sigma^Gamma`` as ``phi = (|v><v|)^Gamma``.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, VerificationError
from .linalg import (
    RANK_TOL,
    check_dims,
    eigh,
    eigvalsh,
    hermitize,
    partial_transpose,
    projector,
    psd_rank,
    support_projector_of,
    trace_inner,
)
from .sampling import haar_unitary, local_unitary, rng_from

INTERIOR = "interior"
BOUNDARY = "boundary"
OUTSIDE = "outside"


@dataclass(frozen=True)
class Hyperplane:
    """Unit-norm supporting functional ``phi`` at ``sigma_ref``.

    ``Tr(phi sigma_ref) = 0`` and ``Tr(phi sigma') >= 0`` on ``D``.
    `kernel_coeffs` records the combination of ``ker sigma^Gamma`` vectors
    used, or is ``None`` when ``phi`` was not derived from a kernel.
    """

    phi: np.ndarray
    sigma_ref: np.ndarray
    dims: tuple
    parties: tuple = (1,)
    kernel_coeffs: np.ndarray = field(default=None, compare=False)


@dataclass(frozen=True)
class PsiWitness:
    """Supporting functional written as ``psi`` with ``Tr(psi sigma') <= Tr(psi sigma) = 1``.

    ``psi`` vanishes outside the support of ``sigma_ref``.
    """

    psi: np.ndarray
    sigma_ref: np.ndarray
    dims: tuple
    parties: tuple = (1,)

    def blend(self, x):
        """Return the witness ``x psi + (1 - x) P_sigma`` for ``x`` in [0, 1]."""
        if not 0.0 <= x <= 1.0:
            raise DomainError(f"blend parameter must lie in [0, 1], got {x}")
        p = support_projector_of(self.sigma_ref)
        return PsiWitness(hermitize(x * self.psi + (1.0 - x) * p), self.sigma_ref, self.dims, self.parties)


def boundary_membership(sigma, dims, parties=(1,), tol=RANK_TOL):
    """Classify `sigma` as ``"interior"``, ``"boundary"`` or ``"outside"`` of D.

    Thresholds are relative: ``tol * max(1, lambda_max)``.
    """
    dims = check_dims(dims, np.shape(sigma)[0])
    vals = eigvalsh(sigma)
    pt_vals = eigvalsh(partial_transpose(sigma, dims, parties))
    scale = tol * max(1.0, vals[0])
    if pt_vals[-1] < -scale or vals[-1] < -scale:
        return OUTSIDE
    if vals[-1] > scale and pt_vals[-1] > scale:
        return INTERIOR
    return BOUNDARY


def pt_kernel(sigma, dims, parties=(1,), tol=RANK_TOL):
    """Orthonormal basis (columns) of the numerical kernel of ``sigma^Gamma``.

    Raises
    ------
    DomainError
        If ``sigma^Gamma`` is not PSD or has no kernel.
    """
    dims = check_dims(dims, np.shape(sigma)[0])
    spec = eigh(partial_transpose(sigma, dims, parties))
    top = max(spec.values[0], 0.0)
    if spec.values[-1] < -tol * max(1.0, top):
        raise DomainError(f"sigma^Gamma is not PSD (lambda_min = {spec.values[-1]:.3e}); sigma is outside D")
    null = spec.values <= tol * top
    if not null.any():
        raise DomainError("sigma is not on the PT-boundary: sigma^Gamma has an empty kernel")
    return spec.vectors[:, null]


def hyperplane_from_kernel(sigma, dims, coeffs=None, parties=(1,), tol=RANK_TOL):
    """Supporting hyperplane ``(|v><v|)^Gamma`` for ``v`` in ``ker sigma^Gamma``.

    Parameters
    ----------
    coeffs : array_like, optional
        Complex coefficients of ``v`` over the kernel basis returned by
        :func:`pt_kernel`. Defaults to the first kernel vector.
    """
    dims = check_dims(dims, np.shape(sigma)[0])
    parties = tuple(parties)
    basis = pt_kernel(sigma, dims, parties, tol)
    k = basis.shape[1]
    if coeffs is None:
        coeffs = np.zeros(k, dtype=complex)
        coeffs[0] = 1.0
    coeffs = np.asarray(coeffs, dtype=complex).ravel()
    if coeffs.size != k:
        raise DomainError(f"expected {k} kernel coefficients, got {coeffs.size}")
    norm = np.linalg.norm(coeffs)
    if norm == 0:
        raise DomainError("kernel coefficient vector is zero")
    coeffs = coeffs / norm
    v = basis @ coeffs
    phi = hermitize(partial_transpose(projector(v), dims, parties))
    return Hyperplane(phi, np.asarray(sigma, dtype=complex), dims, parties, coeffs)


def psi_from_phi(h, tol=1e-9):
    """Turn a hyperplane into the witness ``psi = P_sigma (I - phi) P_sigma``.

    For singular ``sigma`` the hyperplane must not couple the support of
    ``sigma`` to its kernel (``P phi (I - P) = 0``); then ``Tr(psi sigma') <= 1``
    on D because the kernel block of a unit-norm ``phi`` has eigenvalues at
    most 1.

    Raises
    ------
    DomainError
        If ``phi`` couples support and kernel, or the result equals ``P_sigma``.
    """
    sigma = h.sigma_ref
    p = support_projector_of(sigma)
    n = p.shape[0]
    q = np.eye(n) - p
    coupling = np.linalg.norm(p @ h.phi @ q)
    if coupling > tol:
        raise DomainError(
            f"phi couples the support of sigma to its kernel (|P phi (I-P)| = {coupling:.3e}); "
            "compress phi to the support first"
        )
    psi = hermitize(p - p @ h.phi @ p)
    value = trace_inner(psi, sigma)
    if value <= 0:
        raise DomainError(f"Tr(psi sigma) = {value:.3e} cannot be normalized to 1")
    psi = psi / value
    if np.linalg.norm(psi - p) <= tol:
        raise DomainError("degenerate witness: psi equals the support projector")
    return PsiWitness(psi, sigma, h.dims, h.parties)


def tensor_hyperplane(h_a, phi_b, sigma_b, dims_b, tol=1e-10):
    """Hyperplane ``phi_a (x) phi_b`` supporting ``sigma_a (x) sigma_b``.

    `phi_b` must be unit-norm and nonnegative on the states of the second
    system. The result supports the separable states of the joint system.
    """
    phi_b = np.asarray(phi_b, dtype=complex)
    sigma_b = np.asarray(sigma_b, dtype=complex)
    dims_b = check_dims(dims_b, phi_b.shape[0])
    for name, mat in (("phi_a", h_a.phi), ("phi_b", phi_b)):
        norm2 = trace_inner(mat, mat)
        if abs(norm2 - 1.0) > tol:
            raise DomainError(f"{name} must satisfy Tr(phi^2) = 1, got {norm2:.12f}")
    if sigma_b.shape != phi_b.shape:
        raise DomainError("sigma_b and phi_b have different shapes")
    phi = hermitize(np.kron(h_a.phi, phi_b))
    sigma = np.kron(h_a.sigma_ref, sigma_b)
    return Hyperplane(phi, sigma, tuple(h_a.dims) + dims_b, h_a.parties, None)


def zero_diagonal_symmetric(eigenvalues, rng, tol=1e-10):
    """Real symmetric matrix with the given spectrum and zero diagonal.

    Starts from a random orthogonal rotation of ``diag(eigenvalues)`` and
    applies one Givens rotation per step, each zeroing one diagonal entry
    (Bendel-Mickey). The eigenvalues must sum to zero.
    """
    lam = np.asarray(eigenvalues, dtype=float)
    m = lam.size
    if abs(lam.sum()) > tol * max(1.0, np.abs(lam).max()):
        raise DomainError("a zero-diagonal matrix needs eigenvalues summing to zero")
    q, _ = np.linalg.qr(rng.standard_normal((m, m)))
    mat = (q * lam) @ q.T
    for _ in range(m - 1):
        d = np.diag(mat)
        i, j = int(np.argmin(d)), int(np.argmax(d))
        a, b, c = d[i], d[j], mat[i, j]
        if a >= 0 or b <= 0:
            break
        # choose tan(theta) so the rotated (i, i) entry becomes 0
        tau = (c + np.sqrt(c * c - a * b)) / b
        cs = 1.0 / np.sqrt(1.0 + tau * tau)
        sn = tau * cs
        rot = np.eye(m)
        rot[i, i] = rot[j, j] = cs
        rot[j, i], rot[i, j] = -sn, sn
        mat = rot.T @ mat @ rot
    mat = 0.5 * (mat + mat.T)
    np.fill_diagonal(mat, 0.0)
    got = np.sort(np.linalg.eigvalsh(mat))
    if np.max(np.abs(got - np.sort(lam))) > 1e-9 * max(1.0, np.abs(lam).max()):
        raise VerificationError("Givens chain did not preserve the prescribed spectrum")
    return mat


def _assemble_boundary_state(m, k, rng):
    """One attempt at a ``2m x 2m`` state with ``sigma > 0`` and ``rank sigma^Gamma = 2m - k``."""
    lam = np.sort(rng.uniform(0.5, 1.0, m - 1))[::-1]
    h = zero_diagonal_symmetric(np.append(lam, -lam.sum()), rng)
    d = np.arange(m, 0, -1) + rng.uniform(-0.2, 0.2, m)
    margin = 1e-2 * lam[-1]
    t0 = 0.125
    for _ in range(60):
        f = t0 * np.diag(d) + h
        w, u = np.linalg.eigh(f)
        w, u = w[::-1], u[:, ::-1]
        if w[-1] > 0:
            g = f - np.diag(w)
            gvals = np.linalg.eigvalsh(g)
            if np.count_nonzero(gvals > margin) == m - 1 and gvals[0] < -margin:
                break
        t0 *= 2.0
    else:
        raise VerificationError("could not find t0 with m-1 positive eigenvalues of G")

    # G = B B^H - B^H B with A = I and B = U Lambda^(1/2)
    gw, gv = np.linalg.eigh(g)
    e = -2.0 * gw[0] * projector(gv[:, 0])
    extra = m - k - 1
    if extra > 0:
        comp = gv[:, 1:] @ haar_unitary(m - 1, rng)[:, :extra]
        e = e + (comp * rng.uniform(0.5, 1.0, extra)) @ comp.conj().T
    b = u * np.sqrt(w)
    c = f + e
    sigma = np.block([[np.eye(m), b], [b.conj().T, c]])

    # local filter diag(alpha, 1) on the qubit balances the two diagonal blocks;
    # it and the local unitaries preserve sigma > 0 and rank sigma^Gamma
    alpha = np.sqrt(np.trace(c).real / m)
    filt = np.kron(np.diag([alpha, 1.0]), np.eye(m))
    sigma = filt @ sigma @ filt.T
    lu = local_unitary((2, m), rng)
    sigma = hermitize(lu @ sigma @ lu.conj().T)
    return sigma / np.trace(sigma).real


def gen_boundary_state(m, k, seed=None, max_attempts=20, tol=RANK_TOL):
    """Random full-rank ``2 x m`` state whose partial transpose has rank ``2m - k``.

    The state is returned with ``dims = (2, m)``; the partial transpose acts
    on the qubit. For ``k >= 1`` the state lies on the boundary of D and
    ``ker sigma^Gamma`` has dimension ``k``.
    """
    m, k = int(m), int(k)
    if m < 2 or not 0 <= k <= m - 1:
        raise DomainError(f"need m >= 2 and 0 <= k <= m - 1, got m={m}, k={k}")
    rng = rng_from(seed)
    dims = (2, m)
    last = "no attempt made"
    for _ in range(max_attempts):
        sigma = _assemble_boundary_state(m, k, rng)
        vals = eigvalsh(sigma)
        ok_pt, rank_pt = psd_rank(partial_transpose(sigma, dims), tol)
        if vals[-1] > tol and ok_pt and rank_pt == 2 * m - k:
            return sigma
        last = f"lambda_min={vals[-1]:.3e}, PT psd={ok_pt}, rank={rank_pt}"
    raise VerificationError(f"boundary-state generator failed after {max_attempts} attempts ({last})")


def paper_example_sigma():
    """The 6x6 qubit-qutrit boundary state with a two-dimensional ``ker sigma^Gamma``."""
    mat = np.array(
        [
            [1, 0, 0, 0, 6, 8],
            [0, 1, 0, 1, 0, 0],
            [0, 0, 1, 0, 0, 0],
            [0, 1, 0, 100, 0, 0],
            [6, 0, 0, 0, 46, 60],
            [8, 0, 0, 0, 60, 80],
        ],
        dtype=float,
    )
    return mat.astype(complex) / 229.0


def gen_singular_boundary_state(dims=(2, 2), seed=None):
    """Singular boundary state ``sum_i p_i |ii><ii|`` rotated by a random local unitary.

    Returns ``(sigma, hyperplane)`` where the hyperplane comes from the kernel
    vector ``(|01> - |10>)/sqrt(2)`` of ``sigma^Gamma`` (rotated alongside), which
    does not couple ``supp sigma`` to ``ker sigma``.
    """
    dims = tuple(int(d) for d in dims)
    if len(dims) != 2 or min(dims) < 2:
        raise DomainError(f"need a bipartite system with both dimensions >= 2, got {dims}")
    rng = rng_from(seed)
    da, db = dims
    r = min(da, db)
    p = rng.uniform(0.2, 1.0, r)
    p /= p.sum()
    sigma = np.zeros((da * db, da * db), dtype=complex)
    for i in range(r):
        e = np.zeros(da * db)
        e[i * db + i] = 1.0
        sigma += p[i] * np.outer(e, e)
    v = np.zeros(da * db, dtype=complex)
    v[0 * db + 1] = 1.0
    v[1 * db + 0] = -1.0
    v /= np.sqrt(2.0)
    ua, ub = haar_unitary(da, rng), haar_unitary(db, rng)
    lu = np.kron(ua, ub)
    sigma = hermitize(lu @ sigma @ lu.conj().T)
    # (U_A (x) U_B) X (..)^H transforms under Gamma_A into (conj(U_A) (x) U_B) X^Gamma (..)^H
    v = np.kron(ua.conj(), ub) @ v
    phi = hermitize(partial_transpose(projector(v), dims))
    return sigma, Hyperplane(phi, sigma, dims, (1,), None)
