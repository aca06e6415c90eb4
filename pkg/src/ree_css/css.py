"""Inverse closest-separable-state construction.

Given a boundary state ``sigma`` and a supporting functional, every state
having ``sigma`` as its closest PPT state in relative entropy is

* ``rho(x) = sigma - x L_sigma^{-1}(phi)`` for full-rank ``sigma``, and
* ``rho(x) = (1 - x) sigma + x L_sigma^+(psi)`` for singular ``sigma``,

with ``0 < x <= x_max``. Both are stored as ``rho(x) = sigma - x * delta``.
Logarithms are natural; :data:`NATS_TO_BITS` converts.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .boundary import Hyperplane, PsiWitness, psi_from_phi
from .errors import DomainError
from .linalg import RANK_TOL, check_dims, hermitize, mat_log_support, trace_inner
from .lsigma import apply_L, apply_L_pinv, build_kernel, support_projector
from .oracle import product_state_max

NATS_TO_BITS = 1.0 / np.log(2.0)


@dataclass(frozen=True)
class CssFamily:
    """A one-parameter family of states sharing the closest PPT state ``sigma``."""

    sigma: np.ndarray
    witness: object
    delta: np.ndarray
    x_max: float
    dims: tuple
    parties: tuple = (1,)

    @property
    def singular(self):
        return isinstance(self.witness, PsiWitness)


def _largest_feasible_step(sigma, delta, support):
    """``sup {x >= 0 : sigma - x delta >= 0}`` computed on the support of ``sigma``."""
    s = support.conj().T @ sigma @ support
    d = support.conj().T @ delta @ support
    w, v = np.linalg.eigh(hermitize(s))
    inv_half = (v / np.sqrt(w)) @ v.conj().T
    top = np.linalg.eigvalsh(hermitize(inv_half @ d @ inv_half))[-1]
    return np.inf if top <= 0 else 1.0 / top


def build_family(sigma, witness, dims=None, tol=RANK_TOL):
    """Build the family of states whose closest PPT state is `sigma`.

    Parameters
    ----------
    sigma : ndarray
        Boundary state.
    witness : Hyperplane or PsiWitness
        A :class:`Hyperplane` selects the full-rank branch; for singular
        `sigma` it is converted with :func:`psi_from_phi`. A
        :class:`PsiWitness` selects the singular branch.
    """
    sigma = hermitize(sigma)
    dims = check_dims(dims if dims is not None else witness.dims, sigma.shape[0])
    ref = witness.sigma_ref
    if ref.shape != sigma.shape or np.linalg.norm(ref - sigma) > 1e-9:
        raise DomainError("witness was built for a different sigma")
    kernel = build_kernel(sigma, tol)
    full_rank = kernel.support_rank == kernel.order

    if isinstance(witness, Hyperplane) and full_rank:
        phi = witness.phi
        if abs(trace_inner(phi, sigma)) > 1e-9:
            raise DomainError(f"phi does not support sigma: Tr(phi sigma) = {trace_inner(phi, sigma):.3e}")
        delta = hermitize(apply_L_pinv(kernel, phi))
        if np.linalg.norm(delta) == 0:
            raise DomainError("phi is zero")
        x_max = _largest_feasible_step(sigma, delta, kernel.basis.vectors)
        return CssFamily(sigma, witness, delta, float(x_max), dims, tuple(witness.parties))

    if isinstance(witness, Hyperplane):
        witness = psi_from_phi(witness)
    if not isinstance(witness, PsiWitness):
        raise DomainError(f"unsupported witness type {type(witness).__name__}")
    p = support_projector(kernel)
    if np.linalg.norm(witness.psi - p) <= 1e-9:
        raise DomainError("degenerate witness: psi equals the support projector")
    delta = hermitize(sigma - apply_L_pinv(kernel, witness.psi))
    support = kernel.basis.vectors[:, : kernel.support_rank]
    x_max = min(1.0, _largest_feasible_step(sigma, delta, support))
    return CssFamily(sigma, witness, delta, float(x_max), dims, tuple(witness.parties))


def _check_x(f, x, allow_zero=True):
    if x < 0 or x > f.x_max * (1.0 + 1e-12) or (x == 0 and not allow_zero):
        raise DomainError(f"x = {x} outside [0, x_max = {f.x_max}]")


def family_state(f, x):
    """``rho(x) = sigma - x * delta`` for ``0 <= x <= x_max``."""
    _check_x(f, x)
    return hermitize(f.sigma - x * f.delta)


def ree_closed(f, x):
    """Relative entropy of entanglement of ``rho(x)`` in nats, in closed form.

    ``E_R = Tr(rho log rho) - Tr(sigma log sigma) + x Tr(delta log sigma)``.
    """
    _check_x(f, x)
    if x == 0:
        warnings.warn("x = 0 gives sigma itself, whose entanglement is zero", stacklevel=2)
        return 0.0
    rho = family_state(f, x)
    log_sigma = mat_log_support(f.sigma)
    return (
        trace_inner(rho, mat_log_support(rho))
        - trace_inner(f.sigma, log_sigma)
        + x * trace_inner(f.delta, log_sigma)
    )


def witness_operator(rho, sigma, tol=RANK_TOL):
    """``L_sigma(rho)``, the gradient of ``Tr(rho log sigma)`` at ``sigma``.

    Raises
    ------
    DomainError
        If `rho` has weight on the kernel of `sigma`.
    """
    kernel = build_kernel(sigma, tol)
    if kernel.support_rank < kernel.order:
        null = kernel.basis.vectors[:, kernel.support_rank:]
        leak = np.linalg.norm(np.asarray(rho) @ null)
        if leak > 1e-9:
            raise DomainError(f"rho does not vanish on ker sigma (|rho P_ker| = {leak:.3e})")
    return hermitize(apply_L(kernel, rho))


def css_condition_value(rho, sigma, dims, parties=(1,), restarts=200, seed=None, tol=RANK_TOL):
    """Maximum of ``Tr(sigma' L_sigma(rho))`` over product states ``sigma'``.

    Returns ``(value, at_sigma)`` where ``at_sigma = Tr(sigma L_sigma(rho))``.
    `sigma` is the closest PPT state of `rho` (at desk scale) when ``value``
    does not exceed 1 and ``at_sigma`` equals 1.
    """
    w = witness_operator(rho, sigma, tol)
    x_cut, cut_dims = group_cut(w, dims, parties)
    value, _ = product_state_max(x_cut, cut_dims, restarts=restarts, seed=seed)
    return value, trace_inner(sigma, w)


def group_cut(x, dims, parties):
    """Reorder tensor factors so `parties` come first; return ``(x, (d_cut, d_rest))``."""
    x = np.asarray(x)
    dims = check_dims(dims, x.shape[0])
    first = [p - 1 for p in sorted(set(parties))]
    rest = [i for i in range(len(dims)) if i not in first]
    if not rest:
        raise DomainError("the cut must leave at least one party on the other side")
    perm = first + rest
    s = len(dims)
    t = x.reshape(dims + dims).transpose(perm + [s + i for i in perm])
    d_cut = int(np.prod([dims[i] for i in first]))
    d_rest = int(np.prod([dims[i] for i in rest]))
    return t.reshape(x.shape), (d_cut, d_rest)


def segment_family(rho, sigma, t, t_max=None):
    """``t rho + (1 - t) sigma``; `sigma` stays the closest PPT state up to ``t_max``."""
    if t_max is None:
        t_max = segment_t_max(rho, sigma)
    if t < 0 or t > t_max * (1.0 + 1e-12):
        raise DomainError(f"t = {t} outside [0, t_max = {t_max}]")
    return hermitize(t * np.asarray(rho) + (1.0 - t) * np.asarray(sigma))


def segment_t_max(rho, sigma, tol=RANK_TOL):
    """Largest ``t`` with ``t rho + (1 - t) sigma >= 0``."""
    kernel = build_kernel(sigma, tol)
    support = kernel.basis.vectors[:, : kernel.support_rank]
    return _largest_feasible_step(hermitize(sigma), hermitize(np.asarray(sigma) - rho), support)
