"""Numerical ground truth for the closest PPT state.

``css_numeric`` minimizes ``S(rho || sigma')`` over PPT states by accelerated
projected gradient descent. The gradient of ``-Tr(rho log sigma')`` is
``-L_sigma'(rho)``; projections onto ``{sigma' >= 0, sigma'^Gamma >= 0, Tr = 1}``
use Dykstra's algorithm between two spectraplexes (the unit-trace PSD cone
in the plain frame and in the partially transposed frame), each projected
exactly by eigenvalue projection onto the probability simplex.
"""

import string
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ProjectionError
from .linalg import RANK_TOL, check_dims, eigh, hermitize, partial_transpose, projector, trace_inner
from .lsigma import apply_L, build_kernel
from .sampling import random_density, rng_from


@dataclass(frozen=True)
class OracleConfig:
    max_iters: int = 20000
    step_init: float = 1.0
    armijo_beta: float = 0.5
    tol_step: float = 1e-11
    dykstra_iters: int = 2000
    restarts: int = 4
    seed: int = 0

    def __post_init__(self):
        for name in ("max_iters", "step_init", "tol_step", "dykstra_iters", "restarts"):
            if getattr(self, name) <= 0:
                raise DomainError(f"OracleConfig.{name} must be positive")
        if not 0.0 < self.armijo_beta < 1.0:
            raise DomainError("OracleConfig.armijo_beta must lie in (0, 1)")
        if self.tol_step < 1e-12:
            raise DomainError("OracleConfig.tol_step must be at least 1e-12")


@dataclass
class OracleResult:
    minimizer: np.ndarray
    objective: float
    iterations: int
    converged: bool
    grad_residual: float
    history: list = field(default_factory=list, repr=False)
    restart_objectives: list = field(default_factory=list)
    restart_minimizers: list = field(default_factory=list, repr=False)


def _entropy_term(rho):
    """``Tr(rho log rho)`` with ``0 log 0 = 0``."""
    w = np.linalg.eigvalsh(rho)
    w = w[w > 0]
    return float(np.sum(w * np.log(w)))


def _cross_term(rho, sigma, tol=0.0):
    """``-Tr(rho log sigma)`` on the support of sigma; ``inf`` when rho leaks off it.

    Eigenvalues at or below ``tol * lambda_max`` count as kernel.
    """
    w, v = np.linalg.eigh(sigma)
    if w[0] < -1e-12 * max(1.0, w[-1]):
        return np.inf
    weights = np.real(np.einsum("ik,ij,jk->k", v.conj(), rho, v))
    pos = w > max(tol * w[-1], 1e-300)
    if np.any(weights[~pos] > 1e-13):
        return np.inf
    return float(-np.sum(weights[pos] * np.log(w[pos])))


def rel_entropy(rho, sigma, tol=RANK_TOL):
    """Quantum relative entropy ``S(rho || sigma)`` in nats.

    Returns ``inf`` exactly when the support of `rho` is not contained in
    the support of `sigma`.
    """
    rho = hermitize(rho)
    sigma = hermitize(sigma)
    if rho.shape != sigma.shape:
        raise DomainError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    spec = eigh(sigma)
    top = max(spec.values[0], 0.0)
    kernel = spec.values <= tol * top
    weights = np.real(np.einsum("ik,ij,jk->k", spec.vectors.conj(), rho, spec.vectors))
    if np.any(weights[kernel] > tol):
        return np.inf
    cross = -np.sum(weights[~kernel] * np.log(spec.values[~kernel]))
    return max(_entropy_term(rho) + float(cross), 0.0)


def project_simplex(v):
    """Euclidean projection of a real vector onto the probability simplex."""
    v = np.asarray(v, dtype=float)
    u = np.sort(v)[::-1]
    css = np.cumsum(u) - 1.0
    ind = np.arange(1, v.size + 1)
    r = np.nonzero(u - css / ind > 0)[0][-1]
    return np.maximum(v - css[r] / (r + 1.0), 0.0)


def project_spectraplex(m):
    """Frobenius projection onto ``{X >= 0, Tr X = 1}``."""
    w, v = np.linalg.eigh(hermitize(m))
    return (v * project_simplex(w)) @ v.conj().T


def _project_pt_spectraplex(m, dims, parties):
    # partial transpose is a Frobenius isometry, so project in the transposed frame
    return partial_transpose(project_spectraplex(partial_transpose(m, dims, parties)), dims, parties)


def _dykstra(m, dims, parties, iters, tol, feas_tol):
    """Dykstra iterations; returns ``(x, violation, sweeps, converged)``."""
    x = _project_pt_spectraplex(m, dims, parties)
    lam_min = np.linalg.eigvalsh(x)[0]
    if lam_min >= -feas_tol:
        return x, max(-lam_min, 0.0), 0, True
    p = np.zeros_like(x)
    q = np.zeros_like(x)
    for sweep in range(1, iters + 1):
        y = project_spectraplex(x + p)
        p = x + p - y
        x_new = _project_pt_spectraplex(y + q, dims, parties)
        q = y + q - x_new
        change = np.linalg.norm(x_new - x)
        x = x_new
        lam_min = np.linalg.eigvalsh(x)[0]
        if change < tol and lam_min >= -feas_tol:
            return x, max(-lam_min, 0.0), sweep, True
    return x, max(-lam_min, 0.0), iters, False


def dykstra_project(m, dims, parties=(1,), iters=2000, tol=1e-12, feas_tol=1e-10):
    """Nearest point (Frobenius) of ``PSD ∩ PPT ∩ {Tr = 1}`` to the hermitian `m`.

    Raises
    ------
    ProjectionError
        If the sweep budget runs out while a constraint is violated by more
        than ``1e-8``.
    """
    m = hermitize(m)
    dims = check_dims(dims, m.shape[0])
    x, violation, sweeps, _ = _dykstra(m, dims, tuple(parties), iters, tol, feas_tol)
    if violation > 1e-8:
        raise ProjectionError(
            f"Dykstra projection infeasible after {sweeps} sweeps (worst violation {violation:.3e})",
            violation,
            sweeps,
        )
    return hermitize(x)


def _pgd(rho, start, dims, parties, cfg):
    """Monotone accelerated projected gradient on ``-Tr(rho log sigma')``."""

    def project(m):
        return _dykstra(m, dims, parties, cfg.dykstra_iters, 1e-13, 1e-12)[0]

    def f(s):
        return _cross_term(rho, s)

    x = start
    fx = f(x)
    if not np.isfinite(fx):
        raise DomainError("starting point has infinite relative entropy")
    y, fy = x, fx
    t = 1.0
    eta = cfg.step_init
    history = [fx]
    step = np.inf
    residual = np.inf
    it = 0
    while it < cfg.max_iters:
        it += 1
        if y is not x:
            fy = f(y)
            if not np.isfinite(fy):
                y, fy, t = x, fx, 1.0
        g = -apply_L(build_kernel(y), rho)
        eta /= cfg.armijo_beta
        while True:
            z = project(y - eta * g)
            d = z - y
            fz = f(z)
            if fz <= fy + trace_inner(g, d) + trace_inner(d, d) / (2.0 * eta):
                break
            if np.linalg.norm(d) < cfg.tol_step:
                break
            eta *= cfg.armijo_beta
        step = np.linalg.norm(d)
        residual = step / eta
        if fz > fx and y is x:
            # a plain projected step from the best point cannot descend: the
            # objective is flat to working precision
            return x, fx, it, True, residual, history
        if fz <= fx:
            t_next = 0.5 * (1.0 + np.sqrt(1.0 + 4.0 * t * t))
            y = z + ((t - 1.0) / t_next) * (z - x)
            x, fx, t = z, fz, t_next
            history.append(fx)
        else:
            # restart momentum; x keeps the best value so far
            y, fy, t = x, fx, 1.0
        if step < cfg.tol_step:
            return x, fx, it, True, residual, history
    return x, fx, it, False, residual, history


def css_numeric(rho, dims, parties=(1,), cfg=None):
    """Closest PPT state of `rho` by projected gradient descent with restarts.

    The first start is the projection of ``(rho + I/n) / 2``; further starts
    mix a random density matrix in instead of `rho`. The result with the
    lowest objective is returned; its ``objective`` is ``S(rho || sigma*)``.
    """
    cfg = cfg or OracleConfig()
    rho = hermitize(rho)
    dims = check_dims(dims, rho.shape[0])
    parties = tuple(parties)
    n = rho.shape[0]
    entropy = _entropy_term(rho)
    seeds = np.random.SeedSequence(cfg.seed).spawn(cfg.restarts)
    best = None
    objectives = []
    minimizers = []
    for r, ss in enumerate(seeds):
        anchor = rho if r == 0 else random_density(n, rng_from(ss))
        start = dykstra_project(0.5 * anchor + 0.5 * np.eye(n) / n, dims, parties, cfg.dykstra_iters)
        x, fx, it, conv, res, hist = _pgd(rho, start, dims, parties, cfg)
        objective = entropy + fx
        objectives.append(objective)
        minimizers.append(hermitize(x))
        if best is None or objective < best.objective:
            best = OracleResult(hermitize(x), objective, it, conv, res, [entropy + h for h in hist])
    best.restart_objectives = objectives
    best.restart_minimizers = minimizers
    best.objective = max(best.objective, 0.0)
    return best


def gradient(rho, sigma):
    """Gradient ``-L_sigma(rho)`` of ``-Tr(rho log sigma)`` with respect to sigma."""
    return -hermitize(apply_L(build_kernel(sigma), rho))


def _contraction_subscripts(s, j):
    letters = string.ascii_letters
    rows, cols = letters[:s], letters[s : 2 * s]
    operands = [rows + cols]
    for i in range(s):
        if i != j:
            operands += ["Z" + rows[i], "Z" + cols[i]]
    return ",".join(operands) + "->Z" + rows[j] + cols[j]


def product_state_max(x, dims, restarts=200, seed=None, tol=1e-12, max_sweeps=1000):
    """Maximize ``<a1...as| x |a1...as>`` over product unit vectors.

    Alternating maximization: each party's vector is replaced by the top
    eigenvector of `x` contracted with the other parties' vectors. All
    restarts run as one batch; a restart stops improving when a sweep gains
    less than `tol`. Returns ``(value, product_state_density_matrix)``.
    """
    x = hermitize(x)
    dims = check_dims(dims, x.shape[0])
    s = len(dims)
    rng = rng_from(seed)
    tensor = x.reshape(dims + dims)
    vecs = []
    for d in dims:
        v = rng.standard_normal((restarts, d)) + 1j * rng.standard_normal((restarts, d))
        vecs.append(v / np.linalg.norm(v, axis=1, keepdims=True))
    subs = [_contraction_subscripts(s, j) for j in range(s)]
    value = np.full(restarts, -np.inf)
    for _ in range(max_sweeps):
        for j in range(s):
            ops = []
            for i in range(s):
                if i != j:
                    ops += [vecs[i].conj(), vecs[i]]
            local = np.einsum(subs[j], tensor, *ops, optimize=True)
            local = 0.5 * (local + np.conj(np.swapaxes(local, 1, 2)))
            w, v = np.linalg.eigh(local)
            vecs[j] = v[:, :, -1]
            new_value = w[:, -1]
        gain = new_value - value
        value = new_value
        if np.all(gain < tol):
            break
    best = int(np.argmax(value))
    ket = np.array([1.0 + 0j])
    for v in vecs:
        ket = np.kron(ket, v[best])
    state = projector(ket)
    return float(trace_inner(x, state)), state


def product_state_min(x, dims, restarts=200, seed=None):
    """Minimum of ``<a| x |a>`` over product states, via :func:`product_state_max` on ``-x``."""
    value, state = product_state_max(-np.asarray(x), dims, restarts=restarts, seed=seed)
    return -value, state
