"""Property suite for the strong concavity of ``A^t`` and ``log A``.

With ``R(A, B) = A + B - (A^(1/2) B^(1/2) + B^(1/2) A^(1/2))`` the suite checks
on random PSD pairs:

(i)   ``R(A, B) >= 0``;
(ii)  ``((1-s) A^(1/2) + s B^(1/2))^2 = (1-s) A + s B - (1-s) s R(A, B)``;
(iii) ``R(A, B) = 0`` exactly when ``A = B``;
(iv)  ``(1-s) f(A) + s f(B) <= f(M) <= f((1-s) A + s B)`` in the PSD order,
      ``M = (1-s) A + s B - (1-s) s R``, for ``f = x^(1/2), x^(1/4), log``;
(v)   strict concavity of ``Tr(rho log .)`` for ``rho > 0`` (positive margin);
(vi)  flatness of ``Tr(rho log .)`` along block pairs sharing the block on
      the support of a singular ``rho``.
"""

import time

import numpy as np

from .errors import DomainError
from .io import matrix_to_dict
from .linalg import eigvalsh, hermitize, mat_log_pd, mat_power_psd, trace_inner
from .sampling import haar_unitary, random_density, random_spectrum_density, rng_from

#: Tolerances used by each property; embedded in every report.
TOLERANCES = {
    "R_psd": 1e-9,
    "identity": 1e-10,
    "R_zero": 1e-9,
    "operator_order": 1e-9,
    "strict_margin": 0.0,
    "flatness": 1e-10,
}

PROPERTIES = (
    "i_R_psd",
    "ii_identity",
    "iii_R_zero_iff_equal",
    "iv_operator_concavity",
    "v_strict_concavity",
    "vi_block_flatness",
)

_MAX_COUNTEREXAMPLES = 5


def remainder(a, b):
    """``R(A, B) = A + B - (A^(1/2) B^(1/2) + B^(1/2) A^(1/2))``."""
    ra, rb = mat_power_psd(a, 0.5), mat_power_psd(b, 0.5)
    return hermitize(a + b - (ra @ rb + rb @ ra))


def _lambda_min(m):
    return float(eigvalsh(hermitize(m))[-1])


def _operator_gaps(a, b, s, func):
    """Smallest eigenvalues of the two gaps in the concavity chain for `func`."""
    mid = hermitize((1 - s) * a + s * b - (1 - s) * s * remainder(a, b))
    lower = (1 - s) * func(a) + s * func(b)
    return _lambda_min(func(mid) - lower), _lambda_min(func((1 - s) * a + s * b) - func(mid))


def _scaled_pair(n, rng, rank=None):
    a = random_density(n, rng, rank) * rng.uniform(0.5, 2.0)
    b = random_density(n, rng, rank) * rng.uniform(0.5, 2.0)
    return hermitize(a), hermitize(b)


def _block_fixture(n, rng):
    """Singular ``rho`` and two operators agreeing on its support; returns ``(rho, xi, eta)``."""
    r = int(rng.integers(1, n))
    w = haar_unitary(n, rng)
    rho = np.zeros((n, n), dtype=complex)
    rho[:r, :r] = random_density(r, rng)
    beta = random_spectrum_density(r, rng)
    xi = np.zeros((n, n), dtype=complex)
    eta = np.zeros((n, n), dtype=complex)
    xi[:r, :r] = eta[:r, :r] = beta
    xi[r:, r:] = random_spectrum_density(n - r, rng)
    eta[r:, r:] = random_spectrum_density(n - r, rng)
    rot = lambda m: hermitize(w @ m @ w.conj().T)  # noqa: E731
    expected = trace_inner(rho[:r, :r], mat_log_pd(beta))
    return rot(rho), rot(xi), rot(eta), expected


def appendix_suite(samples=1000, n=6, seed=None):
    """Run properties (i)-(vi) on `samples` random draws of order `n`.

    Returns a JSON-serializable report with per-property violation counts,
    the worst value seen, the smallest strict-concavity margin, the
    tolerances used, and up to five serialized counterexamples per property.
    """
    if samples < 1:
        raise DomainError("samples must be at least 1")
    if not 2 <= n <= 16:
        raise DomainError(f"n must lie in [2, 16], got {n}")
    rng = rng_from(seed)
    start = time.perf_counter()
    stats = {p: {"violations": 0, "worst": None, "counterexamples": []} for p in PROPERTIES}
    dims = (n,)

    def record(prop, bad, worst, better, **mats):
        entry = stats[prop]
        if entry["worst"] is None or better(worst, entry["worst"]):
            entry["worst"] = float(worst)
        if bad:
            entry["violations"] += 1
            if len(entry["counterexamples"]) < _MAX_COUNTEREXAMPLES:
                case = {k: matrix_to_dict(v, dims) for k, v in mats.items() if isinstance(v, np.ndarray)}
                case.update({k: float(v) for k, v in mats.items() if not isinstance(v, np.ndarray)})
                entry["counterexamples"].append(case)

    lower = lambda new, old: new < old  # noqa: E731
    higher = lambda new, old: new > old  # noqa: E731
    funcs = {
        "t=1/2": lambda m: mat_power_psd(m, 0.5),
        "t=1/4": lambda m: mat_power_psd(m, 0.25),
        "log": mat_log_pd,
    }

    for _ in range(samples):
        s = float(rng.uniform(0.0, 1.0))
        # rank-deficient pairs exercise (i)-(iii) on the closed cone
        rank = int(rng.integers(1, n + 1))
        for a, b in (_scaled_pair(n, rng, rank), _scaled_pair(n, rng)):
            r = remainder(a, b)
            lam = _lambda_min(r)
            record("i_R_psd", lam < -TOLERANCES["R_psd"], lam, lower, A=a, B=b)

            root = (1 - s) * mat_power_psd(a, 0.5) + s * mat_power_psd(b, 0.5)
            dev = float(np.max(np.abs(root @ root - ((1 - s) * a + s * b - (1 - s) * s * r))))
            record("ii_identity", dev > TOLERANCES["identity"], dev, higher, A=a, B=b, s=s)

            r_norm = float(np.linalg.norm(r))
            distinct = np.linalg.norm(a - b) > TOLERANCES["R_zero"]
            record("iii_R_zero_iff_equal", distinct and r_norm <= TOLERANCES["R_zero"], r_norm, lower, A=a, B=b)
            r_self = float(np.linalg.norm(remainder(a, a)))
            record("iii_R_zero_iff_equal", r_self > TOLERANCES["R_zero"], r_norm, lower, A=a)

        # a, b from the last (full-rank) pair
        for name, func in funcs.items():
            g1, g2 = _operator_gaps(a, b, s, func)
            worst = min(g1, g2)
            record("iv_operator_concavity", worst < -TOLERANCES["operator_order"], worst, lower, A=a, B=b, s=s)

        rho = hermitize(random_density(n, rng))
        sig, eta = hermitize(random_density(n, rng)), hermitize(random_density(n, rng))
        margin = trace_inner(rho, mat_log_pd(0.5 * (sig + eta))) - 0.5 * (
            trace_inner(rho, mat_log_pd(sig)) + trace_inner(rho, mat_log_pd(eta))
        )
        record("v_strict_concavity", margin <= TOLERANCES["strict_margin"], margin, lower, rho=rho, sigma=sig, eta=eta)

        rho_s, xi, eta_b, expected = _block_fixture(n, rng)
        dev = 0.0
        for t in (0.0, 0.25, 0.5, 0.75, 1.0):
            val = trace_inner(rho_s, mat_log_pd(t * xi + (1 - t) * eta_b))
            dev = max(dev, abs(val - expected))
        record("vi_block_flatness", dev > TOLERANCES["flatness"], dev, higher, rho=rho_s, xi=xi, eta=eta_b)

    total = sum(entry["violations"] for entry in stats.values())
    return {
        "samples": int(samples),
        "n": int(n),
        "seed": seed if seed is None or isinstance(seed, int) else str(seed),
        "passed": total == 0,
        "violations": total,
        "min_strict_margin": stats["v_strict_concavity"]["worst"],
        "tolerances": dict(TOLERANCES),
        "properties": stats,
        "seconds": time.perf_counter() - start,
    }
