"""Seeded random matrices: Haar unitaries, density matrices, product states."""

import numpy as np


def rng_from(seed):
    """Accept a seed, ``SeedSequence`` or ``Generator`` and return a ``Generator``."""
    if isinstance(seed, np.random.Generator):
        return seed
    return np.random.default_rng(seed)


def haar_unitary(n, rng):
    """Haar-distributed unitary via QR of a complex Ginibre matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def random_hermitian(n, rng):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return 0.5 * (z + z.conj().T)


def random_density(n, rng, rank=None):
    """Random density matrix of the given rank (Hilbert-Schmidt measure at full rank)."""
    rank = n if rank is None else rank
    g = rng.standard_normal((n, rank)) + 1j * rng.standard_normal((n, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_spectrum_density(n, rng, low=0.05, high=1.0):
    """Full-rank density matrix with eigenvalues drawn from ``[low, high]``."""
    vals = rng.uniform(low, high, size=n)
    u = haar_unitary(n, rng)
    rho = (u * (vals / vals.sum())) @ u.conj().T
    return 0.5 * (rho + rho.conj().T)


def random_pure_product(dims, rng):
    """Random product ket ``a1 (x) ... (x) as`` with Haar-random factors."""
    out = np.array([1.0 + 0j])
    for d in dims:
        v = rng.standard_normal(d) + 1j * rng.standard_normal(d)
        out = np.kron(out, v / np.linalg.norm(v))
    return out


def local_unitary(dims, rng):
    """Tensor product of independent Haar unitaries on each factor."""
    out = np.array([[1.0 + 0j]])
    for d in dims:
        out = np.kron(out, haar_unitary(d, rng))
    return out
