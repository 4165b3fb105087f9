"""
Dense complex linear algebra and random ensembles.

Matrices and state vectors are plain ``numpy`` arrays of dtype
``complex128``. The helpers here validate them, compute a deterministic
singular-value decomposition, and draw Haar-distributed unitaries, pure
states and density matrices from reproducible random streams.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionError, StateError

#: Structural checks (unit norm, Hermiticity, unitarity).
STRUCTURE_TOL = 1e-10
#: Reconstruction and equality assertions.
EQUALITY_TOL = 1e-9

# Singular values closer than this (relative to max(1, lambda_0)) are treated
# as one degenerate cluster when canonicalizing bases.
_CLUSTER_TOL = 1e-11
# Projection norms below this are skipped when building canonical bases.
_PIVOT_TOL = 1e-4


def as_matrix(m, name="matrix"):
    """Return ``m`` as a finite 2-D complex array."""
    arr = np.asarray(m, dtype=np.complex128)
    if arr.ndim != 2 or arr.shape[0] == 0 or arr.shape[1] == 0:
        raise DimensionError(f"{name} must be a non-empty 2-D array, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def as_square(m, name="matrix"):
    arr = as_matrix(m, name)
    if arr.shape[0] != arr.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {arr.shape}")
    return arr


def dagger(m):
    return np.conj(np.swapaxes(m, -1, -2))


def frobenius(m):
    return float(np.linalg.norm(m))


def unitarity_residual(u):
    """Frobenius norm of ``U^dag U - 1``."""
    u = np.asarray(u)
    return frobenius(dagger(u) @ u - np.eye(u.shape[-1]))


def as_pure_state(psi, dim=None, tol=STRUCTURE_TOL):
    """Validate a state vector and return it as a complex 1-D array.

    Parameters
    ----------
    psi : array_like
        Amplitudes in the computational basis.
    dim : int, optional
        Required length.
    tol : float
        Allowed deviation of the Euclidean norm from one.
    """
    vec = np.asarray(psi, dtype=np.complex128)
    if vec.ndim != 1 or vec.size == 0:
        raise DimensionError(f"state must be a non-empty 1-D array, got shape {vec.shape}")
    if dim is not None and vec.size != dim:
        raise DimensionError(f"state has dimension {vec.size}, expected {dim}")
    norm = np.linalg.norm(vec)
    if not np.isfinite(norm) or abs(norm - 1.0) > tol:
        raise StateError(f"state norm {norm!r} differs from 1 by more than {tol:g}")
    return vec


def as_density_matrix(rho, dim=None, tol=STRUCTURE_TOL):
    """Validate a density matrix (Hermitian, unit trace, positive)."""
    mat = as_square(rho, "density matrix")
    if dim is not None and mat.shape[0] != dim:
        raise DimensionError(f"density matrix has dimension {mat.shape[0]}, expected {dim}")
    if frobenius(mat - dagger(mat)) > tol:
        raise StateError("density matrix is not Hermitian")
    if abs(np.trace(mat) - 1.0) > tol:
        raise StateError(f"density matrix trace {np.trace(mat).real!r} is not 1")
    if np.linalg.eigvalsh(mat).min() < -tol:
        raise StateError("density matrix has a negative eigenvalue")
    return mat


def basis_state(dim, index):
    vec = np.zeros(dim, dtype=np.complex128)
    vec[index] = 1.0
    return vec


def fidelity(psi, phi):
    """Overlap ``|<psi|phi>|^2`` of two normalized vectors."""
    return float(abs(np.vdot(psi, phi)) ** 2)


def psd_sqrt(m):
    """Positive square root of a Hermitian positive semidefinite matrix.

    Tiny negative eigenvalues from rounding are clipped to zero.
    """
    h = 0.5 * (m + dagger(m))
    vals, vecs = np.linalg.eigh(h)
    return (vecs * np.sqrt(np.clip(vals, 0.0, None))) @ dagger(vecs)


# ----------------------------------------------------------------------------
# Singular-value decomposition
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class SVDTriple:
    """``m = sum_i singular_values[i] |v_i><w_i|``.

    ``left_basis[:, i]`` is ``|v_i>`` and ``right_basis[:, i]`` is ``|w_i>``.
    Singular values are sorted in non-increasing order.
    """

    left_basis: np.ndarray
    singular_values: np.ndarray
    right_basis: np.ndarray

    def __post_init__(self):
        for arr in (self.left_basis, self.singular_values, self.right_basis):
            arr.setflags(write=False)

    @property
    def dim(self):
        return self.singular_values.size

    @property
    def largest(self):
        return float(self.singular_values[0])

    @property
    def smallest(self):
        return float(self.singular_values[-1])

    def reconstruct(self):
        return (self.left_basis * self.singular_values) @ dagger(self.right_basis)


def _canonical_basis(block):
    """Deterministic orthonormal basis for the column span of ``block``.

    Canonical basis vectors are projected onto the subspace and
    Gram-Schmidt orthonormalized in index order, so the result depends only
    on the subspace. Each vector has a real positive entry at its pivot.
    """
    d, k = block.shape
    proj = block @ dagger(block)
    out = []
    for idx in range(d):
        if len(out) == k:
            break
        vec = proj[:, idx].copy()
        for _ in range(2):
            for q in out:
                vec -= q * np.vdot(q, vec)
        norm = np.linalg.norm(vec)
        if norm > _PIVOT_TOL:
            out.append(vec / norm)
    if len(out) < k:  # pragma: no cover - pivot threshold is far below sqrt(k/d)
        raise ArithmeticError("failed to build canonical basis")
    return np.column_stack(out)


def _polar_isometry(b):
    u, _, vh = np.linalg.svd(b, full_matrices=False)
    return u @ vh


def svd(m):
    """Singular-value decomposition with a deterministic basis choice.

    Within every cluster of (numerically) degenerate singular values the
    right singular vectors are replaced by the canonical basis of their
    span, and the matching left vectors are recomputed as the isometric
    part of ``m`` restricted to that span. For the identity this returns
    the computational basis on both sides.

    Parameters
    ----------
    m : array_like, shape (d, d)

    Returns
    -------
    SVDTriple

    Raises
    ------
    DimensionError
        If ``m`` is not square.
    """
    m = as_square(m)
    u, s, vh = np.linalg.svd(m)
    w = dagger(vh)
    d = s.size
    tol = _CLUSTER_TOL * max(1.0, s[0])
    left = np.empty_like(u)
    right = np.empty_like(w)

    start = 0
    while start < d:
        stop = start + 1
        while stop < d and s[stop - 1] - s[stop] <= tol:
            stop += 1
        right[:, start:stop] = _canonical_basis(w[:, start:stop])
        if s[start] > tol:
            left[:, start:stop] = _polar_isometry(m @ right[:, start:stop])
        else:
            # null cluster: only the span of the remaining left vectors is fixed
            left[:, start:stop] = _canonical_basis(u[:, start:stop])
        start = stop

    return SVDTriple(left_basis=left, singular_values=s.copy(), right_basis=right)


# ----------------------------------------------------------------------------
# Random ensembles
# ----------------------------------------------------------------------------


@dataclass
class RandomSource:
    """Seeded random stream.

    The same ``(seed, stream_id)`` always reproduces the same draws.
    Consumers that split work into independent pieces use :meth:`fork` to
    obtain a fresh key and then open one stream per piece with
    ``RandomSource(key, piece_index)``.
    """

    seed: int = 0
    stream_id: int = 0
    generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if not 0 <= int(value) < 2**64:
                raise ValueError(f"{name} must be a 64-bit unsigned integer, got {value}")
        seq = np.random.SeedSequence(int(self.seed), spawn_key=(int(self.stream_id),))
        self.generator = np.random.Generator(np.random.PCG64(seq))

    def fork(self):
        """Draw a 64-bit key for deriving independent child streams."""
        return int(self.generator.integers(0, 2**63, dtype=np.int64))

    def complex_normal(self, shape):
        """Standard complex Gaussian samples, ``E|z|^2 = 1``."""
        g = self.generator
        return (g.standard_normal(shape) + 1j * g.standard_normal(shape)) / np.sqrt(2.0)


def as_random_source(rng):
    if isinstance(rng, RandomSource):
        return rng
    if rng is None:
        return RandomSource()
    return RandomSource(int(rng))


def _check_dim(d):
    if int(d) < 1:
        raise DimensionError(f"dimension must be >= 1, got {d}")
    return int(d)


def haar_unitaries(d, n, rng):
    """Stack of ``n`` Haar-random ``d x d`` unitaries, shape ``(n, d, d)``.

    Ginibre matrices are QR-factorized and the phases of ``R``'s diagonal
    are pushed into ``Q``, which makes the distribution exactly Haar.
    """
    d = _check_dim(d)
    rng = as_random_source(rng)
    z = rng.complex_normal((n, d, d))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (diag / np.abs(diag))[:, None, :]


def haar_unitary(d, rng):
    """Haar-random ``d x d`` unitary."""
    return haar_unitaries(d, 1, rng)[0]


def random_pure_states(d, n, rng):
    d = _check_dim(d)
    rng = as_random_source(rng)
    z = rng.complex_normal((n, d))
    return z / np.linalg.norm(z, axis=1, keepdims=True)


def random_pure_state(d, rng):
    """Haar-random pure state (normalized complex Gaussian vector)."""
    return random_pure_states(d, 1, rng)[0]


def random_density_matrix(d, rng):
    """Random density matrix ``G G^dag / tr(G G^dag)`` with Ginibre ``G``."""
    d = _check_dim(d)
    rng = as_random_source(rng)
    g = rng.complex_normal((d, d))
    rho = g @ dagger(g)
    rho = 0.5 * (rho + dagger(rho))
    return rho / np.trace(rho).real


def random_hermitian(d, rng, norm=1.0):
    """Random Hermitian matrix with Frobenius norm ``norm``."""
    d = _check_dim(d)
    rng = as_random_source(rng)
    g = rng.complex_normal((d, d))
    h = 0.5 * (g + dagger(g))
    return h * (norm / np.linalg.norm(h))


def block_sizes(total, block):
    """Split ``total`` trials into consecutive blocks of at most ``block``."""
    sizes = [block] * (total // block)
    if total % block:
        sizes.append(total % block)
    return sizes
