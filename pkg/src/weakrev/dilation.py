"""
Unitary dilation of a measurement.

The system (dimension ``d``) is coupled to an ``N``-level ancilla prepared in
``|0>``; a unitary ``U`` with ``U(|psi>|0>) = sum_r A_r|psi>|r>`` followed by
a projective readout of the ancilla reproduces the measurement. If every
outcome probability is independent of the input, the conditional system
states are unitary images of the input and the input can be recovered with
certainty.

Composite indices are ordered system-major: ``|i>|r>`` sits at ``i*N + r``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qlin
from .errors import DomainError, InformationWasExtractedError, ZeroProbabilityError
from .measurement import ZERO_PROBABILITY

INFO_FREE_TOL = 1e-9


@dataclass(frozen=True)
class DilatedMeasurement:
    system_dim: int
    ancilla_dim: int
    dilation_unitary: np.ndarray
    ancilla_projectors: tuple

    def input_columns(self):
        """Indices of the columns ``|j>|0>``."""
        return np.arange(self.system_dim) * self.ancilla_dim

    def isometry(self):
        return self.dilation_unitary[:, self.input_columns()]

    def kraus(self, r):
        """Recover ``A_r`` as ``(1 x <r|) U (1 x |0>)``."""
        return self.isometry()[r::self.ancilla_dim, :]

    def basis_images(self):
        """``|psi_j> = U |j>|0>`` as columns."""
        return self.isometry()

    def embed(self, psi):
        full = np.zeros(self.system_dim * self.ancilla_dim, dtype=np.complex128)
        full[self.input_columns()] = psi
        return full

    def apply(self, psi):
        """``U (|psi> x |0>)``."""
        psi = qlin.as_pure_state(psi, self.system_dim)
        return self.dilation_unitary @ self.embed(psi)

    def probabilities(self, psi):
        out = self.apply(psi).reshape(self.system_dim, self.ancilla_dim)
        return np.sum(np.abs(out) ** 2, axis=0)

    def conditional_state(self, psi, r):
        """Normalized system state left after reading ancilla outcome ``r``."""
        out = self.apply(psi).reshape(self.system_dim, self.ancilla_dim)[:, r]
        p = float(np.vdot(out, out).real)
        if p <= ZERO_PROBABILITY:
            raise ZeroProbabilityError(f"ancilla outcome {r} has probability {p:.3e}")
        return out / np.sqrt(p)


@dataclass(frozen=True)
class InformationReport:
    per_outcome_orthogonality_residual: tuple
    probability_spread: tuple
    kraus_residual: tuple
    information_free: bool
    routes_agree: bool


def _complete_unitary(columns, fixed_positions, size):
    """Fill the free columns by Gram-Schmidt over canonical basis vectors."""
    u = np.zeros((size, size), dtype=np.complex128)
    u[:, fixed_positions] = columns
    basis = [columns[:, j] for j in range(columns.shape[1])]
    taken = set(fixed_positions.tolist())
    free = [c for c in range(size) if c not in taken]
    candidates = iter(range(size))
    for col in free:
        while True:
            vec = qlin.basis_state(size, next(candidates))
            for _ in range(2):
                for q in basis:
                    vec -= q * np.vdot(q, vec)
            norm = np.linalg.norm(vec)
            if norm > 1e-6:
                break
        vec /= norm
        basis.append(vec)
        u[:, col] = vec
    return u


def dilate(mset):
    """Unitary dilation of a complete measurement on a single ``N``-level ancilla."""
    d, n = mset.dimension, mset.n_outcomes
    size = d * n
    iso = np.zeros((size, d), dtype=np.complex128)
    for r, a in enumerate(mset.matrices):
        iso[r::n, :] = a
    positions = np.arange(d) * n
    u = _complete_unitary(iso, positions, size)
    projectors = []
    for r in range(n):
        anc = np.zeros((n, n))
        anc[r, r] = 1.0
        projectors.append(np.kron(np.eye(d), anc))
    return DilatedMeasurement(
        system_dim=d, ancilla_dim=n, dilation_unitary=u, ancilla_projectors=tuple(projectors)
    )


def _fourier(d):
    k = np.arange(d)
    return np.exp(2j * np.pi * np.outer(k, k) / d) / np.sqrt(d)


def orthogonality_residual(dilated, r):
    """Largest cross term ``|<psi_j|r><r|psi_k>|`` over distinct basis pairs.

    Pairs are taken in the computational and in the Fourier basis: the
    cross terms vanish in both exactly when the outcome's effect is
    proportional to the identity.
    """
    d = dilated.system_dim
    if d == 1:
        return 0.0
    a = dilated.kraus(r)
    worst = 0.0
    for basis in (np.eye(d), _fourier(d)):
        images = a @ basis
        gram = qlin.dagger(images) @ images
        off = gram - np.diag(np.diag(gram))
        worst = max(worst, float(np.abs(off).max()))
    return worst


def _kraus_residuals(dilated):
    """Distance of each ``A_r^dag A_r`` from its multiple of the identity."""
    d = dilated.system_dim
    out = []
    for r in range(dilated.ancilla_dim):
        a = dilated.kraus(r)
        eff = qlin.dagger(a) @ a
        out.append(qlin.frobenius(eff - np.trace(eff).real / d * np.eye(d)))
    return tuple(out)


def _is_information_free(dilated, tol):
    return all(x < tol for x in _kraus_residuals(dilated))


def information_report(dilated, samples, rng, tol=INFO_FREE_TOL):
    """Decide whether the dilated measurement extracts any information.

    Three routes are evaluated per outcome: cross terms between basis
    images, the spread of outcome probabilities over sampled inputs
    (computational and Fourier basis states plus ``samples`` Haar states),
    and the exact criterion ``A_r^dag A_r`` proportional to the identity.
    The last one decides ``information_free``; sampling can only falsify.
    """
    samples = int(samples)
    if samples < 10:
        raise DomainError(f"samples must be >= 10, got {samples}")
    d, n = dilated.system_dim, dilated.ancilla_dim
    inputs = np.vstack([np.eye(d), _fourier(d).T, qlin.random_pure_states(d, samples, rng)])
    probs = np.array([dilated.probabilities(psi) for psi in inputs])
    spread = tuple(float(x) for x in probs.max(axis=0) - probs.min(axis=0))
    ortho = tuple(orthogonality_residual(dilated, r) for r in range(n))
    kraus = _kraus_residuals(dilated)

    by_kraus = all(x < tol for x in kraus)
    by_ortho = all(x < tol for x in ortho)
    by_spread = all(x < tol for x in spread)
    return InformationReport(
        per_outcome_orthogonality_residual=ortho,
        probability_spread=spread,
        kraus_residual=kraus,
        information_free=by_kraus,
        routes_agree=by_kraus == by_ortho == by_spread,
    )


def recovery_unitary(dilated, r):
    """Unitary mapping the normalized images ``<r|psi_j>`` back to ``|j>``."""
    images = dilated.kraus(r)
    norms = np.linalg.norm(images, axis=0)
    if norms.max() ** 2 <= ZERO_PROBABILITY:
        raise ZeroProbabilityError(f"ancilla outcome {r} never occurs")
    return qlin.dagger(images / norms)


def deterministic_retrieval(dilated, r, residual, tol=INFO_FREE_TOL):
    """Recover the input from the system state left after ancilla outcome ``r``.

    Raises
    ------
    InformationWasExtractedError
        If some outcome probability depends on the input.
    ZeroProbabilityError
        If outcome ``r`` never occurs.
    """
    if not 0 <= r < dilated.ancilla_dim:
        raise IndexError(f"outcome {r} out of range for {dilated.ancilla_dim} outcomes")
    if not _is_information_free(dilated, tol):
        raise InformationWasExtractedError(
            "outcome probabilities depend on the input; retrieval is not deterministic"
        )
    residual = qlin.as_pure_state(residual, dilated.system_dim)
    return recovery_unitary(dilated, r) @ residual


def measure_dilated(dilated, psi, rng):
    """Sample an ancilla readout and return ``(r, conditional system state)``."""
    rng = qlin.as_random_source(rng)
    probs = dilated.probabilities(psi)
    cdf = np.cumsum(probs)
    r = int(min(np.searchsorted(cdf / cdf[-1], rng.generator.random(), side="right"), len(probs) - 1))
    return r, dilated.conditional_state(psi, r)
