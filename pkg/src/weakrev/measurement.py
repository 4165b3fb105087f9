"""
Complete ideal measurements and their action on states.

A measurement is a list of ``d x d`` operators ``A_r`` with
``sum_r A_r^dag A_r = 1``; outcome indices are 0-based. Each operator
caches its singular-value decomposition, which is all the information-gain
and reversal formulas need.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import qlin
from .errors import (
    CompletenessError,
    DimensionError,
    DomainError,
    ZeroProbabilityError,
)

COMPLETENESS_TOL = 1e-9
SUM_RULE_TOL = 1e-8
ZERO_PROBABILITY = 1e-12


@dataclass(frozen=True)
class MeasurementOperator:
    matrix: np.ndarray
    svd: qlin.SVDTriple

    @classmethod
    def from_matrix(cls, matrix):
        matrix = qlin.as_square(matrix).copy()
        matrix.setflags(write=False)
        return cls(matrix=matrix, svd=qlin.svd(matrix))

    @property
    def dim(self):
        return self.matrix.shape[0]

    @property
    def singular_values(self):
        return self.svd.singular_values

    @property
    def lambda_max(self):
        return self.svd.largest

    @property
    def lambda_min(self):
        return self.svd.smallest

    @property
    def is_zero(self):
        return self.lambda_max <= qlin.STRUCTURE_TOL

    def effect(self):
        """``A^dag A``."""
        return qlin.dagger(self.matrix) @ self.matrix

    def diagonal_part(self):
        """``D = sum_i lambda_i |v_i><v_i|`` (so that ``A = D U``)."""
        v = self.svd.left_basis
        return (v * self.singular_values) @ qlin.dagger(v)

    def unitary_part(self):
        """``U = sum_i |v_i><w_i|``, the isometric part of the operator."""
        return self.svd.left_basis @ qlin.dagger(self.svd.right_basis)


@dataclass(frozen=True)
class MeasurementSet:
    dimension: int
    operators: tuple

    def __len__(self):
        return len(self.operators)

    def __getitem__(self, r):
        return self.operators[r]

    def __iter__(self):
        return iter(self.operators)

    @property
    def n_outcomes(self):
        return len(self.operators)

    @property
    def matrices(self):
        return [op.matrix for op in self.operators]

    def completeness_residual(self):
        return completeness_residual(self.matrices)

    def sum_rule_residual(self):
        """``|sum_r sum_i lambda_i^2 - d|``."""
        total = sum(float(np.sum(op.singular_values**2)) for op in self.operators)
        return abs(total - self.dimension)

    def zero_outcomes(self):
        return [r for r, op in enumerate(self.operators) if op.is_zero]

    def _check_outcome(self, r):
        if not 0 <= r < len(self.operators):
            raise IndexError(f"outcome {r} out of range for {len(self.operators)} outcomes")
        return self.operators[r]


def completeness_residual(matrices):
    """Frobenius norm of ``sum_r A_r^dag A_r - 1``."""
    d = matrices[0].shape[0]
    total = sum(qlin.dagger(a) @ a for a in matrices)
    return qlin.frobenius(total - np.eye(d))


def new_measurement_set(d, matrices: Sequence, tol=COMPLETENESS_TOL):
    """Validate operators and build a :class:`MeasurementSet`.

    Raises
    ------
    DimensionError
        If any matrix is not ``d x d`` or the list is empty.
    CompletenessError
        If the completeness residual is not below ``tol``.
    """
    d = int(d)
    if d < 1:
        raise DimensionError(f"dimension must be >= 1, got {d}")
    mats = [qlin.as_matrix(m, f"operator {i}") for i, m in enumerate(matrices)]
    if not mats:
        raise DimensionError("a measurement needs at least one operator")
    for i, m in enumerate(mats):
        if m.shape != (d, d):
            raise DimensionError(f"operator {i} has shape {m.shape}, expected {(d, d)}")
    residual = completeness_residual(mats)
    if not residual < tol:
        raise CompletenessError(residual, tol)
    ops = tuple(MeasurementOperator.from_matrix(m) for m in mats)
    mset = MeasurementSet(dimension=d, operators=ops)
    sum_rule = mset.sum_rule_residual()
    if not sum_rule < SUM_RULE_TOL:  # pragma: no cover - implied by completeness
        raise CompletenessError(sum_rule, SUM_RULE_TOL)
    return mset


def outcome_probability(mset, r, psi):
    """Born probability ``<psi|A_r^dag A_r|psi>``."""
    op = mset._check_outcome(r)
    psi = qlin.as_pure_state(psi, mset.dimension)
    amp = op.matrix @ psi
    return float(np.vdot(amp, amp).real)


def outcome_probabilities(mset, psi):
    psi = qlin.as_pure_state(psi, mset.dimension)
    return np.array([np.linalg.norm(op.matrix @ psi) ** 2 for op in mset.operators])


def outcome_probability_mixed(mset, r, rho):
    """``tr(rho A_r^dag A_r)``."""
    op = mset._check_outcome(r)
    rho = qlin.as_density_matrix(rho, mset.dimension)
    return float(np.trace(rho @ op.effect()).real)


def post_measurement_state(mset, r, psi):
    """Normalized ``A_r|psi>``.

    Raises
    ------
    ZeroProbabilityError
        If ``p(r, psi) <= 1e-12``.
    """
    op = mset._check_outcome(r)
    psi = qlin.as_pure_state(psi, mset.dimension)
    amp = op.matrix @ psi
    p = float(np.vdot(amp, amp).real)
    if p <= ZERO_PROBABILITY:
        raise ZeroProbabilityError(f"outcome {r} has probability {p:.3e}")
    return amp / np.sqrt(p)


def _draw_outcome(probs, u):
    cdf = np.cumsum(probs)
    cdf /= cdf[-1]
    return np.minimum(np.searchsorted(cdf, u, side="right"), len(probs) - 1)


def sample_outcome(mset, psi, rng):
    """Draw an outcome with the Born rule and return it with the collapsed state."""
    rng = qlin.as_random_source(rng)
    probs = outcome_probabilities(mset, psi)
    r = int(_draw_outcome(probs, rng.generator.random()))
    return r, post_measurement_state(mset, r, psi)


def sample_outcomes(mset, psi, n, rng):
    """Vectorized outcome draws (no post-measurement states)."""
    rng = qlin.as_random_source(rng)
    probs = outcome_probabilities(mset, psi)
    return _draw_outcome(probs, rng.generator.random(n))


# ----------------------------------------------------------------------------
# Generators
# ----------------------------------------------------------------------------


def random_measurement_set(d, n_outcomes, rng):
    """Random complete set sliced from a Haar isometry.

    A Haar unitary of size ``n_outcomes * d`` is drawn; its first ``d``
    columns form an isometry whose consecutive ``d x d`` row blocks are the
    operators.
    """
    d, n = int(d), int(n_outcomes)
    if d < 1 or n < 1:
        raise DimensionError(f"need d >= 1 and n_outcomes >= 1, got d={d}, N={n}")
    iso = qlin.haar_unitary(n * d, rng)[:, :d]
    return new_measurement_set(d, [iso[r * d:(r + 1) * d] for r in range(n)])


def example_von_neumann(d=2):
    """Rank-1 projectors onto the computational basis."""
    d = int(d)
    if d < 2:
        raise DimensionError(f"von Neumann example needs d >= 2, got {d}")
    mats = []
    for i in range(d):
        p = np.zeros((d, d), dtype=np.complex128)
        p[i, i] = 1.0
        mats.append(p)
    return new_measurement_set(d, mats)


def example_weak_eta(eta):
    """Qubit weak measurement ``{sqrt(eta)|1><1|, |0><0| + sqrt(1-eta)|1><1|}``.

    ``eta`` is the probability of detecting ``|1>``. At ``eta = 0`` the
    first operator vanishes and the single-outcome identity set is returned
    instead.
    """
    eta = float(eta)
    if not 0.0 <= eta <= 1.0:
        raise DomainError(f"eta must lie in [0, 1], got {eta}")
    if eta == 0.0:
        return new_measurement_set(2, [np.eye(2)])
    a1 = np.diag([0.0, np.sqrt(eta)])
    a2 = np.diag([1.0, np.sqrt(1.0 - eta)])
    return new_measurement_set(2, [a1, a2])


def identity_set(d):
    return new_measurement_set(d, [np.eye(d)])


def saturating_measurement_set(d, a, rotation=None):
    """Measurement that meets the trade-off bound with equality.

    Operator ``r`` is ``sqrt(a+b)|r><r| + sqrt(b)(1 - |r><r|)`` with
    ``b = (1-a)/d``, so ``A_r^dag A_r = a|r><r| + b 1``.

    Parameters
    ----------
    d : int
    a : float
        Weight of the rank-1 part, in ``[0, 1]``.
    rotation : array_like, optional
        Unitary ``W``; every operator becomes ``W A_r W^dag``. Spectra and
        completeness are unchanged.
    """
    d = int(d)
    a = float(a)
    if d < 1:
        raise DimensionError(f"dimension must be >= 1, got {d}")
    if not 0.0 <= a <= 1.0:
        raise DomainError(f"a must lie in [0, 1], got {a}")
    b = (1.0 - a) / d
    mats = []
    for r in range(d):
        diag = np.full(d, np.sqrt(b))
        diag[r] = np.sqrt(a + b)
        mats.append(np.diag(diag).astype(np.complex128))
    if rotation is not None:
        w = qlin.as_square(rotation, "rotation")
        mats = [w @ m @ qlin.dagger(w) for m in mats]
    return new_measurement_set(d, mats)


# ----------------------------------------------------------------------------
# JSON interchange
# ----------------------------------------------------------------------------


def to_document(mset):
    """JSON-ready dict: ``{"dimension": d, "operators": [[[re, im], ...], ...]}``."""
    ops = []
    for m in mset.matrices:
        ops.append([[[float(z.real), float(z.imag)] for z in row] for row in m])
    return {"dimension": mset.dimension, "operators": ops}


def from_document(doc, tol=COMPLETENESS_TOL):
    """Parse the JSON measurement-set document.

    Raises ``ValueError`` (or a subclass) on schema problems.
    """
    if not isinstance(doc, dict) or "dimension" not in doc or "operators" not in doc:
        raise ValueError("document must be an object with 'dimension' and 'operators'")
    d = doc["dimension"]
    if not isinstance(d, int) or isinstance(d, bool):
        raise ValueError("'dimension' must be an integer")
    mats = []
    for i, op in enumerate(doc["operators"]):
        try:
            arr = np.array(op, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise ValueError(f"operator {i} is not a nested [re, im] array") from exc
        if arr.ndim != 3 or arr.shape[-1] != 2:
            raise ValueError(f"operator {i} must have shape (d, d, 2), got {arr.shape}")
        mats.append(arr[..., 0] + 1j * arr[..., 1])
    return new_measurement_set(d, mats, tol=tol)


def load(path, tol=COMPLETENESS_TOL):
    with open(path) as fh:
        return from_document(json.load(fh), tol=tol)


def dump(mset, path):
    with open(path, "w") as fh:
        json.dump(to_document(mset), fh)
