"""
Reversing and erasing operators.

For an outcome operator ``A = V D W^dag`` with smallest singular value
``lambda_min > 0`` the optimal reversing operator is
``R = lambda_min W D^-1 V^dag``, so that ``R A = lambda_min * 1``. It is
completed to a two-outcome measurement by ``sqrt(1 - R^dag R)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qlin
from .errors import DomainError, NonReversibleError, ZeroProbabilityError
from .infogain import MonteCarloEstimate, _estimate
from .measurement import (
    ZERO_PROBABILITY,
    new_measurement_set,
    outcome_probabilities,
    outcome_probability,
    post_measurement_state,
    _draw_outcome,
)

REVERSIBLE_TOL = 1e-8
SIM_BLOCK = 65536


@dataclass(frozen=True)
class ReversalKit:
    outcome: int
    reversing_operator: np.ndarray
    complement_operator: np.ndarray
    eta: float

    def as_measurement(self):
        """The two-outcome reversing measurement ``{R, sqrt(1 - R^dag R)}``."""
        d = self.reversing_operator.shape[0]
        return new_measurement_set(d, [self.reversing_operator, self.complement_operator])


@dataclass(frozen=True)
class EraseResult:
    erase_probability: float
    residual_state: np.ndarray


@dataclass(frozen=True)
class ReversalSimulation(MonteCarloEstimate):
    """Undo-success rate plus the worst fidelity deficit over successful undos."""

    max_fidelity_deficit: float = 0.0
    successes: int = 0


def _reversible_operator(mset, r, tol):
    op = mset._check_outcome(r)
    if op.lambda_min <= tol:
        raise NonReversibleError(
            f"outcome {r} has smallest singular value {op.lambda_min:.3e} <= {tol:g}"
        )
    return op


def is_reversible(mset, r, tol=REVERSIBLE_TOL):
    return mset._check_outcome(r).lambda_min > tol


def reversing_operator(mset, r, tol=REVERSIBLE_TOL):
    """Build the optimal reversing operator for outcome ``r``.

    Raises
    ------
    NonReversibleError
        If the smallest singular value is ``<= tol``.
    """
    op = _reversible_operator(mset, r, tol)
    svd = op.svd
    eta = op.lambda_min
    rev = (svd.right_basis * (eta / svd.singular_values)) @ qlin.dagger(svd.left_basis)
    comp = qlin.psd_sqrt(np.eye(mset.dimension) - qlin.dagger(rev) @ rev)
    return ReversalKit(outcome=r, reversing_operator=rev, complement_operator=comp, eta=eta)


def reversal_probability(mset, r, psi, tol=REVERSIBLE_TOL):
    """Success probability of the optimal reversal after outcome ``r``: ``lambda_min^2 / p(r, psi)``."""
    op = _reversible_operator(mset, r, tol)
    p = outcome_probability(mset, r, psi)
    if p <= ZERO_PROBABILITY:
        raise ZeroProbabilityError(f"outcome {r} has probability {p:.3e}")
    return op.lambda_min**2 / p


def reversibility(mset):
    """Mean reversal probability ``sum_r lambda_min^2``; independent of the input."""
    return float(sum(op.lambda_min**2 for op in mset.operators))


def disturbance(mset):
    return 1.0 - reversibility(mset)


def erasing_operator(mset, r, tol=REVERSIBLE_TOL):
    """``E = sum_i (lambda_min / lambda_i) |v_i><v_i|``.

    Applied after ``A`` it leaves ``lambda_min`` times the isometric part
    ``sum_i |v_i><w_i|``, which no longer depends on the singular values.
    """
    op = _reversible_operator(mset, r, tol)
    v = op.svd.left_basis
    return (v * (op.lambda_min / op.singular_values)) @ qlin.dagger(v)


def apply_erasure(mset, r, psi, tol=REVERSIBLE_TOL):
    """Apply the erasing operator to the post-measurement state.

    Returns
    -------
    EraseResult
        ``erase_probability`` is the squared norm of ``E|psi_r>`` and
        ``residual_state`` its normalized version, equal to ``U|psi>`` up to
        a global phase.
    """
    e = erasing_operator(mset, r, tol)
    post = post_measurement_state(mset, r, psi)
    out = e @ post
    prob = float(np.vdot(out, out).real)
    return EraseResult(erase_probability=prob, residual_state=out / np.sqrt(prob))


def simulate_measure_and_reverse(mset, psi, trials, rng, tol=REVERSIBLE_TOL, block=SIM_BLOCK):
    """Stochastic measure-then-reverse experiment.

    Every trial samples an outcome ``r`` and then runs the reversing
    measurement for ``r``; a trial succeeds when the reversing branch fires.
    Outcomes without a reversing operator count as failures. Each
    successful branch is checked to return ``psi`` exactly.
    """
    trials = int(trials)
    if trials < 100:
        raise DomainError(f"trials must be >= 100, got {trials}")
    psi = qlin.as_pure_state(psi, mset.dimension)
    rng = qlin.as_random_source(rng)
    key = rng.fork()
    probs = outcome_probabilities(mset, psi)

    # the post-reversal state of outcome r does not depend on the trial
    success_prob = np.zeros(mset.n_outcomes)
    deficits = np.zeros(mset.n_outcomes)
    for r in range(mset.n_outcomes):
        if probs[r] <= ZERO_PROBABILITY or not is_reversible(mset, r, tol):
            continue
        kit = reversing_operator(mset, r, tol)
        restored = kit.reversing_operator @ post_measurement_state(mset, r, psi)
        success_prob[r] = float(np.vdot(restored, restored).real)
        restored = restored / np.sqrt(success_prob[r])
        deficits[r] = 1.0 - qlin.fidelity(psi, restored)

    total = 0
    worst = 0.0
    for k, n in enumerate(qlin.block_sizes(trials, block)):
        gen = qlin.RandomSource(key, k).generator
        outcomes = _draw_outcome(probs, gen.random(n))
        hits = gen.random(n) < success_prob[outcomes]
        total += int(hits.sum())
        if hits.any():
            worst = max(worst, float(deficits[outcomes[hits]].max()))
    est = _estimate(float(total), float(total), trials)
    return ReversalSimulation(
        mean=est.mean,
        std_error=est.std_error,
        samples=trials,
        max_fidelity_deficit=worst,
        successes=total,
    )
