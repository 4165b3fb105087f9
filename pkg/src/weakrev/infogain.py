"""
Information gain of a measurement.

The closed form depends only on the largest singular value of each
operator. Two independent routes reproduce it: a Monte Carlo average over
Haar-random inputs for an arbitrary guess strategy, and an exact
evaluation through the two-copy twirl ``int (U^dag x U^dag) O (U x U) dU``,
which collapses onto the span of the identity and the swap.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import qlin
from .errors import DegenerateOperatorError, DimensionError, DomainError

MC_BLOCK = 16384
TWIRL_BLOCK = 8192


@dataclass(frozen=True)
class GuessStrategy:
    """One estimate state per outcome."""

    guesses: tuple

    def __post_init__(self):
        checked = tuple(qlin.as_pure_state(g) for g in self.guesses)
        object.__setattr__(self, "guesses", checked)

    @classmethod
    def optimal(cls, mset):
        """Guess ``|w_0^r>`` for every outcome (``|0>`` for zero operators)."""
        d = mset.dimension
        return cls(tuple(
            qlin.basis_state(d, 0) if op.is_zero else optimal_guess(mset, r)
            for r, op in enumerate(mset.operators)
        ))

    @classmethod
    def constant(cls, mset, state):
        return cls((state,) * mset.n_outcomes)

    def __len__(self):
        return len(self.guesses)


@dataclass(frozen=True)
class MonteCarloEstimate:
    mean: float
    std_error: float
    samples: int

    def z_score(self, target):
        if self.std_error == 0.0:
            return 0.0 if self.mean == target else float("inf")
        return (self.mean - target) / self.std_error

    def agrees_with(self, target, n_sigma=4.0):
        return abs(self.mean - target) <= n_sigma * self.std_error


def _estimate(total, total_sq, n):
    mean = total / n
    var = max(total_sq / n - mean * mean, 0.0) * n / max(n - 1, 1)
    return MonteCarloEstimate(mean=float(mean), std_error=float(np.sqrt(var / n)), samples=int(n))


def optimal_guess(mset, r):
    """Best estimate after outcome ``r``: the top right-singular vector."""
    op = mset._check_outcome(r)
    if op.is_zero:
        raise DegenerateOperatorError(f"outcome {r} has a zero operator")
    return op.svd.right_basis[:, 0].copy()


def information_gain(mset):
    """Maximal mean estimation fidelity, ``(d + sum_r lambda_0^2) / (d(d+1))``."""
    d = mset.dimension
    top = sum(op.lambda_max**2 for op in mset.operators)
    return (d + top) / (d * (d + 1))


def _check_strategy(mset, strategy):
    if len(strategy) != mset.n_outcomes:
        raise DimensionError(
            f"strategy has {len(strategy)} guesses for {mset.n_outcomes} outcomes"
        )
    for g in strategy.guesses:
        if g.size != mset.dimension:
            raise DimensionError("guess dimension does not match the measurement")


def estimation_fidelity_mc(mset, strategy, samples, rng, block=MC_BLOCK):
    """Monte Carlo mean estimation fidelity over Haar-random pure inputs.

    Each sample draws ``psi`` and scores ``sum_r p(r, psi) |<g_r|psi>|^2``.
    Samples are processed in fixed-size blocks, each on its own stream
    derived from one key drawn from ``rng``, so the result depends only on
    the seed and the sample count.

    Returns
    -------
    MonteCarloEstimate
    """
    samples = int(samples)
    if samples < 100:
        raise DomainError(f"samples must be >= 100, got {samples}")
    _check_strategy(mset, strategy)
    rng = qlin.as_random_source(rng)
    key = rng.fork()
    d = mset.dimension
    ops = np.stack(mset.matrices)
    guesses = np.stack(strategy.guesses)

    total = total_sq = 0.0
    for k, n in enumerate(qlin.block_sizes(samples, block)):
        psi = qlin.random_pure_states(d, n, qlin.RandomSource(key, k))
        amps = np.einsum("rij,nj->nri", ops, psi)
        probs = np.sum(np.abs(amps) ** 2, axis=2)
        overlaps = np.abs(psi @ guesses.conj().T) ** 2
        score = np.sum(probs * overlaps, axis=1)
        total += float(score.sum())
        total_sq += float(np.dot(score, score))
    return _estimate(total, total_sq, samples)


# ----------------------------------------------------------------------------
# Two-copy twirl
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class TwirlCoefficients:
    """Twirl of ``O`` equals ``alpha1 * 1 + alpha2 * S``."""

    alpha1: float
    alpha2: float

    def operator(self, d):
        return self.alpha1 * np.eye(d * d) + self.alpha2 * swap_operator(d)


def swap_operator(d):
    """Swap on ``C^d x C^d``: ``S |i>|j> = |j>|i>``."""
    d = int(d)
    if d < 1:
        raise DimensionError(f"dimension must be >= 1, got {d}")
    s = np.zeros((d * d, d * d), dtype=np.complex128)
    for i in range(d):
        for j in range(d):
            s[j * d + i, i * d + j] = 1.0
    return s


def _check_two_copy(o, d):
    d = int(d)
    o = qlin.as_square(o, "two-copy operator")
    if o.shape[0] != d * d:
        raise DimensionError(f"operator has size {o.shape[0]}, expected {d * d}")
    return o, d


def twirl_exact(o, d):
    """Closed-form twirl coefficients.

    ``alpha1 = (d^2 tr O - d tr OS) / (d^2 (d^2-1))`` and
    ``alpha2 = (d^2 tr OS - d tr O) / (d^2 (d^2-1))``. Both traces must be
    real, which holds for Hermitian ``O``.
    """
    o, d = _check_two_copy(o, d)
    if d < 2:
        raise DimensionError("twirl coefficients need d >= 2")
    tr_o = np.trace(o)
    tr_os = np.trace(o @ swap_operator(d))
    if abs(tr_o.imag) > qlin.STRUCTURE_TOL or abs(tr_os.imag) > qlin.STRUCTURE_TOL:
        raise DomainError("tr(O) and tr(OS) must be real; pass a Hermitian operator")
    tr_o, tr_os = tr_o.real, tr_os.real
    denom = d * d * (d * d - 1)
    return TwirlCoefficients(
        alpha1=float((d * d * tr_o - d * tr_os) / denom),
        alpha2=float((d * d * tr_os - d * tr_o) / denom),
    )


def twirl_mc_with_error(o, d, samples, rng, block=TWIRL_BLOCK):
    """Monte Carlo twirl plus its expected Frobenius error.

    The error is ``sqrt(sum_ij Var(T_ij) / samples)`` estimated from the
    same samples.
    """
    o, d = _check_two_copy(o, d)
    samples = int(samples)
    if samples < 100:
        raise DomainError(f"samples must be >= 100, got {samples}")
    rng = qlin.as_random_source(rng)
    key = rng.fork()
    total = np.zeros_like(o)
    total_sq = np.zeros(o.shape)
    for k, n in enumerate(qlin.block_sizes(samples, block)):
        u = qlin.haar_unitaries(d, n, qlin.RandomSource(key, k))
        uu = np.einsum("nij,nkl->nikjl", u, u).reshape(n, d * d, d * d)
        t = qlin.dagger(uu) @ o @ uu
        total += t.sum(axis=0)
        total_sq += np.sum(np.abs(t) ** 2, axis=0)
    mean = total / samples
    var = np.clip(total_sq / samples - np.abs(mean) ** 2, 0.0, None)
    return mean, float(np.sqrt(var.sum() / samples))


def twirl_mc(o, d, samples, rng):
    """Monte Carlo average of ``(U^dag x U^dag) O (U x U)`` over Haar ``U``."""
    return twirl_mc_with_error(o, d, samples, rng)[0]


def estimation_fidelity_twirl(mset, strategy):
    """Exact mean estimation fidelity of a strategy via the twirl identity.

    Writes the score as ``sum_r <psi psi| A_r^dag A_r x |g_r><g_r| |psi psi>``
    and averages each term with :func:`twirl_exact`; on ``|psi psi>`` the
    swap acts trivially, so each term contributes ``alpha1 + alpha2``.
    """
    _check_strategy(mset, strategy)
    d = mset.dimension
    if d == 1:
        return 1.0
    value = 0.0
    for op, g in zip(mset.operators, strategy.guesses):
        o = np.kron(op.effect(), np.outer(g, g.conj()))
        c = twirl_exact(o, d)
        value += c.alpha1 + c.alpha2
    return value
