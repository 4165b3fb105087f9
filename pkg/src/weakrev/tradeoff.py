"""
Trade-off between information gain and reversibility.

For every complete measurement in dimension ``d``::

    d(d+1) G + (d-1) P <= 2d

where ``G`` is the information gain and ``P`` the reversibility. The bound
follows from ``sum_r [lambda_0^2 + (d-1) lambda_min^2] <= d``, is met with
equality exactly when every ``A_r^dag A_r`` has the form
``a_r |w_0><w_0| + b_r 1``, and is always an equality for qubits.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np

from . import qlin
from .errors import BoundViolationError, DimensionError
from .infogain import information_gain
from .measurement import random_measurement_set
from .reversal import reversibility

SLACK_TOL = 1e-9


@dataclass(frozen=True)
class TradeoffReport:
    dimension: int
    n_outcomes: int
    info_gain: float
    reversibility: float
    lhs: float
    slack: float
    singular_value_inequality_lhs: float
    saturated: bool

    def to_dict(self):
        return asdict(self)


def tradeoff_report(mset, strict=True):
    """Evaluate the bound for one measurement.

    With ``strict`` (default) a slack below ``-1e-9`` raises
    :class:`BoundViolationError`.
    """
    d = mset.dimension
    g = information_gain(mset)
    p = reversibility(mset)
    lhs = d * (d + 1) * g + (d - 1) * p
    slack = 2 * d - lhs
    spectral = sum(op.lambda_max**2 + (d - 1) * op.lambda_min**2 for op in mset.operators)
    report = TradeoffReport(
        dimension=d,
        n_outcomes=mset.n_outcomes,
        info_gain=float(g),
        reversibility=float(p),
        lhs=float(lhs),
        slack=float(slack),
        singular_value_inequality_lhs=float(spectral),
        saturated=bool(abs(slack) < SLACK_TOL),
    )
    if strict:
        check_bound(report)
    return report


def check_bound(report, tol=SLACK_TOL):
    if report.slack < -tol or report.singular_value_inequality_lhs > report.dimension + tol:
        raise BoundViolationError(
            f"trade-off bound violated: slack {report.slack:.3e}, "
            f"singular-value lhs {report.singular_value_inequality_lhs!r} > {report.dimension}"
        )
    if report.dimension == 2 and abs(report.slack) >= tol:
        raise BoundViolationError(f"qubit identity violated: slack {report.slack:.3e}")


def qubit_identity_residual(mset):
    """``|6 G + P - 4|`` for a qubit measurement."""
    if mset.dimension != 2:
        raise DimensionError(f"qubit identity needs d = 2, got {mset.dimension}")
    return abs(6 * information_gain(mset) + reversibility(mset) - 4)


def is_saturating(mset, tol=SLACK_TOL):
    """Check the equality condition operator by operator.

    With ``b = lambda_min^2`` and ``a = lambda_0^2 - b`` every effect must
    equal ``a |w_0><w_0| + b 1`` within Frobenius distance ``tol``.
    """
    d = mset.dimension
    for op in mset.operators:
        w0 = op.svd.right_basis[:, 0]
        b = op.lambda_min**2
        a = op.lambda_max**2 - b
        target = a * np.outer(w0, w0.conj()) + b * np.eye(d)
        if qlin.frobenius(op.effect() - target) >= tol:
            return False
    return True


def ensemble_scan(d, n_outcomes, count, rng):
    """Reports for ``count`` random measurements, in draw order."""
    count = int(count)
    if count < 1:
        raise ValueError(f"count must be >= 1, got {count}")
    rng = qlin.as_random_source(rng)
    return [
        tradeoff_report(random_measurement_set(d, n_outcomes, rng), strict=False)
        for _ in range(count)
    ]


def scan_aggregate(reports):
    """Summary over a scan: minimum slack, worst qubit residual, largest spectral lhs."""
    slacks = np.array([rep.slack for rep in reports])
    qubit = [abs(rep.slack) for rep in reports if rep.dimension == 2]
    return {
        "count": len(reports),
        "min_slack": float(slacks.min()),
        "max_abs_residual_d2": float(max(qubit)) if qubit else None,
        "eq16_max": float(max(rep.singular_value_inequality_lhs for rep in reports)),
    }
