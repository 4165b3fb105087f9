"""
Command-line front end.

Exit codes: 0 success, 2 input or configuration error, 3 internal
theorem-violation alarm (the trade-off bound failed, which means a bug).
Outcome indices in all outputs are 0-based.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import dilation, infogain, measurement, qlin, reversal, tradeoff
from .errors import BoundViolationError, CompletenessError, WeakrevError

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_ALARM = 3

SWEEP_COLUMNS = ["eta", "info_gain", "reversibility", "lhs", "slack", "mc_info_gain", "mc_std_error"]
SCAN_COLUMNS = ["index", "dimension", "n_outcomes", "info_gain", "reversibility", "lhs", "slack",
                "singular_value_inequality_lhs", "saturated"]

EPILOG = """\
built-in examples (--example):
  von-neumann:D       rank-1 projectors onto the computational basis of C^D
  weak-eta:ETA        qubit set {sqrt(eta)|1><1|, |0><0| + sqrt(1-eta)|1><1|}
  identity:D          single-outcome identity
  saturating:D:A      bound-saturating family with rank-1 weight A

measurement-set JSON:
  {"dimension": d, "operators": [[[[re, im], ...], ...], ...]}

report keys (analyze / random-scan):
  dimension n_outcomes info_gain reversibility lhs slack
  singular_value_inequality_lhs saturated; scans add an "aggregate" block
  with count min_slack max_abs_residual_d2 eq16_max

sweep-eta CSV columns:
  eta info_gain reversibility lhs slack mc_info_gain mc_std_error

exit codes: 0 ok, 2 input/config error, 3 trade-off bound alarm
"""


class ConfigError(Exception):
    pass


# ----------------------------------------------------------------------------
# Helpers
# ----------------------------------------------------------------------------


def _positive(value, name):
    if value is None:
        raise ConfigError(f"--{name} is required")
    if value < 1:
        raise ConfigError(f"--{name} must be >= 1, got {value}")
    return value


def parse_example(spec):
    """Build a measurement from an ``--example`` selector."""
    kind, _, arg = spec.partition(":")
    try:
        if kind == "von-neumann":
            return measurement.example_von_neumann(int(arg or 2))
        if kind == "weak-eta":
            return measurement.example_weak_eta(float(arg))
        if kind == "identity":
            return measurement.identity_set(int(arg or 2))
        if kind == "saturating":
            d, _, a = arg.partition(":")
            return measurement.saturating_measurement_set(int(d), float(a))
    except ValueError as exc:
        raise ConfigError(f"bad example selector {spec!r}: {exc}") from exc
    raise ConfigError(f"unknown example {spec!r}")


def _load_set(args):
    if args.input and args.example:
        raise ConfigError("use either --in or --example, not both")
    if args.example:
        return parse_example(args.example)
    if not args.input:
        raise ConfigError("a measurement set is required (--in PATH or --example NAME)")
    return measurement.load(args.input, tol=args.tol_completeness)


def _write(args, text):
    if args.output:
        with open(args.output, "w", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json(payload):
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def _csv(columns, rows):
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow([repr(row[c]) if isinstance(row[c], float) else row[c] for c in columns])
    return buf.getvalue()


def _emit(args, payload, columns=None, rows=None):
    if args.format == "csv":
        if rows is None:
            columns = [k for k, v in payload.items() if not isinstance(v, (list, dict))]
            rows = [payload]
        _write(args, _csv(columns, rows))
    else:
        _write(args, _json(payload))


def _state(spec, d, rng):
    if spec == "plus":
        return np.ones(d, dtype=np.complex128) / np.sqrt(d)
    if spec == "random":
        return qlin.random_pure_state(d, rng)
    if spec.startswith("basis:"):
        k = int(spec.split(":", 1)[1])
        if not 0 <= k < d:
            raise ConfigError(f"basis index {k} out of range for d={d}")
        return qlin.basis_state(d, k)
    raise ConfigError(f"unknown state {spec!r}")


# ----------------------------------------------------------------------------
# Commands
# ----------------------------------------------------------------------------


def cmd_analyze(args):
    mset = _load_set(args)
    report = tradeoff.tradeoff_report(mset, strict=False)
    payload = report.to_dict()
    payload["spectra"] = [[float(x) for x in op.singular_values] for op in mset.operators]
    payload["reversible"] = [
        reversal.is_reversible(mset, r, args.tol_reversible) for r in range(mset.n_outcomes)
    ]
    payload["structurally_saturating"] = tradeoff.is_saturating(mset)
    _emit(args, payload)
    tradeoff.check_bound(report)
    return EXIT_OK


def cmd_sweep_eta(args):
    steps = _positive(args.steps, "steps")
    if steps < 2:
        raise ConfigError("--steps must be >= 2")
    samples = _positive(args.samples, "samples")
    rng = qlin.RandomSource(args.seed)
    rows = []
    for eta in np.linspace(0.0, 1.0, steps):
        mset = measurement.example_weak_eta(float(eta))
        rep = tradeoff.tradeoff_report(mset)
        mc = infogain.estimation_fidelity_mc(
            mset, infogain.GuessStrategy.optimal(mset), samples, rng
        )
        rows.append({
            "eta": float(eta),
            "info_gain": rep.info_gain,
            "reversibility": rep.reversibility,
            "lhs": rep.lhs,
            "slack": rep.slack,
            "mc_info_gain": mc.mean,
            "mc_std_error": mc.std_error,
        })
    if args.format == "json":
        _write(args, _json({"rows": rows}))
    else:
        _write(args, _csv(SWEEP_COLUMNS, rows))
    return EXIT_OK


def cmd_random_scan(args):
    d = _positive(args.dim, "dim")
    n = _positive(args.outcomes, "outcomes")
    count = _positive(args.count, "count")
    if d < 2:
        raise ConfigError("--dim must be >= 2")
    reports = tradeoff.ensemble_scan(d, n, count, qlin.RandomSource(args.seed))
    agg = tradeoff.scan_aggregate(reports)
    ok = agg["min_slack"] > -tradeoff.SLACK_TOL and agg["eq16_max"] <= d + tradeoff.SLACK_TOL
    if d == 2:
        ok = ok and agg["max_abs_residual_d2"] < tradeoff.SLACK_TOL
    agg["bound_holds"] = ok
    if args.format == "csv":
        rows = [dict(rep.to_dict(), index=i) for i, rep in enumerate(reports)]
        _write(args, _csv(SCAN_COLUMNS, rows))
    else:
        _write(args, _json({"reports": [r.to_dict() for r in reports], "aggregate": agg}))
    return EXIT_OK if ok else EXIT_ALARM


def cmd_schur_check(args):
    d = _positive(args.dim, "dim")
    if d < 2:
        raise ConfigError("--dim must be >= 2")
    samples = _positive(args.samples, "samples")
    if samples < 100:
        raise ConfigError("--samples must be >= 100")
    rng = qlin.RandomSource(args.seed)
    cases = {
        "identity": np.eye(d * d, dtype=np.complex128),
        "swap": infogain.swap_operator(d),
        "random_hermitian": qlin.random_hermitian(d * d, rng),
    }
    out = {"dimension": d, "samples": samples}
    ok = True
    for name, op in cases.items():
        mean, err = infogain.twirl_mc_with_error(op, d, samples, rng)
        coeffs = infogain.twirl_exact(op, d)
        dist = qlin.frobenius(mean - coeffs.operator(d))
        limit = 1e-10 if name != "random_hermitian" else 5.0 * err
        passed = dist < limit
        ok = ok and passed
        out[name] = {
            "alpha1": coeffs.alpha1,
            "alpha2": coeffs.alpha2,
            "distance": dist,
            "expected_error": err,
            "limit": limit,
            "pass": passed,
        }
    out["pass"] = ok
    _write(args, _json(out))
    return EXIT_OK if ok else EXIT_ALARM


def cmd_simulate_reverse(args):
    mset = _load_set(args)
    trials = _positive(args.trials, "trials")
    if trials < 100:
        raise ConfigError("--trials must be >= 100")
    rng = qlin.RandomSource(args.seed)
    psi = _state(args.state, mset.dimension, rng)
    sim = reversal.simulate_measure_and_reverse(mset, psi, trials, rng, tol=args.tol_reversible)
    closed = sum(
        op.lambda_min**2 for op in mset.operators if op.lambda_min > args.tol_reversible
    )
    sigma = np.sqrt(closed * (1.0 - closed) / trials)
    if sigma > 0:
        z = (sim.mean - closed) / sigma
    else:
        z = 0.0 if abs(sim.mean - closed) < 1e-12 else float("inf")
    ok = abs(z) <= 4.0 and sim.max_fidelity_deficit < qlin.EQUALITY_TOL
    payload = {
        "trials": trials,
        "successes": sim.successes,
        "success_rate": sim.mean,
        "std_error": sim.std_error,
        "reversibility": float(closed),
        "z_score": z if np.isfinite(z) else None,
        "max_fidelity_deficit": sim.max_fidelity_deficit,
        "pass": bool(ok),
    }
    _emit(args, payload)
    return EXIT_OK if ok else EXIT_ALARM


def cmd_dilate_check(args):
    mset = _load_set(args)
    samples = _positive(args.samples, "samples")
    if samples < 10:
        raise ConfigError("--samples must be >= 10")
    rng = qlin.RandomSource(args.seed)
    dil = dilation.dilate(mset)
    unitarity = qlin.unitarity_residual(dil.dilation_unitary)
    states = qlin.random_pure_states(mset.dimension, samples, rng)
    consistency = max(
        float(np.abs(dil.probabilities(psi) - measurement.outcome_probabilities(mset, psi)).max())
        for psi in states
    )
    info = dilation.information_report(dil, samples, rng)
    payload = {
        "unitarity_residual": unitarity,
        "probability_consistency_residual": consistency,
        "information_free": info.information_free,
        "routes_agree": info.routes_agree,
        "orthogonality_residual": list(info.per_outcome_orthogonality_residual),
        "probability_spread": list(info.probability_spread),
        "retrieval_fidelity_deficit": None,
    }
    ok = unitarity < qlin.EQUALITY_TOL and consistency < qlin.EQUALITY_TOL and info.routes_agree
    if info.information_free:
        worst = 0.0
        for psi in states:
            for r, p in enumerate(dil.probabilities(psi)):
                if p <= measurement.ZERO_PROBABILITY:
                    continue
                back = dilation.deterministic_retrieval(dil, r, dil.conditional_state(psi, r))
                worst = max(worst, 1.0 - qlin.fidelity(psi, back))
        payload["retrieval_fidelity_deficit"] = worst
        ok = ok and worst < qlin.EQUALITY_TOL
    payload["pass"] = bool(ok)
    _emit(args, payload)
    return EXIT_OK if ok else EXIT_ALARM


COMMANDS = {
    "analyze": cmd_analyze,
    "random-scan": cmd_random_scan,
    "sweep-eta": cmd_sweep_eta,
    "schur-check": cmd_schur_check,
    "simulate-reverse": cmd_simulate_reverse,
    "dilate-check": cmd_dilate_check,
}


def _add_common(p, **defaults):
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--in", dest="input", metavar="PATH")
    p.add_argument("--out", dest="output", metavar="PATH")
    p.add_argument("--example", metavar="NAME")
    p.add_argument("--format", choices=["json", "csv"], default="json")
    p.add_argument("--tol-completeness", type=float, default=measurement.COMPLETENESS_TOL)
    p.add_argument("--tol-reversible", type=float, default=reversal.REVERSIBLE_TOL)
    for name in ("dim", "outcomes", "count", "samples", "trials", "steps"):
        p.add_argument(f"--{name}", type=int)
    p.set_defaults(**defaults)
    return p


def build_parser():
    parser = argparse.ArgumentParser(
        prog="weakrev",
        description="Information gain vs. reversibility of quantum measurements.",
        epilog=EPILOG,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    sub = parser.add_subparsers(dest="command", required=True)
    _add_common(sub.add_parser("analyze", help="trade-off report for one set"))
    _add_common(sub.add_parser("random-scan", help="bound check over random sets"))
    _add_common(sub.add_parser("sweep-eta", help="weak-measurement strength sweep"),
                steps=11, samples=20000, format="csv")
    _add_common(sub.add_parser("schur-check", help="Monte Carlo vs exact two-copy twirl"),
                dim=2, samples=100000)
    p = _add_common(sub.add_parser("simulate-reverse", help="measure-then-reverse simulation"),
                    trials=100000)
    p.add_argument("--state", default="plus", help="plus | random | basis:K (default plus)")
    _add_common(sub.add_parser("dilate-check", help="unitary dilation checks"), samples=100)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except BoundViolationError as exc:
        print(json.dumps({"error": "bound_violation", "message": str(exc)}), file=sys.stderr)
        return EXIT_ALARM
    except CompletenessError as exc:
        print(json.dumps({"error": "completeness", "message": str(exc),
                          "residual": exc.residual}), file=sys.stderr)
        return EXIT_INPUT
    except (ConfigError, WeakrevError, ValueError, OSError) as exc:
        print(json.dumps({"error": type(exc).__name__, "message": str(exc)}), file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
