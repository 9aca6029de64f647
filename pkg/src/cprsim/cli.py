"""Command-line front end.

Subcommands: ``state`` (single-point evaluation), ``sweep`` (parameter
grids), ``trend`` (optimal transmissivity vs step count), ``compare``
(replacement/addition/subtraction series), ``validate`` (self-checks).

Exit codes: 0 success, 1 failed validation, 2 usage error, 3 domain error,
4 impossible herald.  Output is CSV (LF line endings, ``#`` footer
comments, 17 significant digits) or JSON with a metadata header.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import warnings
from datetime import datetime, timezone
from typing import Callable, Optional, Sequence, TextIO

import numpy as np

from . import __version__
from .closedform import (
    log_negativity_closed,
    moment_double_sum_variant,
    power_moment,
    probability_monotone_check,
    success_probability_closed,
)
from .errors import (
    CprsimError,
    DegenerateObjectiveError,
    DomainError,
    ImpossibleOutcomeError,
    NoThresholdError,
    PhysicalityError,
)
from .fock import (
    BeamSplitter,
    TmsvParams,
    TruncationPolicy,
    bs_coefficient,
    build_heralded_operator,
    pr_coefficient,
    tmsv,
)
from .measures import (
    log_negativity,
    log_negativity_tmsv,
    measure_state,
    non_gaussianity,
)
from .protocols import (
    ProtocolKind,
    asymmetric_arrangement,
    cascade,
    cpr_coefficients,
)
from .sweep import (
    SweepRecord,
    compare_protocols,
    default_arrangement,
    grid_sweep,
    trend,
)

MEASURE_HEADER = (
    "protocol",
    "k",
    "lambda",
    "t",
    "log_negativity",
    "probability",
    "non_gaussianity",
    "rate",
)
TREND_HEADER = ("k", "t_max", "e_max", "p_at_max")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_IMPOSSIBLE = 4

DEFAULT_LAMBDA_GRID = "0.05:0.95:19"
DEFAULT_T_GRID = "0.01:0.99:99"


def _fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, int):
        return str(value)
    return format(float(value), ".17g")


def parse_grid(spec: str, name: str) -> list[float]:
    """Parse ``lo:hi:steps`` (inclusive linspace), a comma list, or a scalar."""
    if ":" in spec:
        parts = spec.split(":")
        if len(parts) != 3:
            raise DomainError(f"{name}: grid spec must look like lo:hi:steps")
        try:
            lo, hi, steps = float(parts[0]), float(parts[1]), int(parts[2])
        except ValueError as exc:
            raise DomainError(f"{name}: malformed grid spec {spec!r}") from exc
        if steps < 2:
            raise DomainError(f"{name}: grid specs need at least 2 steps")
        if not lo < hi:
            raise DomainError(f"{name}: grid specs need min < max")
        return [float(v) for v in np.linspace(lo, hi, steps)]
    if "," in spec:
        return [float(v) for v in spec.split(",") if v]
    return [float(spec)]


def _record_cells(record: SweepRecord) -> list:
    m = record.measures
    return [
        record.protocol.value,
        record.k,
        record.lam,
        record.t,
        None if m is None else m.log_negativity,
        0.0 if m is None else m.probability,
        None if m is None else m.non_gaussianity,
        None if m is None else m.rate,
    ]


def _write_csv(
    stream: TextIO,
    header: Sequence[str],
    rows: Sequence[Sequence],
    footer: Optional[dict] = None,
) -> None:
    stream.write(",".join(header) + "\n")
    for row in rows:
        stream.write(",".join(_fmt(cell) for cell in row) + "\n")
    for key, value in (footer or {}).items():
        stream.write(f"# {key} = {_fmt(value)}\n")


def _write_json(
    stream: TextIO,
    command: str,
    config: dict,
    header: Sequence[str],
    rows: Sequence[Sequence],
    footer: Optional[dict] = None,
) -> None:
    payload = {
        "meta": {
            "tool": "cprsim",
            "version": __version__,
            "command": command,
            "config": config,
            "generated_at": datetime.now(timezone.utc).isoformat(),
        },
        "records": [dict(zip(header, row)) for row in rows],
    }
    if footer:
        payload["footer"] = footer
    json.dump(payload, stream, indent=2)
    stream.write("\n")


def _emit(args, header, rows, footer=None, config=None) -> None:
    config = config or {}
    if args.out is None:
        stream = sys.stdout
        close = False
    else:
        stream = open(args.out, "w", newline="")
        close = True
    try:
        if args.format == "json":
            _write_json(stream, args.command, config, header, rows, footer)
        else:
            _write_csv(stream, header, rows, footer)
    finally:
        if close:
            stream.close()


def read_measure_csv(stream: TextIO) -> list[dict]:
    """Parse a measure-schema CSV back into row dictionaries."""
    lines = [line.rstrip("\n") for line in stream if line.strip()]
    body = [line for line in lines if not line.startswith("#")]
    if not body:
        raise DomainError("CSV file has no header row")
    header = tuple(body[0].split(","))
    if header != MEASURE_HEADER:
        raise DomainError(f"unexpected CSV header {body[0]!r}")
    rows = []
    for line in body[1:]:
        cells = line.split(",")
        if len(cells) != len(header):
            raise DomainError(f"CSV row has {len(cells)} cells, expected {len(header)}")
        row: dict = {"protocol": cells[0], "k": int(cells[1])}
        for name, cell in zip(header[2:], cells[2:]):
            row[name] = float(cell) if cell else None
        rows.append(row)
    return rows


def _scalar(spec: str, name: str) -> float:
    values = parse_grid(spec, name)
    if len(values) != 1:
        raise DomainError(f"{name} must be a single value for this subcommand")
    return values[0]


def _policy(args) -> TruncationPolicy:
    return TruncationPolicy(tail_tolerance=args.tail_tolerance)


def cmd_state(args) -> int:
    kind = ProtocolKind(args.protocol)
    lam = _scalar(args.lam, "lambda")
    t = _scalar(args.t, "t")
    if not 0.0 <= t <= 1.0:
        raise DomainError("t must lie in [0, 1]")
    if args.k < 1:
        raise DomainError("k must be at least 1")
    arrangement = default_arrangement(kind, args.k, args.arrangement, args.mode)
    state = tmsv(TmsvParams(lam), _policy(args))
    result = cascade(state, arrangement, BeamSplitter(t))
    record = SweepRecord(
        kind, args.k, lam, t, measure_state(result.state, result.total_probability)
    )
    _emit(args, MEASURE_HEADER, [_record_cells(record)], config=_config_echo(args))
    return EXIT_OK


def cmd_sweep(args) -> int:
    kind = ProtocolKind(args.protocol)
    if args.k < 1:
        raise DomainError("k must be at least 1")
    records = grid_sweep(
        kind,
        args.arrangement,
        args.k,
        parse_grid(args.lam, "lambda"),
        parse_grid(args.t, "t"),
        policy=_policy(args),
        max_workers=args.threads,
        asymmetric_mode=args.mode,
    )
    _emit(
        args,
        MEASURE_HEADER,
        [_record_cells(r) for r in records],
        config=_config_echo(args),
    )
    return EXIT_OK


def cmd_trend(args) -> int:
    kind = ProtocolKind(args.protocol)
    lam = _scalar(args.lam, "lambda")
    points, slope = trend(kind, args.k_max, lam, policy=_policy(args))
    rows = [[p.k, p.t_max, p.e_max, p.p_at_max] for p in points]
    footer = {"slope_log10_p_at_max_vs_k": slope}
    _emit(args, TREND_HEADER, rows, footer, config=_config_echo(args))
    return EXIT_OK


def cmd_compare(args) -> int:
    lam = _scalar(args.lam, "lambda")
    records = compare_protocols(
        args.k,
        lam,
        parse_grid(args.t, "t"),
        policy=_policy(args),
        max_workers=args.threads,
    )
    _emit(
        args,
        MEASURE_HEADER,
        [_record_cells(r) for r in records],
        config=_config_echo(args),
    )
    return EXIT_OK


def _config_echo(args) -> dict:
    skip = {"func", "command"}
    return {k: v for k, v in vars(args).items() if k not in skip}


# ---------------------------------------------------------------------------
# validate subcommand
# ---------------------------------------------------------------------------

_VALIDATION_GRID_LAMBDA = (0.1, 0.3, 0.5, 0.7)
_VALIDATION_GRID_T = (0.2, 0.4, 0.6, 0.8)


def _direct_series_sums(k: int, lam: float, t: float, n_max: int = 250) -> tuple[float, float]:
    """Direct truncated-series norms of a k-step replacement cascade:
    (sum of squared coefficients, sum of absolute coefficients)."""
    coeffs = cpr_coefficients(k, lam, t, n_max)
    return float(np.dot(coeffs, coeffs)), float(np.sum(np.abs(coeffs)))


def _check_herald_consistency() -> tuple[Optional[bool], str]:
    worst = 0.0
    for t10 in range(1, 10):
        bs = BeamSplitter(t10 / 10.0)
        op = build_heralded_operator(1, 1, bs, 60)
        for n in range(61):
            worst = max(worst, abs(op.coeffs[n] - pr_coefficient(n, bs.t)))
    return worst < 1e-12, f"max |builder - replacement coefficient| = {worst:.3e}"


def _check_bs_unitarity() -> tuple[Optional[bool], str]:
    worst = 0.0
    for n1, n2 in ((0, 1), (1, 1), (2, 1), (3, 2), (5, 3)):
        for t10 in (2, 5, 8):
            bs = BeamSplitter(t10 / 10.0)
            amplitudes: dict[int, float] = {}
            for k1 in range(n1 + 1):
                for k2 in range(n2 + 1):
                    out = k1 + k2
                    amplitudes[out] = amplitudes.get(out, 0.0) + bs_coefficient(
                        n1, n2, k1, k2, bs
                    )
            total = sum(a * a for a in amplitudes.values())
            worst = max(worst, abs(total - 1.0))
    return worst < 1e-10, f"max |sum of squared output amplitudes - 1| = {worst:.3e}"


def _check_arrangement_invariance() -> tuple[Optional[bool], str]:
    lam, t = 0.3, 0.55
    state = tmsv(TmsvParams(lam))
    bs = BeamSplitter(t)
    worst = 0.0
    for k in range(1, 7):
        reference = cascade(state, asymmetric_arrangement(k, ProtocolKind.PR, 1), bs)
        for l in range(k + 1):
            steps = tuple((1, ProtocolKind.PR) for _ in range(l)) + tuple(
                (2, ProtocolKind.PR) for _ in range(k - l)
            )
            other = cascade(state, steps, bs)
            worst = max(
                worst,
                float(np.max(np.abs(other.state.coeffs - reference.state.coeffs))),
                abs(other.total_probability / reference.total_probability - 1.0),
            )
    return worst < 1e-11, f"max split deviation = {worst:.3e}"


def _check_composition_matches_direct() -> tuple[Optional[bool], str]:
    lam, t = 0.3, 0.55
    state = tmsv(TmsvParams(lam))
    bs = BeamSplitter(t)
    worst = 0.0
    for k in range(1, 9):
        result = cascade(state, asymmetric_arrangement(k, ProtocolKind.PR, 1), bs)
        direct = cpr_coefficients(k, lam, t, state.n_max)
        norm_sq = float(np.dot(direct, direct))
        worst = max(
            worst,
            float(np.max(np.abs(result.state.coeffs - direct / math.sqrt(norm_sq)))),
            abs(result.total_probability / norm_sq - 1.0),
        )
    return worst < 1e-11, f"max composition deviation = {worst:.3e}"


def _check_moment_recursion() -> tuple[Optional[bool], str]:
    h = 1e-6
    worst = 0.0
    for lam in (0.1, 0.4, 0.7):
        for t in (0.3, 0.6, 0.9):
            for k in (1, 2, 4):
                for m in range(10):
                    hi = power_moment(m, lam * lam * (t + h) ** (2 * k))
                    lo = power_moment(m, lam * lam * (t - h) ** (2 * k))
                    derived = (t / (2 * k)) * (hi - lo) / (2 * h)
                    target = power_moment(m + 1, lam * lam * t ** (2 * k))
                    worst = max(worst, abs(derived / target - 1.0))
    return worst < 1e-5, f"max relative recursion residual = {worst:.3e}"


def _check_probability_closed_vs_direct() -> tuple[Optional[bool], str]:
    worst = 0.0
    for lam in _VALIDATION_GRID_LAMBDA:
        for t in _VALIDATION_GRID_T:
            for k in range(1, 7):
                direct, _ = _direct_series_sums(k, lam, t)
                closed = success_probability_closed(k, lam, t)
                worst = max(worst, abs(closed / direct - 1.0))
    return worst < 1e-9, f"max relative probability deviation = {worst:.3e}"


def _check_negativity_closed_vs_direct() -> tuple[Optional[bool], str]:
    worst = 0.0
    for lam in _VALIDATION_GRID_LAMBDA:
        for t in _VALIDATION_GRID_T:
            for k in (2, 4, 6):
                ssq, sabs = _direct_series_sums(k, lam, t)
                oracle = 2.0 * math.log2(sabs / math.sqrt(ssq))
                closed = log_negativity_closed(k, lam, t)
                worst = max(worst, abs(closed - oracle))
    return worst < 1e-9, f"max negativity deviation (even k) = {worst:.3e}"


def _check_double_sum_divergence() -> tuple[Optional[bool], str]:
    ok = True
    details = []
    for z in (0.16, 0.5):
        variant = moment_double_sum_variant(1, z)
        expected_variant = z * (2.0 - z) / (1.0 - z) ** 2
        recursion = power_moment(1, z)
        ok = ok and abs(variant - expected_variant) < 1e-12 and abs(variant - recursion) > 0.01
        details.append(f"z={z}: double-sum {variant:.6f} vs recursion {recursion:.6f}")
    return ok, "; ".join(details)


def _check_probability_monotone() -> tuple[Optional[bool], str]:
    worst = 0.0
    ok = True
    for lam in _VALIDATION_GRID_LAMBDA:
        for t in _VALIDATION_GRID_T:
            good, margins = probability_monotone_check(8, lam, t)
            ok = ok and good
            worst = min(worst, min(margins))
    return ok, f"smallest probability decrease margin = {worst:.3e}"


def _check_gaussian_baseline() -> tuple[Optional[bool], str]:
    worst = 0.0
    for lam10 in range(1, 10):
        worst = max(worst, non_gaussianity(tmsv(TmsvParams(lam10 / 10.0))))
    return worst < 1e-9, f"max TMSV non-Gaussianity = {worst:.3e}"


def _check_tmsv_negativity() -> tuple[Optional[bool], str]:
    worst = 0.0
    for lam10 in range(1, 10):
        lam = lam10 / 10.0
        worst = max(
            worst, abs(log_negativity(tmsv(TmsvParams(lam))) - log_negativity_tmsv(lam))
        )
    return worst < 1e-10, f"max TMSV negativity deviation = {worst:.3e}"


def _info_half_transmissivity() -> tuple[Optional[bool], str]:
    lam = 0.1
    baseline = log_negativity_tmsv(lam)
    outcomes = []
    for label, t in (("amplitude 0.5", 0.5), ("power 0.5", 1.0 / math.sqrt(2.0))):
        worst = 0.0
        for k in range(1, 5):
            ssq, sabs = _direct_series_sums(k, lam, t)
            worst = max(worst, abs(2.0 * math.log2(sabs / math.sqrt(ssq)) - baseline))
        outcomes.append(f"{label}: max |E_N(k<=4) - TMSV| = {worst:.4f}")
    return None, "; ".join(outcomes)


def _info_odd_k_residual() -> tuple[Optional[bool], str]:
    k, lam, t = 1, 0.1, 0.9
    ssq, sabs = _direct_series_sums(k, lam, t)
    oracle = 2.0 * math.log2(sabs / math.sqrt(ssq))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        closed = log_negativity_closed(k, lam, t)
    return None, (
        f"odd k={k} at lambda={lam}, t={t}: oracle {oracle:.6f}, "
        f"signed-sum form {closed:.6f}, residual {oracle - closed:.3e}"
    )


VALIDATION_CHECKS: tuple[tuple[str, Callable[[], tuple[Optional[bool], str]]], ...] = (
    ("herald-consistency", _check_herald_consistency),
    ("beam-splitter-unitarity", _check_bs_unitarity),
    ("arrangement-invariance", _check_arrangement_invariance),
    ("composition-matches-direct-series", _check_composition_matches_direct),
    ("moment-recursion-fidelity", _check_moment_recursion),
    ("probability-closed-vs-direct", _check_probability_closed_vs_direct),
    ("negativity-closed-vs-direct-even-k", _check_negativity_closed_vs_direct),
    ("double-sum-variant-divergence", _check_double_sum_divergence),
    ("probability-monotone-in-k", _check_probability_monotone),
    ("gaussian-baseline", _check_gaussian_baseline),
    ("tmsv-negativity-consistency", _check_tmsv_negativity),
    ("half-transmissivity-reference", _info_half_transmissivity),
    ("odd-k-negativity-residual", _info_odd_k_residual),
)


def run_validation_checks() -> list[tuple[str, Optional[bool], str]]:
    """Run every self-check; status ``None`` marks informational entries."""
    return [(name, *func()) for name, func in VALIDATION_CHECKS]


def cmd_validate(args) -> int:
    results = run_validation_checks()
    failed = False
    for name, status, detail in results:
        if status is None:
            label = "INFO"
        elif status:
            label = "PASS"
        else:
            label = "FAIL"
            failed = True
        print(f"{label:4s}  {name}: {detail}")
    return EXIT_CHECK_FAILED if failed else EXIT_OK


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="cprsim",
        description="Cascaded photon-replacement distillation simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--out", default=None, help="output file (default: stdout)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument(
            "--tail-tolerance",
            dest="tail_tolerance",
            type=float,
            default=1e-28,
            help="relative squared-amplitude cutoff for Fock truncation",
        )
        p.add_argument("--threads", type=int, default=1, help="sweep parallelism cap")

    def add_protocol(p: argparse.ArgumentParser, default_k: int) -> None:
        p.add_argument("--protocol", choices=("pr", "pa", "ps"), default="pr")
        p.add_argument("--k", type=int, default=default_k, help="number of operations")
        p.add_argument(
            "--arrangement",
            choices=("default", "symmetric", "asymmetric"),
            default="default",
            help="step layout (default: asymmetric for pr, symmetric otherwise)",
        )
        p.add_argument("--mode", type=int, choices=(1, 2), default=1,
                       help="target mode for asymmetric arrangements")

    p_state = sub.add_parser("state", help="evaluate one parameter point")
    add_protocol(p_state, 1)
    p_state.add_argument("--lambda", dest="lam", default="0.1")
    p_state.add_argument("--t", default="0.5")
    add_common(p_state)
    p_state.set_defaults(func=cmd_state)

    p_sweep = sub.add_parser("sweep", help="sweep a (lambda, t) grid")
    add_protocol(p_sweep, 1)
    p_sweep.add_argument("--lambda", dest="lam", default=DEFAULT_LAMBDA_GRID,
                         help="scalar, comma list, or lo:hi:steps")
    p_sweep.add_argument("--t", default=DEFAULT_T_GRID,
                         help="scalar, comma list, or lo:hi:steps")
    add_common(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)

    p_trend = sub.add_parser("trend", help="optimal transmissivity vs step count")
    p_trend.add_argument("--protocol", choices=("pr", "pa", "ps"), default="pr")
    p_trend.add_argument("--k-max", dest="k_max", type=int, default=10)
    p_trend.add_argument("--lambda", dest="lam", default="0.1")
    add_common(p_trend)
    p_trend.set_defaults(func=cmd_trend)

    p_cmp = sub.add_parser("compare", help="compare pr/pa/ps over a t grid")
    p_cmp.add_argument("--k", type=int, default=4, help="even number of operations")
    p_cmp.add_argument("--lambda", dest="lam", default="0.1")
    p_cmp.add_argument("--t", default=DEFAULT_T_GRID)
    add_common(p_cmp)
    p_cmp.set_defaults(func=cmd_compare)

    p_val = sub.add_parser("validate", help="run the self-validation suite")
    add_common(p_val)
    p_val.set_defaults(func=cmd_validate)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ImpossibleOutcomeError as exc:
        print(f"cprsim: impossible outcome: {exc}", file=sys.stderr)
        return EXIT_IMPOSSIBLE
    except (
        DomainError,
        PhysicalityError,
        DegenerateObjectiveError,
        NoThresholdError,
    ) as exc:
        print(f"cprsim: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except CprsimError as exc:
        print(f"cprsim: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"cprsim: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
