"""Command-line surface: every library operation plus figure datasets.

Exit codes: 0 success, 2 invalid arguments or domain errors, 3
solver/fit non-convergence (incl. singular fits), 4 malformed input
file (messages name the offending line).

Output formats: ``table`` (human readable), ``csv`` and ``json``
(loss-free round trips, floats printed with 17 significant digits in
CSV).  ``generate`` and ``figure`` default to csv since their payload is
a dataset; everything else defaults to table.
"""

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path

from .distribution import QueueModel, pmf, qos_report, tail, utilization, variance
from .errors import (
    DegenerateStep,
    DomainError,
    InputFormatError,
    NoConvergence,
    SingularFit,
)
from .fitting import (
    CorrespondenceRecord,
    evaluate_fit,
    fit_model_i,
    fit_model_ii,
    generate_correspondence,
)
from .norros import norros_mean, norros_rho
from .solver import SolverConfig, solve_beta
from .zeta import hurwitz_zeta

__all__ = ["main", "build_parser", "FigureSpec"]

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_NO_CONVERGENCE = 3
EXIT_BAD_INPUT = 4

CSV_HEADER = ["mean", "beta", "rho", "q"]

_FIGURE_DEFAULT_Q = {
    1: (0.6, 0.7, 0.8, 0.9, 0.95),
    2: (0.6, 0.7, 0.8, 0.9),
    3: (0.7, 0.75, 0.8, 0.9),
    4: (0.6, 0.7, 0.8, 0.9),
    5: (0.6, 0.7, 0.8, 0.9),
}
_DEFAULT_THRESHOLDS = (10, 100, 1000)


@dataclass(frozen=True)
class FigureSpec:
    """Which figure dataset to emit and over which grids."""

    figure_id: int
    q_list: tuple
    mean_min: float = 0.1
    mean_max: float = 100.0
    points: int = 50
    thresholds: tuple = _DEFAULT_THRESHOLDS

    def __post_init__(self):
        if self.figure_id not in (1, 2, 3, 4, 5):
            raise DomainError(f"figure id must be 1..5, got {self.figure_id}")
        if not self.q_list:
            raise DomainError("q list must not be empty")
        for q in self.q_list:
            if not (math.isfinite(q) and 0.5 < q < 1.0):
                raise DomainError(f"every q must lie strictly in (1/2, 1), got {q}")
        if not self.thresholds or any(x < 0 for x in self.thresholds):
            raise DomainError(f"thresholds must be nonnegative, got {self.thresholds}")


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.17g}"
    return str(value)


def _json_float(value):
    if value is None or isinstance(value, bool) or not isinstance(value, float):
        return value
    return value if math.isfinite(value) else None


def _write_output(args, text):
    out = getattr(args, "out", None)
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _resolved_format(args, default="table"):
    return getattr(args, "format", None) or default


def _render_fields(args, fields, table_lines=None, default="table"):
    """Render a flat record in the requested format and write it out."""
    fmt = _resolved_format(args, default)
    if fmt == "json":
        payload = {k: _json_float(v) for k, v in fields.items()}
        text = json.dumps(payload) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(fields.keys())
        writer.writerow("" if v is None else _fmt(v) for v in fields.values())
        text = buf.getvalue()
    else:
        lines = table_lines if table_lines is not None else [
            f"{key} = {_fmt(value)}" for key, value in fields.items()
        ]
        text = "\n".join(lines) + "\n"
    _write_output(args, text)
    return EXIT_OK


def _render_rows(args, header, rows, default="csv"):
    fmt = _resolved_format(args, default)
    if fmt == "json":
        records = [
            {k: _json_float(v) for k, v in zip(header, row)} for row in rows
        ]
        text = json.dumps({"records": records}) + "\n"
    elif fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow(_fmt(v) for v in row)
        text = buf.getvalue()
    else:
        cells = [header] + [[_fmt(v) for v in row] for row in rows]
        widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
        lines = ["  ".join(c.ljust(w) for c, w in zip(row, widths)).rstrip()
                 for row in cells]
        text = "\n".join(lines) + "\n"
    _write_output(args, text)
    return EXIT_OK


# ---------------------------------------------------------------- CSV I/O

def format_correspondence_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow([_fmt(rec.mean), _fmt(rec.beta), _fmt(rec.rho), _fmt(rec.q)])
    return buf.getvalue()


def parse_correspondence_csv(text):
    rows = list(csv.reader(io.StringIO(text)))
    if not rows:
        raise InputFormatError(
            "line 1: empty file (expected header mean,beta,rho,q)", line=1
        )
    if rows[0] != CSV_HEADER:
        raise InputFormatError(
            f"line 1: expected header mean,beta,rho,q, got {','.join(rows[0])}",
            line=1,
        )
    records = []
    for lineno, row in enumerate(rows[1:], start=2):
        if len(row) != 4:
            raise InputFormatError(
                f"line {lineno}: expected 4 fields, got {len(row)}", line=lineno
            )
        values = []
        for field in row:
            try:
                value = float(field)
            except ValueError:
                raise InputFormatError(
                    f"line {lineno}: invalid number {field!r}", line=lineno
                ) from None
            if not math.isfinite(value):
                raise InputFormatError(
                    f"line {lineno}: non-finite value {field!r}", line=lineno
                )
            values.append(value)
        records.append(CorrespondenceRecord(*values))
    if not records:
        raise InputFormatError("line 2: no data rows", line=2)
    return records


def read_correspondence_csv(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputFormatError(f"line 1: cannot read {path}: {exc}", line=1) from exc
    return parse_correspondence_csv(text)


# --------------------------------------------------------------- handlers

def _cmd_zeta(args):
    value = hurwitz_zeta(args.s, args.a)
    fields = {"s": args.s, "a": args.a, "value": value}
    return _render_fields(args, fields, table_lines=[_fmt(value)])


def _cmd_pmf(args):
    model = QueueModel(args.q, args.beta)
    value = pmf(model, args.i)
    fields = {"q": args.q, "beta": args.beta, "i": args.i, "value": value}
    return _render_fields(args, fields, table_lines=[_fmt(value)])


def _cmd_tail(args):
    model = QueueModel(args.q, args.beta)
    value = tail(model, args.x)
    fields = {"q": args.q, "beta": args.beta, "x": args.x, "value": value}
    return _render_fields(args, fields, table_lines=[_fmt(value)])


_VARIANCE_NOTE = "variance undefined: requires q > 2/3 (second moment diverges)"


def _cmd_metrics(args):
    model = QueueModel(args.q, args.beta)
    points = _parse_int_list(args.tail)
    report = qos_report(model, points)
    fmt = _resolved_format(args)
    if fmt == "json":
        payload = {
            "q": model.q,
            "beta": model.beta,
            "mean": report.mean,
            "variance": report.variance,
            "utilization": report.utilization,
            "p0": report.p0,
            "tail_exponent": report.tail_exponent,
            "tail_coefficient": _json_float(report.tail_coefficient),
            "tail_samples": [
                {"x": x, "probability": p} for x, p in report.tail_samples
            ],
        }
        if report.variance is None:
            payload["variance_note"] = _VARIANCE_NOTE
        _write_output(args, json.dumps(payload) + "\n")
        return EXIT_OK
    if fmt == "csv":
        fields = {
            "q": model.q,
            "beta": model.beta,
            "mean": report.mean,
            "variance": report.variance,
            "utilization": report.utilization,
            "p0": report.p0,
            "tail_exponent": report.tail_exponent,
            "tail_coefficient": report.tail_coefficient,
        }
        for x, p in report.tail_samples:
            fields[f"P_gt_{x}"] = p
        return _render_fields(args, fields)
    lines = [
        f"q                = {_fmt(model.q)}",
        f"beta             = {_fmt(model.beta)}",
        f"mean             = {_fmt(report.mean)}",
    ]
    if report.variance is None:
        lines.append(f"variance         = n/a ({_VARIANCE_NOTE})")
    else:
        lines.append(f"variance         = {_fmt(report.variance)}")
    lines += [
        f"utilization      = {_fmt(report.utilization)}",
        f"p0               = {_fmt(report.p0)}",
        f"tail_exponent    = {_fmt(report.tail_exponent)}",
        f"tail_coefficient = {_fmt(report.tail_coefficient)}",
    ]
    for x, p in report.tail_samples:
        lines.append(f"P(i > {x}) = {_fmt(p)}")
    _write_output(args, "\n".join(lines) + "\n")
    return EXIT_OK


def _cmd_solve_beta(args):
    config = SolverConfig(beta0=args.beta0, tol=args.tol, max_iter=args.max_iter)
    result = solve_beta(args.q, args.mean, config)
    fields = {
        "q": args.q,
        "mean": args.mean,
        "beta": result.beta,
        "iterations": result.iterations,
        "residual": result.residual,
        "fallback_used": result.fallback_used,
    }
    return _render_fields(args, fields)


def _cmd_norros_mean(args):
    value = norros_mean(args.rho, args.hurst)
    fields = {"rho": args.rho, "hurst": args.hurst, "value": value}
    return _render_fields(args, fields, table_lines=[_fmt(value)])


def _cmd_norros_rho(args):
    value = norros_rho(args.mean, args.hurst)
    fields = {"mean": args.mean, "hurst": args.hurst, "value": value}
    return _render_fields(args, fields, table_lines=[_fmt(value)])


def _cmd_generate(args):
    records = generate_correspondence(args.q, args.mean_min, args.mean_max, args.points)
    fmt = _resolved_format(args, default="csv")
    if fmt == "csv":
        _write_output(args, format_correspondence_csv(records))
        return EXIT_OK
    rows = [(r.mean, r.beta, r.rho, r.q) for r in records]
    return _render_rows(args, CSV_HEADER, rows, default=fmt)


def _cmd_fit(args):
    records = read_correspondence_csv(args.infile)
    data = [(r.beta, r.rho) for r in records]
    report = fit_model_i(data) if args.model == "I" else fit_model_ii(data)
    if report.model_kind == "I":
        named = dict(zip(("a", "b"), report.params))
    else:
        named = dict(zip(("c", "eta", "d", "mu"), report.params))
    fmt = _resolved_format(args)
    if fmt == "json":
        payload = {
            "model": report.model_kind,
            "params": named,
            "rmse": report.rmse,
            "r_squared": report.r_squared,
            "iterations": report.iterations,
            "converged": report.converged,
        }
        _write_output(args, json.dumps(payload) + "\n")
        return EXIT_OK
    fields = {"model": report.model_kind}
    fields.update(named)
    fields.update(
        rmse=report.rmse,
        r_squared=report.r_squared,
        iterations=report.iterations,
        converged=report.converged,
    )
    return _render_fields(args, fields)


def figure_dataset(spec: FigureSpec):
    """Header and rows for one figure; rows grouped by q, ascending mean."""
    if spec.figure_id == 3 and any(q <= 2.0 / 3.0 for q in spec.q_list):
        raise DomainError("figure 3 plots the variance, which requires every q > 2/3")
    if spec.figure_id == 1:
        header = ["q", "beta", "rho"]
    elif spec.figure_id == 2:
        header = ["q", "beta", "rho", "rho_model_i", "rho_model_ii"]
    elif spec.figure_id == 3:
        header = ["q", "rho", "variance"]
    elif spec.figure_id == 4:
        header = ["q", "rho"] + [f"overflow_at_{x}" for x in spec.thresholds]
    else:
        header = ["q", "rho", "utilization", "mm1_utilization"]
    rows = []
    for q in spec.q_list:
        records = generate_correspondence(q, spec.mean_min, spec.mean_max, spec.points)
        if spec.figure_id == 2:
            data = [(r.beta, r.rho) for r in records]
            model_i = fit_model_i(data)
            model_ii = fit_model_ii(data)
        for rec in records:
            model = QueueModel(q, rec.beta)
            if spec.figure_id == 1:
                rows.append((q, rec.beta, rec.rho))
            elif spec.figure_id == 2:
                rows.append((q, rec.beta, rec.rho,
                             evaluate_fit(model_i, rec.beta),
                             evaluate_fit(model_ii, rec.beta)))
            elif spec.figure_id == 3:
                rows.append((q, rec.rho, variance(model)))
            elif spec.figure_id == 4:
                rows.append((q, rec.rho,
                             *(tail(model, x) for x in spec.thresholds)))
            else:
                rows.append((q, rec.rho, utilization(model), rec.rho))
    return header, rows


def _cmd_figure(args):
    q_list = (
        tuple(_parse_float_list(args.q_list))
        if args.q_list
        else _FIGURE_DEFAULT_Q[args.id]
    )
    spec = FigureSpec(
        figure_id=args.id,
        q_list=q_list,
        mean_min=args.mean_min,
        mean_max=args.mean_max,
        points=args.points,
        thresholds=tuple(_parse_int_list(args.thresholds)),
    )
    header, rows = figure_dataset(spec)
    return _render_rows(args, header, rows, default="csv")


# ------------------------------------------------------------ arg parsing

def _parse_float_list(text):
    try:
        return [float(piece) for piece in str(text).split(",") if piece != ""]
    except ValueError:
        raise DomainError(f"expected a comma-separated list of numbers, got {text!r}") from None


def _parse_int_list(text):
    if isinstance(text, (list, tuple)):
        return list(text)
    try:
        return [int(piece) for piece in str(text).split(",") if piece != ""]
    except ValueError:
        raise DomainError(f"expected a comma-separated list of integers, got {text!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format", choices=("table", "csv", "json"), default=argparse.SUPPRESS,
        help="output format (default: table; generate/figure default to csv)",
    )
    common.add_argument(
        "--out", default=argparse.SUPPRESS, help="write output to this path instead of stdout"
    )

    parser = argparse.ArgumentParser(
        prog="tsqueue",
        description="Heavy-tailed maximum-entropy queue model: distribution, "
        "solver, storage-model bridge, fits and figure datasets.",
    )
    parser.add_argument("--format", choices=("table", "csv", "json"), default=None)
    parser.add_argument("--out", default=None)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("zeta", parents=[common], help="evaluate the Hurwitz zeta function")
    p.add_argument("s", type=float)
    p.add_argument("a", type=float)

    p = sub.add_parser("pmf", parents=[common], help="P(i packets in system)")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--i", type=int, required=True)

    p = sub.add_parser("tail", parents=[common], help="overflow probability P(i > x)")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--x", type=int, required=True)

    p = sub.add_parser("metrics", parents=[common], help="QoS report for one model")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--beta", type=float, required=True)
    p.add_argument("--tail", default="0,10,100",
                   help="comma-separated overflow thresholds")

    p = sub.add_parser("solve-beta", parents=[common],
                       help="recover beta from a target mean")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--mean", type=float, required=True)
    p.add_argument("--beta0", type=float, default=None)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--max-iter", type=int, default=100)

    p = sub.add_parser("norros-mean", parents=[common],
                       help="storage-model mean for (rho, H)")
    p.add_argument("--rho", type=float, required=True)
    p.add_argument("--hurst", type=float, required=True)

    p = sub.add_parser("norros-rho", parents=[common],
                       help="invert the storage model for rho")
    p.add_argument("--mean", type=float, required=True)
    p.add_argument("--hurst", type=float, required=True)

    p = sub.add_parser("generate", parents=[common],
                       help="correspondence records over a mean grid")
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--mean-min", type=float, default=0.1)
    p.add_argument("--mean-max", type=float, default=100.0)
    p.add_argument("--points", type=int, default=50)

    p = sub.add_parser("fit", parents=[common],
                       help="fit Model I or II to a correspondence CSV")
    p.add_argument("--model", choices=("I", "II"), required=True)
    p.add_argument("--in", dest="infile", required=True)

    p = sub.add_parser("figure", parents=[common],
                       help="plot-ready dataset for figures 1..5")
    p.add_argument("--id", type=int, choices=(1, 2, 3, 4, 5), required=True)
    p.add_argument("--q-list", default=None)
    p.add_argument("--mean-min", type=float, default=0.1)
    p.add_argument("--mean-max", type=float, default=100.0)
    p.add_argument("--points", type=int, default=50)
    p.add_argument("--thresholds", default="10,100,1000")

    return parser


_HANDLERS = {
    "zeta": _cmd_zeta,
    "pmf": _cmd_pmf,
    "tail": _cmd_tail,
    "metrics": _cmd_metrics,
    "solve-beta": _cmd_solve_beta,
    "norros-mean": _cmd_norros_mean,
    "norros-rho": _cmd_norros_rho,
    "generate": _cmd_generate,
    "fit": _cmd_fit,
    "figure": _cmd_figure,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _HANDLERS[args.command](args)
    except InputFormatError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BAD_INPUT
    except (NoConvergence, SingularFit, DegenerateStep) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NO_CONVERGENCE
    except (DomainError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
