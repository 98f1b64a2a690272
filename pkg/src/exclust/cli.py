"""Command-line interface with the subcommands analyze, simulate and limits.

Exit codes: 0 success, 1 usage or input error, 2 no data (for example zero
clusters at a threshold), 3 numeric failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .bootstrap import BootstrapConfig
from .clusters import detect_clusters
from .errors import CsvFormatError, DegenerateBootstrapError, FactorizationError, NoDataError
from .estimation import DistributionEstimate, cluster_size_distribution, extremogram, pattern_distribution
from .io import (
    ingest_csv,
    report_json,
    timestamp_now,
    write_series_csv,
    write_table_csv,
)
from .limits import (
    TailProcessSampler,
    asymptotic_covariance,
    cluster_size_event_family,
    default_h_trunc,
    extremal_coefficient,
    limit_cluster_size_mc,
    limit_pattern_mc,
    mar_limit_cluster_size,
    mixing_diagnostics,
)
from .patterns import all_patterns
from .series import SegmentedSeries, ThresholdSpec, resolve_threshold
from .simulate import ModelSpec, frechet_ks, simulate_series


class UsageError(Exception):
    """Bad command line or configuration; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


@dataclass
class AnalysisConfig:
    """Everything one analyze invocation needs."""

    input_path: str
    value_col: str = "value"
    segment_col: str | None = None
    djfm_date_col: str | None = None
    thresholds: list[ThresholdSpec] = field(default_factory=lambda: [ThresholdSpec.quantile(0.95)])
    l_max: int = 8
    pattern_lengths: list[int] = field(default_factory=lambda: [2, 3])
    extremogram_max: int | None = None
    bootstrap: BootstrapConfig | None = None
    seed: int = 0
    include_timestamp: bool = True

    def __post_init__(self):
        if not self.thresholds:
            raise ValueError("at least one threshold must be requested")
        if self.l_max < 1:
            raise ValueError("l_max must be >= 1")


def _threshold_tag(spec: ThresholdSpec) -> str:
    prefix = "q" if spec.kind == "quantile" else "u"
    return f"{prefix}{spec.value:g}"


def run_analyze(cfg: AnalysisConfig) -> dict:
    """Full analysis pipeline: ingest, detect, estimate, report."""
    series = ingest_csv(
        cfg.input_path, cfg.value_col, cfg.segment_col, cfg.djfm_date_col
    )
    if (
        cfg.bootstrap is not None
        and cfg.bootstrap.block == "segments"
        and series.n_segments < 2
    ):
        raise UsageError(
            "bootstrap with block=segments needs at least 2 segments; "
            "pass a fixed block length via --block N"
        )
    report = {
        "schema_version": 1,
        "command": "analyze",
    }
    if cfg.include_timestamp:
        report["timestamp"] = timestamp_now()
    report["seed"] = int(cfg.seed)
    report["input"] = {
        "path": str(cfg.input_path),
        "value_col": cfg.value_col,
        "segment_col": cfg.segment_col,
        "djfm_date_col": cfg.djfm_date_col,
        "n_observations": series.n_observations,
        "n_segments": series.n_segments,
    }
    results = []
    max_seg = max(seg.size for seg in series.segments)
    for spec in cfg.thresholds:
        u = resolve_threshold(series, spec)
        clusters = detect_clusters(series, u)
        try:
            sizes = cluster_size_distribution(series, u, cfg.l_max, bootstrap=cfg.bootstrap)
        except NoDataError as exc:
            raise NoDataError(f"threshold {_threshold_tag(spec)}: {exc}") from exc
        patterns = {}
        for length in cfg.pattern_lengths:
            try:
                patterns[str(length)] = pattern_distribution(
                    series, u, length, bootstrap=cfg.bootstrap
                ).to_json()
            except NoDataError as exc:
                raise NoDataError(f"threshold {_threshold_tag(spec)}: {exc}") from exc
        block = {
            "threshold_spec": spec.to_json(),
            "threshold": float(u),
            "n_exceedances": clusters.n_exceedances_total,
            "n_clusters": clusters.n_clusters,
            "n_boundary_truncated": clusters.n_boundary_truncated,
            "cluster_sizes": sizes.to_json(),
            "patterns": patterns,
        }
        h_max = cfg.extremogram_max
        if h_max is None:
            h_max = min(40, max_seg - 1)
        if h_max >= 1:
            try:
                rho = extremogram(series, u, h_max)
            except NoDataError as exc:
                raise NoDataError(f"threshold {_threshold_tag(spec)}: {exc}") from exc
            block["extremogram"] = {
                "lags": list(range(h_max + 1)),
                "rho": [float(v) for v in rho],
            }
        results.append(block)
    report["results"] = results
    return report


def plot_tables(report: dict) -> list[tuple[str, list[str], list[list]]]:
    """Per-figure bar/CI tables for external plotting: (name, header, rows)."""
    tables = []
    for block in report.get("results", []):
        tag = _threshold_tag(ThresholdSpec(**block["threshold_spec"]))

        def dist_rows(dist):
            rows = []
            n = len(dist["support"])
            ci_lo = dist.get("ci_lo", [""] * n)
            ci_hi = dist.get("ci_hi", [""] * n)
            for atom, p, c, lo, hi in zip(
                dist["support"], dist["probs"], dist["counts"], ci_lo, ci_hi
            ):
                label = "".join(str(v) for v in atom) if isinstance(atom, list) else atom
                rows.append([label, float(p), int(c), lo, hi])
            return rows

        tables.append(
            (
                f"{tag}_sizes",
                ["atom", "prob", "count", "ci_lo", "ci_hi"],
                dist_rows(block["cluster_sizes"]),
            )
        )
        for length, dist in block.get("patterns", {}).items():
            tables.append(
                (
                    f"{tag}_patterns_l{length}",
                    ["pattern", "prob", "count", "ci_lo", "ci_hi"],
                    dist_rows(dist),
                )
            )
        if "extremogram" in block:
            rows = [
                [int(h), float(r)]
                for h, r in zip(block["extremogram"]["lags"], block["extremogram"]["rho"])
            ]
            tables.append((f"{tag}_extremogram", ["lag", "rho"], rows))
    return tables


def run_simulate(model: ModelSpec, n: int, seed: int, block_len: int) -> tuple[SegmentedSeries, dict]:
    series = simulate_series(model, n, seed, block_len=block_len)
    stat, pvalue = frechet_ks(series.pooled())
    summary = {
        "schema_version": 1,
        "command": "simulate",
        "seed": int(seed),
        "model": model.to_json(),
        "n": int(n),
        "n_segments": series.n_segments,
        "ks": {"statistic": stat, "pvalue": pvalue},
    }
    return series, summary


def run_limits(
    model: ModelSpec,
    l_max: int,
    pattern_lengths: list[int],
    n_mc: int,
    seed: int,
    include_covariance: bool = False,
    include_mixing: bool = False,
    coefficient_lags: list[int] | None = None,
    h_trunc: int | None = None,
    include_timestamp: bool = True,
) -> dict:
    """Limit distributions, extremal coefficients, covariance and diagnostics."""
    report = {"schema_version": 1, "command": "limits"}
    if include_timestamp:
        report["timestamp"] = timestamp_now()
    report["seed"] = int(seed)
    report["model"] = model.to_json()
    report["n_mc"] = int(n_mc)

    if model.kind == "mar":
        probs = np.array(
            [mar_limit_cluster_size(model.a, l) for l in range(1, l_max + 1)]
            + [model.a**l_max]
        )
        sizes = DistributionEstimate(
            support=list(range(1, l_max + 1)) + [f">{l_max}"],
            probs=probs,
            counts=np.zeros(l_max + 1, dtype=np.int64),
            denominator_count=0,
            threshold=1.0,
            method="analytic",
            metadata={"law": "geometric", "parameter": 1.0 - model.a},
        )
    else:
        sampler = TailProcessSampler(model, -1, l_max + 1)
        sizes = limit_cluster_size_mc(sampler, l_max, n_mc, seed)
    report["cluster_sizes"] = sizes.to_json()

    patterns = {}
    for length in pattern_lengths:
        sampler = TailProcessSampler(model, -1, length + 1)
        patterns[str(length)] = limit_pattern_mc(sampler, length, n_mc, seed).to_json()
    report["patterns"] = patterns

    if coefficient_lags is not None:
        if model.variogram is None:
            raise UsageError("extremal coefficients require a brown-resnick model")
        report["extremal_coefficients"] = {
            "lags": coefficient_lags,
            "values": [extremal_coefficient(model.variogram, h) for h in coefficient_lags],
        }
    if include_covariance:
        trunc = h_trunc if h_trunc is not None else default_h_trunc(model)
        events = cluster_size_event_family(list(range(1, l_max + 1)))
        sampler = TailProcessSampler(model, -1, events[0].t + trunc)
        cov = asymptotic_covariance(sampler, events, trunc, n_mc, seed)
        report["covariance"] = cov.to_json()
    if include_mixing:
        if model.variogram is None:
            raise UsageError("mixing diagnostics require a brown-resnick model")
        trunc = h_trunc
        if trunc is None:
            trunc = 200
            for h in range(1, 201):
                if h * h * (2.0 - extremal_coefficient(model.variogram, h)) < 1e-4:
                    trunc = h
                    break
        diag = mixing_diagnostics(
            model.variogram,
            u_grid=[10.0, 20.0, 50.0],
            r_grid=[5, 10, 20, 40],
            k_grid=[1, 2, 5, 10, 20],
            h_trunc=trunc,
        )
        report["mixing_diagnostics"] = diag.to_json()
    return report


# ---------------------------------------------------------------------------
# argument wiring


def _block_arg(value: str):
    if value == "segments":
        return "segments"
    try:
        return int(value)
    except ValueError:
        raise UsageError(f'--block must be "segments" or an integer, got {value!r}')


def _lag_range(value: str) -> list[int]:
    try:
        if ".." in value:
            lo, hi = value.split("..")
            return list(range(int(lo), int(hi) + 1))
        return [int(value)]
    except ValueError:
        raise UsageError(f"cannot parse lag range {value!r}; use like 0..10")


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=str, default=None)
    parser.add_argument("--format", choices=["json", "csv"], default="json")
    parser.add_argument("--no-timestamp", action="store_true")


def _model_from_args(args) -> ModelSpec:
    if args.model == "mar":
        if args.a is None:
            raise UsageError("mar requires --a")
        return ModelSpec.mar(args.a)
    if args.model == "moving-max":
        return ModelSpec.moving_max()
    if args.scale is None or args.exponent is None:
        raise UsageError("brown-resnick requires --scale and --exponent")
    return ModelSpec.brown_resnick(args.scale, args.exponent)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="exclust",
        description="Exceedance-cluster sizes and ordinal patterns in stationary time series.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="estimate cluster and pattern distributions from CSV data")
    _add_common(pa)
    pa.add_argument("--input", required=True)
    pa.add_argument("--value-col", default="value")
    pa.add_argument("--segment-col", default=None)
    pa.add_argument("--djfm-date-col", default=None)
    pa.add_argument("--quantile", action="append", type=float, default=None)
    pa.add_argument("--threshold", action="append", type=float, default=None)
    pa.add_argument("--l-max", type=int, default=8)
    pa.add_argument("--pattern-len", action="append", type=int, default=None)
    pa.add_argument("--extremogram-max", type=int, default=None)
    pa.add_argument("--bootstrap-reps", type=int, default=1000)
    pa.add_argument("--block", type=_block_arg, default="segments")
    pa.add_argument("--ci-level", type=float, default=0.95)
    pa.set_defaults(func=_cmd_analyze)

    ps = sub.add_parser("simulate", help="simulate a model path and write it as CSV")
    _add_common(ps)
    ps.add_argument("--model", required=True, choices=["mar", "moving-max", "brown-resnick"])
    ps.add_argument("--a", type=float, default=None)
    ps.add_argument("--scale", type=float, default=None)
    ps.add_argument("--exponent", type=float, default=None)
    ps.add_argument("--n", type=int, required=True)
    ps.add_argument("--block", type=int, default=500)
    ps.set_defaults(func=_cmd_simulate)

    pl = sub.add_parser("limits", help="limiting distributions and diagnostics for a model")
    _add_common(pl)
    pl.add_argument("--model", required=True, choices=["mar", "moving-max", "brown-resnick"])
    pl.add_argument("--a", type=float, default=None)
    pl.add_argument("--scale", type=float, default=None)
    pl.add_argument("--exponent", type=float, default=None)
    pl.add_argument("--n-mc", type=int, default=100_000)
    pl.add_argument("--l-max", type=int, default=5)
    pl.add_argument("--pattern-len", action="append", type=int, default=None)
    pl.add_argument("--covariance", action="store_true")
    pl.add_argument("--mixing-diagnostics", action="store_true")
    pl.add_argument("--extremal-coefficients", type=str, default=None, metavar="RANGE")
    pl.add_argument("--h-trunc", type=int, default=None)
    pl.set_defaults(func=_cmd_limits)
    return parser


def _emit_report(report: dict, args) -> None:
    if args.out:
        out = Path(args.out)
        out.write_text(report_json(report), encoding="utf-8")
        if args.command == "analyze":
            for name, header, rows in plot_tables(report):
                write_table_csv(out.with_name(f"{out.stem}_{name}.csv"), header, rows)
    elif args.format == "csv" and args.command == "analyze":
        writer = __import__("csv").writer(sys.stdout)
        for name, header, rows in plot_tables(report):
            sys.stdout.write(f"# {name}\n")
            writer.writerow(header)
            for row in rows:
                writer.writerow(row)
    else:
        sys.stdout.write(report_json(report))


def _cmd_analyze(args) -> int:
    bootstrap = None
    if args.bootstrap_reps > 0:
        bootstrap = BootstrapConfig(
            n_replicates=args.bootstrap_reps,
            block=args.block,
            seed=args.seed,
            ci_level=args.ci_level,
        )
    thresholds = [ThresholdSpec.quantile(q) for q in (args.quantile or [])]
    thresholds += [ThresholdSpec.absolute(u) for u in (args.threshold or [])]
    if not thresholds:
        thresholds = [ThresholdSpec.quantile(0.95)]
    cfg = AnalysisConfig(
        input_path=args.input,
        value_col=args.value_col,
        segment_col=args.segment_col,
        djfm_date_col=args.djfm_date_col,
        thresholds=thresholds,
        l_max=args.l_max,
        pattern_lengths=args.pattern_len or [2, 3],
        extremogram_max=args.extremogram_max,
        bootstrap=bootstrap,
        seed=args.seed,
        include_timestamp=not args.no_timestamp,
    )
    report = run_analyze(cfg)
    _emit_report(report, args)
    return 0


def _cmd_simulate(args) -> int:
    model = _model_from_args(args)
    if args.n < 1:
        raise UsageError("--n must be >= 1")
    series, summary = run_simulate(model, args.n, args.seed, args.block)
    if not args.no_timestamp:
        summary = {**summary, "timestamp": timestamp_now()}
    if args.out:
        write_series_csv(series, args.out)
        sys.stdout.write(report_json(summary))
    else:
        import csv as _csv
        import io as _io

        buf = _io.StringIO()
        writer = _csv.writer(buf)
        writer.writerow(["segment", "value"])
        for i, seg in enumerate(series.segments):
            label = series.label_of(i)
            for v in seg:
                writer.writerow([label, format(float(v), ".17g")])
        sys.stdout.write(buf.getvalue())
        sys.stderr.write(report_json(summary))
    return 0


def _cmd_limits(args) -> int:
    model = _model_from_args(args)
    lags = _lag_range(args.extremal_coefficients) if args.extremal_coefficients else None
    report = run_limits(
        model,
        l_max=args.l_max,
        pattern_lengths=args.pattern_len or [2, 3],
        n_mc=args.n_mc,
        seed=args.seed,
        include_covariance=args.covariance,
        include_mixing=args.mixing_diagnostics,
        coefficient_lags=lags,
        h_trunc=args.h_trunc,
        include_timestamp=not args.no_timestamp,
    )
    _emit_report(report, args)
    return 0


def _error_payload(kind: str, exc: Exception) -> str:
    return json.dumps({"error": {"type": kind, "message": str(exc)}}) + "\n"


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        sys.stderr.write(_error_payload("usage", exc))
        return 1
    except (CsvFormatError, OSError, ValueError) as exc:
        sys.stderr.write(_error_payload("input", exc))
        return 1
    except (NoDataError, DegenerateBootstrapError) as exc:
        sys.stderr.write(_error_payload("no-data", exc))
        return 2
    except (FactorizationError, ArithmeticError, np.linalg.LinAlgError) as exc:
        sys.stderr.write(_error_payload("numeric", exc))
        return 3


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
