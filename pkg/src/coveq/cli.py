"""Command-line interface: test real datasets, inspect asymptotic
parameters, run simulation studies.

Exit codes signal operational errors only (0 = success, 1 = bad input
or configuration); statistical conclusions never affect exit status, so
the tool is safe in pipelines.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys

import numpy as np

from . import __version__, decision, linalg, simlab
from .kernels import RNG_ALGORITHM
from .lrt import DesignSpec, ScatterSummary, asymptotic_params, exact_moments
from .report import SCHEMA_VERSION, dumps, format_float
from . import specfun

_DELIMITERS = {"comma": ",", "tab": "\t"}


class CliError(Exception):
    """Operational failure reported on stderr with exit code 1."""


def _params_dict(params) -> dict:
    return {
        "f": params.f,
        "rho": params.rho,
        "mu_n": params.mu_n,
        "sigma2_n": params.sigma2_n,
        "mu_bar_n": params.mu_bar_n,
    }


def _outcome_dict(outcome: decision.TestOutcome) -> dict:
    return {
        "method": outcome.method.value,
        "mean_variant": outcome.mean_variant.value,
        "raw_statistic": outcome.raw_statistic,
        "standardized": outcome.standardized,
        "reference": outcome.reference,
        "critical_value": outcome.critical_value,
        "p_value": outcome.p_value,
        "reject": outcome.reject,
    }


def _write_report(doc: dict, out: str | None) -> None:
    text = dumps(doc)
    if out is None or out == "-":
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)


def _parse_dataset(path: str, delimiter: str):
    """Read a delimited dataset: header row, column 1 = group label,
    remaining columns numeric features."""
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except OSError as exc:
        raise CliError(f"cannot read {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh, delimiter=delimiter)
        try:
            header = next(reader)
        except StopIteration:
            raise CliError(f"{path}: empty file, expected a header row")
        if len(header) < 2:
            raise CliError(
                f"{path}: header has {len(header)} column(s); need a group "
                "column plus at least one feature column"
            )
        p = len(header) - 1
        groups: dict[str, list[list[float]]] = {}
        for lineno, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != p + 1:
                raise CliError(
                    f"{path}:{lineno}: expected {p + 1} columns, got {len(row)}"
                )
            label = row[0]
            try:
                values = [float(v) for v in row[1:]]
            except ValueError as exc:
                raise CliError(f"{path}:{lineno}: {exc}") from exc
            if not all(math.isfinite(v) for v in values):
                raise CliError(f"{path}:{lineno}: non-finite value in row")
            groups.setdefault(label, []).append(values)
    if len(groups) < 2:
        raise CliError(
            f"{path}: found {len(groups)} distinct group label(s), need at least 2"
        )
    for label, rows in groups.items():
        if len(rows) <= p:
            raise CliError(
                f"{path}: group {label!r} has {len(rows)} rows but p={p} "
                f"features; the test requires p < n_i for every group"
            )
    return {label: np.array(rows, dtype=np.float64) for label, rows in groups.items()}, p


def cmd_test(args) -> None:
    groups, p = _parse_dataset(args.input, _DELIMITERS[args.delimiter])
    labels = list(groups)
    design = DesignSpec(p=p, group_sizes=tuple(len(groups[g]) for g in labels))
    log_dets = []
    for label in labels:
        try:
            log_dets.append(linalg.log_det_pd(linalg.scatter(groups[label])))
        except linalg.NotPositiveDefiniteError as exc:
            raise CliError(
                f"group {label!r}: scatter matrix is rank deficient "
                f"(degenerate data): {exc}"
            ) from exc
    pooled = np.zeros((p, p))
    for label in labels:
        pooled += linalg.scatter(groups[label])
    try:
        log_det_pooled = linalg.log_det_pd(pooled)
    except linalg.NotPositiveDefiniteError as exc:
        raise CliError(f"pooled scatter matrix is rank deficient: {exc}") from exc
    summary = ScatterSummary(
        design=design, log_det_groups=tuple(log_dets), log_det_pooled=log_det_pooled
    )

    variant = decision.MeanVariant(args.mean_variant)
    if args.method == "all":
        methods = (decision.Method.CHISQ, decision.Method.CLT, decision.Method.ALRT)
    else:
        methods = (decision.Method(args.method),)
    outcomes = decision.run_tests(summary, args.alpha, methods, variant)

    doc = {
        "version": SCHEMA_VERSION,
        "kind": "test",
        "artifact_version": __version__,
        "rng_algorithm": RNG_ALGORITHM,
        "input": {
            "path": args.input,
            "delimiter": args.delimiter,
            "p": p,
            "groups": [{"label": g, "n": len(groups[g])} for g in labels],
        },
        "alpha": args.alpha,
        "mean_variant": variant.value,
        "params": _params_dict(outcomes[0].params),
        "log_det_groups": list(summary.log_det_groups),
        "log_det_pooled": summary.log_det_pooled,
        "outcomes": [_outcome_dict(o) for o in outcomes],
    }
    _write_report(doc, args.out)


def _design_from_args(args) -> DesignSpec:
    if args.ni:
        if args.k is not None and args.k != len(args.ni):
            raise CliError(
                f"--k {args.k} contradicts {len(args.ni)} --ni values"
            )
        sizes = tuple(args.ni)
    else:
        if args.n is None or args.k is None:
            raise CliError("specify group sizes via --k and --n, or repeated --ni")
        sizes = (args.n,) * args.k
    try:
        return DesignSpec(p=args.p, group_sizes=sizes)
    except ValueError as exc:
        raise CliError(str(exc)) from exc


def cmd_params(args) -> None:
    design = _design_from_args(args)
    params = asymptotic_params(design)
    mean, variance = exact_moments(design)
    doc = {
        "version": SCHEMA_VERSION,
        "kind": "params",
        "artifact_version": __version__,
        "design": {"p": design.p, "k": design.k, "group_sizes": list(design.group_sizes)},
        "alpha": args.alpha,
        "params": _params_dict(params),
        "exact_mean": mean,
        "exact_variance": variance,
        "critical_values": {
            "chisq": specfun.chisq_quantile(params.f, args.alpha),
            "clt": specfun.normal_quantile(args.alpha),
            "alrt": specfun.chisq_quantile(params.f, args.alpha),
        },
    }
    _write_report(doc, args.out)


def _write_stats_file(path: str, statistics: dict) -> None:
    keys = ("raw", "chisq", "clt", "alrt")
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("replicate_index,raw,chisq_std,clt_std,alrt_std\n")
        cols = [statistics[k] for k in keys]
        for i in range(len(cols[0])):
            fields = ",".join(format_float(float(c[i])) for c in cols)
            fh.write(f"{i},{fields}\n")


def _write_dump_one(path: str, design: DesignSpec, scenario: simlab.Scenario, seed: int) -> None:
    stream = linalg.RngStream(master_seed=seed, stream_index=0)
    samples = simlab.replicate_samples(design, scenario, stream)
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write("group," + ",".join(f"x{j + 1}" for j in range(design.p)) + "\n")
        for i, x in enumerate(samples):
            label = f"g{i + 1}"
            for row in x:
                fh.write(label + "," + ",".join(format_float(float(v)) for v in row) + "\n")


def cmd_simulate(args) -> None:
    design = _design_from_args(args)
    try:
        spec = simlab.SimulationSpec(
            design=design,
            scenario=simlab.Scenario(args.scenario),
            alpha=args.alpha,
            replicates=args.replicates,
            master_seed=args.seed,
            emit_statistics=bool(args.emit_stats),
        )
    except ValueError as exc:
        raise CliError(str(exc)) from exc

    stats_path = None
    if args.emit_stats:
        if args.stats_out:
            stats_path = args.stats_out
        elif args.out and args.out != "-":
            stats_path = args.out + ".stats.csv"
        else:
            raise CliError("--emit-stats needs --stats-out (or a file --out)")

    if args.dump_one:
        _write_dump_one(args.dump_one, design, spec.scenario, args.seed)

    report = simlab.run_study(spec, threads=args.threads)
    if stats_path:
        _write_stats_file(stats_path, report.statistics)

    doc = {
        "version": SCHEMA_VERSION,
        "kind": "simulation",
        "artifact_version": __version__,
        "rng_algorithm": report.rng_algorithm,
        "spec": {
            "p": design.p,
            "k": design.k,
            "group_sizes": list(design.group_sizes),
            "scenario": spec.scenario.value,
            "alpha": spec.alpha,
            "replicates": spec.replicates,
            "master_seed": spec.master_seed,
            "emit_statistics": spec.emit_statistics,
        },
        "params": _params_dict(report.params),
        "cutoffs_raw": dict(report.cutoffs_raw),
        "results": {
            m: {
                "rejection_rate": report.rejection_rate[m],
                "std_error": report.std_error[m],
                "reject_count": report.reject_count[m],
            }
            for m in ("chisq", "clt", "alrt")
        },
        "elapsed_seconds": report.elapsed,
        "statistics_file": stats_path,
    }
    _write_report(doc, args.out)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coveq",
        description="Tests for equality of covariance matrices across groups.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_test = sub.add_parser("test", help="run the tests on a delimited dataset")
    p_test.add_argument("--input", required=True, help="dataset path (header row; column 1 = group label)")
    p_test.add_argument("--delimiter", choices=sorted(_DELIMITERS), default="comma")
    p_test.add_argument("--alpha", type=float, default=0.05)
    p_test.add_argument("--method", choices=["chisq", "clt", "alrt", "all"], default="all")
    p_test.add_argument("--mean-variant", choices=["digamma", "digamma-free"], default="digamma")
    p_test.add_argument("--out", default="-", help="report path ('-' = stdout)")
    p_test.set_defaults(func=cmd_test)

    p_params = sub.add_parser("params", help="print asymptotic parameters for a design")
    p_params.add_argument("--p", type=int, required=True)
    p_params.add_argument("--k", type=int)
    p_params.add_argument("--n", type=int, help="common group size")
    p_params.add_argument("--ni", type=int, action="append", help="per-group size (repeatable)")
    p_params.add_argument("--alpha", type=float, default=0.05)
    p_params.add_argument("--out", default="-")
    p_params.set_defaults(func=cmd_params)

    p_sim = sub.add_parser("simulate", help="Monte Carlo size/power study")
    p_sim.add_argument("--p", type=int, required=True)
    p_sim.add_argument("--k", type=int)
    p_sim.add_argument("--n", type=int, help="common group size")
    p_sim.add_argument("--ni", type=int, action="append", help="per-group size (repeatable)")
    p_sim.add_argument("--scenario", choices=["null", "scaled"], default="null")
    p_sim.add_argument("--alpha", type=float, default=0.05)
    p_sim.add_argument("--replicates", type=int, required=True)
    p_sim.add_argument("--seed", type=int, default=0, help="master seed")
    p_sim.add_argument("--emit-stats", action="store_true",
                       help="write per-replicate statistics to a delimited file")
    p_sim.add_argument("--stats-out", help="path for the statistics dump")
    p_sim.add_argument("--dump-one", metavar="PATH",
                       help="also write replicate 0 as a dataset file")
    p_sim.add_argument("--threads", type=int, help="worker threads for replicate evaluation")
    p_sim.add_argument("--out", default="-")
    p_sim.set_defaults(func=cmd_simulate)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        args.func(args)
    except CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
