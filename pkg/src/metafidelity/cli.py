"""Command-line surface: check, attack-quality, stats, plotdata.

Exit codes for ``check``: 0 when the verdict is behavior-preserving, 1 when
any relation is violated, 2 on input errors. All other commands exit 0 on
success and 2 on input errors. Diagnostics go to stderr with line numbers
when the failure comes from a specific dump line.
"""

from __future__ import annotations

import csv
import io
import os
import sys
from pathlib import Path

import click
import numpy as np

from . import __version__, errors
from .attacks.quality import evaluate_quality, load_code_pairs
from .records import FidelityConfig, load_records, pair_datasets
from .relations import (
    DEFAULT_BIN_SWEEP,
    DEFAULT_ECA_THRESHOLD,
    DEFAULT_TAU_SWEEP,
    evaluate_all,
)
from .report import (
    FidelityReport,
    build_quality_payload,
    build_report,
    canonical_json,
    sha256_file,
)
from .stats import load_matrix_csv, friedman_test, wilcoxon_signed_rank


def _max_threads() -> int:
    """Parallelism cap from METAFIDELITY_THREADS; evaluation is deterministic
    regardless, since aggregation is an ordered reduction."""
    raw = os.environ.get("METAFIDELITY_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _fail(exc: Exception) -> None:
    click.echo(f"error: {exc}", err=True)
    sys.exit(2)


@click.group()
@click.version_option(version=__version__, prog_name="metafidelity")
def main():
    """Behavioral-fidelity testing for distilled classifiers."""


@main.command()
@click.argument("teacher", type=click.Path(exists=True, dir_okay=False))
@click.argument("student", type=click.Path(exists=True, dir_okay=False))
@click.option("--delta", type=float, default=0.5, show_default=True,
              help="KL tolerance for MR2.")
@click.option("--tau", "taus", type=float, multiple=True,
              help="MR3 confidence threshold; repeatable. Default: 0.8 0.85 0.9.")
@click.option("--bins", "bin_counts", type=int, multiple=True,
              help="MR4 bin count; repeatable. Default: 10 15 20.")
@click.option("--temperature", type=float, default=1.0, show_default=True,
              help="Softmax temperature applied when dumps carry logits.")
@click.option("--eca-threshold", type=float, default=DEFAULT_ECA_THRESHOLD,
              show_default=True, help="Maximum ECA for a behavior-preserving verdict.")
@click.option("--empty-bins", type=click.Choice(["literal", "occupied"]),
              default="literal", show_default=True,
              help="Whether empty MR4 bins count toward the divisor.")
@click.option("--lenient", is_flag=True, help="Ignore unknown NDJSON fields.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Report path (default: report.json next to the student dump).")
def check(teacher, student, delta, taus, bin_counts, temperature,
          eca_threshold, empty_bins, lenient, out):
    """Evaluate MR1-MR4 between a teacher and a student prediction dump."""
    _max_threads()
    tau_sweep = tuple(taus) if taus else DEFAULT_TAU_SWEEP
    bin_sweep = tuple(bin_counts) if bin_counts else DEFAULT_BIN_SWEEP
    try:
        cfg = FidelityConfig(delta=delta, temperature=temperature)
        teacher_records = load_records(teacher, lenient=lenient)
        student_records = load_records(student, lenient=lenient)
        pairing = pair_datasets(teacher_records, student_records, temperature=temperature)
        outcomes = evaluate_all(
            pairing.dataset, cfg,
            tau_sweep=tau_sweep, bin_sweep=bin_sweep,
            eca_threshold=eca_threshold, empty_bins=empty_bins,
        )
    except errors.MetafidelityError as exc:
        _fail(exc)

    report = build_report(
        outcomes,
        sample_ids=pairing.dataset.ids(),
        config_echo={
            "delta": delta,
            "temperature": temperature,
            "prob_floor": cfg.prob_floor,
            "tau_sweep": list(tau_sweep),
            "bin_sweep": list(bin_sweep),
            "eca_threshold": eca_threshold,
            "empty_bins": empty_bins,
        },
        inputs={
            "teacher": {"file": Path(teacher).name, "sha256": sha256_file(teacher)},
            "student": {"file": Path(student).name, "sha256": sha256_file(student)},
        },
        tool_version=__version__,
        dropped_teacher_ids=pairing.dropped_teacher_ids,
        dropped_student_ids=pairing.dropped_student_ids,
    )
    out_path = Path(out) if out else Path(student).with_name("report.json")
    report.write(out_path)
    verdict = report.behavior_preserving
    click.echo(f"behavior_preserving={str(verdict).lower()} report={out_path}")
    sys.exit(0 if verdict else 1)


@main.command("attack-quality")
@click.argument("pairs_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--no-acs", is_flag=True, help="Skip ACS even when embeddings are present.")
@click.option("--before", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Pre-attack prediction dump (enables ASR; requires --after).")
@click.option("--after", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Post-attack prediction dump (enables ASR; requires --before).")
@click.option("--lenient", is_flag=True, help="Ignore unknown NDJSON fields.")
@click.option("--out", type=click.Path(dir_okay=False), default=None,
              help="Report path (default: quality.json next to the pairs file).")
def attack_quality(pairs_path, no_acs, before, after, lenient, out):
    """Compute ICR/TCR/AED/ACS (and ASR with before/after dumps) over code pairs."""
    if (before is None) != (after is None):
        _fail(errors.MissingField("ASR needs both --before and --after"))
    try:
        pairs = load_code_pairs(pairs_path, lenient=lenient)
        before_records = load_records(before, lenient=lenient) if before else None
        after_records = load_records(after, lenient=lenient) if after else None
        quality = evaluate_quality(
            pairs, include_acs=not no_acs,
            before=before_records, after=after_records,
        )
    except errors.MetafidelityError as exc:
        _fail(exc)

    inputs = {"pairs": {"file": Path(pairs_path).name, "sha256": sha256_file(pairs_path)}}
    if before:
        inputs["before"] = {"file": Path(before).name, "sha256": sha256_file(before)}
        inputs["after"] = {"file": Path(after).name, "sha256": sha256_file(after)}
    payload = build_quality_payload(quality, inputs=inputs, tool_version=__version__)
    out_path = Path(out) if out else Path(pairs_path).with_name("quality.json")
    out_path.write_text(canonical_json(payload), encoding="utf-8")
    click.echo(f"report={out_path}")


@main.group()
def stats():
    """Nonparametric significance tests over CSV measurement tables."""


@stats.command()
@click.argument("csv_path", type=click.Path(exists=True, dir_okay=False))
def friedman(csv_path):
    """Friedman test: header row = treatments, one row per subject."""
    try:
        matrix = load_matrix_csv(csv_path)
        result = friedman_test(matrix)
    except errors.MetafidelityError as exc:
        _fail(exc)
    click.echo(f"statistic={result.statistic:.6f} p={result.p_value:.6f}")


@stats.command()
@click.argument("csv_path", type=click.Path(exists=True, dir_okay=False))
def wilcoxon(csv_path):
    """Wilcoxon signed-rank test: CSV with exactly two paired columns."""
    try:
        matrix = load_matrix_csv(csv_path)
        if matrix.values.shape[1] != 2:
            raise errors.LengthMismatch(
                f"wilcoxon needs exactly 2 columns, got {matrix.values.shape[1]}"
            )
        result = wilcoxon_signed_rank(matrix.values[:, 0], matrix.values[:, 1])
    except errors.MetafidelityError as exc:
        _fail(exc)
    click.echo(f"statistic={result.statistic:.6f} p={result.p_value:.6f}")


def _quantiles(values):
    arr = np.asarray(values, dtype=float)
    return [float(np.min(arr)), float(np.percentile(arr, 25)),
            float(np.median(arr)), float(np.percentile(arr, 75)),
            float(np.max(arr))]


@main.command()
@click.argument("report_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--kind", type=click.Choice(["violations", "kl-box"]), required=True)
def plotdata(report_path, kind):
    """Emit CSV plot data (violation rates or KL box statistics) from a report."""
    try:
        report = FidelityReport.from_json_file(report_path)
    except (OSError, ValueError) as exc:
        _fail(exc)
    payload = report.payload
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")

    if kind == "violations":
        writer.writerow(["mr_id", "parameter", "violation_rate"])
        mr = payload["mr_outcomes"]
        writer.writerow(["MR1", "", repr(mr["MR1"]["violation_rate"])])
        writer.writerow(["MR2", repr(mr["MR2"]["delta"]), repr(mr["MR2"]["violation_rate"])])
        for entry in mr["MR3"]:
            value = "undefined" if entry["undefined"] else repr(entry["violation_rate"])
            writer.writerow(["MR3", repr(entry["tau"]), value])
        for entry in mr["MR4"]:
            writer.writerow(["MR4", repr(entry["bins"]), repr(entry["eca"])])
    else:
        writer.writerow(["id", "kl_pq", "kl_qp"])
        rows = payload["per_sample_kl"]
        for row in rows:
            writer.writerow([row["id"], repr(row["kl_pq"]), repr(row["kl_qp"])])
        if rows:
            stats_pq = _quantiles([r["kl_pq"] for r in rows])
            stats_qp = _quantiles([r["kl_qp"] for r in rows])
            for name, vpq, vqp in zip(
                ["min", "q1", "median", "q3", "max"], stats_pq, stats_qp
            ):
                writer.writerow([name, repr(vpq), repr(vqp)])
    click.echo(buf.getvalue(), nl=False)


if __name__ == "__main__":
    main()
