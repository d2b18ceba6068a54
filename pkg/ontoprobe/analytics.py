"""
Analytics module for Ontoprobe
Turns campaign run records into solved/axiom-usage series, usage tables and report files
"""
import csv
import io
from collections import defaultdict
from decimal import Decimal
from fractions import Fraction
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

from loguru import logger

from ontoprobe import __version__
from ontoprobe.constants import FIGURE_FILES, PLOT_FILE, REPORT_FILE, USAGE_FILE
from ontoprobe.errors import UnknownAxiomName
from ontoprobe.kif import FormulaKind
from ontoprobe.models import (
    AxiomMeta,
    AxiomUsage,
    EvaluationReport,
    LayerTag,
    Percentage,
    ReportGroup,
    ReportSeries,
    RunRecord,
    SeriesPoint,
    TestKind,
    VerdictStatus,
)

GROUPS = (ReportGroup.ALL, ReportGroup.TRUTH, ReportGroup.FALSITY)
LAYER_SERIES = (LayerTag.TOP_LEVEL, LayerTag.MID_LEVEL)
KIND_SERIES = (FormulaKind.UNIT_CLAUSE, FormulaKind.GENERAL_CLAUSE)
DEFAULT_USAGE_THRESHOLD = 10

_GROUP_KIND = {ReportGroup.TRUTH: TestKind.TRUTH, ReportGroup.FALSITY: TestKind.FALSITY}


def percent(numerator: int, denominator: int) -> int:
    """Integer percentage rounded to nearest, ties away from zero; 0 for an empty denominator."""
    if denominator == 0:
        return 0
    value = Fraction(100 * numerator, denominator)
    magnitude = int(abs(value) + Fraction(1, 2))
    return magnitude if value >= 0 else -magnitude


def percentage(numerator: int, denominator: int, label: str = "") -> Percentage:
    return Percentage(numerator=numerator, denominator=denominator, percent=percent(numerator, denominator), label=label)


def format_average(value: Fraction) -> str:
    """Two decimals, half away from zero."""
    hundredths = value * 100
    whole = int(abs(hundredths) + Fraction(1, 2))
    cents = Decimal(whole if hundredths >= 0 else -whole) / 100
    return str(cents.quantize(Decimal("0.01")))


def _in_group(record: RunRecord, group: ReportGroup) -> bool:
    return group == ReportGroup.ALL or record.kind == _GROUP_KIND[group]


def _proofs(records: Iterable[RunRecord], limit_s: int, group: ReportGroup) -> List[RunRecord]:
    return [
        r for r in records
        if r.limit_s == limit_s and r.verdict == VerdictStatus.PROOF_FOUND and _in_group(r, group)
    ]


def _series(metric: str, group: ReportGroup, points: Sequence[Tuple[int, Union[int, float]]],
            layer: Optional[LayerTag] = None, kind: Optional[FormulaKind] = None) -> ReportSeries:
    return ReportSeries(
        metric=metric, group=group, layer=layer, kind=kind,
        points=[SeriesPoint(limit_s=limit, value=value) for limit, value in points],
    )


def _usage_table(proofs: Sequence[RunRecord], metadata: Mapping[str, AxiomMeta]) -> List[AxiomUsage]:
    truth: Dict[str, int] = defaultdict(int)
    falsity: Dict[str, int] = defaultdict(int)
    for record in proofs:
        bucket = truth if record.kind == TestKind.TRUTH else falsity
        for name in record.used_axioms:
            bucket[name] += 1
    table = [
        AxiomUsage(
            name=name, layer=meta.layer, kind=meta.kind,
            proofs_total=truth[name] + falsity[name], proofs_truth=truth[name], proofs_falsity=falsity[name],
        )
        for name, meta in metadata.items()
    ]
    table.sort(key=lambda u: (-u.proofs_total, u.name))
    return table


def usefulness_histogram(
    usage: Sequence[AxiomUsage], threshold: int = DEFAULT_USAGE_THRESHOLD, by: str = "total",
) -> List[AxiomUsage]:
    """Axioms cited by at least `threshold` proofs, counting all proofs or only truth-test proofs."""
    if threshold < 1:
        raise ValueError("threshold must be at least 1")
    if by not in ("total", "truth"):
        raise ValueError(f"cannot count usage by '{by}'")
    count = (lambda u: u.proofs_total) if by == "total" else (lambda u: u.proofs_truth)
    selected = [u for u in usage if count(u) >= threshold]
    return sorted(selected, key=lambda u: (-count(u), u.name))


def aggregate_report(
    records: Sequence[RunRecord],
    metadata: Mapping[str, AxiomMeta],
    limits_s: Sequence[int],
    test_counts: Optional[Mapping[TestKind, int]] = None,
    threshold: int = DEFAULT_USAGE_THRESHOLD,
) -> EvaluationReport:
    """
    Compute solved, distinct-axiom, average-axiom and per-layer series for each
    limit, the axiom usage table at the largest limit, and percentage summaries.
    """
    for record in records:
        for name in record.used_axioms:
            if name not in metadata:
                raise UnknownAxiomName(name)
    limits = sorted(set(limits_s))
    if test_counts is None:
        ids: Dict[TestKind, Set[str]] = {TestKind.TRUTH: set(), TestKind.FALSITY: set()}
        for record in records:
            ids[record.kind].add(record.test_id)
        test_counts = {kind: len(found) for kind, found in ids.items()}
    truth_tests = test_counts.get(TestKind.TRUTH, 0)
    falsity_tests = test_counts.get(TestKind.FALSITY, 0)

    series: List[ReportSeries] = []
    average_exact: Dict[str, List[str]] = {}
    for group in GROUPS:
        solved, distinct, citations, averages, exact = [], [], [], [], []
        layered: Dict[Tuple[LayerTag, FormulaKind], List[Tuple[int, int]]] = defaultdict(list)
        for limit in limits:
            proofs = _proofs(records, limit, group)
            used: Set[str] = set().union(*(r.used_axioms for r in proofs)) if proofs else set()
            total = sum(len(r.used_axioms) for r in proofs)
            mean = Fraction(total, len(proofs)) if proofs else Fraction(0)
            solved.append((limit, len(proofs)))
            distinct.append((limit, len(used)))
            citations.append((limit, total))
            averages.append((limit, float(format_average(mean))))
            exact.append(str(mean))
            for layer in LAYER_SERIES:
                for kind in KIND_SERIES:
                    count = sum(1 for name in used if metadata[name].layer == layer and metadata[name].kind == kind)
                    layered[(layer, kind)].append((limit, count))
        series.append(_series("solved", group, solved))
        series.append(_series("distinct", group, distinct))
        series.append(_series("citations", group, citations))
        series.append(_series("average", group, averages))
        for (layer, kind), points in layered.items():
            series.append(_series("layers", group, points, layer=layer, kind=kind))
        average_exact[group.value] = exact

    final = limits[-1] if limits else None
    final_proofs = _proofs(records, final, ReportGroup.ALL) if final is not None else []
    usage = _usage_table(final_proofs, metadata)
    used = [u for u in usage if u.proofs_total > 0]

    def layer_total(layer: LayerTag) -> int:
        return sum(1 for meta in metadata.values() if meta.layer == layer)

    def kind_total(kind: FormulaKind) -> int:
        return sum(1 for meta in metadata.values() if meta.kind == kind)

    solved_truth = sum(1 for r in final_proofs if r.kind == TestKind.TRUTH)
    solved_falsity = len(final_proofs) - solved_truth
    percentages = {
        "solved": percentage(len(final_proofs), truth_tests + falsity_tests, "proofs over all tests"),
        "solved-truth": percentage(solved_truth, truth_tests, "passing truth-tests"),
        "solved-falsity": percentage(solved_falsity, falsity_tests, "non-passing falsity-tests"),
        "axioms-used": percentage(len(used), len(metadata), "axioms used in some proof"),
        "axioms-unused": percentage(len(metadata) - len(used), len(metadata), "axioms used in no proof"),
        "unit-used": percentage(
            sum(1 for u in used if u.kind == FormulaKind.UNIT_CLAUSE), kind_total(FormulaKind.UNIT_CLAUSE),
            "unit clauses used",
        ),
        "general-used": percentage(
            sum(1 for u in used if u.kind == FormulaKind.GENERAL_CLAUSE), kind_total(FormulaKind.GENERAL_CLAUSE),
            "general clauses used",
        ),
        "useful": percentage(
            len(usefulness_histogram(usage, threshold)), len(used), f"used axioms in {threshold} or more proofs",
        ),
        "useful-truth": percentage(
            len(usefulness_histogram(usage, threshold, by="truth")), len(used),
            f"used axioms in {threshold} or more truth-test proofs",
        ),
    }
    for layer in LAYER_SERIES:
        percentages[f"{layer.value}-used"] = percentage(
            sum(1 for u in used if u.layer == layer), layer_total(layer), f"{layer.value} axioms used",
        )

    notes = [
        "series count proofs per limit; limits are independent runs unless records are flagged reused",
        "per-layer series cover top-level and mid-level axioms only",
    ]
    if any("reused" in r.flags for r in records):
        notes.append("some records reuse a proof found at a smaller limit")
    errors = sum(1 for r in records if r.verdict == VerdictStatus.PROVER_ERROR)
    if errors:
        notes.append(f"{errors} runs ended in a prover error and count as unknown")

    report = EvaluationReport(
        version=__version__,
        limits_s=limits,
        tests={"all": truth_tests + falsity_tests, "truth": truth_tests, "falsity": falsity_tests},
        series=series,
        average_exact=average_exact,
        usage=usage,
        percentages=percentages,
        notes=notes,
    )
    logger.info(
        f"Aggregated {len(records)} records: {len(final_proofs)} proofs at {final}s using {len(used)} axioms"
    )
    return report


def report_violations(report: EvaluationReport, axiom_count: Optional[int] = None) -> List[str]:
    """Consistency checks between the series of a report; an empty list means all hold."""
    problems: List[str] = []
    for index, limit in enumerate(report.limits_s):
        def value(metric: str, group: ReportGroup, **extra) -> Union[int, float]:
            return report.find(metric, group, **extra).points[index].value

        solved = {g: value("solved", g) for g in GROUPS}
        if solved[ReportGroup.ALL] != solved[ReportGroup.TRUTH] + solved[ReportGroup.FALSITY]:
            problems.append(f"{limit}s: solved counts do not add up")
        distinct = {g: value("distinct", g) for g in GROUPS}
        if distinct[ReportGroup.ALL] > distinct[ReportGroup.TRUTH] + distinct[ReportGroup.FALSITY]:
            problems.append(f"{limit}s: distinct axioms exceed the group sum")
        for g in GROUPS:
            if axiom_count is not None and distinct[g] > axiom_count:
                problems.append(f"{limit}s: more distinct {g.value} axioms than axioms")
            exact = Fraction(report.average_exact[g.value][index])
            if exact * solved[g] != value("citations", g):
                problems.append(f"{limit}s: {g.value} average does not match citations")
            layered = sum(value("layers", g, layer=layer, kind=kind) for layer in LAYER_SERIES for kind in KIND_SERIES)
            if layered > distinct[g]:
                problems.append(f"{limit}s: layer counts exceed distinct {g.value} axioms")
    return problems


# ---------------------------------------------------------------------------
# Output files
# ---------------------------------------------------------------------------

def _csv_text(header: Sequence[str], rows: Iterable[Sequence], delimiter: str = ",") -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, delimiter=delimiter, lineterminator="\n")
    writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _cell(metric: str, value: Union[int, float]) -> str:
    return f"{value:.2f}" if metric == "average" else str(int(value))


def figure_table(report: EvaluationReport, metric: str) -> str:
    """CSV for one figure: limit_s,all,truth,falsity (layers adds layer and kind columns)."""
    if metric == "layers":
        rows = []
        for index, limit in enumerate(report.limits_s):
            for layer in LAYER_SERIES:
                for kind in KIND_SERIES:
                    rows.append([limit, layer.value, kind.value] + [
                        _cell(metric, report.find(metric, g, layer=layer, kind=kind).points[index].value)
                        for g in GROUPS
                    ])
        return _csv_text(["limit_s", "layer", "kind", "all", "truth", "falsity"], rows)
    rows = [
        [limit] + [_cell(metric, report.find(metric, g).points[index].value) for g in GROUPS]
        for index, limit in enumerate(report.limits_s)
    ]
    return _csv_text(["limit_s", "all", "truth", "falsity"], rows)


def plot_table(report: EvaluationReport) -> str:
    rows = []
    for s in report.series:
        name = s.metric if s.layer is None else f"{s.metric}:{s.layer.value}:{s.kind.value}"
        for p in s.points:
            rows.append([s.metric, name, s.group.value, p.limit_s, _cell(s.metric, p.value)])
    return _csv_text(["figure", "series", "group", "limit_s", "value"], rows, delimiter="\t")


def usage_table(report: EvaluationReport) -> str:
    rows = [
        [u.name, u.layer.value, u.kind.value, u.proofs_total, u.proofs_truth, u.proofs_falsity]
        for u in report.usage
    ]
    return _csv_text(["name", "layer", "kind", "proofs_total", "proofs_truth", "proofs_falsity"], rows)


def emit_outputs(
    report: EvaluationReport, out_dir: Union[str, Path], formats: Sequence[str] = ("json", "csv", "tsv"),
) -> List[Path]:
    """Write the report files; identical reports give byte-identical files."""
    unknown = set(formats) - {"json", "csv", "tsv"}
    if unknown:
        raise ValueError(f"unknown output formats: {', '.join(sorted(unknown))}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    outputs: Dict[Path, str] = {}
    if "json" in formats:
        outputs[out_dir / REPORT_FILE] = report.model_dump_json(indent=2) + "\n"
    if "csv" in formats:
        for metric, file_name in FIGURE_FILES.items():
            outputs[out_dir / file_name] = figure_table(report, metric)
        outputs[out_dir / USAGE_FILE] = usage_table(report)
    if "tsv" in formats:
        outputs[out_dir / PLOT_FILE] = plot_table(report)
    for path, text in outputs.items():
        path.write_text(text, encoding="utf-8", newline="\n")
    logger.success(f"Wrote {len(outputs)} report files to {out_dir}")
    return list(outputs)
