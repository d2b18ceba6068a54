from fractions import Fraction

import pytest

from ontoprobe.analytics import (
    aggregate_report,
    emit_outputs,
    figure_table,
    format_average,
    percent,
    report_violations,
    usefulness_histogram,
)
from ontoprobe.errors import UnknownAxiomName
from ontoprobe.kif import FormulaKind
from ontoprobe.models import (
    AxiomMeta,
    AxiomUsage,
    LayerTag,
    Outcome,
    ReportGroup,
    RunRecord,
    TestKind,
    VerdictStatus,
)

LIMITS = [60, 120, 300, 600]


def meta(name, layer=LayerTag.TOP_LEVEL, kind=FormulaKind.UNIT_CLAUSE):
    return AxiomMeta(name=name, layer=layer, kind=kind)


def proof(test_id, kind, limit, used):
    outcome = Outcome.PASSING if kind == TestKind.TRUTH else Outcome.NON_PASSING
    return RunRecord(
        test_id=test_id, kind=kind, limit_s=limit, verdict=VerdictStatus.PROOF_FOUND, outcome=outcome,
        used_axioms=used,
    )


def unknown(test_id, kind, limit):
    return RunRecord(test_id=test_id, kind=kind, limit_s=limit, verdict=VerdictStatus.NO_PROOF, outcome=Outcome.UNKNOWN)


@pytest.fixture
def published_counts():
    """Proof counts per limit for 3556 truth-tests and 3556 falsity-tests."""
    metadata = {"top_1": meta("top_1")}
    records = []
    for limit, truth, falsity in zip(LIMITS, [478, 482, 484, 894], [482, 482, 484, 487]):
        records += [proof(f"t-{i}", TestKind.TRUTH, limit, ["top_1"]) for i in range(truth)]
        records += [proof(f"f-{i}", TestKind.FALSITY, limit, ["top_1"]) for i in range(falsity)]
    counts = {TestKind.TRUTH: 3556, TestKind.FALSITY: 3556}
    return aggregate_report(records, metadata, LIMITS, test_counts=counts)


@pytest.mark.parametrize(
    "numerator, denominator, expected",
    [
        (1281, 7112, 18),
        (894, 3556, 25),
        (487, 3556, 14),
        (971, 7420, 13),
        (785, 4635, 17),
        (186, 2785, 7),
        (6449, 7420, 87),
        (154, 971, 16),
        (127, 971, 13),
        (1, 8, 13),
        (1, 200, 1),
        (0, 0, 0),
        (5, 0, 0),
    ],
)
def test_percent(numerator, denominator, expected):
    assert percent(numerator, denominator) == expected


@pytest.mark.parametrize(
    "value, text",
    [
        (Fraction(5, 3), "1.67"),
        (Fraction(713, 50), "14.26"),
        (Fraction(1, 8), "0.13"),
        (Fraction(0), "0.00"),
        (Fraction(2), "2.00"),
    ],
)
def test_format_average(value, text):
    assert format_average(value) == text


def test_solved_series(published_counts):
    report = published_counts
    assert report.find("solved", ReportGroup.TRUTH).values() == [478, 482, 484, 894]
    assert report.find("solved", ReportGroup.FALSITY).values() == [482, 482, 484, 487]
    assert report.find("solved", ReportGroup.ALL).values() == [960, 964, 968, 1281]
    assert report.tests == {"all": 7112, "truth": 3556, "falsity": 3556}
    assert report.percentages["solved"].percent == 18
    assert report.percentages["solved-truth"].percent == 25
    assert report.percentages["solved-falsity"].percent == 14
    assert report_violations(report, axiom_count=1) == []


def test_distinct_and_average_axioms():
    metadata = {name: meta(name) for name in "abc"}
    metadata["d"] = meta("d", LayerTag.MID_LEVEL, FormulaKind.GENERAL_CLAUSE)
    records = [
        proof("t1", TestKind.TRUTH, 60, ["a", "b"]),
        proof("t2", TestKind.TRUTH, 60, ["b", "c"]),
        proof("t3", TestKind.TRUTH, 60, ["b"]),
        unknown("f1", TestKind.FALSITY, 60),
    ]
    report = aggregate_report(records, metadata, [60])
    assert report.find("distinct", ReportGroup.ALL).values() == [3]
    assert report.find("citations", ReportGroup.ALL).values() == [5]
    assert report.find("average", ReportGroup.ALL).values() == [1.67]
    assert report.average_exact["all"] == ["5/3"]
    assert report.find("average", ReportGroup.FALSITY).values() == [0.0]
    top_units = report.find("layers", ReportGroup.ALL, layer=LayerTag.TOP_LEVEL, kind=FormulaKind.UNIT_CLAUSE)
    assert top_units.values() == [3]
    mid_general = report.find("layers", ReportGroup.ALL, layer=LayerTag.MID_LEVEL, kind=FormulaKind.GENERAL_CLAUSE)
    assert mid_general.values() == [0]

    assert report.tests == {"all": 4, "truth": 3, "falsity": 1}
    assert [(u.name, u.proofs_total) for u in report.usage] == [("b", 3), ("a", 1), ("c", 1), ("d", 0)]
    assert report.percentages["axioms-used"].percent == 75
    assert report.percentages["axioms-unused"].percent == 25
    assert report.percentages["unit-used"].percent == 100
    assert report.percentages["general-used"].percent == 0
    assert report.percentages["top-level-used"].percent == 100
    assert report.percentages["mid-level-used"].percent == 0
    assert report_violations(report, axiom_count=4) == []


def test_average_with_two_decimals():
    metadata = {f"top_{i}": meta(f"top_{i}") for i in range(1, 21)}
    names = sorted(metadata)
    records = [proof(f"t{i}", TestKind.TRUTH, 60, names[:15]) for i in range(13)]
    records += [proof(f"t{i}", TestKind.TRUTH, 60, names[:14]) for i in range(13, 50)]
    report = aggregate_report(records, metadata, [60])
    assert report.find("average", ReportGroup.TRUTH).values() == [14.26]
    assert report.average_exact["truth"] == ["713/50"]


def test_usage_is_taken_at_the_largest_limit():
    metadata = {"a": meta("a"), "b": meta("b")}
    records = [
        proof("t1", TestKind.TRUTH, 60, ["a"]),
        proof("t1", TestKind.TRUTH, 120, ["b"]),
        proof("f1", TestKind.FALSITY, 120, ["b"]),
    ]
    report = aggregate_report(records, metadata, [120, 60])
    assert report.limits_s == [60, 120]
    (b, a) = report.usage
    assert (b.name, b.proofs_total, b.proofs_truth, b.proofs_falsity) == ("b", 2, 1, 1)
    assert a.proofs_total == 0


def test_usefulness_histogram():
    usage = [
        AxiomUsage(name="b", layer=LayerTag.TOP_LEVEL, kind=FormulaKind.UNIT_CLAUSE, proofs_total=9, proofs_truth=9),
        AxiomUsage(name="a", layer=LayerTag.TOP_LEVEL, kind=FormulaKind.UNIT_CLAUSE, proofs_total=12,
                   proofs_truth=2, proofs_falsity=10),
    ]
    assert [u.name for u in usefulness_histogram(usage, 10)] == ["a"]
    assert [u.name for u in usefulness_histogram(usage, 2)] == ["a", "b"]
    assert [u.name for u in usefulness_histogram(usage, 5, by="truth")] == ["b"]
    with pytest.raises(ValueError):
        usefulness_histogram(usage, 0)
    with pytest.raises(ValueError):
        usefulness_histogram(usage, 1, by="falsity")


def test_unknown_axiom_names_are_rejected():
    with pytest.raises(UnknownAxiomName) as info:
        aggregate_report([proof("t1", TestKind.TRUTH, 60, ["zzz"])], {"a": meta("a")}, [60])
    assert info.value.name == "zzz"


def test_empty_campaign_gives_zeros():
    report = aggregate_report([], {"a": meta("a")}, [60, 120])
    assert report.find("solved", ReportGroup.ALL).values() == [0, 0]
    assert report.find("average", ReportGroup.ALL).values() == [0.0, 0.0]
    assert report.percentages["solved"].percent == 0
    assert report.usage[0].proofs_total == 0
    assert report_violations(report) == []


def test_violations_are_detected(published_counts):
    published_counts.find("solved", ReportGroup.ALL).points[0].value = 999
    problems = report_violations(published_counts)
    assert any("solved counts do not add up" in p for p in problems)


def test_prover_errors_and_reuse_are_noted():
    error = RunRecord(
        test_id="t1", kind=TestKind.TRUTH, limit_s=60, verdict=VerdictStatus.PROVER_ERROR, outcome=Outcome.UNKNOWN,
    )
    reused = proof("t2", TestKind.TRUTH, 60, []).model_copy(update={"flags": ["reused"]})
    report = aggregate_report([error, reused], {}, [60])
    assert any("prover error" in note for note in report.notes)
    assert any("reuse" in note for note in report.notes)


def test_figure_tables(published_counts):
    fig1 = figure_table(published_counts, "solved").splitlines()
    assert fig1 == [
        "limit_s,all,truth,falsity",
        "60,960,478,482",
        "120,964,482,482",
        "300,968,484,484",
        "600,1281,894,487",
    ]
    fig3 = figure_table(published_counts, "average").splitlines()
    assert fig3[1] == "60,1.00,1.00,1.00"
    fig4 = figure_table(published_counts, "layers").splitlines()
    assert fig4[0] == "limit_s,layer,kind,all,truth,falsity"
    assert fig4[1] == "60,top-level,unit,1,1,1"
    assert len(fig4) == 1 + 4 * 4


def test_emit_outputs_is_byte_stable(published_counts, tmp_path):
    first = emit_outputs(published_counts, tmp_path / "a")
    second = emit_outputs(published_counts, tmp_path / "b")
    assert sorted(p.name for p in first) == [
        "fig1.csv", "fig2.csv", "fig3.csv", "fig4.csv", "plot.tsv", "report.json", "usage.csv",
    ]
    for a, b in zip(first, second):
        assert a.read_bytes() == b.read_bytes()
    plot = (tmp_path / "a" / "plot.tsv").read_text().splitlines()
    assert plot[0] == "figure\tseries\tgroup\tlimit_s\tvalue"
    assert "solved\tsolved\tall\t600\t1281" in plot
    assert (tmp_path / "a" / "usage.csv").read_text().splitlines()[1] == "top_1,top-level,unit,1381,894,487"


def test_emit_outputs_selects_formats(published_counts, tmp_path):
    written = emit_outputs(published_counts, tmp_path, ["json"])
    assert [p.name for p in written] == ["report.json"]
    with pytest.raises(ValueError):
        emit_outputs(published_counts, tmp_path, ["xml"])
