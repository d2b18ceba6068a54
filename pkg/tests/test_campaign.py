"""End-to-end toy campaign: translate, generate, evaluate and aggregate."""
import pytest

from ontoprobe.analytics import aggregate_report, report_violations
from ontoprobe.cq_gen import (
    derive_falsity_tests,
    generate_truth_tests,
    load_antonyms,
    load_mapping,
    load_morpholinks,
    load_templates,
)
from ontoprobe.evaluator import run_campaign
from ontoprobe.folify import load_layered_sources, read_layer_map, translate_ontology
from ontoprobe.models import BuiltinProver, CampaignConfig, ReportGroup, VerdictStatus

pytestmark = pytest.mark.slow

LIMITS = [1, 5]


@pytest.fixture
def toy_inputs(toy_dir, templates_path):
    layer_map = read_layer_map(toy_dir / "manifest.json")
    statements, layers = load_layered_sources([toy_dir / "top.kif", toy_dir / "mid.kif"], layer_map)
    axioms = translate_ontology(statements, layers)
    truth = generate_truth_tests(
        load_mapping(toy_dir / "mapping.tsv"),
        load_antonyms(toy_dir / "antonyms.tsv"),
        load_morpholinks(toy_dir / "morpholinks.csv"),
        load_templates(templates_path),
    )
    return axioms, truth + derive_falsity_tests(truth)


def campaign(workers):
    prover = BuiltinProver(steps_per_second=100, max_clauses=2000, set_of_support=True)
    return CampaignConfig(limits_s=LIMITS, prover=prover, workers=workers)


def summary(records):
    return [(r.test_id, r.limit_s, r.verdict, r.outcome, r.used_axioms) for r in records]


def test_worker_count_does_not_change_results(toy_inputs, tmp_path):
    axioms, tests = toy_inputs
    serial = run_campaign(axioms, tests, campaign(1), tmp_path / "serial")
    parallel = run_campaign(axioms, tests, campaign(8), tmp_path / "parallel")
    assert summary(serial) == summary(parallel)
    assert len(serial) == len(tests) * len(LIMITS)
    assert not any(r.verdict == VerdictStatus.PROVER_ERROR for r in serial)

    report = aggregate_report(serial, axioms.metadata(), LIMITS)
    assert report_violations(report, len(axioms)) == []
    solved = report.find("solved", ReportGroup.ALL).values()
    assert solved == sorted(solved)
    assert report.tests == {"all": 20, "truth": 10, "falsity": 10}
