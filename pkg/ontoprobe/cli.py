"""
Command line module for Ontoprobe
Wires translate, generate, evaluate, analyze, report, prove and fetch into one entry point
"""
import argparse
import json
import sys
from contextlib import contextmanager
from pathlib import Path
from typing import Iterator, List, Optional, Sequence

from loguru import logger
from pydantic import ValidationError

from ontoprobe import __version__, config
from ontoprobe.analytics import aggregate_report, emit_outputs, report_violations
from ontoprobe.constants import CAMPAIGN_FILE, RUNS_FILE
from ontoprobe.cq_gen import (
    derive_falsity_tests,
    generate_truth_tests,
    load_antonyms,
    load_mapping,
    load_morpholinks,
    load_templates,
    read_suite,
    write_suite,
)
from ontoprobe.errors import OntoprobeError, TptpSyntaxError, UnreadableFile
from ontoprobe.evaluator import load_records, run_campaign
from ontoprobe.fetch import fetch_ontology
from ontoprobe.folify import load_axiom_set, load_layered_sources, read_layer_map, translate_ontology, write_translation
from ontoprobe.mini_prover import run_builtin
from ontoprobe.models import BuiltinProver, CampaignConfig, EvaluationReport, VerdictStatus
from ontoprobe.prover_bridge import prover_from_spec, run_external
from ontoprobe.tptp import split_problem
from ontoprobe.utils import write_json

DEFAULT_TEMPLATES = Path(__file__).resolve().parent.parent / "data" / "templates.json"


class InputFailure(Exception):
    """Raised while inputs are read or validated; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


@contextmanager
def _inputs() -> Iterator[None]:
    try:
        yield
    except (OntoprobeError, ValidationError, ValueError, OSError) as e:
        raise InputFailure(str(e)) from e


def _limits(raw: Optional[str]) -> List[int]:
    return config.parse_limits(raw) if raw else list(config.LIMITS_S)


def _premise_names(text: str) -> Optional[List[str]]:
    try:
        premises, _ = split_problem(text)
    except TptpSyntaxError as e:
        logger.warning(f"Cannot read axiom names from the problem, reporting every cited name: {e}")
        return None
    return [item.name for item in premises]


# ---------------------------------------------------------------------------
# Commands
# ---------------------------------------------------------------------------

def cmd_translate(args: argparse.Namespace) -> int:
    with _inputs():
        max_row_arity = config.MAX_ROW_ARITY if args.max_row_arity is None else args.max_row_arity
        if max_row_arity < 1:
            raise ValueError("--max-row-arity must be at least 1")
        layer_map = read_layer_map(args.layer_map) if args.layer_map else None
        statements, layers = load_layered_sources(args.sources, layer_map)
    axiom_set = translate_ontology(statements, layers, max_row_arity)
    write_translation(axiom_set, args.output)
    return 0


def cmd_generate(args: argparse.Namespace) -> int:
    with _inputs():
        skipped: List[str] = []
        mapping = load_mapping(args.mapping, skipped)
        antonyms = load_antonyms(args.antonyms) if args.antonyms else []
        links = load_morpholinks(args.morpholinks) if args.morpholinks else []
        templates = load_templates(args.templates)
    truth = generate_truth_tests(mapping, antonyms, links, templates)
    tests = truth + derive_falsity_tests(truth)
    write_suite(args.output, tests)
    if skipped:
        logger.warning(f"{len(skipped)} mapping lines were skipped")
    return 0


def cmd_evaluate(args: argparse.Namespace) -> int:
    with _inputs():
        tests = read_suite(args.suite)
        axioms = load_axiom_set(args.axioms)
        prover = prover_from_spec(args.prover)
        campaign = CampaignConfig(
            limits_s=_limits(args.limits),
            prover=prover,
            workers=args.workers or config.WORKERS,
            reuse=args.reuse,
        )
        if not tests:
            raise ValueError(f"{args.suite} holds no tests")
    out_dir = Path(args.output) if args.output else config.WORKDIR
    run_campaign(axioms, tests, campaign, out_dir)
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    with _inputs():
        campaign_dir = Path(args.campaign)
        records = load_records(campaign_dir / RUNS_FILE)
        if not records:
            raise UnreadableFile(f"no run records in {campaign_dir / RUNS_FILE}")
        metadata = load_axiom_set(args.axioms).metadata()
        if args.limits:
            limits = config.parse_limits(args.limits)
        elif (campaign_dir / CAMPAIGN_FILE).exists():
            limits = json.loads((campaign_dir / CAMPAIGN_FILE).read_text(encoding="utf-8"))["options"]["limits_s"]
        else:
            limits = sorted({r.limit_s for r in records})
    report = aggregate_report(records, metadata, limits, threshold=args.threshold)
    for problem in report_violations(report, len(metadata)):
        logger.error(f"Report check failed: {problem}")
    output = Path(args.output)
    output.parent.mkdir(parents=True, exist_ok=True)
    output.write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8", newline="\n")
    logger.success(f"Wrote report to {output}")
    return 0


def cmd_report(args: argparse.Namespace) -> int:
    with _inputs():
        report = EvaluationReport.model_validate_json(Path(args.report).read_text(encoding="utf-8"))
        formats = [f.strip() for f in args.formats.split(",") if f.strip()]
    emit_outputs(report, args.output, formats)
    return 0


def cmd_prove(args: argparse.Namespace) -> int:
    with _inputs():
        text = Path(args.problem).read_text(encoding="utf-8")
        prover = prover_from_spec(args.prover)
        if args.limit < 1:
            raise ValueError("--limit must be positive")
    if isinstance(prover, BuiltinProver):
        verdict = run_builtin(text, prover.budget(args.limit), prover.set_of_support)
    else:
        verdict = run_external(args.problem, prover.config, args.limit, _premise_names(text))
    if args.output:
        write_json(args.output, verdict.model_dump(mode="json"))
    print(f"% SZS status {verdict.szs_status or 'Error'} for {Path(args.problem).name}")
    if verdict.used_axioms:
        print("% used axioms: " + " ".join(verdict.used_axioms))
    return 2 if verdict.status == VerdictStatus.PROVER_ERROR else 0


def cmd_fetch(args: argparse.Namespace) -> int:
    fetch_ontology(args.url, args.output)
    return 0


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ontoprobe", description="Evaluate ontologies with competency questions and theorem provers")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("--workdir", help="output directory (default: ONTOPROBE_WORKDIR or ./work)")
    parser.add_argument("--log-level", help="loguru level for standard error")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("translate", help="compile SUO-KIF files into a TPTP axiom file")
    p.add_argument("sources", nargs="+", help=".kif files")
    p.add_argument("--layer-map", help="JSON object mapping file names to layer tags")
    p.add_argument("--max-row-arity", type=int, help="largest arity a row variable expands to")
    p.add_argument("-o", "--output", required=True, help="TPTP file to write")
    p.set_defaults(handler=cmd_translate)

    p = sub.add_parser("generate", help="generate truth-tests and falsity-tests")
    p.add_argument("--mapping", required=True, help="WordNet to SUMO mapping TSV")
    p.add_argument("--antonyms", help="antonym pairs TSV")
    p.add_argument("--morpholinks", help="morphosemantic links CSV")
    p.add_argument("--templates", default=str(DEFAULT_TEMPLATES), help="pattern templates JSON")
    p.add_argument("-o", "--output", required=True, help="suite JSONL to write")
    p.set_defaults(handler=cmd_generate)

    p = sub.add_parser("evaluate", help="run a suite against an axiom file")
    p.add_argument("--suite", required=True)
    p.add_argument("--axioms", required=True, help="TPTP file written by translate")
    p.add_argument("--prover", default="builtin", help="builtin or exec:<path>")
    p.add_argument("--limits", help="comma-separated seconds, strictly increasing")
    p.add_argument("--workers", type=int, help="concurrent prover runs (default: logical cores)")
    p.add_argument("--reuse", action="store_true", help="carry proofs over to larger limits")
    p.add_argument("-o", "--output", help="campaign directory")
    p.set_defaults(handler=cmd_evaluate)

    p = sub.add_parser("analyze", help="aggregate run records into a report")
    p.add_argument("--campaign", required=True, help="campaign directory holding runs.jsonl")
    p.add_argument("--axioms", required=True)
    p.add_argument("--limits")
    p.add_argument("--threshold", type=int, default=10, help="usage count for the usefulness summary")
    p.add_argument("-o", "--output", required=True, help="report JSON to write")
    p.set_defaults(handler=cmd_analyze)

    p = sub.add_parser("report", help="write figure CSVs, usage table and plot data")
    p.add_argument("--report", required=True)
    p.add_argument("--formats", default="json,csv,tsv")
    p.add_argument("-o", "--output", required=True, help="directory for report files")
    p.set_defaults(handler=cmd_report)

    p = sub.add_parser("prove", help="run one TPTP problem")
    p.add_argument("problem")
    p.add_argument("--prover", default="builtin")
    p.add_argument("--limit", type=int, default=60)
    p.add_argument("-o", "--output", help="verdict JSON to write")
    p.set_defaults(handler=cmd_prove)

    p = sub.add_parser("fetch", help="download published ontology files")
    p.add_argument("url", nargs="?", help="archive or file URL (default: ONTOPROBE_FETCH_URL)")
    p.add_argument("-o", "--output", required=True, help="destination directory")
    p.set_defaults(handler=cmd_fetch)
    return parser


def dispatch(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command; 0 on success, 1 on invalid input, 2 on runtime failure."""
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 1

    if args.workdir:
        config.WORKDIR = Path(args.workdir)
    if args.log_level:
        config.LOG_LEVEL = args.log_level.upper()
    try:
        config.setup_logging(config.LOG_LEVEL, config.WORKDIR / "logs" / "ontoprobe.log")
    except OSError as e:
        config.setup_logging(config.LOG_LEVEL)
        logger.warning(f"Logging to standard error only: {e}")
    except ValueError as e:
        print(f"ontoprobe: error: {e}", file=sys.stderr)
        return 1

    try:
        return args.handler(args)
    except InputFailure as e:
        logger.error(f"{args.command}: {e}")
        return 1
    except Exception as e:
        logger.exception(f"{args.command} failed: {e}")
        return 2


def main() -> None:
    sys.exit(dispatch())
