"""
Evaluator module for Ontoprobe
Classifies prover verdicts and runs test suites across time limits
"""
import asyncio
import hashlib
import json
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Set, Tuple, Union

from loguru import logger
from pydantic import ValidationError

from ontoprobe import __version__, config
from ontoprobe.constants import CAMPAIGN_FILE, PROBLEMS_DIR, RAW_DIR, RUNS_FILE
from ontoprobe.errors import CampaignError, UnreadableFile
from ontoprobe.folify import AxiomSet, emit_tptp
from ontoprobe.mini_prover import run_builtin
from ontoprobe.models import (
    OUTCOME_TABLE,
    BuiltinProver,
    CampaignConfig,
    ExternalProver,
    Outcome,
    RunRecord,
    TestCase,
    TestKind,
    Verdict,
    VerdictStatus,
)
from ontoprobe.prover_bridge import build_problem, run_external_async
from ontoprobe.utils import append_line, drop_torn_tail, format_elapsed, host_description, iter_json_lines, write_json


def classify_outcome(kind: TestKind, verdict: Union[Verdict, VerdictStatus]) -> Outcome:
    status = verdict.status if isinstance(verdict, Verdict) else VerdictStatus(verdict)
    return OUTCOME_TABLE[(kind, status)]


def record_for(test: TestCase, limit_s: int, verdict: Verdict) -> RunRecord:
    flags = list(verdict.flags)
    if verdict.status == VerdictStatus.PROVER_ERROR and "error" not in flags:
        flags.append("error")
    return RunRecord(
        test_id=test.id,
        kind=test.kind,
        limit_s=limit_s,
        verdict=verdict.status,
        szs_status=verdict.szs_status,
        outcome=classify_outcome(test.kind, verdict),
        used_axioms=verdict.used_axioms,
        cpu_ms=verdict.cpu_ms,
        flags=flags,
    )


def load_records(path: Union[str, Path]) -> List[RunRecord]:
    path = Path(path)
    if not path.exists():
        return []
    try:
        return [RunRecord.model_validate(raw) for raw in iter_json_lines(path)]
    except (json.JSONDecodeError, ValidationError) as e:
        raise UnreadableFile(f"invalid run records in {path}: {e}") from e


def _raw_path(out_dir: Path, test_id: str, limit_s: int) -> Path:
    return out_dir / RAW_DIR / f"{test_id}@{limit_s}.out"


def _problem_path(out_dir: Path, test_id: str) -> Path:
    return out_dir / PROBLEMS_DIR / f"{test_id}.p"


def _prepare(out_dir: Path) -> None:
    try:
        for sub in (out_dir, out_dir / RAW_DIR, out_dir / PROBLEMS_DIR):
            sub.mkdir(parents=True, exist_ok=True)
        with open(out_dir / RUNS_FILE, "a", encoding="utf-8"):
            pass
    except OSError as e:
        raise CampaignError(f"output directory {out_dir} is not writable: {e}") from e


def axioms_digest(axioms: AxiomSet) -> str:
    return hashlib.sha256(emit_tptp(axioms).encode("utf-8")).hexdigest()


def _recorded_digest(out_dir: Path) -> Optional[str]:
    path = out_dir / CAMPAIGN_FILE
    if not path.exists():
        return None
    try:
        return json.loads(path.read_text(encoding="utf-8")).get("axioms_sha256")
    except (OSError, ValueError, AttributeError) as e:
        raise UnreadableFile(f"invalid campaign metadata in {path}: {e}") from e


def write_campaign_metadata(
    out_dir: Path, campaign: CampaignConfig, tests: int, axioms: int, digest: Optional[str] = None,
) -> None:
    metadata = {
        "version": __version__,
        "prover": campaign.prover.model_dump(mode="json"),
        "options": {
            "limits_s": campaign.limits_s,
            "workers": campaign.workers,
            "reuse": campaign.reuse,
            "grace_s": config.PROVER_GRACE_S,
        },
        "host": host_description(),
        "tests": tests,
        "axioms": axioms,
        "axioms_sha256": digest,
        "started": datetime.now().isoformat(timespec="seconds"),
        "note": (
            "proofs at a limit are reused at larger limits" if campaign.reuse
            else "every limit is an independent run"
        ),
    }
    try:
        write_json(out_dir / CAMPAIGN_FILE, metadata)
    except OSError as e:
        raise CampaignError(f"cannot write campaign metadata in {out_dir}: {e}") from e


async def _prove(
    text: str, problem: Path, limit_s: int, prover: Union[BuiltinProver, ExternalProver], names: Sequence[str],
) -> Verdict:
    if isinstance(prover, BuiltinProver):
        return await asyncio.to_thread(run_builtin, text, prover.budget(limit_s), prover.set_of_support)
    return await run_external_async(problem, prover.config, limit_s, names)


async def _run_limit(
    axioms: AxiomSet,
    pending: List[TestCase],
    limit_s: int,
    campaign: CampaignConfig,
    out_dir: Path,
    handle,
) -> List[RunRecord]:
    """Run every pending test once at one limit with a pool of workers and one appender."""
    work: asyncio.Queue = asyncio.Queue()
    done: asyncio.Queue = asyncio.Queue()
    for test in pending:
        work.put_nowait(test)
    names = axioms.names()
    produced: List[RunRecord] = []

    async def worker(number: int) -> None:
        while True:
            try:
                test = work.get_nowait()
            except asyncio.QueueEmpty:
                return
            problem = _problem_path(out_dir, test.id)
            try:
                text = build_problem(axioms, test)
                if not problem.exists() or problem.read_text(encoding="utf-8") != text:
                    problem.write_text(text, encoding="utf-8", newline="\n")
                verdict = await _prove(text, problem, limit_s, campaign.prover, names)
            except Exception as e:
                logger.error(f"Worker {number}: {test.id} at {limit_s}s failed: {e}")
                verdict = Verdict(status=VerdictStatus.PROVER_ERROR, message=str(e))
            try:
                _raw_path(out_dir, test.id, limit_s).write_text(verdict.raw_output, encoding="utf-8", newline="\n")
            except OSError as e:
                logger.warning(f"Cannot keep raw output of {test.id}: {e}")
            await done.put(record_for(test, limit_s, verdict))

    async def appender() -> None:
        while True:
            record = await done.get()
            if record is None:
                return
            append_line(handle, record.model_dump_json())
            produced.append(record)
            logger.debug(f"{record.test_id} @ {record.limit_s}s: {record.outcome.value} ({record.szs_status})")

    writer = asyncio.create_task(appender())
    await asyncio.gather(*(worker(i) for i in range(min(campaign.workers, len(pending)) or 1)))
    await done.put(None)
    await writer
    return produced


async def run_campaign_async(
    axioms: AxiomSet,
    tests: Sequence[TestCase],
    campaign: Optional[CampaignConfig] = None,
    out_dir: Union[str, Path, None] = None,
) -> List[RunRecord]:
    """
    Run every test at every limit, appending records to runs.jsonl as they finish.

    Records already present in the output directory are kept and their
    (test, limit) pairs are not run again. With `reuse` a proof found at a
    limit is recorded for every larger limit without re-running.
    Resuming with a different axiom set than the one recorded in
    campaign.json is refused.
    """
    campaign = campaign or CampaignConfig(limits_s=config.LIMITS_S)
    if not tests:
        raise ValueError("a campaign needs at least one test")
    ids = [t.id for t in tests]
    if len(set(ids)) != len(ids):
        raise ValueError("test ids must be unique")
    out_dir = Path(out_dir) if out_dir is not None else config.WORKDIR
    _prepare(out_dir)

    runs_path = out_dir / RUNS_FILE
    records: Dict[Tuple[str, int], RunRecord] = {}
    for record in load_records(runs_path):
        records.setdefault(record.key, record)
    digest = axioms_digest(axioms)
    if records:
        previous = _recorded_digest(out_dir)
        if previous is not None and previous != digest:
            raise CampaignError(
                f"{runs_path} holds records for a different axiom set; use a fresh output directory"
            )
        logger.info(f"Resuming campaign in {out_dir}: {len(records)} records already present")
    write_campaign_metadata(out_dir, campaign, len(tests), len(axioms), digest)

    proved: Set[str] = set()
    try:
        drop_torn_tail(runs_path)
        handle = open(runs_path, "a", encoding="utf-8", newline="\n")
    except OSError as e:
        raise CampaignError(f"cannot append to {runs_path}: {e}") from e
    with handle:
        for limit_s in campaign.limits_s:
            pending: List[TestCase] = []
            for test in tests:
                existing = records.get((test.id, limit_s))
                if existing is None and campaign.reuse and test.id in proved:
                    previous = max(
                        (r for r in records.values() if r.test_id == test.id and r.verdict == VerdictStatus.PROOF_FOUND),
                        key=lambda r: r.limit_s,
                    )
                    flags = previous.flags if "reused" in previous.flags else previous.flags + ["reused"]
                    existing = previous.model_copy(update={"limit_s": limit_s, "flags": flags})
                    append_line(handle, existing.model_dump_json())
                    records[existing.key] = existing
                if existing is None:
                    pending.append(test)
                elif existing.verdict == VerdictStatus.PROOF_FOUND:
                    proved.add(test.id)
            if not pending:
                continue
            logger.info(f"Running {len(pending)} tests at {limit_s}s with {campaign.workers} workers")
            for record in await _run_limit(axioms, pending, limit_s, campaign, out_dir, handle):
                records[record.key] = record
                if record.verdict == VerdictStatus.PROOF_FOUND:
                    proved.add(record.test_id)

    order = {test_id: i for i, test_id in enumerate(ids)}
    result = sorted(
        (r for r in records.values() if r.test_id in order and r.limit_s in campaign.limits_s),
        key=lambda r: (order[r.test_id], r.limit_s),
    )
    passing = sum(1 for r in result if r.outcome == Outcome.PASSING)
    failing = sum(1 for r in result if r.outcome == Outcome.NON_PASSING)
    logger.success(
        f"Campaign finished after {format_elapsed()}: {len(result)} records, "
        f"{passing} passing, {failing} non-passing, {len(result) - passing - failing} unknown"
    )
    return result


def run_campaign(
    axioms: AxiomSet,
    tests: Sequence[TestCase],
    campaign: Optional[CampaignConfig] = None,
    out_dir: Union[str, Path, None] = None,
) -> List[RunRecord]:
    return asyncio.run(run_campaign_async(axioms, tests, campaign, out_dir))
