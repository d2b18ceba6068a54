"""
Prover bridge module for Ontoprobe
Builds TPTP problems, runs external refutation provers and reads their verdicts
"""
import asyncio
import re
import time
from pathlib import Path
from typing import Iterable, Optional, Set, Union

from loguru import logger

from ontoprobe import config
from ontoprobe.constants import (
    CONJECTURE_NAME,
    EPROVER_ARGUMENTS,
    SZS_COUNTERMODEL,
    SZS_ERROR,
    SZS_NO_PROOF,
    SZS_PROOF,
    VAMPIRE_ARGUMENTS,
)
from ontoprobe.errors import NoDerivationFound, ProverError
from ontoprobe.folify import AxiomSet, emit_tptp
from ontoprobe.kif import Formula
from ontoprobe.models import BuiltinProver, ExternalProver, ProofTrace, ProverConfig, TestCase, Verdict, VerdictStatus

_SZS_STATUS = re.compile(r"SZS status\s+(\w+)")
_OUTPUT_START = re.compile(r"SZS output start[^\n]*\n")
_OUTPUT_END = re.compile(r"SZS output end")
# fof(f3, axiom, ..., file('problem.p', top_12)).
_FILE_SOURCE = re.compile(r"file\(\s*(?:'[^']*'|[^,()]*)\s*,\s*'?([A-Za-z0-9_]+)'?\s*\)")
# 3. ![X0] : (...) [input top_12]
_INPUT_SOURCE = re.compile(r"\[input(?:\(\w+\))?\s+([A-Za-z0-9_]+)\]")
_VAMPIRE_TIME = re.compile(r"% Time elapsed:\s*([0-9.]+)\s*s")
_EPROVER_TIME = re.compile(r"# User time\s*:\s*([0-9.]+)\s*s")


def preset_config(name: str, executable: Optional[str] = None) -> ProverConfig:
    if name == "vampire":
        return ProverConfig(name="vampire", executable=executable or "vampire", arguments=VAMPIRE_ARGUMENTS)
    if name == "eprover":
        return ProverConfig(name="eprover", executable=executable or "eprover", arguments=EPROVER_ARGUMENTS)
    raise ProverError(f"no preset for prover '{name}'")


def prover_from_spec(spec: str) -> Union[BuiltinProver, ExternalProver]:
    """Interpret `builtin` or `exec:<path>`; E is recognized by its executable name."""
    if spec == "builtin":
        return BuiltinProver(
            steps_per_second=config.BUILTIN_STEPS_PER_SECOND,
            max_clauses=config.BUILTIN_MAX_CLAUSES,
            set_of_support=config.BUILTIN_SOS,
        )
    if spec.startswith("exec:") and len(spec) > len("exec:"):
        executable = spec[len("exec:"):]
        preset = "eprover" if "eprover" in Path(executable).name else "vampire"
        return ExternalProver(config=preset_config(preset, executable))
    raise ProverError(f"prover must be 'builtin' or 'exec:<path>', got '{spec}'")


def build_problem(axioms: AxiomSet, test: Union[TestCase, Formula]) -> str:
    conjecture = test.conjecture if isinstance(test, TestCase) else test
    return emit_tptp(axioms, conjecture=conjecture)


def szs_status(output: str) -> Optional[str]:
    match = _SZS_STATUS.search(output)
    return match.group(1) if match else None


def reported_cpu_ms(output: str) -> Optional[int]:
    for pattern in (_VAMPIRE_TIME, _EPROVER_TIME):
        match = pattern.search(output)
        if match:
            return int(round(float(match.group(1)) * 1000))
    return None


def extract_used_axioms(raw_output: str, axiom_names: Optional[Iterable[str]] = None) -> Set[str]:
    """
    Axiom names cited by the derivation between the SZS output markers.

    Both `file(..., name)` source annotations and `[input name]` tags are read.
    The conjecture is never reported; with axiom_names given the result is
    restricted to them.
    """
    start = _OUTPUT_START.search(raw_output)
    if start is None:
        raise NoDerivationFound("output holds no SZS derivation")
    end = _OUTPUT_END.search(raw_output, start.end())
    region = raw_output[start.end():end.start() if end else len(raw_output)]
    found = set(_FILE_SOURCE.findall(region)) | set(_INPUT_SOURCE.findall(region))
    found.discard(CONJECTURE_NAME)
    if axiom_names is not None:
        found &= set(axiom_names)
    return found


def verdict_from_output(
    exit_code: Optional[int],
    output: str,
    axiom_names: Optional[Iterable[str]] = None,
    cpu_ms: int = 0,
) -> Verdict:
    """Map prover output to a verdict; the SZS status line decides, the exit code does not."""
    status = szs_status(output)
    if status is None:
        return Verdict(
            status=VerdictStatus.PROVER_ERROR,
            message=f"no SZS status line in prover output (exit code {exit_code})",
            cpu_ms=cpu_ms,
            raw_output=output,
        )
    if status in SZS_PROOF:
        flags = ["contradictory-axioms"] if status == "ContradictoryAxioms" else []
        try:
            used, complete = extract_used_axioms(output, axiom_names), True
        except NoDerivationFound as e:
            logger.warning(f"Proof reported without a readable derivation: {e}")
            used, complete = set(), False
            flags.append("incomplete-trace")
        trace = ProofTrace(used_axiom_names=sorted(used), raw_output=output, cpu_ms=cpu_ms, complete=complete)
        return Verdict(
            status=VerdictStatus.PROOF_FOUND, szs_status=status, trace=trace, flags=flags,
            cpu_ms=cpu_ms, raw_output=output,
        )
    if status in SZS_COUNTERMODEL:
        return Verdict(
            status=VerdictStatus.NO_PROOF, szs_status=status, flags=["countermodel"],
            cpu_ms=cpu_ms, raw_output=output,
        )
    if status in SZS_NO_PROOF:
        return Verdict(status=VerdictStatus.NO_PROOF, szs_status=status, cpu_ms=cpu_ms, raw_output=output)
    if status in SZS_ERROR:
        message = f"prover reported SZS status {status}"
    else:
        message = f"unrecognized SZS status {status}"
        logger.warning(f"Prover printed an SZS status outside the known vocabulary: {status}")
    return Verdict(
        status=VerdictStatus.PROVER_ERROR, szs_status=status, message=message, cpu_ms=cpu_ms, raw_output=output,
    )


async def run_external_async(
    problem: Union[str, Path],
    prover: ProverConfig,
    limit_s: int,
    axiom_names: Optional[Iterable[str]] = None,
    grace_s: Optional[float] = None,
) -> Verdict:
    """Run one prover process on a problem file, killing it at limit + grace."""
    if limit_s <= 0:
        raise ValueError("limit_s must be positive")
    grace = config.PROVER_GRACE_S if grace_s is None else grace_s
    command = prover.command(str(problem), limit_s)
    logger.debug(f"Running {' '.join(command)}")
    started = time.monotonic()
    try:
        process = await asyncio.create_subprocess_exec(
            *command, stdout=asyncio.subprocess.PIPE, stderr=asyncio.subprocess.STDOUT,
        )
    except OSError as e:
        logger.error(f"Cannot start {prover.executable}: {e}")
        return Verdict(status=VerdictStatus.PROVER_ERROR, message=f"cannot start {prover.executable}: {e}")

    try:
        stdout, _ = await asyncio.wait_for(process.communicate(), timeout=limit_s + grace)
    except asyncio.TimeoutError:
        process.kill()
        await process.wait()
        wall_ms = int((time.monotonic() - started) * 1000)
        logger.warning(f"{prover.name} exceeded {limit_s}s on {Path(problem).name} and was killed")
        return Verdict(status=VerdictStatus.NO_PROOF, szs_status="Timeout", flags=["killed"], cpu_ms=wall_ms)

    wall_ms = int((time.monotonic() - started) * 1000)
    output = stdout.decode("utf-8", errors="replace")
    cpu_ms = reported_cpu_ms(output)
    verdict = verdict_from_output(process.returncode, output, axiom_names, wall_ms if cpu_ms is None else cpu_ms)
    if verdict.status == VerdictStatus.PROVER_ERROR:
        logger.error(f"{prover.name} failed on {Path(problem).name}: {verdict.message}")
    return verdict


def run_external(
    problem: Union[str, Path],
    prover: ProverConfig,
    limit_s: int,
    axiom_names: Optional[Iterable[str]] = None,
    grace_s: Optional[float] = None,
) -> Verdict:
    return asyncio.run(run_external_async(problem, prover, limit_s, axiom_names, grace_s))
