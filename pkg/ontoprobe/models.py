"""
Pydantic models for Ontoprobe
"""
from enum import Enum
from typing import Any, Dict, List, Literal, Optional, Tuple, Union

from pydantic import (
    BaseModel,
    ConfigDict,
    Field,
    NonNegativeInt,
    PositiveFloat,
    PositiveInt,
    field_validator,
    model_validator,
)

from ontoprobe.kif import FormulaKind


class LayerTag(str, Enum):
    META_KNOWLEDGE = "meta-knowledge"
    TOP_LEVEL = "top-level"
    MID_LEVEL = "mid-level"
    FO_TRANSFORMATION = "fo-transformation"


# ---------------------------------------------------------------------------
# Translation
# ---------------------------------------------------------------------------

class AxiomMeta(BaseModel):
    name: str
    layer: LayerTag
    kind: FormulaKind
    source: Optional[str] = None


class DroppedStatement(BaseModel):
    source: Optional[str] = None
    reason: str
    statement: str


class TranslationReport(BaseModel):
    statements: NonNegativeInt = 0
    non_logical: NonNegativeInt = 0
    translated: NonNegativeInt = 0
    duplicates: NonNegativeInt = 0
    max_row_arity: PositiveInt = 7
    dropped: List[DroppedStatement] = []
    bridged_relations: List[str] = []
    counts: Dict[str, Dict[str, int]] = {}


# ---------------------------------------------------------------------------
# Competency questions
# ---------------------------------------------------------------------------

class MappingRelation(str, Enum):
    EQUIVALENT = "="
    SUBSUMING = "+"
    INSTANCE = "@"


class MappingEntry(BaseModel):
    model_config = ConfigDict(frozen=True)

    synset_id: str
    pos: Literal["n", "v", "a", "s", "r"]
    words: Tuple[str, ...]
    sumo_concept: str
    mapping_relation: MappingRelation

    @field_validator("sumo_concept", "synset_id")
    @classmethod
    def not_blank(cls, value: str) -> str:
        if not value.strip():
            raise ValueError("must not be empty")
        return value


class MorphoLink(BaseModel):
    model_config = ConfigDict(frozen=True)

    verb_synset: str
    relation: str
    noun_synset: str


class TemplateSelector(BaseModel):
    source: Literal["antonyms", "morpholinks"]
    pos: Optional[str] = None
    mapping_relations: List[MappingRelation] = [MappingRelation.EQUIVALENT]
    noun_mapping_relations: List[MappingRelation] = [MappingRelation.EQUIVALENT]
    relation: Optional[str] = None
    distinct: bool = True

    @model_validator(mode="after")
    def relation_needs_links(self):
        if self.source == "morpholinks" and not self.relation:
            raise ValueError("a morpholinks selector must name a relation")
        return self


class PatternTemplate(BaseModel):
    id: str = Field(pattern=r"^[A-Za-z][A-Za-z0-9_-]*$")
    selector: TemplateSelector
    conjecture: str


class TestKind(str, Enum):
    __test__ = False

    TRUTH = "truth-test"
    FALSITY = "falsity-test"


class TestCase(BaseModel):
    """A competency question; the conjecture is a kif formula tree."""
    __test__ = False
    model_config = ConfigDict(arbitrary_types_allowed=True, frozen=True)

    id: str
    kind: TestKind
    conjecture: Any
    pattern: str
    source: Tuple[str, ...] = ()


# ---------------------------------------------------------------------------
# Provers
# ---------------------------------------------------------------------------

class ProverConfig(BaseModel):
    name: str = "external"
    executable: str
    arguments: List[str]

    @field_validator("arguments")
    @classmethod
    def needs_placeholders(cls, value: List[str]) -> List[str]:
        joined = " ".join(value)
        for placeholder in ("{problem}", "{limit_s}"):
            if placeholder not in joined:
                raise ValueError(f"argument template lacks {placeholder}")
        return value

    def command(self, problem: str, limit_s: int) -> List[str]:
        return [self.executable] + [
            arg.replace("{problem}", problem).replace("{limit_s}", str(limit_s)) for arg in self.arguments
        ]


class SaturationBudget(BaseModel):
    max_clauses: PositiveInt = 50000
    max_steps: PositiveInt = 10000
    wall_limit_s: Optional[PositiveFloat] = 30.0
    # measured with the calling thread's CPU clock
    cpu_limit_s: Optional[PositiveFloat] = None


class VerdictStatus(str, Enum):
    PROOF_FOUND = "proof-found"
    NO_PROOF = "no-proof"
    PROVER_ERROR = "prover-error"


class ProofTrace(BaseModel):
    used_axiom_names: List[str] = []
    raw_output: str = ""
    cpu_ms: NonNegativeInt = 0
    complete: bool = True

    @field_validator("used_axiom_names")
    @classmethod
    def sorted_unique(cls, value: List[str]) -> List[str]:
        return sorted(set(value))


class Verdict(BaseModel):
    status: VerdictStatus
    szs_status: Optional[str] = None
    trace: Optional[ProofTrace] = None
    message: Optional[str] = None
    flags: List[str] = []
    cpu_ms: NonNegativeInt = 0
    raw_output: str = Field(default="", exclude=True)

    @model_validator(mode="after")
    def proof_has_trace(self):
        if self.status == VerdictStatus.PROOF_FOUND and self.trace is None:
            raise ValueError("a proof verdict needs a trace")
        return self

    @property
    def used_axioms(self) -> List[str]:
        return self.trace.used_axiom_names if self.trace else []


# ---------------------------------------------------------------------------
# Campaigns
# ---------------------------------------------------------------------------

class Outcome(str, Enum):
    PASSING = "passing"
    NON_PASSING = "non-passing"
    UNKNOWN = "unknown"


OUTCOME_TABLE: Dict[Tuple[TestKind, VerdictStatus], Outcome] = {
    (TestKind.TRUTH, VerdictStatus.PROOF_FOUND): Outcome.PASSING,
    (TestKind.FALSITY, VerdictStatus.PROOF_FOUND): Outcome.NON_PASSING,
    (TestKind.TRUTH, VerdictStatus.NO_PROOF): Outcome.UNKNOWN,
    (TestKind.FALSITY, VerdictStatus.NO_PROOF): Outcome.UNKNOWN,
    (TestKind.TRUTH, VerdictStatus.PROVER_ERROR): Outcome.UNKNOWN,
    (TestKind.FALSITY, VerdictStatus.PROVER_ERROR): Outcome.UNKNOWN,
}


class RunRecord(BaseModel):
    test_id: str
    kind: TestKind
    limit_s: PositiveInt
    verdict: VerdictStatus
    szs_status: Optional[str] = None
    outcome: Outcome
    used_axioms: List[str] = []
    cpu_ms: NonNegativeInt = 0
    flags: List[str] = []

    @field_validator("used_axioms")
    @classmethod
    def sorted_unique(cls, value: List[str]) -> List[str]:
        return sorted(set(value))

    @model_validator(mode="after")
    def outcome_matches_verdict(self):
        if OUTCOME_TABLE[(self.kind, self.verdict)] != self.outcome:
            raise ValueError(f"outcome {self.outcome.value} contradicts {self.kind.value}/{self.verdict.value}")
        return self

    @property
    def key(self) -> Tuple[str, int]:
        return (self.test_id, self.limit_s)


class BuiltinProver(BaseModel):
    type: Literal["builtin"] = "builtin"
    steps_per_second: PositiveInt = 2000
    max_clauses: PositiveInt = 50000
    set_of_support: bool = True

    def budget(self, limit_s: int) -> SaturationBudget:
        return SaturationBudget(
            max_clauses=self.max_clauses,
            max_steps=self.steps_per_second * limit_s,
            # steps bind first; the CPU clock only stops runaway saturations
            wall_limit_s=None,
            cpu_limit_s=float(limit_s) * 10,
        )


class ExternalProver(BaseModel):
    type: Literal["external"] = "external"
    config: ProverConfig


class CampaignConfig(BaseModel):
    limits_s: List[PositiveInt] = [60, 120, 300, 600]
    prover: Union[BuiltinProver, ExternalProver] = Field(default_factory=BuiltinProver, discriminator="type")
    workers: PositiveInt = 1
    reuse: bool = False

    @field_validator("limits_s")
    @classmethod
    def strictly_increasing(cls, value: List[int]) -> List[int]:
        if not value:
            raise ValueError("at least one time limit is required")
        if any(b <= a for a, b in zip(value, value[1:])):
            raise ValueError("time limits must be strictly increasing")
        return value


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

class ReportGroup(str, Enum):
    ALL = "all"
    TRUTH = "truth"
    FALSITY = "falsity"


class SeriesPoint(BaseModel):
    limit_s: PositiveInt
    value: Union[int, float]


class ReportSeries(BaseModel):
    metric: str
    group: ReportGroup
    layer: Optional[LayerTag] = None
    kind: Optional[FormulaKind] = None
    points: List[SeriesPoint]

    def values(self) -> List[Union[int, float]]:
        return [p.value for p in self.points]


class AxiomUsage(BaseModel):
    name: str
    layer: LayerTag
    kind: FormulaKind
    proofs_total: NonNegativeInt = 0
    proofs_truth: NonNegativeInt = 0
    proofs_falsity: NonNegativeInt = 0

    @model_validator(mode="after")
    def totals_add_up(self):
        if self.proofs_total != self.proofs_truth + self.proofs_falsity:
            raise ValueError("proofs_total must equal proofs_truth + proofs_falsity")
        return self


class Percentage(BaseModel):
    numerator: NonNegativeInt
    denominator: NonNegativeInt
    percent: int
    label: str = ""


class EvaluationReport(BaseModel):
    version: str
    limits_s: List[PositiveInt]
    tests: Dict[str, int] = {}
    series: List[ReportSeries] = []
    average_exact: Dict[str, List[str]] = {}
    usage: List[AxiomUsage] = []
    percentages: Dict[str, Percentage] = {}
    notes: List[str] = []

    def find(self, metric: str, group: ReportGroup,
             layer: Optional[LayerTag] = None, kind: Optional[FormulaKind] = None) -> ReportSeries:
        for s in self.series:
            if s.metric == metric and s.group == group and s.layer == layer and s.kind == kind:
                return s
        raise KeyError(f"no {metric} series for {group.value}")
