"""
Shared constants for SUO-KIF handling, prover output and report files.
"""

# SUO-KIF operator heads
NOT = "not"
AND = "and"
OR = "or"
IMPLIES = "=>"
IFF = "<=>"
FORALL = "forall"
EXISTS = "exists"
EQUAL = "equal"

LOGICAL_OPERATORS = frozenset({NOT, AND, OR, IMPLIES, IFF, FORALL, EXISTS, EQUAL})

# Presentation statements: parsed, never counted as axioms
NON_LOGICAL_PREDICATES = frozenset({
    "documentation",
    "comment",
    "termFormat",
    "format",
    "externalImage",
    "lexicon",
    "synonymousExternalConcept",
})

# Meta-predicates axiomatized by folify
INSTANCE = "instance"
SUBCLASS = "subclass"
DISJOINT = "disjoint"
PARTITION = "partition"
EXHAUSTIVE_DECOMPOSITION = "exhaustiveDecomposition"
DISJOINT_DECOMPOSITION = "disjointDecomposition"
CLASS = "Class"

# Occurrences as arguments of these never produce type guards
GUARD_PREDICATES = frozenset({INSTANCE, SUBCLASS})

DOMAIN = "domain"
DOMAIN_SUBCLASS = "domainSubclass"
VARIABLE_ARITY_RELATION = "VariableArityRelation"

DECLARED_ARITIES = {
    "UnaryPredicate": 1,
    "UnaryRelation": 1,
    "BinaryPredicate": 2,
    "BinaryRelation": 2,
    "TernaryPredicate": 3,
    "TernaryRelation": 3,
    "QuaternaryPredicate": 4,
    "QuaternaryRelation": 4,
    "QuintaryPredicate": 5,
    "QuintaryRelation": 5,
}

# SUMO function symbols end with this suffix
FUNCTION_SUFFIX = "Fn"

HOLDS_PREFIX = "holds_"
DEFAULT_MAX_ROW_ARITY = 7

# TPTP
CONJECTURE_NAME = "goal"
TPTP_SYMBOL_PREFIX = "s__"
TPTP_VARIABLE_PREFIX = "V"
EQUALITY_PREDICATE = "="

# SZS status vocabulary
SZS_PROOF = frozenset({"Theorem", "Unsatisfiable", "ContradictoryAxioms"})
SZS_NO_PROOF = frozenset({
    "Timeout", "GaveUp", "ResourceOut", "MemoryOut", "Unknown", "Incomplete", "Inappropriate",
})
SZS_COUNTERMODEL = frozenset({"CounterSatisfiable", "Satisfiable"})
SZS_ERROR = frozenset({"Error", "OSError", "InputError", "SyntaxError", "UsageError", "Forced"})

# Argument templates for common provers; {problem} and {limit_s} are substituted
VAMPIRE_ARGUMENTS = [
    "--mode", "casc", "-t", "{limit_s}", "--proof", "tptp", "--output_axiom_names", "on", "{problem}",
]
EPROVER_ARGUMENTS = [
    "--auto", "--cpu-limit={limit_s}", "--proof-object", "-s", "{problem}",
]

DEFAULT_LIMITS_S = [60, 120, 300, 600]

# Campaign / report files
RUNS_FILE = "runs.jsonl"
CAMPAIGN_FILE = "campaign.json"
RAW_DIR = "raw"
PROBLEMS_DIR = "problems"
REPORT_FILE = "report.json"
USAGE_FILE = "usage.csv"
PLOT_FILE = "plot.tsv"
FIGURE_FILES = {
    "solved": "fig1.csv",
    "distinct": "fig2.csv",
    "average": "fig3.csv",
    "layers": "fig4.csv",
}

__all__ = [
    "LOGICAL_OPERATORS",
    "NON_LOGICAL_PREDICATES",
    "GUARD_PREDICATES",
    "DECLARED_ARITIES",
    "SZS_PROOF",
    "SZS_NO_PROOF",
    "SZS_COUNTERMODEL",
    "SZS_ERROR",
    "VAMPIRE_ARGUMENTS",
    "EPROVER_ARGUMENTS",
    "DEFAULT_LIMITS_S",
    "FIGURE_FILES",
]
