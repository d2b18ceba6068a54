"""
Exception types for Ontoprobe
"""
from dataclasses import dataclass
from typing import Optional


@dataclass(frozen=True, slots=True)
class SourceLocation:
    """Position of an S-expression or token inside a source text (1-based)."""
    path: Optional[str]
    line: int
    column: int

    def __str__(self) -> str:
        prefix = f"{self.path}:" if self.path else ""
        return f"{prefix}{self.line}:{self.column}"


class OntoprobeError(Exception):
    """Base class for every error raised by the toolkit."""


class KifSyntaxError(OntoprobeError):
    def __init__(self, message: str, location: SourceLocation):
        super().__init__(f"{location}: {message}")
        self.message = message
        self.location = location


class UnbalancedParens(KifSyntaxError):
    pass


class EmptyExpression(KifSyntaxError):
    pass


class MalformedQuantifier(KifSyntaxError):
    pass


class MalformedFormula(KifSyntaxError):
    pass


class ConflictingDomain(OntoprobeError):
    def __init__(self, relation: str, position: int, first: str, second: str):
        super().__init__(
            f"conflicting domain declarations for {relation} argument {position}: {first} vs {second}"
        )
        self.relation = relation
        self.position = position


class RowVariableNotTrailing(OntoprobeError):
    pass


class UnencodableSymbol(OntoprobeError):
    pass


class TptpSyntaxError(OntoprobeError):
    def __init__(self, message: str, line: int, column: int):
        super().__init__(f"{line}:{column}: {message}")
        self.line = line
        self.column = column


class ClausificationError(OntoprobeError):
    pass


class UnreadableFile(OntoprobeError):
    pass


class TemplateArityMismatch(OntoprobeError):
    pass


class NoDerivationFound(OntoprobeError):
    pass


class ProverError(OntoprobeError):
    pass


class CampaignError(OntoprobeError):
    pass


class UnknownAxiomName(OntoprobeError):
    def __init__(self, name: str):
        super().__init__(f"run record cites unknown axiom '{name}'")
        self.name = name


class FetchError(OntoprobeError):
    pass
