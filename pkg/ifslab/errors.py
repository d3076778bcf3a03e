"""Exception hierarchy for ifslab.

Every error raised on purpose by the package derives from ``IFSLabError``.
``VerdictFailure`` marks runs that completed but whose hypothesis evidence
failed; the CLI maps it to exit code 2 and everything else to exit code 1.
"""

from typing import Optional


class IFSLabError(Exception):
    """Base error. ``hint`` is printed by the CLI as a remediation line."""

    hint: Optional[str] = None

    def __init__(self, message: str, hint: Optional[str] = None):
        super().__init__(message)
        if hint is not None:
            self.hint = hint


class VerdictFailure(IFSLabError):
    """The computation ran, but the evidence it was asked for is absent."""


class NoContractionFound(VerdictFailure):
    hint = (
        "No candidate arc contracted along sampled words; the maps may share an "
        "invariant measure (e.g. all rotations)."
    )


class NotReached(VerdictFailure):
    hint = "Increase m_max or choose a longer arc I."


class BudgetExceeded(IFSLabError):
    hint = "Raise the budget in the config or switch to Monte Carlo mode."


class NodeBudgetExceeded(BudgetExceeded):
    hint = "Exact tree traversal is too large; use mode 'mc' or raise budgets.node_budget."


class AtomBudgetExceeded(BudgetExceeded):
    hint = "The push-forward outgrows budgets.atom_cap; use Monte Carlo sampling instead."


class ConvergenceFailure(IFSLabError):
    hint = "The lift is probably not monotone; run 'ifslab validate' on the config."


class SymbolOutOfRange(IFSLabError):
    pass


class NotRational(IFSLabError):
    hint = "Pass a common denominator n with every p_i equal to some m_i/n."


class DegenerateSample(IFSLabError):
    hint = "The sample has (numerically) zero variance; sigma^2 may be 0 or the observable constant."


class EmptySuccessSet(IFSLabError):
    hint = "No word of length m steers the point into I; check the sync certificate (I, m)."


class NonPositiveCommonCardinality(IFSLabError):
    pass


class ParseError(IFSLabError):
    """Config could not be parsed; carries the position or field path."""

    def __init__(
        self,
        message: str,
        line: Optional[int] = None,
        column: Optional[int] = None,
        field: Optional[str] = None,
    ):
        location = []
        if line is not None:
            location.append(f"line {line}")
        if column is not None:
            location.append(f"column {column}")
        if field:
            location.append(f"field '{field}'")
        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)
        self.line = line
        self.column = column
        self.field = field


class ValidationError(IFSLabError):
    """Config parsed but violates a named invariant."""

    def __init__(self, message: str, invariant: str):
        super().__init__(f"{message} [invariant: {invariant}]")
        self.invariant = invariant
