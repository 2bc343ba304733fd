from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any

from .numerics import LassoWord


class Answer(str, enum.Enum):
    YES = "yes"
    NO = "no"
    UNKNOWN = "unknown"


class Reason(str, enum.Enum):
    GAP_EXCEEDED_BOUND = "GapExceededBound"
    GAP_REPETITION = "GapRepetition"
    COVERAGE_GUARANTEE = "CoverageGuarantee"
    NO_EV_PERIODIC_EXISTS = "NoEvPeriodicExists"
    BUDGET_EXHAUSTED = "BudgetExhausted"
    EMPTY_PRODUCT = "EmptyProduct"
    LASSO_FOUND = "LassoFound"
    TREE_EXHAUSTED = "TreeExhausted"
    FINITE_WITNESS = "FiniteWitness"
    NO_FINITE_WITNESS = "NoFiniteWitness"
    DEGENERATE = "Degenerate"


@dataclass(frozen=True)
class Verdict:
    """Outcome of a decision procedure.

    ``details`` carries the finite evidence behind the answer: the
    refutation trace of a No, the consumed budget of an Unknown, bounds
    that were checked on a Yes.
    """

    answer: Answer
    reason: Reason
    certificate: LassoWord | None = None
    details: dict[str, Any] = field(default_factory=dict, compare=False)

    @property
    def is_yes(self) -> bool:
        return self.answer is Answer.YES

    @property
    def is_no(self) -> bool:
        return self.answer is Answer.NO

    @property
    def is_unknown(self) -> bool:
        return self.answer is Answer.UNKNOWN
