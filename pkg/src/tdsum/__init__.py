"""Exact decision procedures for target discounted-sum problems."""
from .numerics import DiscountFactor, LassoWord, lasso_value, parse_rational
from .problem import GtdsInstance, WeightAlphabet, normalize
from .verdict import Answer, Reason, Verdict

__all__ = [
    "Answer",
    "DiscountFactor",
    "GtdsInstance",
    "LassoWord",
    "Reason",
    "Verdict",
    "WeightAlphabet",
    "lasso_value",
    "normalize",
    "parse_rational",
]
