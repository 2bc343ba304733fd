from .automaton import Automaton, BuchiAutomaton
from .regex import OmegaRegex, RegexError, compile_omega, compile_regular, split_omega

__all__ = [
    "Automaton",
    "BuchiAutomaton",
    "OmegaRegex",
    "RegexError",
    "compile_omega",
    "compile_regular",
    "split_omega",
]
