"""pLTL formulas: syntax, fragments and finite-trace semantics."""

from .formula import (
    FALSE, TRUE, UNBOUNDED, AtLeast, AtMost, Atom, Always, And, Between,
    Eventually, FalseF, Formula, FormulaError, Fragment, Next, Not, Or, Rel,
    Release, ReleaseI, TrueF, Unbounded, Until, UntilI, atoms, check, classify,
    conj, disj, horizon, implies, is_state_formula, negate, nnf, offsets, size,
    state_mask,
)
from .parser import ParseError, parse, to_string
from .semantics import (
    FragmentError, HorizonError, eval_strong, eval_weak, satisfaction_vector,
    satisfies, truth_table,
)
from .space import SpaceError, StateSpace, Variable
