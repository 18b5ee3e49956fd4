"""Deciding equation systems in idempotent variables, and lifting.

An equation u0 X1 u1 ... Xg ug = v0 Y1 v1 ... Yd vd whose variables range
over idempotents is solvable iff a single language equation built from the
prefix products p_i = u0...u_i is solvable in nonempty prefix-closed sets
of reduced words: each idempotent conjugate p X pbar contributes the
summand phat X, and the constants are the reduced prefixes of the full
constant product.  The lifting problem (find a solution whose group image
is a prescribed map) reduces to the idempotent case by splitting every
general variable and substituting the prescribed reduced words.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .equations import (
    Assignment,
    EqWord,
    TypedSystem,
    VarSymbol,
    check_solution,
    join_assignment,
    reduce_pattern,
    split_general_variables,
    substitute_group_solution,
    substitute_tokens,
)
from .errors import InvalidInput, PreconditionError
from .fim import ScheiblichPair, group_image
from .langeq import LangEquation, LangSystem, lang_var, make_term
from .solver import SAT, SolverBudget, Verdict, solve_over_group
from .words import InvAlphabet, ReducedWord, Word, epsilon, reduce_word


@dataclass(frozen=True)
class IdemEquation:
    """Alternating form: consts has one more entry than vars, per side."""

    alphabet: InvAlphabet
    lhs_consts: tuple[Word, ...]
    lhs_vars: tuple[VarSymbol, ...]
    rhs_consts: tuple[Word, ...]
    rhs_vars: tuple[VarSymbol, ...]

    def __post_init__(self) -> None:
        for consts, variables in ((self.lhs_consts, self.lhs_vars),
                                  (self.rhs_consts, self.rhs_vars)):
            if len(consts) != len(variables) + 1:
                raise InvalidInput("alternating form needs one more constant than variables")
            for u in consts:
                if u.alphabet != self.alphabet:
                    raise InvalidInput("constant alphabet mismatch")
            for v in variables:
                if v.kind != "idempotent":
                    raise InvalidInput(f"{v.display()} is not an idempotent variable")

    @classmethod
    def from_sides(cls, lhs: EqWord, rhs: EqWord) -> "IdemEquation":
        def split(side: EqWord) -> tuple[tuple[Word, ...], tuple[VarSymbol, ...]]:
            consts: list[Word] = []
            variables: list[VarSymbol] = []
            run: list[int] = []
            for t in side.tokens:
                if isinstance(t, int):
                    run.append(t)
                else:
                    consts.append(Word(side.alphabet, run))
                    variables.append(t)
                    run = []
            consts.append(Word(side.alphabet, run))
            return tuple(consts), tuple(variables)

        lc, lv = split(lhs)
        rc, rv = split(rhs)
        return cls(lhs.alphabet, lc, lv, rc, rv)

    def variables(self) -> list[VarSymbol]:
        seen: list[VarSymbol] = []
        for v in self.lhs_vars + self.rhs_vars:
            if v not in seen:
                seen.append(v)
        return seen


def group_consistency(eq: IdemEquation) -> bool:
    """Erasing the idempotents must leave a group identity."""
    lhs = Word(eq.alphabet, [l for u in eq.lhs_consts for l in u.letters])
    rhs = Word(eq.alphabet, [l for u in eq.rhs_consts for l in u.letters])
    return reduce_word(lhs) == reduce_word(rhs)


def _side_term(alphabet: InvAlphabet, consts: tuple[Word, ...],
               variables: tuple[VarSymbol, ...]):
    letters: list[int] = []
    summands = []
    for u, v in zip(consts, variables):
        letters.extend(u.letters)
        summands.append((reduce_word(Word(alphabet, letters)), lang_var(v.name)))
    letters.extend(consts[-1].letters)
    full = Word(alphabet, letters)
    prefixes = {reduce_word(full[:i]) for i in range(len(full) + 1)}
    return make_term(alphabet, prefixes, summands)


def to_language_equation(eq: IdemEquation) -> LangEquation:
    """Reduced prefixes of the constant product, plus one summand per
    idempotent occurrence with its prefix product as coefficient.

    Solvability in nonempty prefix-closed subsets of reduced words matches
    solvability of the input over the free inverse monoid, with the trees
    of the idempotents as the solution sets.
    """
    if not group_consistency(eq):
        raise PreconditionError("sides differ already in the group")
    return LangEquation(
        _side_term(eq.alphabet, eq.lhs_consts, eq.lhs_vars),
        _side_term(eq.alphabet, eq.rhs_consts, eq.rhs_vars),
    )


def idem_equations(system: TypedSystem) -> list[IdemEquation]:
    if any(v.kind != "idempotent" for v in system.variables):
        raise PreconditionError("system must use idempotent variables only")
    return [IdemEquation.from_sides(lhs, rhs) for lhs, rhs in system.equations]


def decide_idempotent_system(system: TypedSystem, budget: SolverBudget) -> Verdict:
    """Decide solvability over the free inverse monoid; SAT witnesses are
    idempotent ScheiblichPair assignments verified against the input."""
    equations = idem_equations(system)
    for k, eq in enumerate(equations, start=1):
        if not group_consistency(eq):
            return Verdict(
                "UNSAT_WITHIN_BOUND",
                trace=(f"equation {k} violates the group identity (unconditional)",),
            )
    lang = LangSystem(
        system.alphabet,
        tuple(to_language_equation(eq) for eq in equations),
        "group",
    )
    verdict = solve_over_group(lang, budget)
    if verdict.status != SAT:
        return verdict
    assert verdict.witness is not None
    eps = epsilon(system.alphabet)
    values = {
        v: ScheiblichPair(verdict.witness[lang_var(v.name)], eps)
        for v in system.variables
    }
    sigma = Assignment(values)
    if not check_solution(system, sigma):
        raise AssertionError("idempotent witness failed re-verification")
    return Verdict(SAT, values, verdict.trace)


def decide_lifting(
    system: TypedSystem,
    gamma: Mapping[VarSymbol, ReducedWord],
    budget: SolverBudget,
) -> Verdict:
    """Decide whether some solution projects onto the given group solution.

    gamma must cover every variable with a reduced word and must solve the
    group projection of the system; a gamma that fails that check is a
    contract violation, not an unsatisfiable instance.
    """
    if any(v.kind != "general" for v in system.variables):
        raise PreconditionError("lifting expects a system of general variables")
    images: dict[VarSymbol, EqWord] = {}
    for v in system.variables:
        if v not in gamma:
            raise InvalidInput(f"gamma misses variable {v.display()!r}")
        value = gamma[v]
        if not isinstance(value, ReducedWord):
            raise InvalidInput(f"gamma value for {v.display()} is not reduced")
        images[v] = EqWord(system.alphabet, value.letters)
    split = split_general_variables(system)
    for lhs, rhs in system.equations:
        subst_l = reduce_pattern(substitute_tokens(lhs, images))
        subst_r = reduce_pattern(substitute_tokens(rhs, images))
        if subst_l != subst_r:
            raise InvalidInput("gamma does not solve the group projection")
    gamma_split = {
        VarSymbol("x@" + v.name, "reduced"): gamma[v] for v in system.variables
    }
    idem_system = substitute_group_solution(split, gamma_split)
    verdict = decide_idempotent_system(idem_system, budget)
    if verdict.status != SAT:
        return verdict
    assert verdict.witness is not None
    moved = dict(verdict.witness)
    for v in system.variables:
        moved[VarSymbol("x@" + v.name, "reduced")] = gamma[v]
    sigma = join_assignment(system, Assignment(moved))
    if not check_solution(system, sigma):
        raise AssertionError("lifted witness failed re-verification")
    for v in system.variables:
        if group_image(sigma.values[v]) != gamma[v]:
            raise AssertionError("lifted witness has the wrong group image")
    return Verdict(SAT, dict(sigma.values), verdict.trace)
