"""Language equations with one-sided concatenation.

Equations have the shape L + sum u_i X_i = K + sum v_j Y_j where L, K are
finite word sets, the coefficients u_i, v_j are words, and variables range
over finite word sets.  Interpretation is over the free monoid (words
compared literally) or over the free group (words reduced before comparison).
An equation may be flagged marked (must also hold over the monoid) or as an
inequality (L <= R, evaluated as L + R = R).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .equations import VarSymbol
from .errors import InvalidInput
from .words import InvAlphabet, Word, WordSet, reduce_word

INTERPS = ("monoid", "group")


def lang_var(name: str) -> VarSymbol:
    """Language variables carry no involution; kind is fixed."""
    return VarSymbol(name, "general")


@dataclass(frozen=True)
class LangTerm:
    alphabet: InvAlphabet
    constant: WordSet
    summands: tuple[tuple[Word, VarSymbol], ...]

    def __post_init__(self) -> None:
        if self.constant.alphabet != self.alphabet:
            raise InvalidInput("constant set alphabet mismatch")
        for coeff, var in self.summands:
            if coeff.alphabet != self.alphabet:
                raise InvalidInput("coefficient alphabet mismatch")
            if var.barred or var.kind != "general":
                raise InvalidInput("language variables are unbarred and untyped")

    def variables(self) -> list[VarSymbol]:
        seen: list[VarSymbol] = []
        for _, v in self.summands:
            if v not in seen:
                seen.append(v)
        return seen


def make_term(
    alphabet: InvAlphabet,
    constant: Iterable[Word] = (),
    summands: Iterable[tuple[Word, VarSymbol]] = (),
) -> LangTerm:
    return LangTerm(alphabet, WordSet(alphabet, constant), tuple(summands))


def prefix_term(p: Word, t: LangTerm) -> LangTerm:
    """Left-multiply every member of the term by p (plain concatenation)."""
    return LangTerm(
        t.alphabet,
        WordSet(t.alphabet, (p.concat(w) for w in t.constant)),
        tuple((p.concat(u), v) for u, v in t.summands),
    )


def add_terms(s: LangTerm, t: LangTerm) -> LangTerm:
    if s.alphabet != t.alphabet:
        raise InvalidInput("alphabet mismatch")
    return LangTerm(s.alphabet, s.constant.union(t.constant), s.summands + t.summands)


@dataclass(frozen=True)
class LangEquation:
    lhs: LangTerm
    rhs: LangTerm
    marked: bool = False
    inequality: bool = False

    def __post_init__(self) -> None:
        if self.lhs.alphabet != self.rhs.alphabet:
            raise InvalidInput("equation sides over different alphabets")

    def variables(self) -> list[VarSymbol]:
        seen = self.lhs.variables()
        for v in self.rhs.variables():
            if v not in seen:
                seen.append(v)
        return seen


@dataclass(frozen=True)
class LangSystem:
    alphabet: InvAlphabet
    equations: tuple[LangEquation, ...]
    interp: str
    coeff_letters: "frozenset[int] | None" = None
    declared_vars: tuple[VarSymbol, ...] = field(default=())

    def __post_init__(self) -> None:
        if self.interp not in INTERPS:
            raise InvalidInput(f"unknown interpretation {self.interp!r}")
        for eq in self.equations:
            if eq.lhs.alphabet != self.alphabet:
                raise InvalidInput("equation alphabet mismatch")
        if self.coeff_letters is not None:
            allowed = self.coeff_letters
            if not all(0 <= i < self.alphabet.size for i in allowed):
                raise InvalidInput("coefficient letter out of range")
            for eq in self.equations:
                for term in (eq.lhs, eq.rhs):
                    for w in term.constant:
                        if not set(w.letters) <= allowed:
                            raise InvalidInput("constant word outside the coefficient alphabet")
                    for coeff, _ in term.summands:
                        if not set(coeff.letters) <= allowed:
                            raise InvalidInput("coefficient outside the coefficient alphabet")

    def variables(self) -> tuple[VarSymbol, ...]:
        seen: list[VarSymbol] = list(self.declared_vars)
        for eq in self.equations:
            for v in eq.variables():
                if v not in seen:
                    seen.append(v)
        return tuple(sorted(seen, key=lambda v: v.name))


def system_size(system: LangSystem) -> int:
    """Alphabet and variables counted once, then per-equation content."""
    total = system.alphabet.size + len(system.variables())
    for eq in system.equations:
        total += len(eq.lhs.summands) + len(eq.rhs.summands)
        constants = eq.lhs.constant.tuple_set | eq.rhs.constant.tuple_set
        total += sum(len(t) for t in constants)
        for term in (eq.lhs, eq.rhs):
            total += sum(len(u) for u, _ in term.summands)
    return total


def eval_term(
    t: LangTerm, sigma: Mapping[VarSymbol, WordSet], interp: str
) -> WordSet:
    if interp not in INTERPS:
        raise InvalidInput(f"unknown interpretation {interp!r}")
    out: list[Word] = list(t.constant)
    for coeff, var in t.summands:
        if var not in sigma:
            raise InvalidInput(f"assignment misses variable {var.display()!r}")
        for w in sigma[var]:
            out.append(coeff.concat(w))
    if interp == "group":
        out = [reduce_word(w) for w in out]
    return WordSet(t.alphabet, out)


def _equation_holds(eq: LangEquation, sigma: Mapping[VarSymbol, WordSet], interp: str) -> bool:
    lhs = eval_term(eq.lhs, sigma, interp)
    rhs = eval_term(eq.rhs, sigma, interp)
    if eq.inequality:
        return lhs.tuple_set <= rhs.tuple_set
    return lhs.tuple_set == rhs.tuple_set


def holds(system: LangSystem, sigma: Mapping[VarSymbol, WordSet]) -> bool:
    for eq in system.equations:
        if not _equation_holds(eq, sigma, system.interp):
            return False
        if eq.marked and system.interp != "monoid":
            if not _equation_holds(eq, sigma, "monoid"):
                return False
    return True


def combine_to_single(system: LangSystem) -> LangSystem:
    """Glue all equations into one by prefixing with a prefix code.

    Code words have length ceil(log2 n) over two fixed letters, taken in
    lexicographic order, so distinct equations land in disjoint sets.  The
    solution set is preserved exactly under monoid evaluation.  Under group
    evaluation only soundness holds (solutions still solve the output):
    reduction can cancel a code word against what follows, so the combined
    equation may gain spurious solutions.
    """
    if any(eq.marked for eq in system.equations):
        raise InvalidInput("combine requires unmarked equations")
    flags = {eq.inequality for eq in system.equations}
    if len(flags) > 1:
        raise InvalidInput("combine requires uniform equation flags")
    n = len(system.equations)
    if n <= 1:
        return system
    pool = sorted(system.coeff_letters) if system.coeff_letters is not None else list(
        range(system.alphabet.size)
    )
    if len(pool) < 2:
        raise InvalidInput("need at least two letters for the prefix code")
    c0, c1 = pool[0], pool[1]
    width = max(1, (n - 1).bit_length())
    lhs = make_term(system.alphabet)
    rhs = make_term(system.alphabet)
    for k, eq in enumerate(system.equations):
        digits = tuple(c1 if (k >> (width - 1 - b)) & 1 else c0 for b in range(width))
        p = Word(system.alphabet, digits)
        lhs = add_terms(lhs, prefix_term(p, eq.lhs))
        rhs = add_terms(rhs, prefix_term(p, eq.rhs))
    combined = LangEquation(lhs, rhs, marked=False, inequality=flags.pop())
    return LangSystem(
        system.alphabet,
        (combined,),
        system.interp,
        system.coeff_letters,
        system.declared_vars,
    )
