"""Equations over a free inverse monoid with typed variables.

A variable is general (ranges over all elements), idempotent (ranges over
idempotents, hence self-involuting), or reduced (ranges over reduced words).
Sides of equations are token sequences mixing alphabet letters and variables.
Every general variable pair (X, bar X) splits as X = Z x with Z idempotent
and x reduced; split_general_variables performs that rewriting.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

from .errors import InvalidInput, PreconditionError
from .fim import ScheiblichPair, identity, inverse, is_idempotent, multiply, word_to_fim
from .words import (
    InvAlphabet,
    ReducedWord,
    Word,
    WordSet,
    epsilon,
    involute,
    prefix_closure,
    reduce_word,
)

KINDS = ("general", "idempotent", "reduced")


@dataclass(frozen=True)
class VarSymbol:
    name: str
    kind: str
    barred: bool = False

    def __post_init__(self) -> None:
        if self.kind not in KINDS:
            raise InvalidInput(f"unknown variable kind {self.kind!r}")
        if not self.name or self.name.startswith("~") or any(c.isspace() for c in self.name):
            raise InvalidInput(f"bad variable name {self.name!r}")
        if self.name == "eps":
            raise InvalidInput("variable may not be named 'eps'")
        if self.kind == "idempotent" and self.barred:
            # idempotent variables are their own involutes
            raise InvalidInput("idempotent variables have no barred form")

    def bar(self) -> "VarSymbol":
        if self.kind == "idempotent":
            return self
        return VarSymbol(self.name, self.kind, not self.barred)

    def base(self) -> "VarSymbol":
        if self.barred:
            return VarSymbol(self.name, self.kind, False)
        return self

    def display(self) -> str:
        return ("~" if self.barred else "") + self.name


Token = "int | VarSymbol"


class EqWord:
    """Token sequence over letters (ints) and variables."""

    __slots__ = ("alphabet", "tokens", "_hash")

    def __init__(self, alphabet: InvAlphabet, tokens: Iterable[object]):
        toks = tuple(tokens)
        for t in toks:
            if isinstance(t, int):
                if not 0 <= t < alphabet.size:
                    raise InvalidInput(f"letter index {t} out of range")
            elif not isinstance(t, VarSymbol):
                raise InvalidInput(f"bad token {t!r}")
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "tokens", toks)
        object.__setattr__(self, "_hash", hash((alphabet.tokens, toks)))

    def __setattr__(self, name, value):
        raise AttributeError("EqWord is immutable")

    def __len__(self) -> int:
        return len(self.tokens)

    def __iter__(self) -> Iterator[object]:
        return iter(self.tokens)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, EqWord)
            and self.alphabet == other.alphabet
            and self.tokens == other.tokens
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"EqWord({format_eq_word(self)!r})"

    def concat(self, other: "EqWord") -> "EqWord":
        if other.alphabet != self.alphabet:
            raise InvalidInput("alphabet mismatch")
        return EqWord(self.alphabet, self.tokens + other.tokens)

    def variables(self) -> list[VarSymbol]:
        """Base forms of all variables, in first-occurrence order."""
        seen: list[VarSymbol] = []
        for t in self.tokens:
            if isinstance(t, VarSymbol) and t.base() not in seen:
                seen.append(t.base())
        return seen

    def is_constant(self) -> bool:
        return all(isinstance(t, int) for t in self.tokens)

    def constant_word(self) -> Word:
        if not self.is_constant():
            raise PreconditionError("side contains variables")
        return Word(self.alphabet, self.tokens)  # type: ignore[arg-type]


def format_eq_word(w: EqWord) -> str:
    if not w.tokens:
        return "eps"
    parts = []
    for t in w.tokens:
        parts.append(w.alphabet.tokens[t] if isinstance(t, int) else t.display())
    return "".join(parts)


def _bar_token(alphabet: InvAlphabet, t: object) -> object:
    if isinstance(t, int):
        return alphabet.bar_of[t]
    return t.bar()  # type: ignore[union-attr]


def involute_eq_word(w: EqWord) -> EqWord:
    return EqWord(w.alphabet, tuple(_bar_token(w.alphabet, t) for t in reversed(w.tokens)))


def reduce_pattern(w: EqWord) -> EqWord:
    """Reduce a token sequence formally, cancelling t bar(t) for any token.

    Idempotent variables must not appear: they are not group letters.
    """
    for t in w.tokens:
        if isinstance(t, VarSymbol) and t.kind == "idempotent":
            raise PreconditionError("idempotent variable in a group pattern")
    out: list[object] = []
    for t in w.tokens:
        if out and out[-1] == _bar_token(w.alphabet, t):
            out.pop()
        else:
            out.append(t)
    return EqWord(w.alphabet, tuple(out))


@dataclass(frozen=True)
class TypedSystem:
    alphabet: InvAlphabet
    variables: tuple[VarSymbol, ...]
    equations: tuple[tuple[EqWord, EqWord], ...]

    def __post_init__(self) -> None:
        for v in self.variables:
            if v.barred:
                raise InvalidInput("declare variables in base form")
        if len({v.name for v in self.variables}) != len(self.variables):
            raise InvalidInput("duplicate variable names")
        declared = set(self.variables)
        for lhs, rhs in self.equations:
            for side in (lhs, rhs):
                if side.alphabet != self.alphabet:
                    raise InvalidInput("alphabet mismatch in equation")
                for v in side.variables():
                    if v not in declared:
                        raise InvalidInput(f"undeclared variable {v.display()!r}")

    def kinds(self) -> set[str]:
        return {v.kind for v in self.variables}


class Assignment:
    """Maps base variables to values of the matching sort."""

    def __init__(self, values: Mapping[VarSymbol, object]):
        self.values: dict[VarSymbol, object] = dict(values)
        for v, val in self.values.items():
            if v.barred:
                raise InvalidInput("assign to base variables only")
            if v.kind == "reduced":
                if not isinstance(val, ReducedWord):
                    raise InvalidInput(f"{v.display()} needs a ReducedWord value")
            else:
                if not isinstance(val, ScheiblichPair):
                    raise InvalidInput(f"{v.display()} needs a ScheiblichPair value")
                if v.kind == "idempotent" and not is_idempotent(val):
                    raise InvalidInput(f"{v.display()} needs an idempotent value")

    def fim_value(self, v: VarSymbol) -> ScheiblichPair:
        val = self.values[v.base()]
        if v.kind == "reduced":
            word: ReducedWord = val  # type: ignore[assignment]
            if v.barred:
                word = involute(word)  # type: ignore[assignment]
            tree = prefix_closure(WordSet(word.alphabet, [word]))
            return ScheiblichPair(tree, ReducedWord(word.alphabet, word.letters))
        pair: ScheiblichPair = val  # type: ignore[assignment]
        return inverse(pair) if v.barred else pair


def evaluate_side(side: EqWord, sigma: Assignment) -> ScheiblichPair:
    acc = identity(side.alphabet)
    for t in side.tokens:
        if isinstance(t, int):
            step = word_to_fim(Word(side.alphabet, (t,)))
        else:
            step = sigma.fim_value(t)
        acc = multiply(acc, step)
    return acc


def check_solution(system: TypedSystem, sigma: Assignment) -> bool:
    for v in system.variables:
        if v not in sigma.values:
            raise InvalidInput(f"assignment misses variable {v.display()!r}")
    return all(
        evaluate_side(lhs, sigma) == evaluate_side(rhs, sigma)
        for lhs, rhs in system.equations
    )


def split_general_variables(system: TypedSystem) -> TypedSystem:
    """Rewrite every general X as Z@X x@X (idempotent times reduced).

    Occurrences of bar X become bar(x@X) Z@X.  Satisfiability is preserved in
    both directions; see split_assignment / join_assignment.
    """
    if any(v.kind != "general" for v in system.variables):
        raise PreconditionError("system already contains typed variables")
    fresh: dict[VarSymbol, tuple[VarSymbol, VarSymbol]] = {}
    new_vars: list[VarSymbol] = []
    for v in system.variables:
        z = VarSymbol("Z@" + v.name, "idempotent")
        x = VarSymbol("x@" + v.name, "reduced")
        fresh[v] = (z, x)
        new_vars.extend((z, x))

    def rewrite(side: EqWord) -> EqWord:
        toks: list[object] = []
        for t in side.tokens:
            if isinstance(t, int):
                toks.append(t)
            else:
                z, x = fresh[t.base()]
                toks.extend((x.bar(), z) if t.barred else (z, x))
        return EqWord(side.alphabet, toks)

    eqs = tuple((rewrite(l), rewrite(r)) for l, r in system.equations)
    return TypedSystem(system.alphabet, tuple(new_vars), eqs)


def split_assignment(system: TypedSystem, sigma: Assignment) -> Assignment:
    """Transport a solution of a general-variable system to its split form."""
    values: dict[VarSymbol, object] = {}
    for v in system.variables:
        pair: ScheiblichPair = sigma.values[v]  # type: ignore[assignment]
        values[VarSymbol("Z@" + v.name, "idempotent")] = ScheiblichPair(
            pair.tree, epsilon(system.alphabet)
        )
        values[VarSymbol("x@" + v.name, "reduced")] = pair.group
    return Assignment(values)


def join_assignment(system: TypedSystem, sigma: Assignment) -> Assignment:
    """Inverse transport: X = (tree(Z) union prefixes of x, x)."""
    values: dict[VarSymbol, object] = {}
    for v in system.variables:
        z = sigma.values[VarSymbol("Z@" + v.name, "idempotent")]
        x = sigma.values[VarSymbol("x@" + v.name, "reduced")]
        tree = z.tree.union(prefix_closure(WordSet(system.alphabet, [x])))  # type: ignore[union-attr]
        values[v] = ScheiblichPair(tree, x)  # type: ignore[arg-type]
    return Assignment(values)


def underlying_group_equation(eq: tuple[EqWord, EqWord]) -> tuple[EqWord, EqWord]:
    """Delete idempotent variables; the remaining pattern is over letters and
    reduced variables only.  No reduction is applied."""
    lhs, rhs = eq

    def strip(side: EqWord) -> EqWord:
        toks = [
            t
            for t in side.tokens
            if isinstance(t, int) or t.kind != "idempotent"
        ]
        for t in toks:
            if isinstance(t, VarSymbol) and t.kind == "general":
                raise PreconditionError("split general variables first")
        return EqWord(side.alphabet, toks)

    return strip(lhs), strip(rhs)


def substitute_tokens(side: EqWord, images: Mapping[VarSymbol, EqWord]) -> EqWord:
    """Homomorphic substitution: base variable -> image, barred -> involute."""
    toks: list[object] = []
    for t in side.tokens:
        if isinstance(t, int) or t.base() not in images:
            toks.append(t)
        else:
            img = images[t.base()]
            if t.barred:
                img = involute_eq_word(img)
            toks.extend(img.tokens)
    return EqWord(side.alphabet, toks)


def substitute_group_solution(
    system: TypedSystem, gamma: Mapping[VarSymbol, ReducedWord]
) -> TypedSystem:
    """Replace every reduced variable by its gamma value.

    The output contains only letters and idempotent variables.
    """
    images: dict[VarSymbol, EqWord] = {}
    for v in system.variables:
        if v.kind == "general":
            raise PreconditionError("split general variables first")
        if v.kind != "reduced":
            continue
        if v not in gamma:
            raise InvalidInput(f"gamma misses reduced variable {v.display()!r}")
        val = gamma[v]
        if not isinstance(val, ReducedWord):
            raise InvalidInput(f"gamma value for {v.display()} is not reduced")
        images[v] = EqWord(system.alphabet, val.letters)
    keep = tuple(v for v in system.variables if v.kind == "idempotent")
    eqs = tuple(
        (substitute_tokens(l, images), substitute_tokens(r, images))
        for l, r in system.equations
    )
    return TypedSystem(system.alphabet, keep, eqs)
