"""Satisfiability-preserving rewrites of language-equation systems, ending in
two equations over the free inverse monoid in idempotent variables.

The chain: cut constants and long coefficients down to X0 = 1 plus binary
inequalities (s1), pad with a letter appended fresh to the alphabet so
solvability forces solvability in nonempty prefix-closed sets (s2), glue
everything into one equation and add an alphabet-control equation over a
fresh variable (sprime), and encode each side L + sum u_i X_i as the word
prod u ubar prod u_i X_i ubar_i (fim).  Every stage has explicit witness
transport, so sat-equivalence is testable within bounds instead of being
taken on faith.

The pad letter must be fresh.  Padding with an existing coefficient letter
d is unsound: every nonempty prefix-closed value contains eps, so a right
side d Y covers the single word d for free, and the unpadding map then
manufactures eps in the left variable's value where the unpadded system
may forbid it (test_pad_s2 pins a concrete system that flips from
unsatisfiable to satisfiable that way).

Systems here are monoid-interpreted and live over the base letters: the
unbarred half of the alphabet, or coeff_letters when declared.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Mapping

from .equations import EqWord, TypedSystem, VarSymbol
from .errors import FimeqError, InvalidInput, PreconditionError
from .fim import ScheiblichPair
from .langeq import (
    LangEquation,
    LangSystem,
    LangTerm,
    add_terms,
    combine_to_single,
    eval_term,
    lang_var,
    make_term,
    prefix_term,
)
from .words import (
    InvAlphabet,
    Word,
    WordSet,
    epsilon,
    format_word,
    involute,
    prefix_closure,
)

CONTROL_NAME = "Z#ctl"

STAGES = ("s1", "s2", "sprime", "fim")


@dataclass(frozen=True)
class SurgeryReport:
    stage: str
    before: object
    after: object
    fresh: tuple[VarSymbol, ...]


def base_letters(system: LangSystem) -> frozenset[int]:
    """coeff_letters when declared, else the least letter of each bar pair."""
    if system.coeff_letters is not None:
        return system.coeff_letters
    bar = system.alphabet.bar_of
    return frozenset(a for a in range(system.alphabet.size) if a <= bar[a])


def _check_surgery_input(system: LangSystem, letters: frozenset[int]) -> None:
    if system.interp != "monoid":
        raise PreconditionError("surgery expects monoid-interpreted systems")
    for eq in system.equations:
        if eq.inequality or eq.marked:
            raise InvalidInput("plain equalities only")
        for term in (eq.lhs, eq.rhs):
            for w in term.constant:
                if not set(w.letters) <= letters:
                    raise InvalidInput("constants must stay over the base letters")
            for u, _ in term.summands:
                if not set(u.letters) <= letters:
                    raise InvalidInput("coefficients must stay over the base letters")
    for v in system.variables():
        if "#" in v.name or "[" in v.name:
            raise InvalidInput(f"variable name {v.name!r} is reserved for surgery")


def _normalize(
    system: LangSystem,
) -> "tuple[LangSystem, list[tuple[VarSymbol, LangTerm]], VarSymbol, VarSymbol | None]":
    letters = base_letters(system)
    _check_surgery_input(system, letters)
    alphabet = system.alphabet
    eps = epsilon(alphabet)
    x0 = lang_var("X#0")
    defs: list[tuple[VarSymbol, LangTerm]] = []
    brackets: dict[tuple[tuple[int, ...], VarSymbol], VarSymbol] = {}
    empty_var: "VarSymbol | None" = None
    chain_count = 0

    def short_term(u: Word, v: VarSymbol) -> tuple[Word, VarSymbol]:
        # uX with |u| >= 2 becomes a [vX], where [vX] is pinned to vX
        if len(u) <= 1:
            return (u, v)
        inner = short_term(u[1:], v)
        key = (u[1:].letters, v)
        if key not in brackets:
            fresh = lang_var(f"[{format_word(u[1:])}{v.name}]")
            brackets[key] = fresh
            defs.append((fresh, make_term(alphabet, summands=[inner])))
        return (u[:1], brackets[key])

    def side_terms(t: LangTerm) -> list[tuple[Word, VarSymbol]]:
        nonlocal empty_var
        out = [short_term(u, x0) for u in t.constant]
        out += [short_term(u, v) for u, v in t.summands]
        if not out:
            # the union of no terms: a variable pinned to the empty set
            if empty_var is None:
                empty_var = lang_var("W#empty")
            out = [(eps, empty_var)]
        return out

    def chained(terms: list) -> list:
        nonlocal chain_count
        while len(terms) > 2:
            w = lang_var(f"W#{chain_count}")
            chain_count += 1
            defs.append((w, make_term(alphabet, summands=terms[:2])))
            terms = [(eps, w)] + terms[2:]
        return terms

    mains = [
        (chained(side_terms(eq.lhs)), chained(side_terms(eq.rhs)))
        for eq in system.equations
    ]

    def ineq(t: tuple, others: list) -> LangEquation:
        two = others if len(others) == 2 else [others[0], others[0]]
        return LangEquation(
            make_term(alphabet, summands=[t]),
            make_term(alphabet, summands=two),
            inequality=True,
        )

    eqs = [LangEquation(make_term(alphabet, summands=[(eps, x0)]), make_term(alphabet, [eps]))]
    if empty_var is not None:
        # split of W = aW + aW, like any other equality: only the empty set
        # satisfies both directions
        if not letters:
            raise InvalidInput("empty base alphabet")
        pin = Word(alphabet, [min(letters)])
        eqs.append(ineq((eps, empty_var), [(pin, empty_var), (pin, empty_var)]))
        eqs.append(ineq((pin, empty_var), [(eps, empty_var)]))
    for v, term in defs:
        head = [(eps, v)]
        body = list(term.summands)
        eqs.extend([ineq(head[0], body)] + [ineq(t, head) for t in body])
    for lt, rt in mains:
        eqs.extend([ineq(t, rt) for t in lt] + [ineq(t, lt) for t in rt])
    out = LangSystem(
        alphabet, tuple(eqs), "monoid", letters, tuple(system.variables())
    )
    require_s1_form(out)
    return out, defs, x0, empty_var


def normalize_s1(system: LangSystem) -> LangSystem:
    """X0 = 1 plus inequalities aX <= bY + cZ with coefficients of length
    at most one.

    Constants move onto X0, long coefficients are cut letter by letter via
    bracket variables, wide unions via chain variables, and every equality
    splits into one inequality per summand.  Solution sets correspond
    exactly: the fresh variables are pinned by their defining terms.
    """
    return _normalize(system)[0]


def s1_extend_witness(
    system: LangSystem, sigma: Mapping[VarSymbol, WordSet]
) -> dict[VarSymbol, WordSet]:
    """Transport a solution of the input onto normalize_s1(system)."""
    _, defs, x0, empty_var = _normalize(system)
    alphabet = system.alphabet
    out = dict(sigma)
    out[x0] = WordSet(alphabet, [epsilon(alphabet)])
    if empty_var is not None:
        out[empty_var] = WordSet(alphabet)
    for v, term in defs:
        out[v] = eval_term(term, out, "monoid")
    return out


def require_s1_form(system: LangSystem) -> None:
    """First equation pins a variable to {eps}; the rest are single-term <=
    two-term inequalities without constants, coefficients of length <= 1."""
    if system.interp != "monoid":
        raise PreconditionError("monoid systems only")
    if not system.equations:
        raise PreconditionError("missing the pinned variable equation")
    first, *rest = system.equations
    if (
        first.inequality
        or first.marked
        or first.lhs.constant.words
        or len(first.lhs.summands) != 1
        or len(first.lhs.summands[0][0]) != 0
        or first.rhs.summands
        or first.rhs.constant.tuple_set != {()}
    ):
        raise PreconditionError("first equation must have the form X = {eps}")
    for k, eq in enumerate(rest, start=2):
        if not eq.inequality or eq.marked:
            raise PreconditionError(f"equation {k} must be an inequality")
        if eq.lhs.constant.words or len(eq.lhs.summands) != 1:
            raise PreconditionError(f"equation {k} needs a single-term left side")
        if eq.rhs.constant.words or len(eq.rhs.summands) != 2:
            raise PreconditionError(f"equation {k} needs a two-term right side")
        if any(len(u) > 1 for u, _ in eq.lhs.summands + eq.rhs.summands):
            raise PreconditionError(f"equation {k} has a coefficient longer than 1")


def padded_alphabet(s1: LangSystem) -> tuple[InvAlphabet, Word]:
    """The alphabet extended by a fresh bar pair, and the pad letter.

    Existing letter indices are preserved, so words embed unchanged."""
    used = set(s1.alphabet.tokens)
    candidates = [chr(c) for c in range(ord("a"), ord("z") + 1)]
    candidates += [f"p{k}" for k in range(1, len(used) + 2)]
    name = next(n for n in candidates if n not in used and "~" + n not in used)
    n = s1.alphabet.size
    extended = InvAlphabet(
        s1.alphabet.tokens + (name, "~" + name), s1.alphabet.bar_of + (n + 1, n)
    )
    return extended, Word(extended, [n])


def _embed_term(alphabet: InvAlphabet, t: LangTerm) -> LangTerm:
    return make_term(
        alphabet,
        [Word(alphabet, w.letters) for w in t.constant],
        [(Word(alphabet, u.letters), v) for u, v in t.summands],
    )


def pad_s2(s1: LangSystem) -> LangSystem:
    """Replace X0 = 1 by X0 = 1 + d and add the left coefficient to each
    inequality's right side, where d is a fresh letter appended to the
    alphabet.  Satisfiability is unchanged, and the padded system is
    solvable in nonempty prefix-closed sets whenever it is solvable.

    Freshness carries the unpadding map: a value member u d can only be
    matched through the d-suffixed image of another value, never by a
    coefficient or padding constant, which cannot spell d."""
    require_s1_form(s1)
    letters = base_letters(s1)
    if not letters:
        raise InvalidInput("empty base alphabet")
    alphabet, d = padded_alphabet(s1)
    eps = epsilon(alphabet)
    first, *rest = s1.equations
    eqs = [
        LangEquation(_embed_term(alphabet, first.lhs), make_term(alphabet, [eps, d]))
    ]
    for eq in rest:
        rhs = _embed_term(alphabet, eq.rhs)
        coeff = Word(alphabet, eq.lhs.summands[0][0].letters)
        eqs.append(
            LangEquation(
                _embed_term(alphabet, eq.lhs),
                LangTerm(alphabet, WordSet(alphabet, [coeff]), rhs.summands),
                inequality=True,
            )
        )
    return LangSystem(
        alphabet, tuple(eqs), "monoid", letters | {d.letters[0]}, tuple(s1.variables())
    )


def pad_letter(system: LangSystem) -> Word:
    """The pad letter, read off the first equation X = {eps, d}."""
    if not system.equations:
        raise InvalidInput("missing the pinned variable equation")
    consts = system.equations[0].rhs.constant.tuple_set
    singles = sorted(t[0] for t in consts if len(t) == 1)
    if len(consts) != 2 or () not in consts or len(singles) != 1:
        raise InvalidInput("cannot read the pad letter off the first equation")
    return Word(system.alphabet, singles)


def require_s2_form(system: LangSystem) -> None:
    """The padded variant of the s1 shape; the pad letter must be a declared
    base letter and stay out of every coefficient."""
    if system.interp != "monoid":
        raise PreconditionError("monoid systems only")
    d = pad_letter(system).letters[0]
    if d not in base_letters(system):
        raise PreconditionError("pad letter must be a declared base letter")
    first, *rest = system.equations
    if (
        first.inequality
        or first.marked
        or first.lhs.constant.words
        or len(first.lhs.summands) != 1
        or len(first.lhs.summands[0][0]) != 0
        or first.rhs.summands
    ):
        raise PreconditionError("first equation must have the form X = {eps, d}")
    for k, eq in enumerate(rest, start=2):
        if not eq.inequality or eq.marked:
            raise PreconditionError(f"equation {k} must be an inequality")
        if eq.lhs.constant.words or len(eq.lhs.summands) != 1:
            raise PreconditionError(f"equation {k} needs a single-term left side")
        if len(eq.rhs.summands) != 2:
            raise PreconditionError(f"equation {k} needs a two-term right side")
        if any(len(u) > 1 for u, _ in eq.lhs.summands + eq.rhs.summands):
            raise PreconditionError(f"equation {k} has a coefficient longer than 1")
        if any(d in u.letters for u, _ in eq.lhs.summands + eq.rhs.summands):
            raise PreconditionError(f"equation {k} uses the pad letter as a coefficient")
        if eq.rhs.constant.tuple_set != {eq.lhs.summands[0][0].letters}:
            raise PreconditionError(f"equation {k} right side must carry the left coefficient")


def pad_forward_witness(
    s1: LangSystem, sigma: Mapping[VarSymbol, WordSet]
) -> dict[VarSymbol, WordSet]:
    """sigma'(X) = {eps} + pref(sigma(X) d) over the extended alphabet:
    nonempty and prefix-closed."""
    alphabet, d = padded_alphabet(s1)
    out: dict[VarSymbol, WordSet] = {}
    for v in s1.variables():
        if v not in sigma:
            raise InvalidInput(f"witness misses variable {v.display()!r}")
        padded = [Word(alphabet, w.letters).concat(d) for w in sigma[v]]
        out[v] = prefix_closure(WordSet(alphabet, padded))
    return out


def pad_back_witness(
    s2: LangSystem, sigma: Mapping[VarSymbol, WordSet]
) -> dict[VarSymbol, WordSet]:
    """sigma(X) = {u over the base letters : u d in sigma'(X)} undoes the
    padding; values are rebuilt over the alphabet without the pad pair."""
    a = pad_letter(s2).letters[0]
    bar = s2.alphabet.bar_of
    if {a, bar[a]} != {s2.alphabet.size - 2, s2.alphabet.size - 1}:
        raise InvalidInput("pad letter must be the alphabet's last bar pair")
    inner = InvAlphabet(s2.alphabet.tokens[:-2], s2.alphabet.bar_of[:-2])
    keep = base_letters(s2) - {a}
    out: dict[VarSymbol, WordSet] = {}
    for v in s2.variables():
        if v not in sigma:
            raise InvalidInput(f"witness misses variable {v.display()!r}")
        out[v] = WordSet(
            inner,
            [
                Word(inner, w.letters[:-1])
                for w in sigma[v]
                if w.letters and w.letters[-1] == a and set(w.letters[:-1]) <= keep
            ],
        )
    return out


def alphabet_control(s2: LangSystem) -> LangSystem:
    """Two equations: all of s2 glued into one, plus the control equation
    1 + Z + sum_a aZ + sum_k X_k = 1 + sum_a aZ over a fresh Z.

    The control equation says each value is {eps} or starts with a base
    letter followed by a member of Z, and Z itself is closed under removing
    first letters; together: every value stays inside the base letters.
    """
    require_s2_form(s2)
    letters = base_letters(s2)
    if len(letters) < 2:
        raise InvalidInput("need a base letter besides the pad letter")
    alphabet = s2.alphabet
    eps = epsilon(alphabet)
    if any(v.name == CONTROL_NAME for v in s2.variables()):
        raise InvalidInput("control variable name is reserved")
    first, *rest = s2.equations
    halves = (
        LangEquation(first.lhs, first.rhs, inequality=True),
        LangEquation(first.rhs, first.lhs, inequality=True),
        *rest,
    )
    combined = combine_to_single(
        LangSystem(alphabet, halves, "monoid", letters, tuple(s2.variables()))
    ).equations[0]
    folded = LangEquation(add_terms(combined.lhs, combined.rhs), combined.rhs)
    if any(len(u) == 0 for u, _ in folded.lhs.summands + folded.rhs.summands):
        # unreachable for require_s2_form inputs (the two X0 halves force a
        # prefix code); kept so the shape contract holds for any caller
        folded = LangEquation(
            prefix_term(pad_letter(s2), folded.lhs),
            prefix_term(pad_letter(s2), folded.rhs),
        )
    z = lang_var(CONTROL_NAME)
    a_terms = [(Word(alphabet, [a]), z) for a in sorted(letters)]
    control = LangEquation(
        make_term(
            alphabet,
            [eps],
            [(eps, z)] + a_terms + [(eps, v) for v in s2.variables()],
        ),
        make_term(alphabet, [eps], a_terms),
    )
    return LangSystem(
        alphabet,
        (folded, control),
        "monoid",
        letters,
        tuple(s2.variables()) + (z,),
    )


def control_witness(
    sprime: LangSystem, sigma: Mapping[VarSymbol, WordSet]
) -> dict[VarSymbol, WordSet]:
    """Extend a solution of the glued equation by the control value: every
    suffix of every value.  For prefix-closed values this is their factor
    closure, so the result is again prefix-closed."""
    z = lang_var(CONTROL_NAME)
    suffixes: set[tuple[int, ...]] = {()}
    out: dict[VarSymbol, WordSet] = {}
    for v in sprime.variables():
        if v == z:
            continue
        if v not in sigma:
            raise InvalidInput(f"witness misses variable {v.display()!r}")
        out[v] = sigma[v]
        for w in sigma[v]:
            suffixes.update(w.letters[i:] for i in range(len(w) + 1))
    out[z] = WordSet(sprime.alphabet, [Word(sprime.alphabet, t) for t in suffixes])
    return out


def fim_encode(sprime: LangSystem) -> TypedSystem:
    """Encode each side as W(T) = prod_{u in L} u ubar prod_i u_i X_i ubar_i
    with the X_i idempotent; constants in set order, summands in term order.

    A solution of the language system in nonempty prefix-closed sets gives
    the trees of an idempotent solution, and conversely the trees of any
    idempotent solution solve the language system over the group of reduced
    words.
    """
    if len(sprime.equations) != 2:
        raise PreconditionError("expected exactly two equations")
    for eq in sprime.equations:
        if eq.inequality or eq.marked:
            raise PreconditionError("plain unmarked equalities only")
    alphabet = sprime.alphabet

    def encode(term: LangTerm) -> EqWord:
        toks: list[object] = []
        for u in term.constant:
            toks.extend(u.letters)
            toks.extend(involute(u).letters)
        for u, v in term.summands:
            toks.extend(u.letters)
            toks.append(VarSymbol(v.name, "idempotent"))
            toks.extend(involute(u).letters)
        return EqWord(alphabet, toks)

    eqs = tuple((encode(eq.lhs), encode(eq.rhs)) for eq in sprime.equations)
    variables: list[VarSymbol] = []
    for lhs, rhs in eqs:
        for v in lhs.variables() + rhs.variables():
            if v not in variables:
                variables.append(v)
    return TypedSystem(alphabet, tuple(variables), eqs)


def fim_forward_witness(
    sprime: LangSystem, sigma: Mapping[VarSymbol, WordSet]
) -> dict[VarSymbol, ScheiblichPair]:
    """Nonempty prefix-closed language values become idempotent pairs."""
    eps = epsilon(sprime.alphabet)
    out: dict[VarSymbol, ScheiblichPair] = {}
    for v in sprime.variables():
        if v not in sigma:
            raise InvalidInput(f"witness misses variable {v.display()!r}")
        out[VarSymbol(v.name, "idempotent")] = ScheiblichPair(sigma[v], eps)
    return out


def full_hardness_chain(
    system: LangSystem,
) -> tuple[TypedSystem, list[SurgeryReport]]:
    """Compose the four stages, reporting fresh symbols per stage."""
    steps: tuple[tuple[str, Callable], ...] = (
        ("s1", normalize_s1),
        ("s2", pad_s2),
        ("sprime", alphabet_control),
        ("fim", fim_encode),
    )
    reports: list[SurgeryReport] = []
    current: object = system
    for stage, step in steps:
        try:
            after = step(current)
        except FimeqError as err:
            raise type(err)(f"{stage}: {err}") from err
        reports.append(SurgeryReport(stage, current, after, _fresh_vars(current, after)))
        current = after
    return current, reports


def _vars_of(obj: object) -> list[VarSymbol]:
    if isinstance(obj, TypedSystem):
        return list(obj.variables)
    return list(obj.variables())


def _fresh_vars(before: object, after: object) -> tuple[VarSymbol, ...]:
    names = {v.name for v in _vars_of(before)}
    return tuple(v for v in _vars_of(after) if v.name not in names)
