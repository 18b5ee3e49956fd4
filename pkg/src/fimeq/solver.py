"""Bounded decision procedures for language-equation systems.

Two engines decide satisfiability within a word-length budget: brute_force
enumerates assignments outright and serves as the oracle; bounded_solve
encodes per-word membership into CNF and runs a small DPLL loop, reaching
the same verdicts much faster.  On top of them, decompose_simple rewrites a
system whose constants are prefix-closed into the four simple equation
shapes, marking_reduction enumerates the guess tree that turns a group
system into fully marked (monoid) systems, and solve_over_group chains the
three with witness reconstruction.

Verdicts are three-valued.  UNSAT_WITHIN_BOUND is not an unconditional
refutation: a solution using longer words may exist.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterator, Mapping

from .equations import VarSymbol
from .errors import BudgetExceeded, InvalidInput, PreconditionError
from .langeq import (
    LangEquation,
    LangSystem,
    LangTerm,
    holds,
    lang_var,
    make_term,
)
from .words import (
    InvAlphabet,
    Word,
    WordSet,
    epsilon,
    prefix_closure,
    reduce_set,
    reduce_word,
    reduced_words_upto,
    words_upto,
)

SAT = "SAT"
UNSAT_WITHIN_BOUND = "UNSAT_WITHIN_BOUND"
UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class SolverBudget:
    max_len: int = 3
    max_branches: int = 10_000
    time_limit_ms: "int | None" = None
    max_group_len: "int | None" = None

    def __post_init__(self) -> None:
        if self.max_len < 0:
            raise InvalidInput("max_len must be >= 0")
        if self.max_branches < 1:
            raise InvalidInput("max_branches must be positive")


@dataclass(frozen=True)
class Verdict:
    status: str
    witness: "dict[VarSymbol, WordSet] | None" = None
    trace: tuple[str, ...] = ()


class _Deadline:
    def __init__(self, ms: "int | None"):
        self.limit = None if ms is None else time.monotonic() + ms / 1000.0

    def expired(self) -> bool:
        return self.limit is not None and time.monotonic() > self.limit


@lru_cache(maxsize=None)
def _pool(
    alphabet: InvAlphabet, max_len: int, reduced: bool, letters: "frozenset[int] | None"
) -> tuple[Word, ...]:
    gen = reduced_words_upto(alphabet, max_len) if reduced else words_upto(alphabet, max_len)
    if letters is None:
        return tuple(gen)
    return tuple(w for w in gen if set(w.letters) <= letters)


def _universe(
    system: LangSystem,
    budget: SolverBudget,
    name_caps: "Mapping[str, int] | None",
    var: VarSymbol,
    reduced: "bool | None" = None,
) -> tuple[Word, ...]:
    cap = budget.max_len if name_caps is None else name_caps.get(var.name, budget.max_len)
    if reduced is None:
        reduced = system.interp == "group"
    return _pool(system.alphabet, cap, reduced, system.coeff_letters)


def brute_force(system: LangSystem, budget: SolverBudget) -> Verdict:
    """Enumerate assignments of subsets of bounded-length words.

    The group interpretation searches reduced words only; this loses no
    solutions since evaluation reduces elementwise anyway.
    """
    deadline = _Deadline(budget.time_limit_ms)
    variables = system.variables()
    pools = [_universe(system, budget, None, v) for v in variables]
    masks = [0] * len(variables)
    tried = 0
    while True:
        tried += 1
        if tried > budget.max_branches or (tried % 256 == 0 and deadline.expired()):
            return Verdict(UNKNOWN, trace=(f"brute_force: budget after {tried - 1} assignments",))
        sigma = {
            v: WordSet(system.alphabet, [p[i] for i in range(len(p)) if (m >> i) & 1])
            for v, p, m in zip(variables, pools, masks)
        }
        if holds(system, sigma):
            return Verdict(SAT, sigma, (f"brute_force: SAT after {tried} assignments",))
        # odometer over the per-variable subset masks
        for slot in range(len(variables)):
            masks[slot] += 1
            if masks[slot] < (1 << len(pools[slot])):
                break
            masks[slot] = 0
        else:
            return Verdict(
                UNSAT_WITHIN_BOUND, trace=(f"brute_force: exhausted {tried} assignments",)
            )


# ---------------------------------------------------------------------------
# Simple equation shapes: X = 1, X = Y + Z, X = u Y + pref(u), X = 1 + X.


def _var_term(alphabet: InvAlphabet, v: VarSymbol) -> LangTerm:
    return make_term(alphabet, summands=[(epsilon(alphabet), v)])


def one_equation(alphabet: InvAlphabet, x: VarSymbol) -> LangEquation:
    return LangEquation(_var_term(alphabet, x), make_term(alphabet, [epsilon(alphabet)]))


def union_equation(alphabet: InvAlphabet, x: VarSymbol, y: VarSymbol, z: VarSymbol) -> LangEquation:
    rhs = make_term(alphabet, summands=[(epsilon(alphabet), y), (epsilon(alphabet), z)])
    return LangEquation(_var_term(alphabet, x), rhs)


def shift_equation(alphabet: InvAlphabet, x: VarSymbol, u: Word, y: VarSymbol) -> LangEquation:
    if not u.is_reduced():
        raise InvalidInput("shift coefficient must be reduced")
    rhs = make_term(alphabet, prefix_closure(WordSet(alphabet, [u])), [(u, y)])
    return LangEquation(_var_term(alphabet, x), rhs)


def nonempty_equation(alphabet: InvAlphabet, x: VarSymbol) -> LangEquation:
    rhs = make_term(alphabet, [epsilon(alphabet)], [(epsilon(alphabet), x)])
    return LangEquation(_var_term(alphabet, x), rhs)


def classify_simple(eq: LangEquation) -> "tuple | None":
    """Recognize the four shapes; None for anything else."""
    lhs, rhs = eq.lhs, eq.rhs
    if eq.inequality or len(lhs.constant.words) != 0 or len(lhs.summands) != 1:
        return None
    coeff, x = lhs.summands[0]
    if len(coeff) != 0:
        return None
    consts = rhs.constant
    if len(rhs.summands) == 0 and consts.words == (epsilon(lhs.alphabet),):
        return ("one", x)
    if len(rhs.summands) == 2 and len(consts.words) == 0:
        (c1, y), (c2, z) = rhs.summands
        if len(c1) == 0 and len(c2) == 0:
            return ("union", x, y, z)
    if len(rhs.summands) == 1:
        u, y = rhs.summands[0]
        if u.is_reduced() and consts.tuple_set == prefix_closure(
            WordSet(lhs.alphabet, [u])
        ).tuple_set:
            if y == x and len(u) == 0:
                return ("nonempty", x)
            return ("shift", x, u, y)
    return None


# ---------------------------------------------------------------------------
# Normalization into simple form.


def _validate_normal_form(system: LangSystem) -> None:
    for eq in system.equations:
        if eq.marked or eq.inequality:
            raise InvalidInput("normalization expects plain equalities")
        for term in (eq.lhs, eq.rhs):
            if len(term.constant.words) == 0:
                raise InvalidInput("each side needs a nonempty constant set")
            if not term.constant.all_reduced() or not term.constant.is_prefix_closed():
                raise InvalidInput("constant sets must be prefix-closed sets of reduced words")
            for coeff, _ in term.summands:
                if coeff.letters not in term.constant.tuple_set:
                    raise InvalidInput("every coefficient must belong to its constant set")


def _chain(
    alphabet: InvAlphabet,
    head: VarSymbol,
    parts: "list[tuple[VarSymbol, int]]",
    prefix: str,
    cap: int,
    caps: "dict[str, int]",
) -> list[LangEquation]:
    """head = part_1 + ... + part_m through fresh binary unions."""
    out: list[LangEquation] = []
    names = [p for p, _ in parts]
    for v, c in parts:
        caps[v.name] = min(c, cap)
    rest = names
    current = head
    while len(rest) > 2:
        fresh = lang_var(f"{prefix}.{len(out)}")
        caps[fresh.name] = cap
        out.append(union_equation(alphabet, current, rest[0], fresh))
        current, rest = fresh, rest[1:]
    if len(rest) == 2:
        out.append(union_equation(alphabet, current, rest[0], rest[1]))
    else:
        # a single part: X = W + W says X = W
        out.append(union_equation(alphabet, current, rest[0], rest[0]))
    return out


def _decompose(system: LangSystem, max_len: int) -> tuple[LangSystem, dict[str, int]]:
    _validate_normal_form(system)
    alphabet = system.alphabet
    if any(v.name.startswith("$") for v in system.variables()):
        raise InvalidInput("variable names starting with $ are reserved")
    x0 = lang_var("$X0")
    caps: dict[str, int] = {v.name: max_len for v in system.variables()}
    caps[x0.name] = 0
    equations: list[LangEquation] = [one_equation(alphabet, x0)]
    for k, eq in enumerate(system.equations, start=1):
        head = lang_var(f"$E{k}")
        side_caps = []
        side_parts = []
        for tag, term in (("L", eq.lhs), ("R", eq.rhs)):
            parts: list[tuple[Word, VarSymbol]] = [(w, x0) for w in term.constant]
            parts += list(term.summands)
            caps_here = [len(u) + caps[v.name] for u, v in parts]
            side_caps.append(max(caps_here))
            side_parts.append((tag, parts, caps_here))
        caps[head.name] = min(side_caps)
        for tag, parts, caps_here in side_parts:
            terms: list[tuple[VarSymbol, int]] = []
            for t, ((u, v), c) in enumerate(zip(parts, caps_here)):
                w_var = lang_var(f"$T{k}{tag}{t}")
                equations.append(shift_equation(alphabet, w_var, u, v))
                terms.append((w_var, c))
            equations.extend(
                _chain(alphabet, head, terms, f"$C{k}{tag}", caps[head.name], caps)
            )
    for v in sorted({v.name for v in system.variables()} | {x0.name}
                    | {e.name for e in _fresh_of(equations)}):
        equations.append(nonempty_equation(alphabet, lang_var(v)))
    out = LangSystem(alphabet, tuple(equations), system.interp, system.coeff_letters)
    return out, caps


def _fresh_of(equations: list[LangEquation]) -> list[VarSymbol]:
    seen: list[VarSymbol] = []
    for eq in equations:
        for v in eq.variables():
            if v not in seen:
                seen.append(v)
    return seen


def decompose_simple(system: LangSystem, max_len: int = 3) -> LangSystem:
    """Rewrite into the four simple shapes, satisfiability-equivalent.

    Expects every constant set to be prefix-closed, reduced, and to contain
    all coefficients of its side.  Adds X = 1 + X for every variable, which
    pins the empty word into every solution set.
    """
    return _decompose(system, max_len)[0]


# ---------------------------------------------------------------------------
# The marking guess tree.


@dataclass(frozen=True)
class Branch:
    system: LangSystem
    var_lengths: "dict[str, int] | None"
    guesses: tuple[str, ...] = field(default=())


def _mark(eq: LangEquation) -> LangEquation:
    return LangEquation(eq.lhs, eq.rhs, marked=True, inequality=eq.inequality)


def _split_target(eqs: "tuple[LangEquation, ...]") -> "tuple[int, tuple] | None":
    for i, eq in enumerate(eqs):
        if eq.marked:
            continue
        shape = classify_simple(eq)
        if shape is None:
            raise PreconditionError("unmarked equation is not in simple form")
        if shape[0] == "shift" and len(shape[2]) > 0:
            return i, shape
    return None


def _mark_trivial(eqs: "tuple[LangEquation, ...]") -> "tuple[LangEquation, ...]":
    out = []
    for eq in eqs:
        if not eq.marked:
            shape = classify_simple(eq)
            if shape is None:
                raise PreconditionError("unmarked equation is not in simple form")
            if shape[0] != "shift" or len(shape[2]) == 0:
                eq = _mark(eq)
        out.append(eq)
    return tuple(out)


def marking_reduction(
    system: LangSystem, var_lengths: "Mapping[str, int] | None" = None
) -> Iterator[Branch]:
    """Enumerate the guess tree depth-first, cheap branch first.

    Each yielded system is fully marked.  Guessing "abar not in Y" marks the
    equation in place; guessing "abar in Y" splits Y and rewrites the
    equation through four fresh variables.  The in-branch is skipped when Y
    is pinned to {eps} by an X = 1 equation (or by a zero length cap), where
    it cannot hold.
    """
    if system.interp != "group":
        raise PreconditionError("marking applies to group-interpreted systems")
    if var_lengths is not None:
        missing = [v.name for v in system.variables() if v.name not in var_lengths]
        if missing:
            raise InvalidInput(f"length caps missing for {missing}")
    alphabet = system.alphabet

    def pinned(eqs: tuple[LangEquation, ...], y: VarSymbol) -> bool:
        return any(classify_simple(eq) == ("one", y) for eq in eqs)

    def go(
        eqs: tuple[LangEquation, ...],
        caps: "dict[str, int] | None",
        guesses: tuple[str, ...],
    ) -> Iterator[Branch]:
        eqs = _mark_trivial(eqs)
        found = _split_target(eqs)
        if found is None:
            yield Branch(LangSystem(alphabet, eqs, "group", system.coeff_letters), caps, guesses)
            return
        i, (_, x, u, y) = found
        v_word, a = u[: len(u) - 1], u.letters[-1]
        abar = alphabet.bar_of[a]
        abar_text = alphabet.tokens[abar]
        marked_eqs = eqs[:i] + (_mark(eqs[i]),) + eqs[i + 1 :]
        yield from go(marked_eqs, caps, guesses + (f"{abar_text} not in {y.name}",))
        if pinned(eqs, y) or (caps is not None and caps.get(y.name, 0) < 1):
            return
        k = len(guesses) + 1
        y1 = lang_var(f"{y.name}'@{k}")
        y2 = lang_var(f"{y.name}''@{k}")
        x1 = lang_var(f"{x.name}'@{k}")
        x2 = lang_var(f"{x.name}''@{k}")
        abar_word = Word(alphabet, (abar,))
        split_y = LangEquation(
            _var_term(alphabet, y),
            make_term(
                alphabet,
                prefix_closure(WordSet(alphabet, [abar_word])),
                [(epsilon(alphabet), y1), (abar_word, y2)],
            ),
            marked=True,
        )
        new_caps = caps
        if caps is not None:
            new_caps = dict(caps)
            new_caps[y1.name] = caps[y.name]
            new_caps[y2.name] = caps[y.name] - 1
            new_caps[x1.name] = min(caps[x.name], len(u) + new_caps[y1.name])
            new_caps[x2.name] = min(caps[x.name], len(v_word) + new_caps[y2.name])
        replaced = (
            split_y,
            _mark(union_equation(alphabet, x, x1, x2)),
            _mark(shift_equation(alphabet, x1, u, y1)),
            shift_equation(alphabet, x2, v_word, y2),
        )
        new_eqs = eqs[:i] + replaced + eqs[i + 1 :]
        yield from go(new_eqs, new_caps, guesses + (f"{abar_text} in {y.name}",))

    yield from go(system.equations, dict(var_lengths) if var_lengths is not None else None, ())


# ---------------------------------------------------------------------------
# CNF + DPLL bounded solver.


def _image(alphabet: InvAlphabet, coeff: Word, w: Word, reduced: bool) -> tuple:
    if reduced:
        return reduce_word(coeff.concat(w)).letters
    return coeff.letters + w.letters


def _term_producers(
    term: LangTerm, universes: dict[VarSymbol, list[Word]], reduced: bool
) -> dict[tuple, "set[tuple[VarSymbol, tuple]] | None"]:
    """Map each producible word to its producer literals; None marks words
    the constant part always contributes."""
    prods: dict[tuple, "set | None"] = {}
    for w in term.constant:
        t = reduce_word(w).letters if reduced else w.letters
        prods[t] = None
    for coeff, var in term.summands:
        for w in universes[var]:
            t = _image(term.alphabet, coeff, w, reduced)
            if prods.get(t, ()) is None:
                continue
            prods.setdefault(t, set()).add((var, w.letters))
    return prods


def _equation_views(eq: LangEquation, interp: str) -> list[tuple[bool, bool]]:
    # (reduced?, subset-only?) encodings this equation contributes
    views = [(interp == "group", eq.inequality)]
    if eq.marked and interp == "group":
        views.append((False, eq.inequality))
    return views


def _prune_universes(
    system: LangSystem, universes: dict[VarSymbol, list[Word]]
) -> "bool | None":
    """Drop words that a producer-side cannot match; None means unsatisfiable."""
    # keyed by letter tuples: universes shrink one word at a time, and Word
    # comparisons inside the fixpoint sweep would make that quadratic
    index = {v: {w.letters: w for w in words} for v, words in universes.items()}
    changed = True
    while changed:
        changed = False
        for eq in system.equations:
            for reduced, subset_only in _equation_views(eq, system.interp):
                lp = _term_producers(eq.lhs, universes, reduced)
                rp = _term_producers(eq.rhs, universes, reduced)
                sides = [(lp, rp)] if subset_only else [(lp, rp), (rp, lp)]
                dirty = False
                for src, dst in sides:
                    for t, producers in src.items():
                        if t in dst:
                            continue
                        if producers is None:
                            return None
                        for var, letters in producers:
                            if letters in index[var]:
                                del index[var][letters]
                                dirty = changed = True
                if dirty:
                    for var in index:
                        universes[var] = list(index[var].values())
    return True


def _encode(
    system: LangSystem, universes: dict[VarSymbol, list[Word]]
) -> "tuple[int, list[tuple[int, ...]], dict[tuple, int]] | None":
    ids: dict[tuple, int] = {}
    for var in universes:
        for w in universes[var]:
            ids[(var, w.letters)] = len(ids) + 1
    clauses: list[tuple[int, ...]] = []
    for eq in system.equations:
        for reduced, subset_only in _equation_views(eq, system.interp):
            lp = _term_producers(eq.lhs, universes, reduced)
            rp = _term_producers(eq.rhs, universes, reduced)
            pairs = [(lp, rp)] if subset_only else [(lp, rp), (rp, lp)]
            for src, dst in pairs:
                for t, producers in src.items():
                    other = dst.get(t, set())
                    if other is None:
                        continue
                    support = sorted(ids[key] for key in other)
                    if producers is None:
                        if not support:
                            return None
                        clauses.append(tuple(support))
                    else:
                        for key in producers:
                            clauses.append((-ids[key], *support))
    return len(ids), clauses, ids


def _dpll(
    n_vars: int,
    clauses: list[tuple[int, ...]],
    deadline: _Deadline,
    node_cap: int,
) -> "list[bool] | None":
    assign: dict[int, bool] = {}
    occurrences: dict[int, list[int]] = {}
    for idx, cl in enumerate(clauses):
        for lit in cl:
            occurrences.setdefault(lit, []).append(idx)
    trail: list[int] = []
    nodes = 0

    def value(lit: int) -> "bool | None":
        v = assign.get(abs(lit))
        if v is None:
            return None
        return v if lit > 0 else not v

    def propagate(queue: list[int]) -> bool:
        while queue:
            lit = queue.pop()
            if value(lit) is False:
                return False
            if value(lit) is True:
                continue
            assign[abs(lit)] = lit > 0
            trail.append(abs(lit))
            for idx in occurrences.get(-lit, ()):  # clauses losing a literal
                cl = clauses[idx]
                unassigned = None
                satisfied = False
                for other in cl:
                    val = value(other)
                    if val is True:
                        satisfied = True
                        break
                    if val is None:
                        if unassigned is not None:
                            unassigned = 0
                            break
                        unassigned = other
                if satisfied or unassigned == 0:
                    continue
                if unassigned is None:
                    return False
                queue.append(unassigned)
        return True

    def units() -> "list[int] | None":
        out = []
        for cl in clauses:
            unassigned = None
            satisfied = False
            for lit in cl:
                val = value(lit)
                if val is True:
                    satisfied = True
                    break
                if val is None:
                    if unassigned is not None:
                        unassigned = 0
                        break
                    unassigned = lit
            if satisfied or unassigned == 0:
                continue
            if unassigned is None:
                return None
            out.append(unassigned)
        return out

    def solve() -> bool:
        nonlocal nodes
        nodes += 1
        if nodes > node_cap or deadline.expired():
            raise BudgetExceeded("bounded_solve budget exhausted")
        start = units()
        if start is None or not propagate(start):
            return False
        pick = next((v for v in range(1, n_vars + 1) if v not in assign), None)
        if pick is None:
            return True
        for polarity in (False, True):
            mark = len(trail)
            if propagate([pick if polarity else -pick]) and solve():
                return True
            while len(trail) > mark:
                assign.pop(trail.pop())
        return False

    if not solve():
        return None
    return [assign.get(v, False) for v in range(1, n_vars + 1)]


def bounded_solve(
    system: LangSystem,
    budget: SolverBudget,
    var_lengths: "Mapping[str, int] | None" = None,
    reduced_universe: "bool | None" = None,
) -> Verdict:
    """Exact within the length bounds; agrees with brute_force by design.

    Membership of each bounded-length word in each solution set becomes one
    Boolean; equations become equivalences between producer disjunctions.
    reduced_universe=True narrows the search to reduced words, which is
    complete only when some all-reduced solution must exist (as for the
    fully marked systems produced by the marking reduction).
    """
    deadline = _Deadline(budget.time_limit_ms)
    variables = system.variables()
    universes = {
        v: list(_universe(system, budget, var_lengths, v, reduced_universe))
        for v in variables
    }
    if _prune_universes(system, universes) is None:
        return Verdict(UNSAT_WITHIN_BOUND, trace=("bounded_solve: pruned to empty",))
    encoded = _encode(system, universes)
    if encoded is None:
        return Verdict(UNSAT_WITHIN_BOUND, trace=("bounded_solve: constant mismatch",))
    n_vars, clauses, ids = encoded
    try:
        model = _dpll(n_vars, clauses, deadline, budget.max_branches)
    except BudgetExceeded:
        return Verdict(UNKNOWN, trace=("bounded_solve: budget exhausted",))
    trace = (f"bounded_solve: {n_vars} booleans, {len(clauses)} clauses",)
    if model is None:
        return Verdict(UNSAT_WITHIN_BOUND, trace=trace)
    sigma = {
        v: WordSet(
            system.alphabet,
            [Word(system.alphabet, key[1]) for key, i in ids.items()
             if key[0] == v and model[i - 1]],
        )
        for v in variables
    }
    if not holds(system, sigma):
        raise AssertionError("bounded_solve produced a non-solution")
    return Verdict(SAT, sigma, trace)


def _reduce_coefficients(system: LangSystem) -> LangSystem:
    """Reduce all constants and coefficients elementwise.

    Exact for unmarked systems under the group interpretation, where each
    produced word is reduced before comparison anyway.
    """
    def red_term(t: LangTerm) -> LangTerm:
        return LangTerm(
            t.alphabet,
            WordSet(t.alphabet, [reduce_word(w) for w in t.constant]),
            tuple((reduce_word(u), v) for u, v in t.summands),
        )

    eqs = tuple(
        LangEquation(red_term(eq.lhs), red_term(eq.rhs), eq.marked, eq.inequality)
        for eq in system.equations
    )
    return LangSystem(system.alphabet, eqs, system.interp, system.coeff_letters,
                      system.declared_vars)


def solve_over_group(system: LangSystem, budget: SolverBudget) -> Verdict:
    """Decide a group-interpreted system in nonempty prefix-closed sets.

    Constants and coefficients are first reduced elementwise (exact over the
    group).  The system is then decomposed into simple shapes, the marking
    guess tree is walked, each fully marked branch is solved over the
    monoid, and a monoid witness is lifted back: prefix-close, restrict to
    the original variables, reduce, re-verify.
    """
    if system.interp != "group":
        raise PreconditionError("solve_over_group needs the group interpretation")
    if any(eq.marked for eq in system.equations):
        raise PreconditionError("marked equations have monoid semantics already")
    deadline = _Deadline(budget.time_limit_ms)
    simple, caps = _decompose(_reduce_coefficients(system), budget.max_len)
    trace = [f"decompose: {len(system.equations)} -> {len(simple.equations)} equations"]
    branches = 0
    saw_unknown = False
    for branch in marking_reduction(simple, caps):
        branches += 1
        if branches > budget.max_branches or deadline.expired():
            return Verdict(UNKNOWN, trace=(*trace, f"branch cap at {branches}"))
        monoid_system = LangSystem(
            branch.system.alphabet,
            tuple(LangEquation(e.lhs, e.rhs, marked=False, inequality=e.inequality)
                  for e in branch.system.equations),
            "monoid",
            branch.system.coeff_letters,
        )
        verdict = bounded_solve(monoid_system, budget, branch.var_lengths,
                                reduced_universe=True)
        if verdict.status == UNKNOWN:
            saw_unknown = True
            continue
        if verdict.status != SAT:
            continue
        assert verdict.witness is not None
        closed = {v: prefix_closure(ws) for v, ws in verdict.witness.items()}
        if not holds(monoid_system, closed):
            raise AssertionError("prefix closure must preserve marked solutions")
        final = {
            v: reduce_set(closed[v])
            for v in system.variables()
        }
        if not holds(system, final):
            raise AssertionError("restricted witness failed re-verification")
        trace.append(f"branch {branches} SAT: " + "; ".join(branch.guesses))
        return Verdict(SAT, final, tuple(trace))
    trace.append(f"{branches} branches explored")
    if saw_unknown:
        return Verdict(UNKNOWN, trace=tuple(trace))
    return Verdict(UNSAT_WITHIN_BOUND, trace=tuple(trace))
