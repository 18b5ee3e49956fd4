"""One-variable equations: balance certificates and a bounded decision.

Everything revolves around the signed count of the variable pair x, ~x over
prefixes.  Two words in the pair alone define the same monoid element exactly
when their total and their highest and lowest prefix counts agree, so an
equation whose projections disagree on one of the three numbers, and whose
group images differ as patterns, is unbalanced.  The group-image condition is
mandatory: X ~X = eps projects to an unbalanced pair of counts but is solved
by any idempotent, and only the pattern test separates the two situations.

An untyped equation in one general variable X reduces to a typed one by the
split X -> xZ or X -> Zx with x a fresh reduced variable and Z a fresh
idempotent: every monoid element (P, g) factors both ways, with Z carrying
the translated tree, so the split is satisfiability-preserving in both
directions.  The bare substitution X -> x is not, even when the totals
already differ: X = a~a has the idempotent solution with tree {eps, a} and
no word-shaped one, so the total-count case uses the split form as well; the
count argument that certifies SU1 is unaffected.

Deciding a typed system with a strongly unbalanced equation: group values of
the variable form finitely many families r q^k s with cancellation-free
products.  Families are enumerated up to |rqs| <= C*n and accepted when a
window of exponents solves the group projection; acceptance is heuristic,
but every candidate is re-checked against every group projection and every
SAT witness is re-verified in the monoid, so the heuristic can only cost
completeness, which the exhaustive tests exercise.  Within a family with
period q = p^e, a solution at exponent k obeys |ek| <= 6m|p| for the
substituted system size m, so the sweep per family is finite.
"""

from __future__ import annotations

from dataclasses import dataclass

from .equations import (
    Assignment,
    EqWord,
    TypedSystem,
    VarSymbol,
    check_solution,
    involute_eq_word,
    reduce_pattern,
    substitute_group_solution,
    substitute_tokens,
    underlying_group_equation,
)
from .errors import InvalidInput, PreconditionError
from .fim import word_problem
from .pipeline import decide_idempotent_system
from .solver import SAT, UNKNOWN, UNSAT_WITHIN_BOUND, SolverBudget, Verdict
from .words import (
    InvAlphabet,
    ReducedWord,
    Word,
    concat_group,
    epsilon,
    group_power,
    involute,
    is_cyclically_reduced,
    primitive_root,
    reduced_words_upto,
)

_PAIR = InvAlphabet.from_base(("x",))


@dataclass(frozen=True)
class BalanceProfile:
    """Total, highest and lowest signed prefix count of the variable."""

    total: int
    max_prefix: int
    min_prefix: int

    def __post_init__(self) -> None:
        if not self.min_prefix <= 0 <= self.max_prefix:
            raise InvalidInput("prefix extremes must bracket zero")
        if not self.min_prefix <= self.total <= self.max_prefix:
            raise InvalidInput("total must lie between the prefix extremes")


def _pair_letters(u: EqWord) -> tuple[int, ...]:
    """Encode a word over one variable pair as letters of the two-letter
    alphabet; rejects letters, idempotents and mixed pairs."""
    base = None
    letters: list[int] = []
    for t in u.tokens:
        if isinstance(t, int) or t.kind == "idempotent":
            raise InvalidInput("expected a word over one variable pair")
        if base is None:
            base = t.base()
        elif t.base() != base:
            raise InvalidInput("more than one variable pair")
        letters.append(1 if t.barred else 0)
    return tuple(letters)


def balance_profile(u: EqWord) -> BalanceProfile:
    """Scan the signed count of the pair over every prefix of u."""
    total = high = low = 0
    for sign in _pair_letters(u):
        total += -1 if sign else 1
        high = max(high, total)
        low = min(low, total)
    return BalanceProfile(total, high, low)


def is_balanced(u: EqWord, v: EqWord) -> bool:
    """Do u and v define the same element of the monoid over the pair?

    Equivalent to equality of the two balance profiles; decided through the
    word problem so the profile characterisation stays testable against it.
    """
    lu, lv = _pair_letters(u), _pair_letters(v)
    if lu and lv:
        bases = {t.base() for w in (u, v) for t in w.tokens}
        if len(bases) > 1:
            raise InvalidInput("more than one variable pair")
    return word_problem(Word(_PAIR, lu), Word(_PAIR, lv))


def _projection(side: EqWord) -> EqWord:
    return EqWord(side.alphabet, [t for t in side.tokens if isinstance(t, VarSymbol)])


def _require_untyped(sides: "tuple[EqWord, ...]") -> "VarSymbol | None":
    base = None
    for side in sides:
        for t in side.tokens:
            if isinstance(t, int):
                continue
            if t.kind != "general":
                raise InvalidInput("untyped equations use one general variable pair")
            if base is None:
                base = t.base()
            elif t.base() != base:
                raise InvalidInput("more than one variable pair")
    return base


def _require_typed(sides: "tuple[EqWord, ...]") -> "VarSymbol | None":
    base = None
    for side in sides:
        for t in side.tokens:
            if isinstance(t, int) or t.kind == "idempotent":
                continue
            if t.kind == "general":
                raise PreconditionError("split general variables first")
            if base is None:
                base = t.base()
            elif t.base() != base:
                raise InvalidInput("at most one reduced variable")
    return base


def _require_fixed_point_free(alphabet: InvAlphabet) -> None:
    if not alphabet.fixed_point_free:
        raise InvalidInput("one-variable analysis needs a fixed-point-free involution")


def is_unbalanced_untyped(lhs: EqWord, rhs: EqWord) -> bool:
    """Unbalanced projections plus differing group-image patterns.

    The second condition is not optional: it is what rules out equations like
    X ~X = eps whose projections disagree but which any idempotent solves.
    """
    _require_fixed_point_free(lhs.alphabet)
    _require_untyped((lhs, rhs))
    if reduce_pattern(lhs) == reduce_pattern(rhs):
        return False
    return not is_balanced(_projection(lhs), _projection(rhs))


def _delta(side: EqWord) -> int:
    d = 0
    for t in side.tokens:
        if isinstance(t, VarSymbol) and t.kind != "idempotent":
            d += -1 if t.barred else 1
    return d


def _prefix_bests(side: EqWord, sign: int) -> "dict[object, int]":
    """Best signed prefix count per marker: key None ranges over all
    prefixes, an idempotent key over the prefixes ending just before it."""
    bests: dict[object, int] = {None: 0}
    d = 0
    for t in side.tokens:
        if isinstance(t, int):
            continue
        if t.kind == "idempotent":
            if t not in bests or bests[t] < d:
                bests[t] = d
        else:
            d += -sign if t.barred else sign
            if bests[None] < d:
                bests[None] = d
    return bests


def _su_condition(lhs: EqWord, rhs: EqWord, barred: bool) -> bool:
    # every marker reachable on the right must be beaten strictly on the left
    sign = -1 if barred else 1
    left = _prefix_bests(lhs, sign)
    right = _prefix_bests(rhs, sign)
    return all(z in left and left[z] > best for z, best in right.items())


def strong_unbalance_kind(lhs: EqWord, rhs: EqWord) -> str:
    """Which certificate the typed pair carries: SU1, SU2, SU3 or none.

    SU1 is a plain mismatch of the totals.  SU2 asks, for the empty marker
    and for every idempotent, that some prefix of the left side strictly
    beats every same-marked prefix of the right side in the count of x; SU3
    is the same with ~x.  All three presuppose that the group images differ
    as patterns, otherwise the answer is none regardless of the counts.
    """
    _require_fixed_point_free(lhs.alphabet)
    _require_typed((lhs, rhs))
    glhs, grhs = underlying_group_equation((lhs, rhs))
    if reduce_pattern(glhs) == reduce_pattern(grhs):
        return "none"
    if _delta(lhs) != _delta(rhs):
        return "SU1"
    if _su_condition(lhs, rhs, barred=False):
        return "SU2"
    if _su_condition(lhs, rhs, barred=True):
        return "SU3"
    return "none"


def reduce_to_strong(system: TypedSystem) -> TypedSystem:
    """Turn an untyped system with an unbalanced equation into a typed one
    carrying a strongly unbalanced equation, preserving satisfiability.

    The first unbalanced equation is the designated one.  Its projections
    must disagree on the total (SU1 after splitting), the maximum (SU2, with
    the sides swapped when the right one is higher) or the minimum (SU3, on
    the involuted sides, swapped when the left minimum is higher).  The
    splits X -> xZ and X -> Zx are used throughout; the certificate the
    designated equation ends up carrying is asserted, not assumed.
    """
    _require_fixed_point_free(system.alphabet)
    var = _require_untyped(tuple(s for eq in system.equations for s in eq))
    designated = None
    for i, (lhs, rhs) in enumerate(system.equations):
        if is_unbalanced_untyped(lhs, rhs):
            designated = i
            break
    if designated is None:
        raise PreconditionError("no unbalanced equation found")
    assert var is not None
    lhs, rhs = system.equations[designated]
    pu = balance_profile(_projection(lhs))
    pv = balance_profile(_projection(rhs))
    x = VarSymbol(f"x@{var.name}", "reduced")
    z = VarSymbol(f"Z@{var.name}", "idempotent")
    flip = False
    if pu.total != pv.total:
        image = EqWord(system.alphabet, (x, z))
        expected, swap = "SU1", False
    elif pu.max_prefix != pv.max_prefix:
        image = EqWord(system.alphabet, (x, z))
        expected, swap = "SU2", pu.max_prefix < pv.max_prefix
    else:
        # unbalanced with equal totals and maxima forces unequal minima
        assert pu.min_prefix != pv.min_prefix
        image = EqWord(system.alphabet, (z, x))
        expected, swap, flip = "SU3", pu.min_prefix > pv.min_prefix, True
    images = {var: image}
    equations = [
        (substitute_tokens(l, images), substitute_tokens(r, images))
        for l, r in system.equations
    ]
    l, r = equations[designated]
    if flip:
        l, r = involute_eq_word(l), involute_eq_word(r)
    if swap:
        l, r = r, l
    equations[designated] = (l, r)
    out = TypedSystem(system.alphabet, (z, x), tuple(equations))
    if strong_unbalance_kind(*equations[designated]) != expected:
        raise AssertionError("reduction failed to certify the designated equation")
    return out


def k_bound(n: int, p: ReducedWord) -> int:
    """Exponent bound 6*n*|p| for solutions through a primitive period p."""
    if not p.letters:
        raise InvalidInput("the period must be nonempty")
    return 6 * n * len(p)


@dataclass(frozen=True)
class ParametricFamily:
    """Group values r q^k s, k ranging over the integers.

    Both r q s and r ~q s must concatenate without cancellation and q must be
    cyclically reduced, so the length of the value grows linearly in |k|.
    The empty period gives a singleton.
    """

    r: ReducedWord
    q: ReducedWord
    s: ReducedWord

    def __post_init__(self) -> None:
        for part in (self.r, self.q, self.s):
            if not isinstance(part, ReducedWord):
                raise InvalidInput("family parts must be reduced words")
            if part.alphabet != self.r.alphabet:
                raise InvalidInput("family parts must share one alphabet")
        if self.q.letters and not is_cyclically_reduced(self.q):
            raise InvalidInput("the period must be cyclically reduced")
        for mid in (self.q, involute(self.q)):
            total = len(self.r) + len(mid) + len(self.s)
            if len(concat_group(concat_group(self.r, mid), self.s)) != total:
                raise InvalidInput("family words must concatenate without cancellation")

    def value(self, k: int) -> ReducedWord:
        return concat_group(concat_group(self.r, group_power(self.q, k)), self.s)


def _pattern_solver(lhs: EqWord, rhs: EqWord, x: VarSymbol):
    rl, rr = reduce_pattern(lhs), reduce_pattern(rhs)

    def solves(w: ReducedWord) -> bool:
        image = {x: EqWord(lhs.alphabet, w.letters)}
        return reduce_pattern(substitute_tokens(rl, image)) == reduce_pattern(
            substitute_tokens(rr, image)
        )

    return solves


def parametric_families(
    lhs: EqWord, rhs: EqWord, C: int = 4, max_len: "int | None" = None
) -> "list[ParametricFamily]":
    """Candidate families for one group equation, |rqs| capped at C*n.

    Acceptance checks all exponents in [-(2n+1), 2n+1]; a true family passes
    by definition, so the window can only let spurious families through, and
    those are harmless to callers that re-verify per value.  Redundant
    presentations are skipped: r never ends with the period or its inverse,
    s never starts with one, and of q, ~q only the smaller is kept.  The
    search is exponential in the cap once the alphabet has a second
    generator; max_len keeps it tractable there.
    """
    alphabet = lhs.alphabet
    _require_fixed_point_free(alphabet)
    for side in (lhs, rhs):
        for t in side.tokens:
            if isinstance(t, VarSymbol) and t.kind == "idempotent":
                raise InvalidInput("group equations carry letters and one reduced variable")
    x = _require_typed((lhs, rhs))
    if reduce_pattern(lhs) == reduce_pattern(rhs):
        raise InvalidInput("the group projection is a tautology")
    if x is None:
        return []
    n = len(lhs) + len(rhs)
    cap = C * n if max_len is None else min(C * n, max_len)
    window = 2 * n + 1
    ks = sorted(range(-window, window + 1), key=abs)
    solves = _pattern_solver(lhs, rhs, x)
    words = reduced_words_upto(alphabet, cap)
    eps = epsilon(alphabet)
    bar = alphabet.bar_of
    out = [ParametricFamily(w, eps, eps) for w in words if solves(w)]
    for q in words:
        if not q.letters or not is_cyclically_reduced(q):
            continue
        qb = involute(q)
        if qb.sort_key() < q.sort_key():
            continue
        for r in words:
            if len(r) + len(q) > cap:
                break
            if r.letters:
                if bar[r.letters[-1]] == q.letters[0] or r.letters[-1] == q.letters[-1]:
                    continue
                if r.letters[-len(q) :] in (q.letters, qb.letters):
                    continue
            for s in words:
                if len(r) + len(q) + len(s) > cap:
                    break
                if s.letters:
                    if bar[q.letters[-1]] == s.letters[0] or q.letters[0] == s.letters[0]:
                        continue
                    if s.letters[: len(q)] in (q.letters, qb.letters):
                        continue
                fam = ParametricFamily(r, q, s)
                if all(solves(fam.value(k)) for k in ks):
                    out.append(fam)
    return out


def decide_onevar(system: TypedSystem, budget: SolverBudget, C: int = 4) -> Verdict:
    """Decide a typed system through its first strongly unbalanced equation.

    Candidate values for the reduced variable come from the parametric
    families of that equation's group projection.  Every candidate must
    solve every group projection before the idempotent remainder is handed
    to the bounded solver, and a SAT witness is re-verified in the monoid.
    UNSAT_WITHIN_BOUND claims there is no solution with the value inside
    budget.max_group_len (when set) and trees inside budget.max_len; UNKNOWN
    only reports that the inner solver gave up somewhere.
    """
    _require_fixed_point_free(system.alphabet)
    reduced = [v for v in system.variables if v.kind == "reduced"]
    if any(v.kind == "general" for v in system.variables):
        raise PreconditionError("split general variables first")
    if len(reduced) > 1:
        raise InvalidInput("at most one reduced variable")
    designated = None
    kind = "none"
    for eq in system.equations:
        kind = strong_unbalance_kind(*eq)
        if kind != "none":
            designated = eq
            break
    if designated is None:
        raise PreconditionError("no strongly unbalanced equation")
    x = reduced[0]
    families = parametric_families(
        *underlying_group_equation(designated), C=C, max_len=budget.max_group_len
    )
    trace = [f"designated equation certified {kind}", f"{len(families)} candidate families"]
    if not families:
        return Verdict(
            UNSAT_WITHIN_BOUND, None, (*trace, "group projection admits no candidate")
        )
    projections = [
        tuple(reduce_pattern(side) for side in underlying_group_equation(eq))
        for eq in system.equations
    ]
    base_size = sum(len(l) + len(r) for l, r in system.equations)
    occurrences = sum(
        1
        for l, r in system.equations
        for t in (*l.tokens, *r.tokens)
        if isinstance(t, VarSymbol) and t.kind == "reduced"
    )
    undecided = False
    capped = False
    seen: set[tuple[int, ...]] = set()
    for fam in families:
        m = base_size + occurrences * (len(fam.r) + len(fam.s))
        if fam.q.letters:
            root, exponent = primitive_root(fam.q)
            bound = k_bound(m, root) // exponent
            ks = sorted(range(-bound, bound + 1), key=abs)
        else:
            bound = 0
            ks = [0]
        for k in ks:
            w = fam.value(k)
            if budget.max_group_len is not None and len(w) > budget.max_group_len:
                capped = True
                if k == 0:
                    continue
                break  # ks are sorted by |k| and lengths grow with it
            if w.letters in seen:
                continue
            seen.add(w.letters)
            image = {x: EqWord(system.alphabet, w.letters)}
            if not all(
                reduce_pattern(substitute_tokens(a, image))
                == reduce_pattern(substitute_tokens(b, image))
                for a, b in projections
            ):
                continue
            remainder = substitute_group_solution(system, {x: w})
            inner = decide_idempotent_system(remainder, budget)
            if inner.status == SAT:
                values: dict[VarSymbol, object] = dict(inner.witness or {})
                values[x] = w
                sigma = Assignment(values)
                if not check_solution(system, sigma):
                    raise AssertionError("witness failed re-verification")
                note = f"value at exponent {k} of bound {bound}, |rqs|={len(fam.r) + len(fam.q) + len(fam.s)}"
                return Verdict(SAT, values, (*trace, note))
            if inner.status == UNKNOWN:
                undecided = True
    if undecided:
        return Verdict(UNKNOWN, None, (*trace, "inner solver gave up on a candidate"))
    if capped:
        trace.append("candidates beyond the group-length budget were not tried")
    return Verdict(UNSAT_WITHIN_BOUND, None, (*trace, "every candidate failed"))
