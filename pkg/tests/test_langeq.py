import itertools
import random

import pytest

from fimeq.errors import InvalidInput
from fimeq.langeq import (
    LangEquation,
    LangSystem,
    add_terms,
    combine_to_single,
    eval_term,
    holds,
    lang_var,
    make_term,
    prefix_term,
    system_size,
)
from fimeq.words import InvAlphabet, Word, WordSet, parse_word, word_set, words_upto

AB = InvAlphabet.from_base(("a", "b"))
A1 = InvAlphabet.from_base(("a",))
X, Y = lang_var("X"), lang_var("Y")


def w(text, alphabet=AB):
    return parse_word(alphabet, text)


def ggs1(interp):
    # a~a + a~a.X + b~b.Y = b~b + a~a.Y + b~b.X
    lhs = make_term(AB, [w("a~a")], [(w("a~a"), X), (w("b~b"), Y)])
    rhs = make_term(AB, [w("b~b")], [(w("a~a"), Y), (w("b~b"), X)])
    return LangSystem(AB, (LangEquation(lhs, rhs),), interp)


def assign(xs, ys):
    return {X: word_set(AB, xs), Y: word_set(AB, ys)}


class TestSize:
    def test_worked_single_equation_system(self):
        assert system_size(ggs1("monoid")) == 22

    def test_empty_system_counts_alphabet_and_variables(self):
        s = LangSystem(A1, (), "monoid", declared_vars=(X,))
        assert system_size(s) == 3

    def test_hand_counted_small_system(self):
        # {eps} + a.X = {a}: 2 letters + 1 var + 1 summand + lengths 0,1 + coeff 1
        eq = LangEquation(
            make_term(A1, [w("eps", A1)], [(w("a", A1), X)]),
            make_term(A1, [w("a", A1)]),
        )
        assert system_size(LangSystem(A1, (eq,), "monoid")) == 6

    def test_shared_constant_counted_once(self):
        eq = LangEquation(make_term(AB, [w("ab")]), make_term(AB, [w("ab")]))
        assert system_size(LangSystem(AB, (eq,), "monoid")) == 4 + 2


class TestEval:
    def test_constant_only(self):
        t = make_term(AB, [w("eps")])
        assert eval_term(t, {}, "monoid") == word_set(AB, ["eps"])

    def test_monoid_concatenates_literally(self):
        t = make_term(AB, summands=[(w("a"), X)])
        out = eval_term(t, {X: word_set(AB, ["eps", "b"])}, "monoid")
        assert out == word_set(AB, ["a", "ab"])

    def test_group_reduces_elementwise(self):
        t = make_term(AB, summands=[(w("~a"), X)])
        out = eval_term(t, {X: word_set(AB, ["a", "ab"])}, "group")
        assert out == word_set(AB, ["eps", "b"])

    def test_uncovered_variable(self):
        with pytest.raises(InvalidInput):
            eval_term(make_term(AB, summands=[(w("a"), X)]), {}, "monoid")

    def test_monotone_in_assignment(self):
        rng = random.Random(3)
        pool = list(words_upto(AB, 2))
        t = make_term(AB, [w("b")], [(w("a"), X), (w("eps"), Y)])
        for _ in range(50):
            small = {X: WordSet(AB, rng.sample(pool, 2)), Y: WordSet(AB, rng.sample(pool, 2))}
            big = {
                X: small[X].union(WordSet(AB, rng.sample(pool, 2))),
                Y: small[Y].union(WordSet(AB, rng.sample(pool, 2))),
            }
            for interp in ("monoid", "group"):
                lo = eval_term(t, small, interp)
                hi = eval_term(t, big, interp)
                assert lo.tuple_set <= hi.tuple_set


class TestHolds:
    def test_group_interpretation_is_trivial_here(self):
        rng = random.Random(7)
        pool = list(words_upto(AB, 2))
        s = ggs1("group")
        for _ in range(30):
            sigma = {
                X: WordSet(AB, rng.sample(pool, rng.randrange(4))),
                Y: WordSet(AB, rng.sample(pool, rng.randrange(4))),
            }
            assert holds(s, sigma)

    def test_monoid_interpretation_restricts(self):
        s = ggs1("monoid")
        assert holds(s, assign(["eps"], ["eps"]))
        assert not holds(s, assign(["eps"], ["a"]))

    def test_monoid_actual_solution_shape(self):
        # solved exactly when sigma(Y) = sigma(X) + {eps}
        s = ggs1("monoid")
        assert holds(s, assign(["a"], ["eps", "a"]))
        assert not holds(s, assign(["a"], ["a"]))

    def test_variable_free_equation(self):
        eq = LangEquation(make_term(AB, [w("a")]), make_term(AB, [w("a")]))
        assert holds(LangSystem(AB, (eq,), "monoid"), {})

    def test_group_agrees_after_reducing_assignment(self):
        rng = random.Random(19)
        pool = list(words_upto(AB, 2))
        s = ggs1("group")
        eq = LangEquation(
            make_term(AB, [w("a")], [(w("a~a"), X)]),
            make_term(AB, summands=[(w("a"), Y)]),
        )
        s = LangSystem(AB, s.equations + (eq,), "group")
        for _ in range(60):
            sigma = {
                X: WordSet(AB, rng.sample(pool, rng.randrange(1, 4))),
                Y: WordSet(AB, rng.sample(pool, rng.randrange(1, 4))),
            }
            reduced = {v: WordSet(AB, [pytest.importorskip("fimeq.words").reduce_word(u) for u in ws])
                       for v, ws in sigma.items()}
            assert holds(s, sigma) == holds(s, reduced)

    def test_marked_requires_monoid_too(self):
        # {eps} + X = {a~a} + X: trivial over the group, not over the monoid
        eq = LangEquation(
            make_term(AB, [w("eps")], [(w("eps"), X)]),
            make_term(AB, [w("a~a")], [(w("eps"), X)]),
        )
        plain = LangSystem(AB, (eq,), "group")
        marked = LangSystem(AB, (LangEquation(eq.lhs, eq.rhs, marked=True),), "group")
        sigma = {X: word_set(AB, ["eps"])}
        assert holds(plain, sigma)
        assert not holds(marked, sigma)
        good = {X: word_set(AB, ["eps", "a~a"])}
        assert holds(marked, good)

    def test_inequality_is_subset(self):
        le = LangEquation(make_term(AB, [w("a")]), make_term(AB, [w("a"), w("b")]),
                          inequality=True)
        assert holds(LangSystem(AB, (le,), "monoid"), {})
        bad = LangEquation(make_term(AB, [w("b~b")]), make_term(AB, [w("b")]),
                           inequality=True)
        assert not holds(LangSystem(AB, (bad,), "monoid"), {})
        assert holds(LangSystem(
            AB, (LangEquation(make_term(AB, [w("b~b")]), make_term(AB, [w("eps")]),
                              inequality=True),), "group"), {})


class TestCoefficientAlphabet:
    def test_declared_sublanguage_enforced(self):
        eq = LangEquation(make_term(AB, [w("b")]), make_term(AB, [w("b")]))
        LangSystem(AB, (eq,), "monoid", coeff_letters=frozenset({2}))
        with pytest.raises(InvalidInput):
            LangSystem(AB, (eq,), "monoid", coeff_letters=frozenset({0}))

    def test_coefficients_checked_too(self):
        eq = LangEquation(
            make_term(AB, summands=[(w("a"), X)]),
            make_term(AB, summands=[(w("a"), X)]),
        )
        with pytest.raises(InvalidInput):
            LangSystem(AB, (eq,), "monoid", coeff_letters=frozenset({2, 3}))


class TestCombine:
    def small_system(self, n_eqs, rng):
        pool = list(words_upto(AB, 1))
        eqs = []
        for _ in range(n_eqs):
            def side():
                return make_term(
                    AB,
                    [rng.choice(pool)],
                    [(rng.choice(pool), v) for v in rng.sample([X, Y], rng.randrange(3))],
                )
            eqs.append(LangEquation(side(), side()))
        return LangSystem(AB, tuple(eqs), "monoid")

    def test_single_equation_unchanged(self):
        s = ggs1("monoid")
        assert combine_to_single(s) is s

    def test_two_equations_structural(self):
        e1 = LangEquation(make_term(AB, [w("a")]), make_term(AB, summands=[(w("eps"), X)]))
        e2 = LangEquation(make_term(AB, [w("b")]), make_term(AB, summands=[(w("b"), Y)]))
        out = combine_to_single(LangSystem(AB, (e1, e2), "monoid"))
        assert len(out.equations) == 1
        got = out.equations[0]
        # code words are the first two letter tokens: a and ~a
        assert got.lhs == add_terms(prefix_term(w("a"), e1.lhs), prefix_term(w("~a"), e2.lhs))
        assert got.rhs == add_terms(prefix_term(w("a"), e1.rhs), prefix_term(w("~a"), e2.rhs))

    def test_rejects_marked_and_mixed_flags(self):
        eq = LangEquation(make_term(AB, [w("a")]), make_term(AB, [w("a")]))
        meq = LangEquation(eq.lhs, eq.rhs, marked=True)
        ieq = LangEquation(eq.lhs, eq.rhs, inequality=True)
        with pytest.raises(InvalidInput):
            combine_to_single(LangSystem(AB, (meq, eq), "group"))
        with pytest.raises(InvalidInput):
            combine_to_single(LangSystem(AB, (ieq, eq), "group"))

    def test_needs_two_letters(self):
        eq = LangEquation(make_term(AB, [w("a")]), make_term(AB, [w("a")]))
        with pytest.raises(InvalidInput):
            combine_to_single(
                LangSystem(AB, (eq, eq), "monoid", coeff_letters=frozenset({0}))
            )

    @pytest.mark.parametrize("interp", ["monoid", "group"])
    def test_preserves_solution_set(self, interp):
        # exact over the monoid; sound only over the group (reduction can
        # cancel a code word against what follows it)
        rng = random.Random(41)
        pool = list(words_upto(AB, 1))
        for trial in range(6):
            s = self.small_system(3, rng)
            s = LangSystem(AB, s.equations, interp)
            c = combine_to_single(s)
            assert len(c.equations) == 1
            for bits in itertools.product(range(4), repeat=2):
                sigma = {
                    v: WordSet(AB, [pool[i] for i in range(5) if (b >> i) & 1])
                    for v, b in zip((X, Y), bits)
                }
                if interp == "monoid":
                    assert holds(s, sigma) == holds(c, sigma)
                elif holds(s, sigma):
                    assert holds(c, sigma)
