import itertools
import random

import pytest

from fimeq.errors import InvalidInput, PreconditionError
from fimeq.words import (
    InvAlphabet,
    ReducedWord,
    Word,
    WordSet,
    concat_group,
    epsilon,
    factor_balance,
    factor_count,
    format_word,
    group_power,
    involute,
    is_cyclically_reduced,
    parse_reduced,
    parse_word,
    prefix_closure,
    primitive_root,
    reduce_set,
    reduce_word,
    reduced_words_upto,
    word_set,
    words_upto,
)
from oracles import all_tuples, naive_factor_count, naive_prefixes, naive_reduce, reduced_tuples

AB = InvAlphabet.from_base(("a", "b"))
A1 = InvAlphabet.from_base(("a",))


def w(text: str) -> Word:
    return parse_word(AB, text)


class TestAlphabet:
    def test_from_base_tokens(self):
        assert AB.tokens == ("a", "~a", "b", "~b")
        assert AB.bar_of == (1, 0, 3, 2)
        assert AB.fixed_point_free

    def test_fixed_point_allowed_but_flagged(self):
        g = InvAlphabet(("c",), (0,))
        assert not g.fixed_point_free

    def test_bad_involution_rejected(self):
        with pytest.raises(InvalidInput):
            InvAlphabet(("a", "b"), (0, 0))

    def test_double_bar_token_rejected(self):
        with pytest.raises(InvalidInput):
            InvAlphabet(("a", "~~a"), (1, 0))


class TestParsing:
    def test_parse_and_format_round_trip(self):
        for text in ("eps", "a", "~a", "a~ab", "b~b~a"):
            assert format_word(parse_word(AB, text)) == text

    def test_eps_is_empty(self):
        assert len(parse_word(AB, "eps")) == 0

    def test_double_bar_rejected(self):
        with pytest.raises(InvalidInput):
            parse_word(AB, "~~a")

    def test_unknown_letter_rejected(self):
        with pytest.raises(InvalidInput):
            parse_word(AB, "ac")

    def test_reduced_wrapper_validates(self):
        with pytest.raises(InvalidInput):
            parse_reduced(AB, "a~a")
        assert isinstance(parse_reduced(AB, "ab"), ReducedWord)

    def test_word_equality_ignores_wrapper(self):
        assert parse_reduced(AB, "ab") == parse_word(AB, "ab")
        assert hash(parse_reduced(AB, "ab")) == hash(parse_word(AB, "ab"))


class TestReduce:
    def test_frozen_examples(self):
        assert format_word(reduce_word(w("a~ab"))) == "b"
        assert format_word(reduce_word(w("ab~b~a"))) == "eps"
        assert format_word(reduce_word(w("~aab"))) == "b"
        assert format_word(involute(w("a~ab"))) == "~ba~a"

    def test_against_naive_eraser_exhaustive(self):
        for t in all_tuples(4, 4):
            got = reduce_word(Word(AB, t)).letters
            assert got == naive_reduce(t, AB.bar_of)

    def test_reduce_idempotent_and_reduced(self):
        for t in all_tuples(4, 4):
            r = reduce_word(Word(AB, t))
            assert r.is_reduced()
            assert reduce_word(r) == r

    def test_word_times_inverse_cancels(self):
        for t in all_tuples(4, 3):
            u = Word(AB, t)
            assert len(concat_group(u, involute(u))) == 0

    def test_concat_group_associative(self):
        rng = random.Random(7)
        pool = [Word(AB, t) for t in all_tuples(4, 3)]
        for _ in range(300):
            u, v, x = (rng.choice(pool) for _ in range(3))
            assert concat_group(concat_group(u, v), x) == concat_group(u, concat_group(v, x))

    def test_group_power(self):
        q = parse_reduced(AB, "ab")
        assert format_word(group_power(q, 3)) == "ababab"
        assert format_word(group_power(q, -2)) == "~b~a~b~a"
        assert len(group_power(q, 0)) == 0


class TestWordSet:
    def test_iteration_order_length_then_lex(self):
        s = word_set(AB, ["b", "a", "aa", "eps", "~a"])
        assert [format_word(x) for x in s] == ["eps", "a", "~a", "b", "aa"]

    def test_prefix_closed_flag_verified(self):
        with pytest.raises(InvalidInput):
            word_set(AB, ["a", "ab"], prefix_closed=True)
        s = word_set(AB, ["eps", "a", "ab"], prefix_closed=True)
        assert s.prefix_closed

    def test_union_keeps_closure(self):
        s = word_set(AB, ["eps", "a"], prefix_closed=True)
        t = word_set(AB, ["eps", "b"], prefix_closed=True)
        assert s.union(t).prefix_closed

    def test_prefix_closure_matches_naive(self):
        rng = random.Random(3)
        pool = [t for t in all_tuples(4, 4)]
        for _ in range(100):
            chosen = rng.sample(pool, k=rng.randint(0, 6))
            ws = WordSet(AB, [Word(AB, t) for t in chosen])
            expect = set().union(*(naive_prefixes(t) for t in chosen), {()})
            got = prefix_closure(ws)
            assert got.tuple_set == frozenset(expect)
            assert got.prefix_closed

    def test_reduce_set_requires_closure(self):
        with pytest.raises(PreconditionError):
            reduce_set(word_set(AB, ["ab"]))

    def test_reduce_set_closure_lemma_random(self):
        rng = random.Random(11)
        pool = [t for t in all_tuples(4, 5)]
        for _ in range(200):
            chosen = rng.sample(pool, k=rng.randint(0, 5))
            closed = prefix_closure(WordSet(AB, [Word(AB, t) for t in chosen]))
            out = reduce_set(closed)
            assert out.is_prefix_closed()
            assert out.all_reduced()
            assert out.tuple_set == {naive_reduce(t, AB.bar_of) for t in closed.tuple_set}


class TestCounting:
    def test_factor_count_frozen(self):
        assert factor_count(w("aaa"), w("aa")) == 2
        assert factor_count(w("abab"), w("ab")) == 2
        assert factor_count(w("abab"), w("ba")) == 1
        assert factor_count(w("eps"), w("a")) == 0

    def test_factor_count_empty_pattern_rejected(self):
        with pytest.raises(InvalidInput):
            factor_count(w("a"), w("eps"))

    def test_factor_count_against_naive(self):
        for u in all_tuples(2, 5):
            for p in all_tuples(2, 3):
                if not p:
                    continue
                assert factor_count(Word(A1, u), Word(A1, p)) == naive_factor_count(u, p)

    def test_balance_frozen(self):
        assert factor_balance(w("a~aa"), w("a")) == 1
        assert factor_balance(w("ababab"), w("ab")) == 3
        assert factor_balance(w("ab"), w("~b~a")) == -1

    def test_balance_needs_fixed_point_free(self):
        g = InvAlphabet(("c",), (0,))
        with pytest.raises(InvalidInput):
            factor_balance(Word(g, (0,)), Word(g, (0,)))

    def test_balance_antisymmetry(self):
        # balance of the involuted word is the negated balance
        rng = random.Random(5)
        pool = [Word(AB, t) for t in all_tuples(4, 5)]
        pats = [Word(AB, t) for t in all_tuples(4, 2) if t]
        for _ in range(300):
            u, p = rng.choice(pool), rng.choice(pats)
            assert factor_balance(involute(u), p) == -factor_balance(u, p)

    def test_subadditive_bounds_random(self):
        # counting: 0 <= |uv|_p - |u|_p - |v|_p <= |p| - 1, balance within |p| - 1
        rng = random.Random(13)
        pool = [t for t in all_tuples(4, 5)]
        pats = [t for t in all_tuples(4, 3) if t]
        for _ in range(500):
            u, v = Word(AB, rng.choice(pool)), Word(AB, rng.choice(pool))
            p = Word(AB, rng.choice(pats))
            uv = u.concat(v)
            d = factor_count(uv, p) - factor_count(u, p) - factor_count(v, p)
            assert 0 <= d <= len(p) - 1
            db = factor_balance(uv, p) - factor_balance(u, p) - factor_balance(v, p)
            assert abs(db) <= len(p) - 1

    def test_balance_of_reduced_product_random(self):
        # for reduced factors the balance of the reduced product stays within
        # 3 (|p|-1) (n-1) of the sum of the balances
        rng = random.Random(17)
        pool = [ReducedWord(AB, t) for t in reduced_tuples(AB.bar_of, 4)]
        pats = [ReducedWord(AB, t) for t in reduced_tuples(AB.bar_of, 3) if t]
        for _ in range(300):
            n = rng.randint(2, 5)
            parts = [rng.choice(pool) for _ in range(n)]
            p = rng.choice(pats)
            prod = parts[0]
            for x in parts[1:]:
                prod = concat_group(prod, x)
            drift = factor_balance(prod, p) - sum(factor_balance(x, p) for x in parts)
            assert abs(drift) <= 3 * (len(p) - 1) * (n - 1)


class TestCyclicStructure:
    def test_cyclically_reduced_frozen(self):
        assert is_cyclically_reduced(parse_reduced(AB, "ab"))
        assert is_cyclically_reduced(parse_reduced(AB, "eps"))
        assert not is_cyclically_reduced(parse_reduced(AB, "ab~a"))

    def test_cyclically_reduced_iff_square_reduced(self):
        for t in reduced_tuples(AB.bar_of, 4):
            q = ReducedWord(AB, t)
            assert is_cyclically_reduced(q) == q.concat(q).is_reduced()

    def test_primitive_root_frozen(self):
        assert primitive_root(w("abab")) == (w("ab"), 2)
        assert primitive_root(w("aaa")) == (w("a"), 3)
        assert primitive_root(w("ab")) == (w("ab"), 1)
        with pytest.raises(InvalidInput):
            primitive_root(w("eps"))

    def test_primitive_root_reconstructs(self):
        for t in all_tuples(3, 6):
            if not t:
                continue
            u = Word(AB, t)
            p, e = primitive_root(u)
            assert p.letters * e == u.letters
            assert primitive_root(p)[1] == 1

    def test_power_balance_counts_exactly(self):
        # for primitive cyclically reduced q, the q-balance of q^n is n
        for t in reduced_tuples(AB.bar_of, 3):
            if not t:
                continue
            q = ReducedWord(AB, t)
            if not is_cyclically_reduced(q) or primitive_root(q)[1] != 1:
                continue
            for n in range(-4, 5):
                assert factor_balance(group_power(q, n), q) == n


class TestEnumerators:
    def test_words_upto_counts(self):
        assert len(words_upto(AB, 2)) == 1 + 4 + 16
        assert len(reduced_words_upto(AB, 2)) == 1 + 4 + 12

    def test_reduced_enumerator_matches_filter(self):
        got = [x.letters for x in reduced_words_upto(AB, 3)]
        assert got == reduced_tuples(AB.bar_of, 3)
        assert epsilon(AB).letters == ()
