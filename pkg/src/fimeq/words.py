"""Words over an involutive alphabet.

An involutive alphabet carries a bijection a -> bar(a) with bar(bar(a)) = a.
Words are letter-index sequences; reducing a word repeatedly erases factors
a bar(a).  Reduced words form the canonical representatives of the free group
with involution, and finite prefix-closed sets of reduced words are the raw
material for the Scheiblich representation in fim.py.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator

from .errors import InvalidInput, PreconditionError

EPSILON_TOKEN = "eps"


@dataclass(frozen=True)
class InvAlphabet:
    """Finite alphabet with an involution given as an index permutation."""

    tokens: tuple[str, ...]
    bar_of: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.tokens)
        if n == 0:
            raise InvalidInput("alphabet must not be empty")
        if len(set(self.tokens)) != n:
            raise InvalidInput("alphabet tokens must be distinct")
        for t in self.tokens:
            if not t or t == EPSILON_TOKEN or any(c.isspace() for c in t):
                raise InvalidInput(f"bad alphabet token {t!r}")
            if t.startswith("~~"):
                raise InvalidInput(f"bad alphabet token {t!r}: double bar")
        if sorted(self.bar_of) != list(range(n)):
            raise InvalidInput("bar_of must be a permutation of letter indices")
        for i, j in enumerate(self.bar_of):
            if self.bar_of[j] != i:
                raise InvalidInput("bar_of must be an involution")

    @classmethod
    def from_base(cls, base: Iterable[str]) -> "InvAlphabet":
        """Build {a, ~a, b, ~b, ...} from base letters a, b, ..."""
        names = tuple(base)
        tokens: list[str] = []
        bar: list[int] = []
        for k, name in enumerate(names):
            if name.startswith("~"):
                raise InvalidInput(f"base letter {name!r} must not start with '~'")
            tokens.extend((name, "~" + name))
            bar.extend((2 * k + 1, 2 * k))
        return cls(tuple(tokens), tuple(bar))

    @property
    def size(self) -> int:
        return len(self.tokens)

    @property
    def fixed_point_free(self) -> bool:
        return all(j != i for i, j in enumerate(self.bar_of))

    def index(self, token: str) -> int:
        try:
            return self.tokens.index(token)
        except ValueError:
            raise InvalidInput(f"unknown letter {token!r}") from None


class Word:
    """Immutable word over an InvAlphabet, stored as letter indices."""

    __slots__ = ("alphabet", "letters", "_hash")

    def __init__(self, alphabet: InvAlphabet, letters: Iterable[int]):
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "letters", tuple(letters))
        for a in self.letters:
            if not 0 <= a < alphabet.size:
                raise InvalidInput(f"letter index {a} out of range")
        object.__setattr__(self, "_hash", hash((alphabet.tokens, self.letters)))

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("Word is immutable")

    def __len__(self) -> int:
        return len(self.letters)

    def __iter__(self) -> Iterator[int]:
        return iter(self.letters)

    def __getitem__(self, item: int | slice) -> "int | Word":
        if isinstance(item, slice):
            return Word(self.alphabet, self.letters[item])
        return self.letters[item]

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, Word)
            and self.alphabet == other.alphabet
            and self.letters == other.letters
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"Word({format_word(self)!r})"

    def sort_key(self) -> tuple[int, tuple[int, ...]]:
        return (len(self.letters), self.letters)

    def concat(self, other: "Word") -> "Word":
        """Plain monoid concatenation, no reduction."""
        if other.alphabet != self.alphabet:
            raise InvalidInput("alphabet mismatch")
        return Word(self.alphabet, self.letters + other.letters)

    def is_reduced(self) -> bool:
        bar = self.alphabet.bar_of
        return all(b != bar[a] for a, b in zip(self.letters, self.letters[1:]))


class ReducedWord(Word):
    """Word validated to contain no factor a bar(a); never coerced silently."""

    __slots__ = ()

    def __init__(self, alphabet: InvAlphabet, letters: Iterable[int]):
        super().__init__(alphabet, letters)
        if not self.is_reduced():
            raise InvalidInput(f"word {format_word(self)!r} is not reduced")

    def __repr__(self) -> str:
        return f"ReducedWord({format_word(self)!r})"


def epsilon(alphabet: InvAlphabet) -> ReducedWord:
    return ReducedWord(alphabet, ())


def involute(w: Word) -> Word:
    """Reverse the word and bar every letter; preserves reducedness."""
    bar = w.alphabet.bar_of
    letters = tuple(bar[a] for a in reversed(w.letters))
    cls = ReducedWord if isinstance(w, ReducedWord) else Word
    return cls(w.alphabet, letters)


def reduce_word(w: Word) -> ReducedWord:
    """Erase factors a bar(a) until none remain (single stack scan)."""
    bar = w.alphabet.bar_of
    out: list[int] = []
    for a in w.letters:
        if out and out[-1] == bar[a]:
            out.pop()
        else:
            out.append(a)
    return ReducedWord(w.alphabet, tuple(out))


def concat_group(u: Word, v: Word) -> ReducedWord:
    """Reduced concatenation, i.e. the product in the free group with involution."""
    if u.alphabet != v.alphabet:
        raise InvalidInput("alphabet mismatch")
    return reduce_word(Word(u.alphabet, u.letters + v.letters))


def group_power(q: Word, n: int) -> ReducedWord:
    """Reduced n-th power; negative n uses the involuted base."""
    base = q if n >= 0 else involute(q)
    return reduce_word(Word(q.alphabet, base.letters * abs(n)))


def parse_word(alphabet: InvAlphabet, text: str) -> Word:
    """Parse a dot-free token string such as 'a~ab'; 'eps' is the empty word."""
    text = text.strip()
    if text == EPSILON_TOKEN:
        return Word(alphabet, ())
    if "~~" in text:
        raise InvalidInput(f"token '~~' rejected in {text!r}")
    by_length = sorted(alphabet.tokens, key=len, reverse=True)
    letters: list[int] = []
    i = 0
    while i < len(text):
        for tok in by_length:
            if text.startswith(tok, i):
                letters.append(alphabet.index(tok))
                i += len(tok)
                break
        else:
            raise InvalidInput(f"cannot read a letter at {text[i:]!r} in {text!r}")
    return Word(alphabet, letters)


def parse_reduced(alphabet: InvAlphabet, text: str) -> ReducedWord:
    w = parse_word(alphabet, text)
    return ReducedWord(alphabet, w.letters)


def format_word(w: Word) -> str:
    if not w.letters:
        return EPSILON_TOKEN
    return "".join(w.alphabet.tokens[a] for a in w.letters)


class WordSet:
    """Finite set of words over one alphabet, iterated length-then-lex.

    prefix_closed=True asserts and verifies closure under taking prefixes.
    """

    __slots__ = ("alphabet", "words", "tuple_set", "prefix_closed", "_hash")

    def __init__(
        self,
        alphabet: InvAlphabet,
        words: Iterable[Word] = (),
        prefix_closed: bool = False,
    ):
        ws = list(words)
        for w in ws:
            if w.alphabet != alphabet:
                raise InvalidInput("alphabet mismatch in WordSet")
        uniq = {w.letters: w for w in ws}
        ordered = tuple(uniq[t] for t in sorted(uniq, key=lambda t: (len(t), t)))
        object.__setattr__(self, "alphabet", alphabet)
        object.__setattr__(self, "words", ordered)
        object.__setattr__(self, "tuple_set", frozenset(uniq))
        object.__setattr__(self, "prefix_closed", bool(prefix_closed))
        object.__setattr__(self, "_hash", hash((alphabet.tokens, self.tuple_set)))
        if prefix_closed and not _tuples_prefix_closed(self.tuple_set):
            raise InvalidInput("word set declared prefix-closed but is not")

    def __setattr__(self, name: str, value: object) -> None:
        raise AttributeError("WordSet is immutable")

    def __len__(self) -> int:
        return len(self.words)

    def __iter__(self) -> Iterator[Word]:
        return iter(self.words)

    def __contains__(self, w: Word) -> bool:
        return isinstance(w, Word) and w.letters in self.tuple_set

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, WordSet)
            and self.alphabet == other.alphabet
            and self.tuple_set == other.tuple_set
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        inner = ",".join(format_word(w) for w in self.words)
        return f"WordSet({{{inner}}})"

    def union(self, other: "WordSet") -> "WordSet":
        if other.alphabet != self.alphabet:
            raise InvalidInput("alphabet mismatch")
        # a union of prefix-closed sets is prefix-closed
        closed = self.prefix_closed and other.prefix_closed
        return WordSet(self.alphabet, self.words + other.words, prefix_closed=closed)

    def is_prefix_closed(self) -> bool:
        return _tuples_prefix_closed(self.tuple_set)

    def all_reduced(self) -> bool:
        return all(w.is_reduced() for w in self.words)


def _tuples_prefix_closed(tuples: frozenset) -> bool:
    return all(t[:-1] in tuples for t in tuples if t)


def word_set(alphabet: InvAlphabet, texts: Iterable[str], **kw) -> WordSet:
    return WordSet(alphabet, [parse_word(alphabet, t) for t in texts], **kw)


def prefix_closure(ws: WordSet) -> WordSet:
    """All prefixes of all members; flagged prefix-closed."""
    seen = {t[:i] for t in ws.tuple_set for i in range(len(t) + 1)}
    seen.add(())
    return WordSet(
        ws.alphabet, [Word(ws.alphabet, t) for t in seen], prefix_closed=True
    )


def reduce_set(pset: WordSet) -> WordSet:
    """Reduce a prefix-closed set elementwise.

    The input must be prefix-closed; the output is again prefix-closed
    (this is a theorem, but the result is verified rather than trusted).
    """
    if not pset.prefix_closed and not pset.is_prefix_closed():
        raise PreconditionError("reduce_set needs a prefix-closed input")
    out = WordSet(
        pset.alphabet,
        {reduce_word(w) for w in pset.words},
        prefix_closed=True,
    )
    return out


def factor_count(u: Word, p: Word) -> int:
    """Number of (possibly overlapping) occurrences of p as a factor of u."""
    if len(p) == 0:
        raise InvalidInput("factor_count needs a nonempty pattern")
    if p.alphabet != u.alphabet:
        raise InvalidInput("alphabet mismatch")
    tp, tu = p.letters, u.letters
    k = len(tp)
    return sum(1 for i in range(len(tu) - k + 1) if tu[i : i + k] == tp)


def factor_balance(u: Word, p: Word) -> int:
    """Occurrences of p minus occurrences of bar(p) as factors of u.

    Only defined over alphabets whose involution has no fixed points.
    Arguments need not be reduced; the counting is purely combinatorial.
    """
    if not u.alphabet.fixed_point_free:
        raise InvalidInput("factor_balance needs a fixed-point-free involution")
    return factor_count(u, p) - factor_count(u, involute(p))


def is_cyclically_reduced(q: ReducedWord) -> bool:
    """True iff q q is reduced, i.e. all cyclic rotations of q are reduced."""
    if not isinstance(q, ReducedWord):
        raise PreconditionError("is_cyclically_reduced takes a ReducedWord")
    if len(q) == 0:
        return True
    return q.alphabet.bar_of[q.letters[-1]] != q.letters[0]


def primitive_root(u: Word) -> tuple[Word, int]:
    """Shortest p with u = p^e; returns (p, e) with e maximal."""
    n = len(u)
    if n == 0:
        raise InvalidInput("primitive_root needs a nonempty word")
    for d in range(1, n + 1):
        if n % d:
            continue
        if u.letters[:d] * (n // d) == u.letters:
            cls = ReducedWord if isinstance(u, ReducedWord) else Word
            return cls(u.alphabet, u.letters[:d]), n // d
    raise AssertionError("unreachable")


def words_upto(alphabet: InvAlphabet, max_len: int) -> list[Word]:
    """All words of length <= max_len, length-then-lex order."""
    out: list[Word] = []
    for n in range(max_len + 1):
        for tup in itertools.product(range(alphabet.size), repeat=n):
            out.append(Word(alphabet, tup))
    return out


def reduced_words_upto(alphabet: InvAlphabet, max_len: int) -> list[ReducedWord]:
    """All reduced words of length <= max_len, length-then-lex order."""
    bar = alphabet.bar_of
    level: list[tuple[int, ...]] = [()]
    out: list[ReducedWord] = [ReducedWord(alphabet, ())]
    for _ in range(max_len):
        nxt = []
        for t in level:
            for a in range(alphabet.size):
                if t and bar[t[-1]] == a:
                    continue
                nxt.append(t + (a,))
        nxt.sort()
        out.extend(ReducedWord(alphabet, t) for t in nxt)
        level = nxt
    return out
