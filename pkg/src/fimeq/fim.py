"""Free inverse monoid elements in Scheiblich form.

An element is a pair (tree, group): a finite prefix-closed set of reduced
words containing the empty word and the group part, together with a group
part that is a member of the tree.  The tree is the vertex set of the Munn
tree of any word representing the element.
"""

from __future__ import annotations

from .errors import InvalidInput
from .words import (
    InvAlphabet,
    ReducedWord,
    Word,
    WordSet,
    concat_group,
    epsilon,
    format_word,
    involute,
    prefix_closure,
    reduce_set,
    reduce_word,
)


class ScheiblichPair:
    """Immutable (tree, group) pair; the constructor verifies the invariants."""

    __slots__ = ("tree", "group", "_hash")

    def __init__(self, tree: WordSet, group: ReducedWord):
        if not isinstance(group, ReducedWord):
            raise InvalidInput("group part must be a ReducedWord")
        if tree.alphabet != group.alphabet:
            raise InvalidInput("alphabet mismatch")
        if not tree.all_reduced():
            raise InvalidInput("tree must consist of reduced words")
        if not (tree.prefix_closed or tree.is_prefix_closed()):
            raise InvalidInput("tree must be prefix-closed")
        if group not in tree:
            raise InvalidInput("group part must belong to the tree")
        if tree.prefix_closed:
            verified = tree
        else:
            verified = WordSet(tree.alphabet, tree.words, prefix_closed=True)
        object.__setattr__(self, "tree", verified)
        object.__setattr__(self, "group", group)
        object.__setattr__(self, "_hash", hash((verified, group)))

    def __setattr__(self, name, value):
        raise AttributeError("ScheiblichPair is immutable")

    @property
    def alphabet(self) -> InvAlphabet:
        return self.group.alphabet

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ScheiblichPair)
            and self.tree == other.tree
            and self.group == other.group
        )

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        return f"ScheiblichPair({format_pair(self)})"


def identity(alphabet: InvAlphabet) -> ScheiblichPair:
    eps = epsilon(alphabet)
    return ScheiblichPair(WordSet(alphabet, [eps], prefix_closed=True), eps)


def multiply(x: ScheiblichPair, y: ScheiblichPair) -> ScheiblichPair:
    """(P, g)(Q, h) = (P union gQ, gh) with gQ reduced elementwise."""
    if x.alphabet != y.alphabet:
        raise InvalidInput("alphabet mismatch")
    g = x.group
    translated = [concat_group(g, q) for q in y.tree]
    tree = WordSet(x.alphabet, list(x.tree.words) + translated)
    return ScheiblichPair(tree, concat_group(g, y.group))


def inverse(x: ScheiblichPair) -> ScheiblichPair:
    """(P, g)^-1 = (g^-1 P, g^-1)."""
    gbar = involute(x.group)
    tree = WordSet(x.alphabet, [concat_group(gbar, p) for p in x.tree])
    return ScheiblichPair(tree, ReducedWord(x.alphabet, gbar.letters))


def word_to_fim(w: Word) -> ScheiblichPair:
    """Canonical image of a word: reduced prefixes as tree, reduced word as group.

    This is a direct Munn-tree construction, independent of multiply, and the
    two are cross-checked in the tests via word_to_fim(uv) = product of images.
    """
    tree = reduce_set(prefix_closure(WordSet(w.alphabet, [w])))
    return ScheiblichPair(tree, reduce_word(w))


def group_image(x: ScheiblichPair) -> ReducedWord:
    """The maximal group image; forgets the tree."""
    return x.group


def is_idempotent(x: ScheiblichPair) -> bool:
    return len(x.group) == 0


def word_problem(u: Word, v: Word) -> bool:
    """Do u and v represent the same free inverse monoid element?"""
    if u.alphabet != v.alphabet:
        raise InvalidInput("alphabet mismatch")
    return word_to_fim(u) == word_to_fim(v)


def format_pair(x: ScheiblichPair) -> str:
    inner = ",".join(format_word(p) for p in x.tree)
    return f"(P={{{inner}}}; g={format_word(x.group)})"
