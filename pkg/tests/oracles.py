"""Independent naive reference implementations used only by the tests.

Everything here works on raw letter-index tuples and deliberately avoids the
package's own algorithms, so that agreement between the two is evidence.
"""

from __future__ import annotations

import itertools


def naive_reduce(letters: tuple[int, ...], bar: tuple[int, ...]) -> tuple[int, ...]:
    """Repeatedly rescan and erase the first factor a bar(a)."""
    w = list(letters)
    changed = True
    while changed:
        changed = False
        for i in range(len(w) - 1):
            if w[i + 1] == bar[w[i]]:
                del w[i : i + 2]
                changed = True
                break
    return tuple(w)


def naive_factor_count(u: tuple[int, ...], p: tuple[int, ...]) -> int:
    return sum(1 for i in range(len(u)) if u[i : i + len(p)] == p)


def naive_prefixes(u: tuple[int, ...]) -> set[tuple[int, ...]]:
    return {u[:i] for i in range(len(u) + 1)}


def all_tuples(n_letters: int, max_len: int) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = []
    for n in range(max_len + 1):
        out.extend(itertools.product(range(n_letters), repeat=n))
    return out


def reduced_tuples(bar: tuple[int, ...], max_len: int) -> list[tuple[int, ...]]:
    out = []
    for t in all_tuples(len(bar), max_len):
        if all(t[i + 1] != bar[t[i]] for i in range(len(t) - 1)):
            out.append(t)
    return out


_PC_CACHE: dict = {}


def prefix_closed_subsets(
    bar: tuple[int, ...], max_len: int, _forbidden: int = -1
) -> list[frozenset[tuple[int, ...]]]:
    """All prefix-closed sets of reduced tuples of length <= max_len containing ().

    A set is a choice, per admissible first letter a, of either nothing or a
    prefix-closed subtree whose own first letters avoid bar(a).
    """
    key = (bar, max_len, _forbidden)
    if key in _PC_CACHE:
        return _PC_CACHE[key]
    if max_len == 0:
        out = [frozenset({()})]
        _PC_CACHE[key] = out
        return out
    letters = [a for a in range(len(bar)) if a != _forbidden]
    per_letter: list[list] = []
    for a in letters:
        subs = prefix_closed_subsets(bar, max_len - 1, bar[a])
        per_letter.append([None] + [frozenset((a,) + t for t in s) for s in subs])
    out = []
    for combo in itertools.product(*per_letter):
        s = frozenset({()}).union(*(c for c in combo if c is not None))
        out.append(s)
    out.sort(key=lambda s: (len(s), sorted(s)))
    _PC_CACHE[key] = out
    return out
