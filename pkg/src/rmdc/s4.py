"""Symmetric group data for S2 and S4: elements, products, classes, characters.

Permutations are tuples in one-line notation, ``p[i]`` being the image of
``i``.  The global element ordering is lexicographic in one-line notation;
every 24-vector of coefficients elsewhere in the package is indexed by it.
All entries are exact integers, validated by the orthogonality tests.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

Perm = tuple[int, ...]

# Lexicographic one-line ordering; identity comes first.
S2_ELEMENTS: tuple[Perm, ...] = tuple(itertools.permutations(range(2)))
S4_ELEMENTS: tuple[Perm, ...] = tuple(itertools.permutations(range(4)))

S2_INDEX = {p: i for i, p in enumerate(S2_ELEMENTS)}
S4_INDEX = {p: i for i, p in enumerate(S4_ELEMENTS)}

# Conjugacy classes of S4 by cycle type, in the fixed order
# e, (ab), (ab)(cd), (abc), (abcd).
S4_CLASS_ORDER: tuple[tuple[int, ...], ...] = (
    (1, 1, 1, 1),
    (2, 1, 1),
    (2, 2),
    (3, 1),
    (4,),
)
S4_CLASS_SIZES = (1, 6, 3, 8, 6)

# Irreducible characters of S4.  Rows follow the partition order
# [4], [3,1], [2,2], [2,1,1], [1,1,1,1]; columns follow S4_CLASS_ORDER.
S4_IRREP_LABELS = ("[4]", "[3,1]", "[2,2]", "[2,1,1]", "[1,1,1,1]")
S4_IRREP_DIMS = (1, 3, 2, 3, 1)
S4_CHARACTER_TABLE: tuple[tuple[int, ...], ...] = (
    (1, 1, 1, 1, 1),
    (3, 1, -1, 0, -1),
    (2, 0, 2, -1, 0),
    (3, -1, -1, 0, 1),
    (1, -1, 1, 1, -1),
)

# S2: trivial and sign, classes e and (01).
S2_CLASS_ORDER: tuple[tuple[int, ...], ...] = ((1, 1), (2,))
S2_CLASS_SIZES = (1, 1)
S2_IRREP_LABELS = ("[2]", "[1,1]")
S2_IRREP_DIMS = (1, 1)
S2_CHARACTER_TABLE: tuple[tuple[int, ...], ...] = ((1, 1), (1, -1))


def compose(p: Perm, q: Perm) -> Perm:
    """Product p*q acting as "apply q first, then p"."""
    return tuple(p[q[i]] for i in range(len(p)))


def inverse(p: Perm) -> Perm:
    inv = [0] * len(p)
    for i, j in enumerate(p):
        inv[j] = i
    return tuple(inv)


def cycles(p: Perm) -> list[tuple[int, ...]]:
    """Cycle decomposition including fixed points."""
    seen = [False] * len(p)
    out = []
    for start in range(len(p)):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        j = p[start]
        while j != start:
            cyc.append(j)
            seen[j] = True
            j = p[j]
        out.append(tuple(cyc))
    return out


def cycle_type(p: Perm) -> tuple[int, ...]:
    return tuple(sorted((len(c) for c in cycles(p)), reverse=True))


def cycle_count(p: Perm) -> int:
    return len(cycles(p))


@lru_cache(maxsize=None)
def class_index(p: Perm) -> int:
    """Index of p's conjugacy class in the fixed class order of its group."""
    order = S4_CLASS_ORDER if len(p) == 4 else S2_CLASS_ORDER
    return order.index(cycle_type(p))


def character(irrep: int, p: Perm) -> int:
    table = S4_CHARACTER_TABLE if len(p) == 4 else S2_CHARACTER_TABLE
    return table[irrep][class_index(p)]


def elements(t: int) -> tuple[Perm, ...]:
    if t == 2:
        return S2_ELEMENTS
    if t == 4:
        return S4_ELEMENTS
    raise ValueError(f"only S2 and S4 are supported, got t={t}")


def irrep_dims(t: int) -> tuple[int, ...]:
    return S4_IRREP_DIMS if t == 4 else S2_IRREP_DIMS


def character_table(t: int) -> tuple[tuple[int, ...], ...]:
    return S4_CHARACTER_TABLE if t == 4 else S2_CHARACTER_TABLE


def class_sizes(t: int) -> tuple[int, ...]:
    return S4_CLASS_SIZES if t == 4 else S2_CLASS_SIZES


# Named elements used by the analytics contractions.
S4_IDENTITY: Perm = (0, 1, 2, 3)
SWAP_12: Perm = (1, 0, 2, 3)          # transposition of the first two copies
SWAP_12_34: Perm = (1, 0, 3, 2)       # product of the two disjoint swaps
KLEIN_FOUR: tuple[Perm, ...] = ((0, 1, 2, 3), (1, 0, 3, 2), (2, 3, 0, 1), (3, 2, 1, 0))


def verify_character_orthogonality(t: int) -> None:
    """Raise if the hardcoded character table fails exact orthogonality."""
    table = character_table(t)
    sizes = class_sizes(t)
    group_order = sum(sizes) if t == 2 else 24
    if t == 2:
        group_order = 2
    for a, row_a in enumerate(table):
        for b, row_b in enumerate(table):
            dot = sum(s * x * y for s, x, y in zip(sizes, row_a, row_b))
            expected = group_order if a == b else 0
            if dot != expected:
                raise AssertionError(
                    f"character rows {a},{b} of S{t} fail orthogonality: {dot}"
                )
    dims = irrep_dims(t)
    if sum(x * x for x in dims) != group_order:
        raise AssertionError(f"irrep dimensions of S{t} do not sum to |G|")
