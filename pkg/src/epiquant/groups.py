"""Finite groups given by Cayley tables, and right actions on finite point sets.

Elements and points are referred to by index; names are kept for display
and file round-trips.  All checks are exact integer computations.
"""

from __future__ import annotations

from collections import deque
from typing import Iterable, Sequence

import numpy as np

from .errors import GroupError, NotASubgroup, NotInGeneratedSubgroup


class FiniteGroup:
    """A finite group as an element list plus a Cayley table on indices.

    ``cayley[i][j]`` is the index of ``elements[i] * elements[j]``.
    The constructor verifies the full group axioms (Latin square,
    associativity, identity, inverses) by exhaustive enumeration.
    """

    def __init__(self, elements: Sequence[str], cayley):
        if len(set(elements)) != len(elements):
            raise GroupError("duplicate element names")
        self.elements = tuple(str(e) for e in elements)
        table = np.asarray(cayley, dtype=np.int64)
        n = len(self.elements)
        if table.shape != (n, n):
            raise GroupError(f"cayley table shape {table.shape} != ({n}, {n})")
        if table.min(initial=0) < 0 or table.max(initial=0) >= n:
            raise GroupError("cayley entries out of range")
        self.cayley = table
        self._index = {e: i for i, e in enumerate(self.elements)}

        full = set(range(n))
        for i in range(n):
            if set(table[i, :].tolist()) != full:
                raise GroupError(f"row {self.elements[i]} is not a permutation")
            if set(table[:, i].tolist()) != full:
                raise GroupError(f"column {self.elements[i]} is not a permutation")

        identity = None
        for e in range(n):
            if all(table[e, j] == j and table[j, e] == j for j in range(n)):
                identity = e
                break
        if identity is None:
            raise GroupError("no identity element")
        self.identity = identity

        inv = np.full(n, -1, dtype=np.int64)
        for i in range(n):
            for j in range(n):
                if table[i, j] == identity and table[j, i] == identity:
                    inv[i] = j
                    break
            if inv[i] < 0:
                raise GroupError(f"{self.elements[i]} has no inverse")
        self.inverses = inv

        for i in range(n):
            for j in range(n):
                # associativity: (i j) k == i (j k) for all k, via table rows
                if not np.array_equal(table[table[i, j], :], table[i, table[j, :]]):
                    raise GroupError(
                        f"associativity fails at ({self.elements[i]}, {self.elements[j]})"
                    )

    def __len__(self):
        return len(self.elements)

    def index(self, name: str) -> int:
        if name not in self._index:
            raise GroupError(f"unknown element {name!r}")
        return self._index[name]

    def mul(self, i: int, j: int) -> int:
        return int(self.cayley[i, j])

    def inv(self, i: int) -> int:
        return int(self.inverses[i])

    def product(self, indices: Iterable[int]) -> int:
        acc = self.identity
        for i in indices:
            acc = self.mul(acc, i)
        return acc

    def is_subgroup(self, subset: Iterable[int]) -> bool:
        s = frozenset(subset)
        if self.identity not in s:
            return False
        return all(self.mul(a, b) in s and self.inv(a) in s for a in s for b in s)

    def closure(self, generators: Iterable[int]) -> frozenset[int]:
        """Subgroup generated by ``generators`` (closure under the table)."""
        gens = sorted(set(generators))
        seen = {self.identity, *gens}
        frontier = deque(sorted(seen))
        while frontier:
            a = frontier.popleft()
            for b in gens:
                c = self.mul(a, b)
                if c not in seen:
                    seen.add(c)
                    frontier.append(c)
        # generators of finite order provide inverses automatically
        return frozenset(seen)


class GroupAction:
    """A right action of a :class:`FiniteGroup` on a finite point set.

    ``perms[g][p]`` is the index of point ``p`` acted on by element ``g``.
    Verifies that the identity acts trivially and that the right-action
    law phi(gh) = (phi g)h holds for every pair of elements.
    """

    def __init__(self, group: FiniteGroup, points: Sequence[str], perms):
        if len(set(points)) != len(points):
            raise GroupError("duplicate point names")
        self.group = group
        self.points = tuple(str(p) for p in points)
        arr = np.asarray(perms, dtype=np.int64)
        m = len(self.points)
        if arr.shape != (len(group), m):
            raise GroupError(f"perms shape {arr.shape} != ({len(group)}, {m})")
        self.perms = arr
        self._point_index = {p: i for i, p in enumerate(self.points)}

        full = set(range(m))
        for g in range(len(group)):
            if set(arr[g, :].tolist()) != full:
                raise GroupError(
                    f"element {group.elements[g]} does not act by a bijection"
                )
        if not np.array_equal(arr[group.identity], np.arange(m)):
            raise GroupError("identity element does not act trivially")
        for g in range(len(group)):
            for h in range(len(group)):
                gh = group.mul(g, h)
                if not np.array_equal(arr[gh], arr[h][arr[g]]):
                    raise GroupError(
                        "right-action law fails at "
                        f"({group.elements[g]}, {group.elements[h]})"
                    )

    def __len__(self):
        return len(self.points)

    def point_index(self, name: str) -> int:
        if name not in self._point_index:
            raise GroupError(f"unknown point {name!r}")
        return self._point_index[name]

    def apply(self, point: int, g: int) -> int:
        return int(self.perms[g, point])


def orbits(action: GroupAction, subgroup: Iterable[int], domain: Iterable[int] | None = None):
    """Orbit partition of ``domain`` under ``subgroup``.

    Blocks are returned as sorted tuples, ordered by smallest member, so
    the partition is canonical.  Raises :class:`NotASubgroup` when the
    element set is not closed under the Cayley table.
    """
    sub = sorted(set(subgroup))
    if not action.group.is_subgroup(sub):
        raise NotASubgroup(f"{[action.group.elements[i] for i in sub]} is not a subgroup")
    if domain is None:
        domain = range(len(action.points))
    full = set(domain)
    remaining = set(full)
    blocks = []
    while remaining:
        start = min(remaining)
        orbit = {int(action.perms[g, start]) for g in sub}
        if not orbit <= full:
            raise NotASubgroup("domain is not invariant under the subgroup")
        blocks.append(tuple(sorted(orbit)))
        remaining -= orbit
    return blocks


def orbits_of_permutation_action(perms: np.ndarray, size: int):
    """Orbit partition of ``range(size)`` under an explicit permutation list."""
    remaining = set(range(size))
    blocks = []
    while remaining:
        start = min(remaining)
        seen = {start}
        frontier = [start]
        while frontier:
            p = frontier.pop()
            for row in perms:
                q = int(row[p])
                if q not in seen:
                    seen.add(q)
                    frontier.append(q)
        blocks.append(tuple(sorted(seen)))
        remaining -= seen
    return blocks


def word_decompose(group: FiniteGroup, g: int, generating_sets):
    """Shortest word over labelled subgroups whose product is ``g``.

    ``generating_sets`` is a list of ``(set_id, element_indices)`` pairs;
    each element set must be a subgroup.  The result is a list of
    ``(set_id, element_index)`` letters.  Tie-breaking is deterministic:
    breadth-first by word length, then lexicographic by position of the
    set in the list and element index.

    Raises :class:`NotInGeneratedSubgroup` if ``g`` is not a product of
    elements of the given sets.
    """
    alphabet = []
    for set_pos, (set_id, members) in enumerate(generating_sets):
        members = sorted(set(members))
        if not group.is_subgroup(members):
            raise NotASubgroup(f"generating set {set_id!r} is not a subgroup")
        for el in members:
            if el != group.identity:
                alphabet.append((set_pos, set_id, el))
    alphabet.sort(key=lambda t: (t[0], t[2]))

    if g == group.identity:
        return []
    words = {group.identity: []}
    queue = deque([group.identity])
    while queue:
        cur = queue.popleft()
        for _, set_id, el in alphabet:
            nxt = group.mul(cur, el)
            if nxt not in words:
                words[nxt] = words[cur] + [(set_id, el)]
                if nxt == g:
                    return words[nxt]
                queue.append(nxt)
    raise NotInGeneratedSubgroup(
        f"{group.elements[g]} is not in the subgroup generated by the given sets"
    )
