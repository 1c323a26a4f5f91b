"""Tree quivers and their indecomposable-representation counts.

The count of indecomposables for a finite-type tree quiver equals the number
of positive roots of the underlying Dynkin diagram (Gabriel), and does not
depend on the edge orientations.  Roots are enumerated by closing the simple
roots under simple reflections, keeping the non-negative vectors.
"""

from __future__ import annotations

from dataclasses import dataclass

from treefronts.tree import RootedTree


class NotFiniteTypeError(ValueError):
    pass


@dataclass(frozen=True)
class TreeQuiver:
    """Rooted tree with an orientation for each tree edge.

    An edge {parent(v), v} is stored under the child v; True means oriented
    away from the root (the default), False means toward it.
    """

    tree: RootedTree
    away_from_root: tuple[bool, ...] = None  # type: ignore[assignment]

    def __post_init__(self):
        if self.away_from_root is None:
            object.__setattr__(
                self, "away_from_root", (True,) * (len(self.tree) - 1)
            )
        if len(self.away_from_root) != len(self.tree) - 1:
            raise ValueError("need one orientation per non-root vertex")


def _adjacency(t: RootedTree) -> list[set[int]]:
    adj: list[set[int]] = [set() for _ in t.vertices]
    for v, p in enumerate(t.parent):
        if p is not None:
            adj[v].add(p)
            adj[p].add(v)
    return adj


def classify(t: RootedTree) -> str:
    """ADE classification of the underlying unrooted tree.

    Returns one of "A_n", "D_n", "E6", "E7", "E8" (with n substituted), or
    "not-finite-type".
    """
    n = len(t)
    adj = _adjacency(t)
    degrees = sorted(len(a) for a in adj)
    if degrees and degrees[-1] <= 2:
        return f"A_{n}"
    if degrees[-1] >= 4:
        return "not-finite-type"
    branch = [v for v in t.vertices if len(adj[v]) == 3]
    if len(branch) != 1:
        return "not-finite-type"
    b = branch[0]
    arms = []
    for start in adj[b]:
        length = 1
        prev, cur = b, start
        while True:
            nxt = [w for w in adj[cur] if w != prev]
            if not nxt:
                break
            prev, cur = cur, nxt[0]
            length += 1
        arms.append(length)
    arms.sort()
    if arms[0] == 1 and arms[1] == 1:
        return f"D_{n}"
    if arms == [1, 2, 2]:
        return "E6"
    if arms == [1, 2, 3]:
        return "E7"
    if arms == [1, 2, 4]:
        return "E8"
    return "not-finite-type"


def positive_roots(t: RootedTree) -> set[tuple[int, ...]]:
    """Positive roots of the tree's root system via reflection closure.

    Simple reflections act by s_i(v)_i = -v_i + sum of v_j over neighbours j;
    the closure of the simple roots intersected with the non-negative orthant
    is the positive root set.  Terminates exactly for finite-type trees, so
    classify first.
    """
    adj = _adjacency(t)
    n = len(t)
    simple = [tuple(1 if j == i else 0 for j in range(n)) for i in range(n)]
    seen: set[tuple[int, ...]] = set(simple)
    work = list(simple)
    while work:
        v = work.pop()
        for i in range(n):
            w = list(v)
            w[i] = -v[i] + sum(v[j] for j in adj[i])
            wt = tuple(w)
            if wt not in seen and all(c >= 0 for c in wt):
                seen.add(wt)
                work.append(wt)
    return seen


def count_indecomposables(q: TreeQuiver) -> int:
    """Number of indecomposable representations of a finite-type tree quiver."""
    kind = classify(q.tree)
    if kind == "not-finite-type":
        raise NotFiniteTypeError(
            f"tree {q.tree.serialize()} is not of finite representation type"
        )
    return len(positive_roots(q.tree))
