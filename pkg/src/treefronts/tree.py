"""Rooted trees, total orders extending the tree order, and tree surgeries.

Trees are written as balanced parenthesis strings: "()" is a single vertex,
"(()())" is a root with two leaf children.  Vertex ids are small integers in
parse (preorder) order, so the root is always 0.  Child order is stored and
meaningful: it seeds the default total order used by the generators.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field


class TreeParseError(ValueError):
    """Raised for malformed parenthesis input; carries the offending position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


@dataclass(frozen=True)
class RootedTree:
    """Finite rooted tree with integer vertex ids and stored child order."""

    parent: tuple[int | None, ...]
    children: tuple[tuple[int, ...], ...]
    labels: tuple[str | None, ...] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.labels is None:
            object.__setattr__(self, "labels", (None,) * len(self.parent))
        if len(self.parent) == 0:
            raise ValueError("tree must have at least one vertex")
        roots = [v for v, p in enumerate(self.parent) if p is None]
        if roots != [0]:
            raise ValueError("exactly one root with id 0 expected")
        for v, p in enumerate(self.parent):
            if p is not None and not (0 <= p < len(self.parent)):
                raise ValueError(f"parent of {v} out of range")
        # acyclicity: walking parent links must terminate at the root
        for v in range(len(self.parent)):
            seen = set()
            while v != 0:
                if v in seen:
                    raise ValueError("parent links contain a cycle")
                seen.add(v)
                v = self.parent[v]  # type: ignore[assignment]

    @property
    def root(self) -> int:
        return 0

    @property
    def vertices(self) -> range:
        return range(len(self.parent))

    def __len__(self) -> int:
        return len(self.parent)

    def depth(self, v: int) -> int:
        d = 0
        while self.parent[v] is not None:
            v = self.parent[v]  # type: ignore[assignment]
            d += 1
        return d

    def descendants(self, v: int) -> list[int]:
        """v together with everything below it, in preorder."""
        out = [v]
        stack = list(reversed(self.children[v]))
        while stack:
            w = stack.pop()
            out.append(w)
            stack.extend(reversed(self.children[w]))
        return out

    def serialize(self) -> str:
        def emit(v: int) -> str:
            return "(" + "".join(emit(c) for c in self.children[v]) + ")"

        return emit(0)

    def __str__(self) -> str:
        return self.serialize()


@dataclass(frozen=True)
class TotalOrder:
    """Permutation of the vertex ids extending the tree partial order."""

    sequence: tuple[int, ...]

    def position(self, v: int) -> int:
        return self.sequence.index(v)


def _build(parents: list[int | None], labels: list[str | None]) -> RootedTree:
    children: list[list[int]] = [[] for _ in parents]
    for v, p in enumerate(parents):
        if p is not None:
            children[p].append(v)
    return RootedTree(tuple(parents), tuple(tuple(c) for c in children), tuple(labels))


def parse_tree(text: str) -> RootedTree:
    """Parse a balanced-parenthesis string into a rooted tree.

    Nesting gives the tree structure; child order equals left-to-right text
    order.  The input must be one balanced group, e.g. "(()())".
    """
    s = text.strip()
    if not s:
        raise TreeParseError("empty input", 0)
    parents: list[int | None] = []
    labels: list[str | None] = []
    stack: list[int] = []
    for i, ch in enumerate(s):
        if ch == "(":
            parents.append(stack[-1] if stack else None)
            labels.append(None)
            if len(parents) > 1 and not stack:
                raise TreeParseError("multiple top-level groups", i)
            stack.append(len(parents) - 1)
        elif ch == ")":
            if not stack:
                raise TreeParseError("unbalanced ')'", i)
            stack.pop()
        elif ch.isspace():
            continue
        else:
            raise TreeParseError(f"unexpected character {ch!r}", i)
    if stack:
        raise TreeParseError("unbalanced '('", len(s) - 1)
    if not parents:
        raise TreeParseError("empty input", 0)
    return _build(parents, labels)


def subtree_from(t: RootedTree, v: int) -> RootedTree:
    """The tree growing from v: v and all its descendants, rerooted at v."""
    if v not in t.vertices:
        raise KeyError(f"unknown vertex id {v}")
    order = t.descendants(v)
    remap = {old: new for new, old in enumerate(order)}
    parents: list[int | None] = [None] * len(order)
    labels: list[str | None] = [t.labels[old] for old in order]
    for old in order[1:]:
        parents[remap[old]] = remap[t.parent[old]]  # type: ignore[index]
    return _build(parents, labels)


def prune_to_shrub(t: RootedTree) -> RootedTree:
    """Restrict to the root and its children (drop everything deeper)."""
    keep = [0] + list(t.children[0])
    remap = {old: new for new, old in enumerate(keep)}
    parents: list[int | None] = [None] + [0] * (len(keep) - 1)
    labels = [t.labels[old] for old in keep]
    del remap
    return _build(parents, labels)


def is_shrub(t: RootedTree) -> bool:
    """True iff every vertex is at distance at most one from the root."""
    return all(t.depth(v) <= 1 for v in t.vertices)


def default_total_order(t: RootedTree) -> TotalOrder:
    """Depth-first preorder with children visited in stored child order."""
    return TotalOrder(tuple(t.descendants(0)))


def is_valid_total_order(t: RootedTree, o: TotalOrder) -> bool:
    if sorted(o.sequence) != list(t.vertices):
        return False
    pos = {v: i for i, v in enumerate(o.sequence)}
    return all(
        pos[p] < pos[v] for v, p in enumerate(t.parent) if p is not None
    )


def all_total_orders(t: RootedTree) -> list[TotalOrder]:
    """Every total order compatible with the tree partial order.

    Exhaustive; meant for desk-scale trees (the acceptance suite uses at
    most 5 vertices).
    """
    out = []
    for perm in itertools.permutations(t.vertices):
        o = TotalOrder(perm)
        if is_valid_total_order(t, o):
            out.append(o)
    return out


def all_trees(max_vertices: int) -> list[RootedTree]:
    """All rooted trees (with child order) up to the given size.

    Plane trees are enumerated by their parenthesis strings, so trees that
    differ only in child order appear once per ordering.
    """

    def gen(n: int) -> list[str]:
        if n == 1:
            return ["()"]
        out = []
        # split n-1 remaining vertices among an ordered list of subtrees
        def parts(m: int) -> list[list[int]]:
            if m == 0:
                return [[]]
            res = []
            for first in range(1, m + 1):
                for rest in parts(m - first):
                    res.append([first] + rest)
            return res

        for split in parts(n - 1):
            for combo in itertools.product(*(gen(k) for k in split)):
                out.append("(" + "".join(combo) + ")")
        return sorted(set(out))

    trees = []
    for n in range(1, max_vertices + 1):
        trees.extend(parse_tree(s) for s in gen(n))
    return trees
