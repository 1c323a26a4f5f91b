"""The four recursive front constructions, emitted as valid FrontDiagrams.

Conventions shared by all generators:

* The ambient saucer is a lens with left/right cusps at (-8, 0) and (8, 0)
  and flat runs at z = 2 (ceiling) and z = -2 (floor, x in [-6, 6]).
* Every attachment junction of every nesting level sits on the floor, so
  nesting is interval containment of floor spans.  Attached features rise
  with first-segment slopes of magnitude ~2, well separated from the flat
  floor, which keeps same-side near-slopes distinct at every junction.
* Attachment junctions carry labels "a<v>L"/"a<v>R" (armadillo, mothership)
  or "h<v>a"/"h<v>b" (arboreal chord ends, a = lower end); move scripts
  resolve their symbolic sites through these labels.

Sizes shrink by shrink_ratio per level, so features never collide; the
validator asserts this rather than assuming it.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from treefronts.diagram import (
    CROSSING,
    JUNCTION,
    LEFT_CUSP,
    RIGHT_CUSP,
    Arc,
    FrontDiagram,
    Node,
)
from treefronts.geometry import Point, frac
from treefronts.tree import (
    RootedTree,
    TotalOrder,
    default_total_order,
    is_valid_total_order,
)


class UnsupportedDimensionError(ValueError):
    """Construction needs a higher front dimension than the implemented n = 2."""


@dataclass(frozen=True)
class SaucerParams:
    center: Point = (Fraction(0), Fraction(0))
    half_width: Fraction = Fraction(8)
    singular: bool = False

    def __post_init__(self):
        if self.half_width <= 0:
            raise ValueError("half_width must be positive")


@dataclass(frozen=True)
class GeneratorConfig:
    """Shared layout knobs.

    shrink_ratio controls how fast nested features shrink per level;
    slide_speed_base is the base of the per-level slide schedule used when
    scripts serialize simultaneous slides (deeper levels are scheduled
    first).
    """

    shrink_ratio: Fraction = Fraction(1, 4)
    slide_speed_base: Fraction = Fraction(2)

    def __post_init__(self):
        if not (0 < self.shrink_ratio < 1):
            raise ValueError("shrink_ratio must be in (0, 1)")
        if self.slide_speed_base <= 1:
            raise ValueError("slide_speed_base must exceed 1")


class _Builder:
    def __init__(self, tree_text: str | None):
        self.nodes: dict[int, Node] = {}
        self.arcs: dict[int, Arc] = {}
        self.tree_text = tree_text
        self._next = 0

    def node(self, kind: str, p: Point, label: str | None = None) -> int:
        nid = self._next
        self._next += 1
        self.nodes[nid] = Node(nid, kind, frac(p[0]), frac(p[1]), label)
        return nid

    def arc(self, n0: int, n1: int, points: list[Point]) -> int:
        aid = self._next
        self._next += 1
        pts = tuple((frac(x), frac(z)) for x, z in points)
        if pts[0] != self.nodes[n0].pos or pts[-1] != self.nodes[n1].pos:
            raise AssertionError("arc endpoints must sit on their nodes")
        self.arcs[aid] = Arc(aid, (n0, n1), pts)
        return aid

    def done(self) -> FrontDiagram:
        return FrontDiagram(self.nodes, self.arcs, self.tree_text)


def _saucer_outline(p: SaucerParams):
    cx, cz = p.center
    w = p.half_width
    lc = (cx - w, cz)
    rc = (cx + w, cz)
    if p.singular:
        top = [(cx, cz + w / 2)]
        bottom = [(cx, cz - w / 2)]
    else:
        top = [(cx - 3 * w / 4, cz + w / 4), (cx + 3 * w / 4, cz + w / 4)]
        bottom = [(cx - 3 * w / 4, cz - w / 4), (cx + 3 * w / 4, cz - w / 4)]
    return lc, rc, top, bottom


def gen_saucer(p: SaucerParams = SaucerParams()) -> FrontDiagram:
    """A standard Legendrian unknot front: two cusps, or two tangential
    corner junctions for the singular variant (the cube stood on its corner).
    """
    lc_pos, rc_pos, top, bottom = _saucer_outline(p)
    b = _Builder(None)
    kind_l = JUNCTION if p.singular else LEFT_CUSP
    kind_r = JUNCTION if p.singular else RIGHT_CUSP
    lc = b.node(kind_l, lc_pos)
    rc = b.node(kind_r, rc_pos)
    b.arc(lc, rc, [lc_pos] + top + [rc_pos])
    b.arc(lc, rc, [lc_pos] + bottom + [rc_pos])
    return b.done()


# --- shared floor layout ---------------------------------------------------

FLOOR_Z = Fraction(-2)
FLOOR_LO = Fraction(-6)
FLOOR_HI = Fraction(6)


@dataclass
class _Slot:
    vertex: int
    a: Fraction
    b: Fraction
    q: Fraction  # rise run; bump/pod heights scale with it

    @property
    def inner(self) -> tuple[Fraction, Fraction]:
        return (self.a + self.q, self.b - self.q)


def _child_slots(
    lo: Fraction, hi: Fraction, children: list[int], shrink: Fraction
) -> list[_Slot]:
    k = len(children)
    width = (hi - lo) / k
    slots = []
    for i, c in enumerate(children):
        a = lo + i * width + width / 6
        b = lo + (i + 1) * width - width / 6
        slots.append(_Slot(c, a, b, (b - a) * shrink))
    return slots


def _layout(
    t: RootedTree, o: TotalOrder, shrink: Fraction
) -> dict[int, _Slot]:
    """Assign each non-root vertex a floor span; siblings go left to right
    in the total order, children nest in the parent's inner span."""
    slots: dict[int, _Slot] = {}

    def place(v: int, lo: Fraction, hi: Fraction):
        kids = sorted(t.children[v], key=o.position)
        if not kids:
            return
        for slot in _child_slots(lo, hi, kids, shrink):
            slots[slot.vertex] = slot
            place(slot.vertex, *slot.inner)

    place(0, FLOOR_LO, FLOOR_HI)
    return slots


def _check_order(t: RootedTree, o: TotalOrder) -> None:
    if not is_valid_total_order(t, o):
        raise ValueError(
            f"order {o.sequence} does not extend the partial order of {t.serialize()}"
        )


def _saucer_shell(b: _Builder) -> tuple[int, int, list[tuple[Fraction, int]]]:
    """Left/right cusp nodes; floor junctions are appended by the caller."""
    lc = b.node(LEFT_CUSP, (Fraction(-8), Fraction(0)))
    rc = b.node(RIGHT_CUSP, (Fraction(8), Fraction(0)))
    b.arc(
        lc,
        rc,
        [(-8, 0), (FLOOR_LO, 2), (FLOOR_HI, 2), (8, 0)],
    )
    return lc, rc, []


def _floor_chain(b: _Builder, lc: int, rc: int, floor_nodes: list[int]) -> None:
    """Lower arc of the big saucer through all floor junctions, sorted by x."""
    ordered = sorted(floor_nodes, key=lambda nid: b.nodes[nid].x)
    prev = lc
    prev_pts: list[Point] = [(Fraction(-8), Fraction(0)), (FLOOR_LO, FLOOR_Z)]
    for nid in ordered:
        pos = b.nodes[nid].pos
        b.arc(prev, nid, prev_pts + [pos] if prev_pts[-1] != pos else prev_pts)
        prev = nid
        prev_pts = [pos]
    b.arc(prev, rc, prev_pts + [(FLOOR_HI, FLOOR_Z), (Fraction(8), Fraction(0))])


def gen_arboreal(
    t: RootedTree, config: GeneratorConfig = GeneratorConfig()
) -> FrontDiagram:
    """Recursive front of the arboreal link, front dimension 2 (|t| <= 3).

    Base case is the saucer; one child adds the diagonal slice through the
    middle; in the 3-vertex cases the second hyperplane chord either crosses
    the first transversally (shrub) or is drawn inside the lower half-unknot
    (path), terminating on the first chord and the floor.
    """
    del config
    if len(t) > 3:
        raise UnsupportedDimensionError(
            f"front dimension 2 supports at most 3 vertices, got {len(t)}"
        )
    if len(t) == 1:
        d = gen_saucer()
        d.tree_text = t.serialize()
        return d
    b = _Builder(t.serialize())
    lc = b.node(LEFT_CUSP, (Fraction(-8), Fraction(0)))
    rc = b.node(RIGHT_CUSP, (Fraction(8), Fraction(0)))
    if len(t) == 2:
        ja = b.node(JUNCTION, (Fraction(-4), FLOOR_Z), "h1a")
        jb = b.node(JUNCTION, (Fraction(0), Fraction(2)), "h1b")
        b.arc(lc, jb, [(-8, 0), (-6, 2), (0, 2)])
        b.arc(jb, rc, [(0, 2), (6, 2), (8, 0)])
        b.arc(ja, jb, [(-4, -2), (0, 2)])
        _floor_chain(b, lc, rc, [ja])
        return b.done()
    # two non-root vertices; preorder indices 1 and 2
    if len(t.children[0]) == 1:
        # path: recurse inside the lower half bounded by the first chord
        ja = b.node(JUNCTION, (Fraction(-4), FLOOR_Z), "h1a")
        jb = b.node(JUNCTION, (Fraction(0), Fraction(2)), "h1b")
        j3 = b.node(JUNCTION, (Fraction(-2), Fraction(0)), "h2b")
        j4 = b.node(JUNCTION, (Fraction(0), FLOOR_Z), "h2a")
        b.arc(lc, jb, [(-8, 0), (-6, 2), (0, 2)])
        b.arc(jb, rc, [(0, 2), (6, 2), (8, 0)])
        b.arc(ja, j3, [(-4, -2), (-2, 0)])
        b.arc(j3, jb, [(-2, 0), (0, 2)])
        b.arc(j3, j4, [(-2, 0), (0, -2)])
        _floor_chain(b, lc, rc, [ja, j4])
        return b.done()
    # shrub with two leaves: two hyperplane chords crossing once
    ja = b.node(JUNCTION, (Fraction(-4), FLOOR_Z), "h1a")
    jb = b.node(JUNCTION, (Fraction(0), Fraction(2)), "h1b")
    jd = b.node(JUNCTION, (Fraction(3), FLOOR_Z), "h2a")
    jc = b.node(JUNCTION, (Fraction(-1), Fraction(2)), "h2b")
    x = b.node(CROSSING, (Fraction(-1, 2), Fraction(3, 2)))
    b.arc(lc, jc, [(-8, 0), (-6, 2), (-1, 2)])
    b.arc(jc, jb, [(-1, 2), (0, 2)])
    b.arc(jb, rc, [(0, 2), (6, 2), (8, 0)])
    b.arc(ja, x, [(-4, -2), (Fraction(-1, 2), Fraction(3, 2))])
    b.arc(x, jb, [(Fraction(-1, 2), Fraction(3, 2)), (0, 2)])
    b.arc(jc, x, [(-1, 2), (Fraction(-1, 2), Fraction(3, 2))])
    b.arc(x, jd, [(Fraction(-1, 2), Fraction(3, 2)), (3, -2)])
    _floor_chain(b, lc, rc, [ja, jd])
    return b.done()


def gen_armadillo(
    t: RootedTree,
    o: TotalOrder | None = None,
    config: GeneratorConfig = GeneratorConfig(),
) -> FrontDiagram:
    """The plumbing-skeleton front: each non-root vertex is a small unknot
    sharing a floor segment with its parent, drawn as an upward pushoff bump
    over that segment.  Siblings sit left to right in the total order;
    recursion nests inside the shared segment.
    """
    if o is None:
        o = default_total_order(t)
    _check_order(t, o)
    b = _Builder(t.serialize())
    lc, rc, _ = _saucer_shell(b)
    slots = _layout(t, o, config.shrink_ratio)
    floor_nodes = []
    for v in sorted(slots):
        s = slots[v]
        jl = b.node(JUNCTION, (s.a, FLOOR_Z), f"a{v}L")
        jr = b.node(JUNCTION, (s.b, FLOOR_Z), f"a{v}R")
        floor_nodes += [jl, jr]
        b.arc(
            jl,
            jr,
            [
                (s.a, FLOOR_Z),
                (s.a + s.q / 2, FLOOR_Z + s.q),
                (s.b - s.q / 2, FLOOR_Z + s.q),
                (s.b, FLOOR_Z),
            ],
        )
    _floor_chain(b, lc, rc, floor_nodes)
    return b.done()


def gen_mothership(
    t: RootedTree,
    o: TotalOrder | None = None,
    config: GeneratorConfig = GeneratorConfig(),
) -> FrontDiagram:
    """Mothership front: each non-root vertex is a pod, a cusped lens
    standing on the parent's floor span, attached at two junctions with its
    cusps sticking out sideways just above them.  Same nesting and ordering
    as the armadillo.
    """
    if o is None:
        o = default_total_order(t)
    _check_order(t, o)
    b = _Builder(t.serialize())
    lc, rc, _ = _saucer_shell(b)
    slots = _layout(t, o, config.shrink_ratio)
    floor_nodes = []
    for v in sorted(slots):
        s = slots[v]
        _pod(b, v, s, floor_nodes)
    _floor_chain(b, lc, rc, floor_nodes)
    return b.done()


def _pod(b: _Builder, v: int, s: _Slot, floor_nodes: list[int]) -> None:
    q = s.q
    e = q / 2
    j1 = b.node(JUNCTION, (s.a, FLOOR_Z), f"a{v}L")
    j2 = b.node(JUNCTION, (s.b, FLOOR_Z), f"a{v}R")
    cl = b.node(LEFT_CUSP, (s.a - e, FLOOR_Z + q))
    cr = b.node(RIGHT_CUSP, (s.b + e, FLOOR_Z + q))
    floor_nodes += [j1, j2]
    b.arc(j1, cl, [(s.a, FLOOR_Z), (s.a - e, FLOOR_Z + q)])
    b.arc(
        cl,
        cr,
        [
            (s.a - e, FLOOR_Z + q),
            (s.a, FLOOR_Z + 3 * q / 2),
            (s.b, FLOOR_Z + 3 * q / 2),
            (s.b + e, FLOOR_Z + q),
        ],
    )
    b.arc(cr, j2, [(s.b + e, FLOOR_Z + q), (s.b, FLOOR_Z)])


def _marked_layout(t: RootedTree, shrink: Fraction) -> dict[int, _Slot]:
    """Coordinated placement: pods sit on small disks around the marked
    simplex-facet centers of their level's floor span.  The non-root vertex
    with preorder index i uses the i-th coordinate, whose facet center is
    the left marked point for i = 1 and the right one for i = 2.
    """
    slots: dict[int, _Slot] = {}

    def place(v: int, lo: Fraction, hi: Fraction):
        width = hi - lo
        center = (lo + hi) / 2
        marked = {1: center - width / 4, 2: center + width / 4}
        r = width / 12
        for c in t.children[v]:
            p = marked[1 if c == 1 else 2]
            slot = _Slot(c, p - r, p + r, 2 * r * shrink)
            slots[c] = slot
            place(c, *slot.inner)

    place(0, FLOOR_LO, FLOOR_HI)
    return slots


def gen_coordinated_mothership(
    t: RootedTree, config: GeneratorConfig = GeneratorConfig()
) -> FrontDiagram:
    """Mothership with pod bases at the marked facet centers (n = 2: the two
    endpoints of a segment inscribed in the floor span).  Isomorphic to the
    default-order mothership by construction.
    """
    if len(t) > 3:
        raise UnsupportedDimensionError(
            f"front dimension 2 supports at most 3 vertices, got {len(t)}"
        )
    b = _Builder(t.serialize())
    lc, rc, _ = _saucer_shell(b)
    slots = _marked_layout(t, config.shrink_ratio)
    floor_nodes = []
    for v in sorted(slots):
        _pod(b, v, slots[v], floor_nodes)
    _floor_chain(b, lc, rc, floor_nodes)
    return b.done()
