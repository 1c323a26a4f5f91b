"""Geometric surgery engine behind the move calculus.

The central primitive is the re-stub: detach an arc-end, remove an initial
portion of its strand (consuming cusps and crossings that lie on it), and
re-route a fresh stub from a new attachment point to the cut.  Cusps are
born exactly where the fresh route has to reverse x-direction, and the stub
acquires crossing nodes wherever it transversally meets other arcs, which
is how slides encode the distinct-lift principle for fronts.

Everything is exact rational arithmetic; feasibility failures surface as
RealizationError, and callers retry with perturbed parameters.
"""

from __future__ import annotations

from fractions import Fraction

from treefronts.diagram import (
    CROSSING,
    JUNCTION,
    LEFT_CUSP,
    RIGHT_CUSP,
    Arc,
    FrontDiagram,
    Node,
    validate,
)
from treefronts.geometry import (
    Point,
    on_segment,
    proper_intersection,
    split_polyline_at,
)


class RealizationError(ValueError):
    """The rewritten fragment could not be embedded with rational coordinates."""


class Editor:
    """Mutable copy of a diagram with id allocation and structural edits."""

    def __init__(self, d: FrontDiagram):
        self.nodes: dict[int, Node] = dict(d.nodes)
        self.arcs: dict[int, Arc] = dict(d.arcs)
        self.tree_text = d.tree_text
        self._next = max([*self.nodes, *self.arcs], default=0) + 1

    def fresh(self) -> int:
        nid = self._next
        self._next += 1
        return nid

    def diagram(self) -> FrontDiagram:
        return FrontDiagram(dict(self.nodes), dict(self.arcs), self.tree_text)

    def ends_at(self, nid: int) -> list[tuple[int, int]]:
        out = []
        for aid in sorted(self.arcs):
            arc = self.arcs[aid]
            if arc.ends is None:
                continue
            for e in (0, 1):
                if arc.ends[e] == nid:
                    out.append((aid, e))
        return out

    def add_node(self, kind: str, pos: Point, label: str | None = None) -> int:
        nid = self.fresh()
        self.nodes[nid] = Node(nid, kind, pos[0], pos[1], label)
        return nid

    def add_arc(self, n0: int, n1: int, points: list[Point]) -> int:
        aid = self.fresh()
        pts = tuple(points)
        if pts[0] != self.nodes[n0].pos or pts[-1] != self.nodes[n1].pos:
            raise RealizationError("arc endpoints must coincide with node positions")
        self.arcs[aid] = Arc(aid, (n0, n1), pts)
        return aid

    def split_arc(self, aid: int, pt: Point, kind: str, label: str | None = None) -> int:
        """Insert a node at an interior point of an arc; returns the node id."""
        arc = self.arcs[aid]
        try:
            left, right = split_polyline_at(list(arc.points), pt)
        except ValueError as exc:
            raise RealizationError(str(exc)) from exc
        nid = self.add_node(kind, pt, label)
        del self.arcs[aid]
        a1 = self.fresh()
        a2 = self.fresh()
        self.arcs[a1] = Arc(a1, (arc.ends[0], nid), tuple(left))
        self.arcs[a2] = Arc(a2, (nid, arc.ends[1]), tuple(right))
        return nid

    def merge_through(self, nid: int) -> int:
        """Remove a two-ended node, joining its arcs into one."""
        ends = self.ends_at(nid)
        if len(ends) != 2:
            raise RealizationError(f"cannot dissolve node {nid} of valence {len(ends)}")
        (a1, e1), (a2, e2) = ends
        if a1 == a2:
            raise RealizationError("cannot dissolve a node carrying both ends of one arc")
        arc1, arc2 = self.arcs[a1], self.arcs[a2]
        pts1 = list(arc1.points) if e1 == 1 else list(reversed(arc1.points))
        pts2 = list(arc2.points) if e2 == 0 else list(reversed(arc2.points))
        start = arc1.ends[1 - e1]
        stop = arc2.ends[1 - e2]
        del self.arcs[a1]
        del self.arcs[a2]
        del self.nodes[nid]
        aid = self.fresh()
        self.arcs[aid] = Arc(aid, (start, stop), tuple(pts1 + pts2[1:]))
        return aid

    def maybe_dissolve_junction(self, nid: int) -> None:
        """A junction left with one end per side is a smooth point; remove it."""
        node = self.nodes.get(nid)
        if node is None or node.kind != JUNCTION:
            return
        ends = self.ends_at(nid)
        if len(ends) != 2:
            return
        sides = []
        for aid, e in ends:
            a, b = self.arcs[aid].first_segment(e)
            if b[0] == a[0]:
                return
            sides.append(1 if b[0] > a[0] else -1)
        if sides[0] != sides[1]:
            self.merge_through(nid)


# --- strand chains ---------------------------------------------------------


def strand_chain(ed: Editor, aid: int, e: int):
    """Pieces of the strand starting at arc-end (aid, e), walking away from
    it through cusps and crossings, stopping at the first junction.

    Returns (pieces, between, terminal): pieces[i] = (arc_id, entry_end),
    between[i] = the node joining piece i to piece i+1.
    """
    pieces = [(aid, e)]
    between: list[int] = []
    cur_arc, cur_entry = aid, e
    seen = {aid}
    while True:
        far = ed.arcs[cur_arc].end_node(1 - cur_entry)
        node = ed.nodes[far]
        if node.kind == JUNCTION:
            return pieces, between, far
        if node.kind in (LEFT_CUSP, RIGHT_CUSP):
            nxt = [x for x in ed.ends_at(far) if x != (cur_arc, 1 - cur_entry)]
            if len(nxt) != 1:
                raise RealizationError(f"cusp {far} is not two-ended")
            nxt_arc, nxt_e = nxt[0]
        else:  # crossing: continue along the strand with the matching slope
            this_end = (cur_arc, 1 - cur_entry)
            a, b = ed.arcs[cur_arc].first_segment(1 - cur_entry)
            s_in = (b[1] - a[1]) / (b[0] - a[0])
            side_in = 1 if b[0] > a[0] else -1
            mates = []
            for cand in ed.ends_at(far):
                if cand == this_end:
                    continue
                ca, cb = ed.arcs[cand[0]].first_segment(cand[1])
                if cb[0] == ca[0]:
                    continue
                s = (cb[1] - ca[1]) / (cb[0] - ca[0])
                side = 1 if cb[0] > ca[0] else -1
                if s == s_in and side == -side_in:
                    mates.append(cand)
            if len(mates) != 1:
                raise RealizationError(f"ambiguous continuation at crossing {far}")
            nxt_arc, nxt_e = mates[0]
        if nxt_arc in seen:
            raise RealizationError("strand chain loops back on itself")
        seen.add(nxt_arc)
        between.append(far)
        pieces.append((nxt_arc, nxt_e))
        cur_arc, cur_entry = nxt_arc, nxt_e


def piece_points(ed: Editor, piece: tuple[int, int]) -> list[Point]:
    """Polyline of a chain piece, oriented from the moving end onward."""
    aid, entry = piece
    pts = list(ed.arcs[aid].points)
    return pts if entry == 0 else list(reversed(pts))


def cut_point(points: list[Point], frac: Fraction) -> Point:
    """Point at the given x-fraction along an oriented polyline (from points[0])."""
    x0, x1 = points[0][0], points[-1][0]
    x = x0 + (x1 - x0) * frac
    pts = points if points[0][0] < points[-1][0] else list(reversed(points))
    for p, q in zip(pts, pts[1:]):
        if p[0] <= x <= q[0]:
            if x == p[0]:
                return p
            t = (x - p[0]) / (q[0] - p[0])
            return (x, p[1] + t * (q[1] - p[1]))
    return points[-1]


# --- the re-stub primitive --------------------------------------------------


def restub(
    ed: Editor,
    end: tuple[int, int],
    attach: int,
    germ_side: int,
    germ_slope: Fraction,
    consume: int,
    frac: Fraction,
    scale: Fraction,
) -> None:
    """Re-route the strand at `end` so it attaches at node `attach`.

    consume: number of interior nodes (cusps/crossings) of the strand to
    absorb; the strand is cut at `frac` of the following piece and the new
    stub runs from `attach` (leaving on `germ_side` with `germ_slope`) to
    the cut.
    """
    aid, e = end
    source = ed.arcs[aid].end_node(e)
    pieces, between, _terminal = strand_chain(ed, aid, e)
    if consume > len(between):
        raise RealizationError("consume exceeds the strand's interior nodes")
    consumed_nodes = between[:consume]
    if len(set(consumed_nodes)) != len(consumed_nodes):
        raise RealizationError("strand passes a node twice")
    cut_piece = pieces[consume]
    pts = piece_points(ed, cut_piece)
    p_cut = cut_point(pts, frac)
    if p_cut in (pts[0], pts[-1]):
        raise RealizationError("cut landed on a node")
    kept = _tail_after(pts, p_cut)
    if len(kept) < 2:
        raise RealizationError("cut too close to the piece's far end")
    d_arrive = 1 if kept[1][0] > p_cut[0] else -1
    far_node = ed.arcs[cut_piece[0]].end_node(1 - cut_piece[1])

    for p in pieces[: consume + 1]:
        del ed.arcs[p[0]]
    for nid in consumed_nodes:
        kind = ed.nodes[nid].kind
        if kind == CROSSING:
            live = ed.ends_at(nid)
            if len(live) == 0:
                del ed.nodes[nid]
            elif len(live) == 2:
                if live[0][0] == live[1][0]:
                    raise RealizationError("crossing rejoin hit a one-arc loop")
                ed.merge_through(nid)
            else:
                raise RealizationError(f"crossing {nid} left with {len(live)} ends")
        else:
            del ed.nodes[nid]

    attach_pos = ed.nodes[attach].pos
    route = _route(attach_pos, germ_side, germ_slope, p_cut, d_arrive, scale)
    full = route + kept[1:]
    _install_stub(ed, attach, far_node, full)
    ed.maybe_dissolve_junction(source)


def _tail_after(points: list[Point], p: Point) -> list[Point]:
    for i in range(len(points) - 1):
        if on_segment(p, points[i], points[i + 1]):
            tail = [p] + points[i + 1 :]
            if len(tail) >= 2 and tail[1] == p:
                tail = [p] + points[i + 2 :]
            return tail
    raise RealizationError("cut point fell off its piece")


def _route(
    start: Point,
    side: int,
    germ_slope: Fraction,
    target: Point,
    d_arrive: int,
    scale: Fraction,
) -> list[Point]:
    """Polyline from start to target leaving on `side` with `germ_slope`
    and arriving in x-direction `d_arrive`; reversals become turn vertices
    (turned into cusp nodes on installation)."""
    delta = scale
    g = (start[0] + side * delta, start[1] + side * delta * germ_slope)
    pts = [start, g]
    if side == d_arrive:
        if (target[0] - g[0]) * side > 0:
            pts.append(target)
            return pts
        # overshoot: out, back past the target, then in again (two turns)
        t1 = (g[0] + side * delta, (g[1] + target[1]) / 2)
        t2 = (target[0] - d_arrive * delta, (t1[1] + target[1]) / 2)
        if (t2[0] - t1[0]) * side >= 0 or (target[0] - t2[0]) * d_arrive <= 0:
            raise RealizationError("double-turn placement failed")
        pts += [t1, t2, target]
        return pts
    if side > 0:
        x_turn = max(g[0], target[0]) + delta
    else:
        x_turn = min(g[0], target[0]) - delta
    turn = (x_turn, (g[1] + target[1]) / 2)
    if (target[0] - x_turn) * d_arrive <= 0 or (x_turn - g[0]) * side <= 0:
        raise RealizationError("turn placement failed")
    pts += [turn, target]
    return pts


def _install_stub(ed: Editor, attach: int, far_node: int, points: list[Point]) -> None:
    """Split a route+tail polyline into x-monotone arcs joined by turnback
    cusps, then node-ify crossings with existing arcs."""
    runs: list[list[Point]] = [[points[0]]]
    for prev, cur in zip(points, points[1:]):
        if cur[0] == prev[0]:
            raise RealizationError("vertical segment in stub route")
        if len(runs[-1]) >= 2:
            d_prev = 1 if runs[-1][-1][0] > runs[-1][-2][0] else -1
            d_cur = 1 if cur[0] > prev[0] else -1
            if d_cur != d_prev:
                runs.append([prev])
        runs[-1].append(cur)
    node_seq = [attach]
    for run in runs[:-1]:
        turn = run[-1]
        fwd = 1 if run[-1][0] > run[0][0] else -1
        kind = RIGHT_CUSP if fwd > 0 else LEFT_CUSP
        node_seq.append(ed.add_node(kind, turn))
    node_seq.append(far_node)
    new_arcs = []
    for (n0, n1), run in zip(zip(node_seq, node_seq[1:]), runs):
        new_arcs.append(ed.add_arc(n0, n1, run))
    for aid in new_arcs:
        _insert_crossings(ed, aid)


def _insert_crossings(ed: Editor, stub_aid: int) -> None:
    while True:
        hit = _first_crossing(ed, stub_aid)
        if hit is None:
            return
        other_aid, pt = hit
        for nid in ed.nodes:
            if ed.nodes[nid].pos == pt:
                raise RealizationError("stub crosses at an existing node position")
        xid = ed.add_node(CROSSING, pt)
        stub_aid = _split_both(ed, stub_aid, other_aid, xid, pt)


def _first_crossing(ed: Editor, stub_aid: int):
    """Transversal intersection of the stub arc closest to its start."""
    stub = ed.arcs[stub_aid]
    spts = list(stub.points)
    forward = spts[0][0] < spts[-1][0]
    best = None
    for aid in sorted(ed.arcs):
        if aid == stub_aid:
            continue
        other = ed.arcs[aid]
        for i in range(len(spts) - 1):
            for j in range(len(other.points) - 1):
                pt = proper_intersection(
                    spts[i], spts[i + 1], other.points[j], other.points[j + 1]
                )
                if pt is None:
                    continue
                key = pt[0] if forward else -pt[0]
                if best is None or key < best[0]:
                    best = (key, aid, pt)
    if best is None:
        return None
    return best[1], best[2]


def _split_both(ed: Editor, stub_aid: int, other_aid: int, xid: int, pt: Point) -> int:
    """Split the stub and the arc it crosses at the new crossing node;
    returns the stub half beyond the crossing (stub points run start->far)."""
    o = ed.arcs[other_aid]
    try:
        left, right = split_polyline_at(list(o.points), pt)
    except ValueError as exc:
        raise RealizationError(str(exc)) from exc
    del ed.arcs[other_aid]
    o1, o2 = ed.fresh(), ed.fresh()
    ed.arcs[o1] = Arc(o1, (o.ends[0], xid), tuple(left))
    ed.arcs[o2] = Arc(o2, (xid, o.ends[1]), tuple(right))
    s = ed.arcs[stub_aid]
    try:
        left, right = split_polyline_at(list(s.points), pt)
    except ValueError as exc:
        raise RealizationError(str(exc)) from exc
    del ed.arcs[stub_aid]
    s1, s2 = ed.fresh(), ed.fresh()
    ed.arcs[s1] = Arc(s1, (s.ends[0], xid), tuple(left))
    ed.arcs[s2] = Arc(s2, (xid, s.ends[1]), tuple(right))
    return s2


def checked(ed: Editor) -> FrontDiagram:
    d = ed.diagram()
    report = validate(d)
    if not report.ok:
        raise RealizationError(f"rewrite produced an invalid diagram: {report.summary()}")
    return d
