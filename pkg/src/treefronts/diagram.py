"""The front-diagram data model and its derived structure.

A FrontDiagram is a planar combinatorial map whose arcs carry embedded
polylines, strictly monotone in x (no vertical tangencies away from cusp
nodes).  Node kinds are left_cusp, right_cusp, crossing and junction.  All
coordinates are exact rationals, so validity and the near-vertex slope
comparisons that drive the cyclic order are decided exactly.

The near-vertex slope of an arc-end is the slope of its first polyline
segment.  In a front all arcs at a junction share the true slope at the
node; the first-segment slope stands in for the second-order data that
breaks the tie, and only its side (left/right of the node) and its rank
among same-side ends are combinatorially meaningful.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field, replace
from fractions import Fraction

from treefronts.geometry import (
    Point,
    frac,
    frac_str,
    on_segment,
    polyline_is_x_monotone,
    proper_intersection,
    segments_intersect,
    slope,
)

LEFT_CUSP = "left_cusp"
RIGHT_CUSP = "right_cusp"
CROSSING = "crossing"
JUNCTION = "junction"
KINDS = (LEFT_CUSP, RIGHT_CUSP, CROSSING, JUNCTION)


class InvalidDiagramError(ValueError):
    """Raised when an operation requires a valid diagram but got violations."""

    def __init__(self, report: "ValidityReport"):
        super().__init__(f"invalid diagram: {report.summary()}")
        self.report = report


class DiagramFormatError(ValueError):
    pass


class CyclicOrderTieError(ValueError):
    """Two same-side arc-ends at a junction share a near-vertex slope."""


@dataclass(frozen=True)
class Node:
    id: int
    kind: str
    x: Fraction
    z: Fraction
    label: str | None = None

    @property
    def pos(self) -> Point:
        return (self.x, self.z)


@dataclass(frozen=True)
class Arc:
    """An embedded arc.  ends is (node_id, node_id), or None for a closed loop.

    points runs from the end-0 node to the end-1 node and must be strictly
    x-monotone for non-loops.
    """

    id: int
    ends: tuple[int, int] | None
    points: tuple[Point, ...]

    def end_node(self, e: int) -> int:
        if self.ends is None:
            raise ValueError(f"arc {self.id} is a loop")
        return self.ends[e]

    def first_segment(self, e: int) -> tuple[Point, Point]:
        if e == 0:
            return self.points[0], self.points[1]
        return self.points[-1], self.points[-2]


@dataclass
class FrontDiagram:
    """Planar combinatorial map with embedded monotone arcs.

    Treat instances as immutable values; the move engine always builds new
    diagrams.  The rotation system is derived from the geometry on demand.
    """

    nodes: dict[int, Node]
    arcs: dict[int, Arc]
    tree_text: str | None = None

    # --- basic structure ----------------------------------------------

    def ends_at(self, node_id: int) -> list[tuple[int, int]]:
        """Arc-ends (arc id, end index) incident to a node, id-sorted."""
        out = []
        for aid in sorted(self.arcs):
            arc = self.arcs[aid]
            if arc.ends is None:
                continue
            for e in (0, 1):
                if arc.ends[e] == node_id:
                    out.append((aid, e))
        return out

    def end_side(self, aid: int, e: int) -> int:
        """+1 if the end leaves its node rightward, -1 leftward."""
        a, b = self.arcs[aid].first_segment(e)
        dx = b[0] - a[0]
        if dx == 0:
            raise ValueError(f"vertical first segment on arc {aid}")
        return 1 if dx > 0 else -1

    def near_slope(self, aid: int, e: int) -> Fraction:
        a, b = self.arcs[aid].first_segment(e)
        return slope(a, b)

    def rotation(self, node_id: int) -> tuple[tuple[int, int], ...]:
        """Incident arc-ends in counterclockwise planar order.

        Rightward ends by increasing near-slope, then leftward ends by
        increasing near-slope (the planar circle is swept CCW from straight
        down).
        """
        ends = self.ends_at(node_id)
        right = sorted(
            (x for x in ends if self.end_side(*x) > 0),
            key=lambda x: (self.near_slope(*x), x),
        )
        left = sorted(
            (x for x in ends if self.end_side(*x) < 0),
            key=lambda x: (self.near_slope(*x), x),
        )
        return tuple(right + left)

    def node_ids_by_label(self) -> dict[str, int]:
        out: dict[str, int] = {}
        for nid in sorted(self.nodes):
            lab = self.nodes[nid].label
            if lab is not None:
                out[lab] = nid
        return out

    def copy(self) -> "FrontDiagram":
        return FrontDiagram(dict(self.nodes), dict(self.arcs), self.tree_text)

    def with_label(self, node_id: int, label: str | None) -> "FrontDiagram":
        d = self.copy()
        d.nodes[node_id] = replace(d.nodes[node_id], label=label)
        return d


# --- validity -----------------------------------------------------------


@dataclass(frozen=True)
class Violation:
    rule: str
    subject: str
    coordinates: tuple[str, str] | None = None

    def as_dict(self) -> dict:
        out = {"rule": self.rule, "subject": self.subject}
        if self.coordinates is not None:
            out["coordinates"] = list(self.coordinates)
        return out


@dataclass(frozen=True)
class ValidityReport:
    violations: tuple[Violation, ...]

    def __bool__(self) -> bool:
        return not self.violations

    @property
    def ok(self) -> bool:
        return not self.violations

    def summary(self) -> str:
        if self.ok:
            return "valid"
        return "; ".join(f"{v.rule}[{v.subject}]" for v in self.violations)


def _coord(p: Point) -> tuple[str, str]:
    return (frac_str(p[0]), frac_str(p[1]))


def validate(d: FrontDiagram) -> ValidityReport:
    """Check every FrontDiagram invariant; violations are data, not errors."""
    out: list[Violation] = []

    for aid in sorted(d.arcs):
        arc = d.arcs[aid]
        pts = list(arc.points)
        if len(pts) < 2:
            out.append(Violation("arc_too_short", f"arc {aid}"))
            continue
        for p, q in zip(pts, pts[1:]):
            if p[0] == q[0]:
                out.append(
                    Violation("vertical_tangency", f"arc {aid}", _coord(p))
                )
                break
        if arc.ends is None:
            if pts[0] != pts[-1]:
                out.append(Violation("loop_not_closed", f"arc {aid}"))
            continue
        if not polyline_is_x_monotone(pts):
            out.append(Violation("arc_not_monotone", f"arc {aid}", _coord(pts[0])))
        for e in (0, 1):
            nid = arc.ends[e]
            if nid not in d.nodes:
                out.append(Violation("dangling_end", f"arc {aid} end {e}"))
                continue
            endpoint = pts[0] if e == 0 else pts[-1]
            if endpoint != d.nodes[nid].pos:
                out.append(
                    Violation("endpoint_mismatch", f"arc {aid} end {e}", _coord(endpoint))
                )

    for nid in sorted(d.nodes):
        node = d.nodes[nid]
        ends = d.ends_at(nid)
        try:
            sides = [d.end_side(*x) for x in ends]
            slopes = [d.near_slope(*x) for x in ends]
        except (ValueError, ZeroDivisionError):
            continue  # already reported as vertical_tangency
        if node.kind in (LEFT_CUSP, RIGHT_CUSP):
            want = 1 if node.kind == LEFT_CUSP else -1
            if len(ends) != 2:
                out.append(Violation("cusp_valence", f"node {nid}", _coord(node.pos)))
            elif any(s != want for s in sides):
                out.append(Violation("cusp_side", f"node {nid}", _coord(node.pos)))
            elif slopes[0] == slopes[1]:
                out.append(Violation("cusp_slope_tie", f"node {nid}", _coord(node.pos)))
        elif node.kind == CROSSING:
            if len(ends) != 4 or sorted(sides) != [-1, -1, 1, 1]:
                out.append(Violation("crossing_valence", f"node {nid}", _coord(node.pos)))
            else:
                right = sorted(s for s, side in zip(slopes, sides) if side > 0)
                left = sorted(s for s, side in zip(slopes, sides) if side < 0)
                if right != left or right[0] == right[1]:
                    out.append(
                        Violation("crossing_strands", f"node {nid}", _coord(node.pos))
                    )
        elif node.kind == JUNCTION:
            if len(ends) < 2:
                out.append(Violation("junction_valence", f"node {nid}", _coord(node.pos)))
            for side in (1, -1):
                ss = sorted(s for s, sd in zip(slopes, sides) if sd == side)
                if any(a == b for a, b in zip(ss, ss[1:])):
                    out.append(
                        Violation("junction_slope_tie", f"node {nid}", _coord(node.pos))
                    )
        else:
            out.append(Violation("unknown_kind", f"node {nid}"))

    out.extend(_planarity_violations(d))
    out.sort(key=lambda v: (v.rule, v.subject))
    return ValidityReport(tuple(out))


def _segments(d: FrontDiagram):
    for aid in sorted(d.arcs):
        pts = d.arcs[aid].points
        for i, (p, q) in enumerate(zip(pts, pts[1:])):
            yield aid, i, p, q


def _planarity_violations(d: FrontDiagram) -> list[Violation]:
    """Arcs may meet only at shared nodes.

    Consecutive segments of one arc share their joint; segments incident to
    a common node may share exactly that node's position.
    """
    out: list[Violation] = []
    node_pos = {n.pos for n in d.nodes.values()}
    segs = list(_segments(d))
    boxes = []
    for aid, i, p, q in segs:
        boxes.append(
            (
                min(p[0], q[0]),
                max(p[0], q[0]),
                min(p[1], q[1]),
                max(p[1], q[1]),
            )
        )
    reported = set()
    for s1 in range(len(segs)):
        a1, i1, p1, q1 = segs[s1]
        b1 = boxes[s1]
        for s2 in range(s1 + 1, len(segs)):
            a2, i2, p2, q2 = segs[s2]
            if a1 == a2 and abs(i1 - i2) <= 1:
                continue
            b2 = boxes[s2]
            if b1[1] < b2[0] or b2[1] < b1[0] or b1[3] < b2[2] or b2[3] < b1[2]:
                continue
            if not segments_intersect(p1, q1, p2, q2):
                continue
            # shared endpoints are fine when they sit at a node position
            shared = {p1, q1} & {p2, q2}
            if shared and all(pt in node_pos for pt in shared):
                inter = proper_intersection(p1, q1, p2, q2)
                if inter is None:
                    continue
            key = (a1, a2)
            if key not in reported:
                reported.add(key)
                out.append(
                    Violation("arcs_intersect", f"arc {a1} / arc {a2}", _coord(p1))
                )
    # nodes must not sit in the interior of foreign arcs
    for nid in sorted(d.nodes):
        pos = d.nodes[nid].pos
        incident = {aid for aid, _e in d.ends_at(nid)}
        for aid, i, p, q in segs:
            if aid in incident:
                continue
            if on_segment(pos, p, q):
                out.append(Violation("node_on_arc", f"node {nid} / arc {aid}", _coord(pos)))
                break
    return out


def require_valid(d: FrontDiagram) -> None:
    report = validate(d)
    if not report.ok:
        raise InvalidDiagramError(report)


# --- cyclic order --------------------------------------------------------


def cyclic_order(d: FrontDiagram, junction_id: int) -> tuple[tuple[int, int], ...]:
    """Canonical cyclic order of the arc-ends at a junction.

    Rightward ends by increasing near-vertex slope, then leftward ends by
    decreasing near-vertex slope; the result is treated as cyclic.  This is
    the contact-plane order, which the planar rotation scrambles (the left
    block is reversed).
    """
    node = d.nodes[junction_id]
    if node.kind != JUNCTION:
        raise ValueError(f"node {junction_id} is not a junction")
    ends = d.ends_at(junction_id)
    right = [x for x in ends if d.end_side(*x) > 0]
    left = [x for x in ends if d.end_side(*x) < 0]
    for group in (right, left):
        ss = [d.near_slope(*x) for x in group]
        if len(set(ss)) != len(ss):
            raise CyclicOrderTieError(
                f"coincident near-vertex slopes at junction {junction_id}"
            )
    right.sort(key=lambda x: d.near_slope(*x))
    left.sort(key=lambda x: d.near_slope(*x), reverse=True)
    return tuple(right + left)


# --- underlying topological graph ----------------------------------------


@dataclass(frozen=True)
class UnderlyingGraph:
    """Junctions and the maximal Legendrian strands between them.

    Cusps join their two arcs and crossings keep their two strands disjoint,
    so strands run junction-to-junction; circles avoiding every junction are
    isolated loops.
    """

    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int, tuple[int, ...]], ...]  # (junction, junction, arcs)
    isolated_loops: int


def _through_pairs(d: FrontDiagram, nid: int) -> dict[tuple[int, int], tuple[int, int]]:
    """Pair up arc-ends that continue through a non-junction node."""
    node = d.nodes[nid]
    ends = d.ends_at(nid)
    pairs: dict[tuple[int, int], tuple[int, int]] = {}
    if node.kind in (LEFT_CUSP, RIGHT_CUSP):
        if len(ends) == 2:
            pairs[ends[0]] = ends[1]
            pairs[ends[1]] = ends[0]
    elif node.kind == CROSSING:
        right = [x for x in ends if d.end_side(*x) > 0]
        left = [x for x in ends if d.end_side(*x) < 0]
        for r in right:
            mates = [l for l in left if d.near_slope(*l) == d.near_slope(*r)]
            if len(mates) == 1:
                pairs[r] = mates[0]
                pairs[mates[0]] = r
    return pairs


def underlying_graph(d: FrontDiagram) -> UnderlyingGraph:
    require_valid(d)
    pairs = {}
    for nid in d.nodes:
        if d.nodes[nid].kind != JUNCTION:
            pairs[nid] = _through_pairs(d, nid)
    junction_ids = sorted(
        nid for nid in d.nodes if d.nodes[nid].kind == JUNCTION
    )
    visited: set[tuple[int, int]] = set()
    edges: list[tuple[int, int, tuple[int, ...]]] = []

    def walk(start: tuple[int, int]) -> tuple[int, tuple[int, ...]]:
        """Follow a strand from a junction arc-end to its terminal junction."""
        arcs_used = []
        cur = start
        while True:
            visited.add(cur)
            aid, e = cur
            arcs_used.append(aid)
            other = (aid, 1 - e)
            visited.add(other)
            nid = d.arcs[aid].end_node(1 - e)
            if d.nodes[nid].kind == JUNCTION:
                return nid, tuple(arcs_used)
            cur = pairs[nid][other]

    for j in junction_ids:
        for end in d.ends_at(j):
            if end in visited:
                continue
            terminal, arcs_used = walk(end)
            edges.append((j, terminal, arcs_used))

    loops = 0
    for aid in sorted(d.arcs):
        arc = d.arcs[aid]
        if arc.ends is None:
            loops += 1
            continue
        if (aid, 0) in visited:
            continue
        # circle through cusps/crossings only
        cur = (aid, 0)
        while True:
            visited.add(cur)
            caid, ce = cur
            other = (caid, 1 - ce)
            visited.add(other)
            nid = d.arcs[caid].end_node(1 - ce)
            cur = pairs[nid][other]
            if cur == (aid, 0):
                break
        loops += 1
    return UnderlyingGraph(tuple(junction_ids), tuple(edges), loops)


def euler_characteristic(d: FrontDiagram) -> int:
    """V - E of the underlying graph; isolated loops contribute 0."""
    g = underlying_graph(d)
    return len(g.vertices) - len(g.edges)


def components(d: FrontDiagram) -> int:
    g = underlying_graph(d)
    parent = {v: v for v in g.vertices}

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for a, b, _ in g.edges:
        parent[find(a)] = find(b)
    comps = len({find(v) for v in g.vertices})
    return comps + g.isolated_loops


# --- canonical signature --------------------------------------------------


@dataclass(frozen=True)
class DiagramSignature:
    text: str

    def __str__(self) -> str:
        return self.text


def _node_linear_order(d: FrontDiagram, nid: int) -> list[tuple[int, int]]:
    """Deterministic linear order of ends: rightward by slope up, leftward by slope down.

    Stable under any relabeling and under coordinate perturbations that
    preserve sides and same-side slope ranks.
    """
    ends = d.ends_at(nid)
    right = sorted(
        (x for x in ends if d.end_side(*x) > 0), key=lambda x: d.near_slope(*x)
    )
    left = sorted(
        (x for x in ends if d.end_side(*x) < 0),
        key=lambda x: d.near_slope(*x),
        reverse=True,
    )
    return right + left


def signature(d: FrontDiagram) -> DiagramSignature:
    """Canonical string encoding of the decorated combinatorial map.

    Equal signatures mean the diagrams are isomorphic as node-typed maps
    with matching side partitions and same-side slope orders.  Ids, labels
    and coordinates do not enter.
    """
    require_valid(d)
    orders = {nid: _node_linear_order(d, nid) for nid in d.nodes}
    index_at = {}
    for nid, ends in orders.items():
        for i, end in enumerate(ends):
            index_at[end] = i

    def component_nodes(start: int) -> list[int]:
        seen = {start}
        stack = [start]
        while stack:
            nid = stack.pop()
            for aid, e in orders[nid]:
                other = d.arcs[aid].end_node(1 - e)
                if other not in seen:
                    seen.add(other)
                    stack.append(other)
        return sorted(seen)

    remaining = set(d.nodes)
    comps: list[list[int]] = []
    while remaining:
        comp = component_nodes(min(remaining))
        comps.append(comp)
        remaining -= set(comp)

    def encode_from(comp: list[int], start: int) -> list:
        number = {start: 0}
        sequence = [start]
        qi = 0
        while qi < len(sequence):
            nid = sequence[qi]
            qi += 1
            for aid, e in orders[nid]:
                other = d.arcs[aid].end_node(1 - e)
                if other not in number:
                    number[other] = len(sequence)
                    sequence.append(other)
        code = []
        for nid in sequence:
            node = d.nodes[nid]
            n_right = sum(1 for x in orders[nid] if d.end_side(*x) > 0)
            entry = [node.kind, n_right]
            for aid, e in orders[nid]:
                other_end = (aid, 1 - e)
                other_node = d.arcs[aid].end_node(1 - e)
                entry.append([number[other_node], index_at[other_end]])
            code.append(entry)
        return code

    comp_codes = []
    for comp in comps:
        best = None
        for start in comp:
            code = encode_from(comp, start)
            key = json.dumps(code)
            if best is None or key < best:
                best = key
        comp_codes.append(best)
    comp_codes.sort()
    n_loops = sum(1 for a in d.arcs.values() if a.ends is None)
    text = json.dumps({"components": comp_codes, "loops": n_loops}, sort_keys=True)
    return DiagramSignature(text)


def isomorphic(d1: FrontDiagram, d2: FrontDiagram) -> bool:
    return signature(d1) == signature(d2)


# --- JSON serialization ---------------------------------------------------


def to_json(d: FrontDiagram) -> str:
    """Serialize to the diagram JSON format (bit-exact, deterministic)."""
    ports: dict[tuple[int, int], int] = {}
    rotation_obj = {}
    for nid in sorted(d.nodes):
        rot = d.rotation(nid)
        for i, end in enumerate(rot):
            ports[end] = i
        rotation_obj[str(nid)] = [{"arc": aid, "end": e} for aid, e in rot]
    nodes_obj = []
    for nid in sorted(d.nodes):
        n = d.nodes[nid]
        rec = {"id": n.id, "kind": n.kind, "x": frac_str(n.x), "z": frac_str(n.z)}
        if n.label is not None:
            rec["label"] = n.label
        nodes_obj.append(rec)
    arcs_obj = []
    for aid in sorted(d.arcs):
        a = d.arcs[aid]
        if a.ends is None:
            ends_rec = "loop"
        else:
            ends_rec = [
                {"node": a.ends[0], "port": ports.get((aid, 0), 0)},
                {"node": a.ends[1], "port": ports.get((aid, 1), 0)},
            ]
        arcs_obj.append(
            {
                "id": a.id,
                "ends": ends_rec,
                "points": [[frac_str(x), frac_str(z)] for x, z in a.points],
            }
        )
    obj = {
        "tree": d.tree_text,
        "nodes": nodes_obj,
        "arcs": arcs_obj,
        "rotation": rotation_obj,
    }
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def from_json(text: str) -> FrontDiagram:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DiagramFormatError(f"not valid JSON: {exc}") from exc
    for key in ("nodes", "arcs"):
        if key not in obj:
            raise DiagramFormatError(f"missing top-level field {key!r}")
    nodes: dict[int, Node] = {}
    for rec in obj["nodes"]:
        try:
            node = Node(
                id=int(rec["id"]),
                kind=rec["kind"],
                x=frac(rec["x"]),
                z=frac(rec["z"]),
                label=rec.get("label"),
            )
        except (KeyError, ValueError, TypeError) as exc:
            raise DiagramFormatError(f"bad node record {rec!r}: {exc}") from exc
        if node.kind not in KINDS:
            raise DiagramFormatError(f"unknown node kind {node.kind!r}")
        if node.id in nodes:
            raise DiagramFormatError(f"duplicate node id {node.id}")
        nodes[node.id] = node
    arcs: dict[int, Arc] = {}
    for rec in obj["arcs"]:
        try:
            ends_rec = rec["ends"]
            if ends_rec == "loop":
                ends = None
            else:
                ends = (int(ends_rec[0]["node"]), int(ends_rec[1]["node"]))
            points = tuple((frac(x), frac(z)) for x, z in rec["points"])
            arc = Arc(id=int(rec["id"]), ends=ends, points=points)
        except (KeyError, ValueError, TypeError, IndexError) as exc:
            raise DiagramFormatError(f"bad arc record {rec!r}: {exc}") from exc
        if arc.id in arcs:
            raise DiagramFormatError(f"duplicate arc id {arc.id}")
        if arc.ends is not None:
            for nid in arc.ends:
                if nid not in nodes:
                    raise DiagramFormatError(
                        f"arc {arc.id} references unknown node {nid}"
                    )
        arcs[arc.id] = arc
    d = FrontDiagram(nodes, arcs, obj.get("tree"))
    rot = obj.get("rotation")
    if rot is not None:
        for nid_str, ends_list in rot.items():
            nid = int(nid_str)
            if nid not in nodes:
                raise DiagramFormatError(f"rotation references unknown node {nid}")
            stored = {(int(r["arc"]), int(r["end"])) for r in ends_list}
            derived = set(d.ends_at(nid))
            if stored != derived:
                raise DiagramFormatError(
                    f"rotation at node {nid} does not match incident arc-ends"
                )
    return d
