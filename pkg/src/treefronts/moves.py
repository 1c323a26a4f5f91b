"""Rewrite rules, site matching, rule application and script verification.

The catalog (graph Reidemeister moves I-VI, the ribbotopy slides C/C_end,
and edge contraction/expansion) is loaded from the bundled rules.json; each
entry pairs schematic lhs/rhs fragments with a typed matcher and realizer
that the engine interprets.  Application is geometric surgery with bounded
retries over rational parameters; every successful application revalidates
the whole diagram.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from importlib import resources

from treefronts.diagram import (
    CROSSING,
    JUNCTION,
    LEFT_CUSP,
    RIGHT_CUSP,
    Arc,
    FrontDiagram,
    components,
    euler_characteristic,
    isomorphic,
    signature,
    validate,
)
from treefronts.geometry import (
    Point,
    foot_on_line,
    frac,
    line_intersection,
    on_segment,
)
from treefronts.rewrite import (
    Editor,
    RealizationError,
    checked,
    cut_point,
    piece_points,
    restub,
    strand_chain,
)

__all__ = [
    "RewriteRule",
    "MoveSite",
    "MoveScript",
    "MoveStep",
    "RulesLoadError",
    "StaleSiteError",
    "ScriptError",
    "RealizationError",
    "builtin_rules",
    "rule_by_name",
    "find_sites",
    "apply",
    "apply_script",
    "verify",
    "script_armadillo_to_mothership",
    "script_mothership_to_arboreal",
]


class RulesLoadError(ValueError):
    pass


class StaleSiteError(ValueError):
    """The site no longer matches the diagram it is applied to."""


class ScriptError(ValueError):
    def __init__(self, message: str, step_index: int):
        super().__init__(f"step {step_index}: {message}")
        self.step_index = step_index


@dataclass(frozen=True)
class RewriteRule:
    name: str
    kind: str
    inverse: str
    matcher: dict
    realizer: dict
    boundary: tuple[str, ...]
    lhs: dict
    rhs: dict


@dataclass(frozen=True)
class MoveSite:
    """A resolved occurrence of a rule's lhs in a host diagram."""

    rule: str
    mapping: dict
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class MoveStep:
    rule: str
    selector: dict
    params: dict = field(default_factory=dict)


@dataclass(frozen=True)
class MoveScript:
    source: str
    steps: tuple[MoveStep, ...]
    target: str

    def to_json(self) -> str:
        obj = {
            "source": self.source,
            "steps": [
                {"rule": s.rule, "selector": s.selector, "params": _jsonify(s.params)}
                for s in self.steps
            ],
            "target": self.target,
        }
        return json.dumps(obj, indent=2, sort_keys=True) + "\n"

    @staticmethod
    def from_json(text: str) -> "MoveScript":
        obj = json.loads(text)
        steps = tuple(
            MoveStep(s["rule"], s["selector"], _dejsonify(s.get("params", {})))
            for s in obj["steps"]
        )
        return MoveScript(obj.get("source", ""), steps, obj.get("target", ""))


def _jsonify(params: dict) -> dict:
    out = {}
    for k, v in params.items():
        out[k] = f"{v.numerator}/{v.denominator}" if isinstance(v, Fraction) else v
    return out


def _dejsonify(params: dict) -> dict:
    out = {}
    for k, v in params.items():
        if isinstance(v, str) and "/" in v and k in ("frac", "germ_slope", "scale"):
            out[k] = Fraction(v)
        else:
            out[k] = v
    return out


_RULES: list[RewriteRule] | None = None
_MATCHER_TYPES = {
    "any_arc",
    "swallowtail",
    "cusp_strand_clear",
    "cusp_strand_crossed",
    "triangle",
    "end_slide",
    "end_slide_past_cusp",
    "end_flip",
    "adjacent_pair_uncrossed",
    "adjacent_pair_crossed",
    "junction_edge",
    "splittable_junction",
}


def builtin_rules() -> list[RewriteRule]:
    """The bundled catalog, validated on first load."""
    global _RULES
    if _RULES is None:
        try:
            text = resources.files("treefronts").joinpath("rules.json").read_text()
            obj = json.loads(text)
        except (OSError, json.JSONDecodeError) as exc:
            raise RulesLoadError(f"cannot load rules file: {exc}") from exc
        if obj.get("format") != "treefronts-rules-1":
            raise RulesLoadError("unknown rules file format")
        rules = []
        for rec in obj.get("rules", []):
            try:
                rule = RewriteRule(
                    name=rec["name"],
                    kind=rec["kind"],
                    inverse=rec["inverse"],
                    matcher=rec["matcher"],
                    realizer=rec["realizer"],
                    boundary=tuple(rec["boundary"]),
                    lhs=rec["lhs"],
                    rhs=rec["rhs"],
                )
            except KeyError as exc:
                raise RulesLoadError(f"rule record missing field {exc}") from exc
            if rule.kind not in ("reidemeister", "ribbotopy"):
                raise RulesLoadError(f"rule {rule.name}: unknown kind {rule.kind}")
            if rule.matcher.get("type") not in _MATCHER_TYPES:
                raise RulesLoadError(
                    f"rule {rule.name}: unknown matcher {rule.matcher.get('type')!r}"
                )
            rules.append(rule)
        names = {r.name for r in rules}
        for r in rules:
            if r.inverse not in names:
                raise RulesLoadError(f"rule {r.name}: inverse {r.inverse} not in catalog")
        _RULES = rules
    return list(_RULES)


def rule_by_name(name: str) -> RewriteRule:
    for r in builtin_rules():
        if r.name == name:
            return r
    raise KeyError(f"no rule named {name!r}")


# --- junction-end bookkeeping ----------------------------------------------


def _side_groups(d: FrontDiagram, nid: int):
    """(right ends slope-ascending, left ends slope-ascending)."""
    ends = d.ends_at(nid)
    right = sorted(
        (x for x in ends if d.end_side(*x) > 0), key=lambda x: (d.near_slope(*x), x)
    )
    left = sorted(
        (x for x in ends if d.end_side(*x) < 0), key=lambda x: (d.near_slope(*x), x)
    )
    return right, left


def _canonical_cycle(d: FrontDiagram, nid: int) -> list[tuple[int, int]]:
    right, left = _side_groups(d, nid)
    return right + list(reversed(left))


def _cyclically_adjacent(cycle: list, a, b) -> bool:
    if len(cycle) < 2 or a not in cycle or b not in cycle:
        return False
    k = len(cycle)
    ia, ib = cycle.index(a), cycle.index(b)
    return (ia - ib) % k in (1, k - 1)


# --- find_sites --------------------------------------------------------------


def find_sites(d: FrontDiagram, rule: RewriteRule | str) -> list[MoveSite]:
    """All occurrences of the rule's lhs in the diagram, deterministically
    ordered.  Geometric guards are part of the match, so every returned site
    is expected to apply."""
    if isinstance(rule, str):
        rule = rule_by_name(rule)
    kind = rule.matcher["type"]
    fn = _MATCHERS[kind]
    sites = fn(d, rule)
    return sorted(sites, key=lambda s: json.dumps(s.mapping, sort_keys=True))


def _junctions(d: FrontDiagram):
    return [nid for nid in sorted(d.nodes) if d.nodes[nid].kind == JUNCTION]


def _match_any_arc(d, rule):
    return [
        MoveSite(rule.name, {"s": aid})
        for aid in sorted(d.arcs)
        if d.arcs[aid].ends is not None
    ]


def _match_swallowtail(d, rule):
    out = []
    for xid in sorted(d.nodes):
        if d.nodes[xid].kind != CROSSING:
            continue
        found = _swallowtail_at(d, xid)
        if found is not None:
            out.append(MoveSite(rule.name, found))
    return out


def _swallowtail_at(d: FrontDiagram, xid: int):
    ends = d.ends_at(xid)
    if len(ends) != 4:
        return None
    rc = lc = None
    mids = {}
    for aid, e in ends:
        other = d.arcs[aid].end_node(1 - e)
        k = d.nodes[other].kind
        if k == RIGHT_CUSP and len(d.ends_at(other)) == 2:
            rc, s_up = other, aid
        elif k == LEFT_CUSP and len(d.ends_at(other)) == 2:
            lc, s_dn = other, aid
    if rc is None or lc is None:
        return None
    mid = [
        aid
        for aid, e in d.ends_at(rc)
        if aid != s_up and d.arcs[aid].end_node(1 - e) == lc
    ]
    if not mid:
        return None
    outer = [aid for aid, e in ends if aid not in (s_up, s_dn)]
    if len(outer) != 2:
        return None
    return {
        "X": xid,
        "R": rc,
        "L": lc,
        "s_up": s_up,
        "s_mid": mid[0],
        "s_dn": s_dn,
        "s_in": outer[0],
        "s_out": outer[1],
    }


def _match_cusp_strand_clear(d, rule):
    """A strand passing just behind a cusp point, ready to be poked through."""
    out = []
    for cid in sorted(d.nodes):
        node = d.nodes[cid]
        if node.kind not in (LEFT_CUSP, RIGHT_CUSP):
            continue
        window = _back_window(d, cid)
        if window is None:
            continue
        for aid in sorted(d.arcs):
            if aid in {a for a, _ in d.ends_at(cid)}:
                continue
            x_hit = _crosses_level_in(d.arcs[aid], node.z, window)
            if x_hit is not None:
                out.append(MoveSite(rule.name, {"C": cid, "s": aid}))
    return out


def _mouth_depth(d: FrontDiagram, cid: int):
    """x-extent of the cusp's first branch segments, toward the mouth."""
    node = d.nodes[cid]
    ends = d.ends_at(cid)
    if len(ends) != 2:
        return None
    direction = 1 if node.kind == LEFT_CUSP else -1
    depth = None
    for aid, e in ends:
        a, b = d.arcs[aid].first_segment(e)
        ext = (b[0] - node.x) * direction
        depth = ext if depth is None else min(depth, ext)
    if depth is None or depth <= 0:
        return None
    return depth


def _back_window(d: FrontDiagram, cid: int):
    """Open x-interval behind the cusp point (opposite the mouth)."""
    node = d.nodes[cid]
    depth = _mouth_depth(d, cid)
    if depth is None:
        return None
    direction = 1 if node.kind == LEFT_CUSP else -1
    if direction > 0:
        return (node.x - depth, node.x)
    return (node.x, node.x + depth)


def _crosses_level_in(arc: Arc, z: Fraction, window):
    lo, hi = window
    if arc.ends is None:
        return None
    for p, q in zip(arc.points, arc.points[1:]):
        if (p[1] - z) * (q[1] - z) < 0:
            t = (z - p[1]) / (q[1] - p[1])
            x = p[0] + t * (q[0] - p[0])
            if lo < x < hi:
                return x
    return None


def _match_cusp_strand_crossed(d, rule):
    out = []
    for cid in sorted(d.nodes):
        if d.nodes[cid].kind not in (LEFT_CUSP, RIGHT_CUSP):
            continue
        hit = _crossed_cusp_at(d, cid)
        if hit is not None:
            out.append(MoveSite(rule.name, hit))
    return out


def _crossed_cusp_at(d: FrontDiagram, cid: int):
    """Both branches of the cusp cross the same strand right away."""
    ends = d.ends_at(cid)
    if len(ends) != 2:
        return None
    xs = []
    for aid, e in ends:
        far = d.arcs[aid].end_node(1 - e)
        if d.nodes[far].kind != CROSSING:
            return None
        xs.append(far)
    if xs[0] == xs[1]:
        return None
    return {"C": cid, "X0": xs[0], "X1": xs[1]}


def _match_triangle(d, rule):
    out = []
    xids = [nid for nid in sorted(d.nodes) if d.nodes[nid].kind == CROSSING]
    for i, x1 in enumerate(xids):
        for x2 in xids[i + 1 :]:
            a12 = _direct_arcs(d, x1, x2)
            if not a12:
                continue
            for x3 in xids:
                if x3 <= x2:
                    continue
                a13 = _direct_arcs(d, x1, x3)
                a23 = _direct_arcs(d, x2, x3)
                if not (a13 and a23):
                    continue
                # one site per choice of the strand that slides past the
                # opposite crossing
                for (pa, pb, pc), (s0, s1, s2) in (
                    ((x1, x2, x3), (a12[0], a13[0], a23[0])),
                    ((x1, x3, x2), (a13[0], a12[0], a23[0])),
                    ((x2, x3, x1), (a23[0], a12[0], a13[0])),
                ):
                    out.append(
                        MoveSite(
                            rule.name,
                            {
                                "X01": pa,
                                "X02": pb,
                                "X12": pc,
                                "t0": s0,
                                "t1": s1,
                                "t2": s2,
                            },
                        )
                    )
    return out


def _direct_arcs(d: FrontDiagram, n1: int, n2: int) -> list[int]:
    return [
        aid
        for aid in sorted(d.arcs)
        if d.arcs[aid].ends is not None
        and set(d.arcs[aid].ends) == {n1, n2}
    ]


def _slide_pairs(d: FrontDiagram, nid: int):
    """Ordered (e, f) with f cyclically adjacent to e, distinct arcs."""
    try:
        cycle = _canonical_cycle(d, nid)
    except (ValueError, ZeroDivisionError):
        return []
    pairs = []
    k = len(cycle)
    if k < 3:
        return []
    for i, e in enumerate(cycle):
        for f in (cycle[(i - 1) % k], cycle[(i + 1) % k]):
            if f[0] != e[0] and (e, f) not in pairs:
                pairs.append((e, f))
    return pairs


def _match_end_slide(d, rule):
    landing = rule.matcher.get("landing", "mid")
    out = []
    for nid in _junctions(d):
        for e, f in _slide_pairs(d, nid):
            if landing == "far":
                far = d.arcs[f[0]].end_node(1 - _end_at(d, f, nid))
                if far == nid or d.nodes[far].kind != JUNCTION:
                    continue
            out.append(
                MoveSite(
                    rule.name,
                    {"J": nid, "e": list(e), "f": list(f)},
                    {"landing": landing},
                )
            )
    return out


def _end_at(d: FrontDiagram, end, nid: int) -> int:
    aid, e = end
    if d.arcs[aid].ends[e] != nid:
        raise StaleSiteError(f"arc-end {end} is not at node {nid}")
    return e


def _match_end_slide_past_cusp(d, rule):
    out = []
    for nid in _junctions(d):
        if len(d.ends_at(nid)) != 3:
            continue  # keep IV a vertex-slide (homeomorphism of the graph)
        for e, f in _slide_pairs(d, nid):
            far = d.arcs[f[0]].end_node(1 - _end_at(d, f, nid))
            if d.nodes[far].kind not in (LEFT_CUSP, RIGHT_CUSP):
                continue
            g = [x for x in d.ends_at(far) if x[0] != f[0]]
            if len(g) != 1:
                continue
            out.append(
                MoveSite(
                    rule.name,
                    {"J": nid, "e": list(e), "f": list(f), "C": far, "g": list(g[0])},
                    {"landing": "around"},
                )
            )
    return out


def _match_end_flip(d, rule):
    out = []
    for nid in _junctions(d):
        right, left = _side_groups(d, nid)
        if len(right) + len(left) < 2:
            continue
        candidates = []
        if right:
            candidates.append((right[-1], "up"))  # positional top of the right fan
            candidates.append((right[0], "down"))
        if left:
            candidates.append((left[0], "up"))  # smallest slope sits highest on the left
            candidates.append((left[-1], "down"))
        for e, vertical in candidates:
            for consume in _flip_consumes(d, e):
                out.append(
                    MoveSite(
                        rule.name,
                        {"J": nid, "e": list(e)},
                        {"vertical": vertical, "consume": consume},
                    )
                )
    return out


def _flip_consumes(d: FrontDiagram, e) -> list[int]:
    out = [0]
    ed = Editor(d)
    try:
        _pieces, between, _term = strand_chain(ed, *e)
    except RealizationError:
        return out
    if between and d.nodes[between[0]].kind in (LEFT_CUSP, RIGHT_CUSP):
        out.append(1)
    return out


def _match_adjacent_pair_uncrossed(d, rule):
    out = []
    for nid in _junctions(d):
        right, left = _side_groups(d, nid)
        for group in (right, left):
            for e1, e2 in zip(group, group[1:]):
                if e1[0] == e2[0]:
                    continue
                if _pair_crossing(d, nid, e1, e2) is None:
                    out.append(
                        MoveSite(rule.name, {"J": nid, "e1": list(e1), "e2": list(e2)})
                    )
    return out


def _match_adjacent_pair_crossed(d, rule):
    out = []
    for nid in _junctions(d):
        right, left = _side_groups(d, nid)
        for group in (right, left):
            for e1, e2 in zip(group, group[1:]):
                x = _pair_crossing(d, nid, e1, e2)
                if x is not None:
                    out.append(
                        MoveSite(
                            rule.name,
                            {"J": nid, "e1": list(e1), "e2": list(e2), "X": x},
                        )
                    )
    return out


def _pair_crossing(d: FrontDiagram, nid: int, e1, e2):
    """Crossing adjacent to the junction between the two ends' arcs."""
    for a, b in ((e1, e2), (e2, e1)):
        far = d.arcs[a[0]].end_node(1 - _end_at(d, a, nid))
        if d.nodes[far].kind == CROSSING:
            partners = {aid for aid, _e in d.ends_at(far)}
            if b[0] in partners:
                return far
    return None


def _match_junction_edge(d, rule):
    out = []
    for aid in sorted(d.arcs):
        arc = d.arcs[aid]
        if arc.ends is None or arc.ends[0] == arc.ends[1]:
            continue
        k0 = d.nodes[arc.ends[0]].kind
        k1 = d.nodes[arc.ends[1]].kind
        if k0 == JUNCTION and k1 == JUNCTION:
            out.append(
                MoveSite(rule.name, {"f": aid, "J": arc.ends[0], "K": arc.ends[1]})
            )
    return out


def _match_splittable_junction(d, rule):
    out = []
    for nid in _junctions(d):
        right, left = _side_groups(d, nid)
        total = len(right) + len(left)
        if total < 4:
            continue
        for side_name, group in (("R", right), ("L", left)):
            for start in range(len(group)):
                for count in range(1, len(group) - start + 1):
                    if total - count < 2:
                        continue
                    out.append(
                        MoveSite(
                            rule.name,
                            {"J": nid},
                            {"side": side_name, "start": start, "count": count},
                        )
                    )
    return out


_MATCHERS = {
    "any_arc": _match_any_arc,
    "swallowtail": _match_swallowtail,
    "cusp_strand_clear": _match_cusp_strand_clear,
    "cusp_strand_crossed": _match_cusp_strand_crossed,
    "triangle": _match_triangle,
    "end_slide": _match_end_slide,
    "end_slide_past_cusp": _match_end_slide_past_cusp,
    "end_flip": _match_end_flip,
    "adjacent_pair_uncrossed": _match_adjacent_pair_uncrossed,
    "adjacent_pair_crossed": _match_adjacent_pair_crossed,
    "junction_edge": _match_junction_edge,
    "splittable_junction": _match_splittable_junction,
}


# --- apply -------------------------------------------------------------------


def apply(d: FrontDiagram, site: MoveSite) -> FrontDiagram:
    """Apply a move at a site; the result is validated.  Raises
    StaleSiteError if the site no longer matches and RealizationError if no
    rational embedding is found within the retry budget."""
    rule = rule_by_name(site.rule)
    op = _REALIZERS[rule.realizer["type"]]
    last: Exception | None = None
    for attempt_params in _attempts(site.params):
        try:
            return op(d, site, attempt_params)
        except RealizationError as exc:
            last = exc
    raise RealizationError(f"rule {site.rule}: {last}")


_FRAC_OFFSETS = [
    Fraction(0),
    Fraction(1, 16),
    Fraction(-1, 16),
    Fraction(1, 8),
    Fraction(-1, 8),
    Fraction(3, 16),
    Fraction(-3, 16),
    Fraction(5, 16),
]


def _attempts(params: dict):
    base_frac = frac(params.get("frac", Fraction(1, 2)))
    for i in range(8):
        offset = _FRAC_OFFSETS[i % len(_FRAC_OFFSETS)]
        f = base_frac + offset
        if not (0 < f < 1):
            f = base_frac
        out = dict(params)
        out["frac"] = f
        out["scale_shrink"] = Fraction(1, 2**i)
        yield out


def _resolve_end(d: FrontDiagram, raw) -> tuple[int, int]:
    aid, e = int(raw[0]), int(raw[1])
    if aid not in d.arcs or d.arcs[aid].ends is None:
        raise StaleSiteError(f"arc {aid} gone")
    return (aid, e)


def _local_scale(d: FrontDiagram, *ends) -> Fraction:
    spans = []
    for aid, _e in ends:
        pts = d.arcs[aid].points
        spans.append(abs(pts[-1][0] - pts[0][0]))
    return min(spans) / 8 if spans else Fraction(1, 8)


def _default_germ_slope(d_like, nid: int, side: int, ed: Editor) -> Fraction:
    slopes = []
    for aid, e in ed.ends_at(nid):
        a, b = ed.arcs[aid].first_segment(e)
        if b[0] == a[0]:
            continue
        if (1 if b[0] > a[0] else -1) == side:
            slopes.append((b[1] - a[1]) / (b[0] - a[0]))
    if side > 0:
        return (max(slopes) if slopes else Fraction(0)) + 2
    return (min(slopes) if slopes else Fraction(0)) - 2


def _consume_candidates(ed: Editor, e, params) -> list[int]:
    consume = params.get("consume", "auto")
    _pieces, between, _term = strand_chain(ed, *e)
    if consume == "max":
        return [len(between)]
    if consume == "auto":
        return list(range(len(between) + 1))
    return [int(consume)]


def _op_slide(d: FrontDiagram, site: MoveSite, params: dict) -> FrontDiagram:
    nid = site.mapping["J"]
    if nid not in d.nodes or d.nodes[nid].kind != JUNCTION:
        raise StaleSiteError(f"junction {nid} gone")
    e = _resolve_end(d, site.mapping["e"])
    f = _resolve_end(d, site.mapping["f"])
    _end_at(d, e, nid)
    f_end = _end_at(d, f, nid)
    cycle = _canonical_cycle(d, nid)
    if not _cyclically_adjacent(cycle, e, f):
        raise StaleSiteError("ends no longer cyclically adjacent")
    if len(cycle) < 3:
        raise StaleSiteError("cannot slide off a two-ended junction")
    landing = params.get("landing", site.params.get("landing", "mid"))
    land_frac = frac(params.get("land_frac", params["frac"]))
    scale = frac(params.get("scale", _local_scale(d, f))) * params["scale_shrink"]

    ed = Editor(d)
    if landing == "mid":
        fpts = piece_points(ed, (f[0], f_end))
        p = cut_point(fpts, land_frac)
        if p in (fpts[0], fpts[-1]):
            raise RealizationError("landing degenerated to a node")
        attach = ed.split_arc(f[0], p, JUNCTION, params.get("label"))
        toward = _half_toward(ed, attach, nid)
    elif landing == "far":
        attach = d.arcs[f[0]].end_node(1 - f_end)
        if attach == nid or ed.nodes[attach].kind != JUNCTION:
            raise StaleSiteError("far landing is not a junction")
        toward = (f[0], 1 - f_end)
    elif landing == "around":
        cusp = d.arcs[f[0]].end_node(1 - f_end)
        if ed.nodes[cusp].kind not in (LEFT_CUSP, RIGHT_CUSP):
            raise StaleSiteError("no cusp to slide around")
        g_ends = [x for x in ed.ends_at(cusp) if x[0] != f[0]]
        if len(g_ends) != 1:
            raise StaleSiteError("cusp is not two-ended")
        g_aid, g_e = g_ends[0]
        gpts = piece_points(ed, (g_aid, g_e))
        p = cut_point(gpts, land_frac)
        if p in (gpts[0], gpts[-1]):
            raise RealizationError("landing degenerated to a node")
        attach = ed.split_arc(g_aid, p, JUNCTION, params.get("label"))
        toward = _half_toward(ed, attach, cusp)
    else:
        raise RealizationError(f"unknown landing {landing!r}")

    a, b = ed.arcs[toward[0]].first_segment(toward[1])
    if b[0] == a[0]:
        raise RealizationError("degenerate landing germ")
    germ_side = 1 if b[0] > a[0] else -1
    germ_slope = params.get("germ_slope")
    germ_slope = (
        frac(germ_slope)
        if germ_slope is not None
        else _default_germ_slope(d, attach, germ_side, ed)
    )
    last = None
    for consume in _consume_candidates(ed, e, params):
        trial = Editor(ed.diagram())
        try:
            restub(trial, e, attach, germ_side, germ_slope, consume, params["frac"], scale)
            return checked(trial)
        except RealizationError as exc:
            last = exc
    raise RealizationError(str(last))


def _half_toward(ed: Editor, attach: int, target: int) -> tuple[int, int]:
    """The arc-end at `attach` whose arc's far end is `target`."""
    for aid, e in ed.ends_at(attach):
        if ed.arcs[aid].end_node(1 - e) == target:
            return (aid, e)
    raise RealizationError("split half toward source not found")


def _op_flip(d: FrontDiagram, site: MoveSite, params: dict) -> FrontDiagram:
    nid = site.mapping["J"]
    if nid not in d.nodes or d.nodes[nid].kind != JUNCTION:
        raise StaleSiteError(f"junction {nid} gone")
    e = _resolve_end(d, site.mapping["e"])
    _end_at(d, e, nid)
    vertical = params.get("vertical", site.params.get("vertical", "up"))
    right, left = _side_groups(d, nid)
    side = d.end_side(*e)
    if vertical == "up":
        ok = (side > 0 and right and right[-1] == e) or (
            side < 0 and left and left[0] == e
        )
    else:
        ok = (side > 0 and right and right[0] == e) or (
            side < 0 and left and left[-1] == e
        )
    if not ok:
        raise StaleSiteError("end is not extremal for this vertical")
    new_side = -side
    ed = Editor(d)
    germ_slope = params.get("germ_slope")
    if germ_slope is not None:
        germ_slope = frac(germ_slope)
    else:
        segs = [
            ed.arcs[aid].first_segment(ee)
            for aid, ee in ed.ends_at(nid)
            if (aid, ee) != e
        ]
        vals = [
            (b[1] - a[1]) / (b[0] - a[0])
            for a, b in segs
            if b[0] != a[0] and ((b[0] > a[0]) == (new_side > 0))
        ]
        # the flipped end becomes the positional extreme of its new fan;
        # on the left fan the positional top is the smallest slope
        use_max = (vertical == "up") == (new_side > 0)
        if use_max:
            germ_slope = (max(vals) if vals else Fraction(0)) + 2
        else:
            germ_slope = (min(vals) if vals else Fraction(0)) - 2
    scale = frac(params.get("scale", _local_scale(d, e))) * params["scale_shrink"]
    last = None
    for consume in _consume_candidates(ed, e, params):
        trial = Editor(ed.diagram())
        try:
            restub(trial, e, nid, new_side, germ_slope, consume, params["frac"], scale)
            return checked(trial)
        except RealizationError as exc:
            last = exc
    raise RealizationError(str(last))


def _op_insert_swallowtail(d: FrontDiagram, site: MoveSite, params: dict) -> FrontDiagram:
    aid = site.mapping["s"]
    if aid not in d.arcs or d.arcs[aid].ends is None:
        raise StaleSiteError(f"arc {aid} gone")
    ed = Editor(d)
    arc = ed.arcs[aid]
    pts = list(arc.points)
    # centre on the longest segment
    seg = max(range(len(pts) - 1), key=lambda i: abs(pts[i + 1][0] - pts[i][0]))
    a, b2 = pts[seg], pts[seg + 1]
    xm = (a[0] + b2[0]) / 2
    span = abs(b2[0] - a[0])
    delta = span / 8 * params["scale_shrink"]
    if delta == 0:
        raise RealizationError("degenerate arc segment")
    s0 = (b2[1] - a[1]) / (b2[0] - a[0])
    fwd = 1 if b2[0] > a[0] else -1

    def at(u: Fraction, v: Fraction) -> Point:
        x = xm + u
        z = a[1] + (x - a[0]) * s0 + v
        return (x, z)

    A = at(-2 * delta, Fraction(0))
    B = at(2 * delta, Fraction(0))
    X = at(0, delta)
    R = at(delta, 3 * delta / 2)
    L = at(-delta, 3 * delta / 2)
    prefix = pts[: seg + 1]
    suffix = pts[seg + 1 :]
    if fwd < 0:
        A, B = B, A
    del ed.arcs[aid]
    xid = ed.add_node(CROSSING, X)
    rid = ed.add_node(RIGHT_CUSP, R)
    lid = ed.add_node(LEFT_CUSP, L)
    ed.add_arc(arc.ends[0], xid, prefix + [A, X])
    ed.add_arc(xid, rid, [X, R])
    ed.add_arc(rid, lid, [R, L])
    ed.add_arc(lid, xid, [L, X])
    ed.add_arc(xid, arc.ends[1], [X, B] + suffix)
    return checked(ed)


def _op_remove_swallowtail(d: FrontDiagram, site: MoveSite, params: dict) -> FrontDiagram:
    m = _swallowtail_at(d, site.mapping["X"])
    if m is None or m["X"] != site.mapping["X"]:
        raise StaleSiteError("swallowtail no longer present")
    ed = Editor(d)
    s_in = ed.arcs[m["s_in"]]
    s_out = ed.arcs[m["s_out"]]
    in_pts = list(s_in.points) if s_in.ends[1] == m["X"] else list(reversed(s_in.points))
    out_pts = (
        list(s_out.points) if s_out.ends[0] == m["X"] else list(reversed(s_out.points))
    )
    w0 = s_in.ends[0] if s_in.ends[1] == m["X"] else s_in.ends[1]
    w1 = s_out.ends[1] if s_out.ends[0] == m["X"] else s_out.ends[0]
    for key in ("s_in", "s_up", "s_mid", "s_dn", "s_out"):
        del ed.arcs[m[key]]
    for key in ("X", "R", "L"):
        del ed.nodes[m[key]]
    merged = in_pts[:-1] + out_pts[1:]
    if len(merged) < 2:
        raise RealizationError("swallowtail removal left a degenerate arc")
    ed.add_arc(w0, w1, merged)
    return checked(ed)


def _op_push_through_cusp(d: FrontDiagram, site: MoveSite, params: dict) -> FrontDiagram:
    return _move_cusp(d, site, params, push=True)


def _op_pull_from_cusp(d: FrontDiagram, site: MoveSite, params: dict) -> FrontDiagram:
    return _move_cusp(d, site, params, push=False)


def _move_cusp(d: FrontDiagram, site: MoveSite, params: dict, push: bool) -> FrontDiagram:
    """Translate a cusp point past a strand behind it (II) or back out
    (II_inv); the branch re-stubs create or absorb the two crossings."""
    cid = site.mapping["C"]
    if cid not in d.nodes or d.nodes[cid].kind not in (LEFT_CUSP, RIGHT_CUSP):
        raise StaleSiteError("cusp gone")
    node = d.nodes[cid]
    direction = 1 if node.kind == LEFT_CUSP else -1  # mouth direction
    if push:
        if "s" not in site.mapping or site.mapping["s"] not in d.arcs:
            raise StaleSiteError("strand gone")
        window = _back_window(d, cid)
        if window is None:
            raise StaleSiteError("cusp has no back window")
        x_hit = _crosses_level_in(d.arcs[site.mapping["s"]], node.z, window)
        if x_hit is None:
            raise StaleSiteError("strand no longer behind the cusp")
        gap = (node.x - x_hit) * direction
        new_x = x_hit - direction * gap * params["scale_shrink"]
        consume_plan = [0]
    else:
        m = _crossed_cusp_at(d, cid)
        if m is None:
            raise StaleSiteError("cusp branches no longer crossed")
        strand_arcs = set()
        for xid in (m["X0"], m["X1"]):
            for aid, _e in d.ends_at(xid):
                if cid not in (d.arcs[aid].ends or ()):
                    strand_arcs.add(aid)
        x_hit = None
        for aid in sorted(strand_arcs):
            x_hit = _crosses_level_in(
                d.arcs[aid],
                node.z,
                (node.x, node.x + 100) if direction > 0 else (node.x - 100, node.x),
            )
            if x_hit is not None:
                break
        if x_hit is None:
            raise RealizationError("could not locate the crossed strand level")
        gap = (x_hit - node.x) * direction
        if gap <= 0:
            raise RealizationError("crossed strand lies behind the cusp")
        new_x = x_hit + direction * gap * params["scale_shrink"]
        consume_plan = [1]
    ed = Editor(d)
    new_c = ed.add_node(node.kind, (new_x, node.z))
    ends = list(ed.ends_at(cid))
    if len(ends) != 2:
        raise StaleSiteError("cusp is not two-ended")
    slopes = (Fraction(1, 2), Fraction(-1, 2))
    scale = abs(gap) / 4 * params["scale_shrink"]
    if scale == 0:
        raise RealizationError("degenerate cusp translation")
    last = None
    for end, g in zip(ends, slopes):
        done = False
        for consume in consume_plan:
            try:
                restub(ed, tuple(end), new_c, direction, g, consume, params["frac"], scale)
                done = True
                break
            except RealizationError as exc:
                last = exc
        if not done:
            raise RealizationError(str(last))
    if ed.ends_at(cid):
        raise RealizationError("old cusp still has ends")
    del ed.nodes[cid]
    return checked(ed)


def _op_flip_triangle(d: FrontDiagram, site: MoveSite, params: dict) -> FrontDiagram:
    """Slide the strand carrying side t0 past the opposite crossing X12.

    Works on triangles whose strands run straight through the crossings:
    the slid strand's supporting line is translated to the mirror side of
    X12; the other two strands keep their lines, so X12 stays put while the
    two crossings on the slid strand re-form on the far side.
    """
    m = site.mapping
    for key in ("X01", "X02", "X12"):
        if m[key] not in d.nodes or d.nodes[m[key]].kind != CROSSING:
            raise StaleSiteError("triangle crossing gone")
    for key in ("t0", "t1", "t2"):
        if m[key] not in d.arcs:
            raise StaleSiteError("triangle side gone")
    ed = Editor(d)
    pa = ed.nodes[m["X01"]].pos
    pb = ed.nodes[m["X02"]].pos
    pc = ed.nodes[m["X12"]].pos
    foot = foot_on_line(pa, pb, pc)
    lam = 1 + params["scale_shrink"]
    v = ((pc[0] - foot[0]) * lam, (pc[1] - foot[1]) * lam)
    if v == (0, 0):
        raise RealizationError("degenerate triangle")
    pa_s = (pa[0] + v[0], pa[1] + v[1])
    pb_s = (pb[0] + v[0], pb[1] + v[1])
    new_a = line_intersection(pa_s, pb_s, pa, pc)
    new_b = line_intersection(pa_s, pb_s, pb, pc)
    if new_a is None or new_b is None or new_a[0] == new_b[0]:
        raise RealizationError("shifted line is parallel to a strand")

    o0a = _outer_end(ed, m["X01"], m["t0"], m["t1"])
    o0b = _outer_end(ed, m["X02"], m["t0"], m["t2"])
    o1a = _outer_end(ed, m["X01"], m["t1"], m["t0"])
    o1c = _outer_end(ed, m["X12"], m["t1"], m["t2"])
    o2b = _outer_end(ed, m["X02"], m["t2"], m["t0"])
    o2c = _outer_end(ed, m["X12"], m["t2"], m["t1"])

    for key in ("t0", "t1", "t2"):
        del ed.arcs[m[key]]
    aid_new_a = ed.add_node(CROSSING, new_a)
    aid_new_b = ed.add_node(CROSSING, new_b)
    keep_c = m["X12"]

    # strands 1, 2: extend the near stub to X12, bridge to the new crossing,
    # trim the far stub back to it
    _extend_stub(ed, o1a, keep_c)
    ed.add_arc(keep_c, aid_new_a, [pc, new_a])
    _trim_stub(ed, o1c, aid_new_a)
    _extend_stub(ed, o2b, keep_c)
    ed.add_arc(keep_c, aid_new_b, [pc, new_b])
    _trim_stub(ed, o2c, aid_new_b)
    # the slid strand: jog each stub onto the shifted line
    _jog_stub(ed, o0a, aid_new_a, new_b)
    ed.add_arc(aid_new_a, aid_new_b, [new_a, new_b])
    _jog_stub(ed, o0b, aid_new_b, new_a)
    for key in ("X01", "X02"):
        del ed.nodes[m[key]]
    return checked(ed)


def _outer_end(ed: Editor, xid: int, side_arc: int, other_side: int) -> tuple[int, int]:
    """The arc-end at a triangle crossing continuing the strand of side_arc."""
    t = ed.arcs[side_arc]
    e_at = 0 if t.ends[0] == xid else 1
    ta, tb = t.first_segment(e_at)
    s_side = (tb[1] - ta[1]) / (tb[0] - ta[0])
    for cand in ed.ends_at(xid):
        if cand[0] in (side_arc, other_side):
            continue
        a, b = ed.arcs[cand[0]].first_segment(cand[1])
        if b[0] == a[0]:
            continue
        if (b[1] - a[1]) / (b[0] - a[0]) == s_side:
            return cand
    raise RealizationError("triangle strand continuation not found")


def _reoriented(ed: Editor, end: tuple[int, int]) -> tuple[list[Point], int]:
    """Points of the end's arc running toward the end, plus the far node."""
    aid, e = end
    arc = ed.arcs[aid]
    pts = list(arc.points) if e == 1 else list(reversed(arc.points))
    return pts, arc.ends[1 - e]


def _extend_stub(ed: Editor, end: tuple[int, int], to_node: int) -> None:
    pts, far = _reoriented(ed, end)
    target = ed.nodes[to_node].pos
    if (target[0] - pts[-1][0]) * (pts[-1][0] - pts[-2][0]) <= 0:
        raise RealizationError("stub extension reverses direction")
    del ed.arcs[end[0]]
    ed.add_arc(far, to_node, pts + [target])


def _trim_stub(ed: Editor, end: tuple[int, int], to_node: int) -> None:
    pts, far = _reoriented(ed, end)
    target = ed.nodes[to_node].pos
    if not on_segment(target, pts[-1], pts[-2]):
        raise RealizationError("trim point not on the stub's last segment")
    del ed.arcs[end[0]]
    ed.add_arc(far, to_node, pts[:-1] + [target])


def _jog_stub(ed: Editor, end: tuple[int, int], to_node: int, other: Point) -> None:
    """Reattach a stub at a node off its own line, finishing with a short
    run along the node's strand line (away from `other`)."""
    pts, far = _reoriented(ed, end)
    target = ed.nodes[to_node].pos
    d8 = Fraction(1, 8)
    mid = (target[0] + (target[0] - other[0]) * d8, target[1] + (target[1] - other[1]) * d8)
    step = pts[-1][0] - pts[-2][0]
    if (mid[0] - pts[-1][0]) * step <= 0 or (target[0] - mid[0]) * step <= 0:
        raise RealizationError("jog reverses direction")
    del ed.arcs[end[0]]
    ed.add_arc(far, to_node, pts + [mid, target])


def _op_swap_pair(d: FrontDiagram, site: MoveSite, params: dict) -> FrontDiagram:
    nid = site.mapping["J"]
    e1 = _resolve_end(d, site.mapping["e1"])
    e2 = _resolve_end(d, site.mapping["e2"])
    _end_at(d, e1, nid)
    _end_at(d, e2, nid)
    if d.end_side(*e1) != d.end_side(*e2):
        raise StaleSiteError("pair no longer on one side")
    side = d.end_side(*e1)
    s2 = d.near_slope(*e2)
    germ = s2 + (1 if side > 0 else -1) * max(abs(s2 - d.near_slope(*e1)), Fraction(1))
    ed = Editor(d)
    scale = _local_scale(d, e1, e2) * params["scale_shrink"]
    restub(ed, e1, nid, side, germ, 0, params["frac"], scale)
    return checked(ed)


def _op_unswap_pair(d: FrontDiagram, site: MoveSite, params: dict) -> FrontDiagram:
    nid = site.mapping["J"]
    e1 = _resolve_end(d, site.mapping["e1"])
    e2 = _resolve_end(d, site.mapping["e2"])
    _end_at(d, e1, nid)
    _end_at(d, e2, nid)
    x = _pair_crossing(d, nid, e1, e2)
    if x is None:
        raise StaleSiteError("pair is not crossed")
    # re-stub the end whose chain starts at the crossing, eating it
    ed = Editor(d)
    mover = e1
    _p, between, _t = strand_chain(ed, *mover)
    if not between or between[0] != x:
        mover = e2
        _p, between, _t = strand_chain(ed, *mover)
        if not between or between[0] != x:
            raise StaleSiteError("crossing is not adjacent to either end")
    other = e2 if mover == e1 else e1
    side = d.end_side(*mover)
    s_other = d.near_slope(*other)
    germ = s_other - (1 if side > 0 else -1) * Fraction(1, 2)
    scale = _local_scale(d, e1, e2) * params["scale_shrink"]
    restub(ed, mover, nid, side, germ, 1, params["frac"], scale)
    return checked(ed)


def _op_contract_edge(d: FrontDiagram, site: MoveSite, params: dict) -> FrontDiagram:
    aid = site.mapping["f"]
    if aid not in d.arcs:
        raise StaleSiteError("edge gone")
    arc = d.arcs[aid]
    if arc.ends is None or arc.ends[0] == arc.ends[1]:
        raise StaleSiteError("edge is a loop")
    j, k = arc.ends
    if d.nodes[j].kind != JUNCTION or d.nodes[k].kind != JUNCTION:
        raise StaleSiteError("edge no longer joins two junctions")
    ed = Editor(d)
    del ed.arcs[aid]
    scale = _local_scale(d, (aid, 0)) * params["scale_shrink"]
    moved = list(ed.ends_at(k))
    for idx, end in enumerate(moved):
        pts = piece_points(ed, tuple(end))
        p_ref = cut_point(pts, Fraction(1, 4))
        side = 1 if p_ref[0] > ed.nodes[j].x else -1
        germ = _default_germ_slope(d, j, side, ed) + idx
        restub(ed, tuple(end), j, side, germ, 0, Fraction(1, 4), scale)
    if ed.ends_at(k):
        raise RealizationError("contracted junction still has ends")
    del ed.nodes[k]
    return checked(ed)


def _op_expand_junction(d: FrontDiagram, site: MoveSite, params: dict) -> FrontDiagram:
    nid = site.mapping["J"]
    if nid not in d.nodes or d.nodes[nid].kind != JUNCTION:
        raise StaleSiteError("junction gone")
    right, left = _side_groups(d, nid)
    group = right if params.get("side", site.params.get("side")) == "R" else left
    start = int(params.get("start", site.params.get("start", 0)))
    count = int(params.get("count", site.params.get("count", 1)))
    if start + count > len(group) or len(right) + len(left) - count < 2:
        raise StaleSiteError("split run out of range")
    moved = group[start : start + count]
    side = d.end_side(*moved[0])
    slopes = [d.near_slope(*x) for x in moved]
    mid_slope = sum(slopes, Fraction(0)) / len(slopes)
    scale = _local_scale(d, *moved) * params["scale_shrink"]
    pos = d.nodes[nid].pos
    kpos = (pos[0] + side * scale, pos[1] + side * scale * mid_slope)
    ed = Editor(d)
    k = ed.add_node(JUNCTION, kpos, params.get("label"))
    ed.add_arc(nid, k, [pos, kpos])
    for idx, end in enumerate(moved):
        germ = mid_slope + (idx - Fraction(count - 1, 2)) / 2
        restub(ed, tuple(end), k, side, germ, 0, params["frac"], scale / 2)
    return checked(ed)


_REALIZERS = {
    "slide_end": _op_slide,
    "flip_end": _op_flip,
    "insert_swallowtail": _op_insert_swallowtail,
    "remove_swallowtail": _op_remove_swallowtail,
    "push_through_cusp": _op_push_through_cusp,
    "pull_from_cusp": _op_pull_from_cusp,
    "flip_triangle": _op_flip_triangle,
    "swap_pair": _op_swap_pair,
    "unswap_pair": _op_unswap_pair,
    "contract_edge": _op_contract_edge,
    "expand_junction": _op_expand_junction,
}


# --- scripts -----------------------------------------------------------------


def resolve_selector(d: FrontDiagram, rule: RewriteRule, selector: dict) -> MoveSite:
    """Turn a symbolic selector into a concrete site on this diagram.

    Selectors address junctions by label and ends by (side, slope rank), so
    scripts survive the coordinate churn of earlier steps.  Resolution must
    be unique; anything else is an error.
    """
    labels = d.node_ids_by_label()

    def junction(name):
        if name not in labels:
            raise StaleSiteError(f"no junction labeled {name!r}")
        return labels[name]

    def end(nid, spec):
        side_name, rank = spec
        right, left = _side_groups(d, nid)
        group = right if side_name == "R" else left
        if rank >= len(group):
            raise StaleSiteError(f"no end ({side_name},{rank}) at node {nid}")
        return group[rank]

    mapping: dict = {}
    if "junction" in selector:
        nid = junction(selector["junction"])
        mapping["J"] = nid
        if "end" in selector:
            mapping["e"] = list(end(nid, selector["end"]))
        if "along" in selector:
            mapping["f"] = list(end(nid, selector["along"]))
        if "pair" in selector:
            mapping["e1"] = list(end(nid, selector["pair"][0]))
            mapping["e2"] = list(end(nid, selector["pair"][1]))
    if "arc_between" in selector:
        a_lbl, b_lbl = selector["arc_between"]
        a, b = junction(a_lbl), junction(b_lbl)
        arcs = _direct_arcs(d, a, b)
        idx = selector.get("index", 0)
        if idx >= len(arcs):
            raise StaleSiteError(f"no arc #{idx} between {a_lbl} and {b_lbl}")
        mapping["f"] = arcs[idx]
        mapping["J"], mapping["K"] = a, b
    return MoveSite(rule.name, mapping, dict(selector.get("site_params", {})))


def apply_script(d: FrontDiagram, script: MoveScript) -> FrontDiagram:
    cur = d
    for i, step in enumerate(script.steps):
        try:
            rule = rule_by_name(step.rule)
            site = resolve_selector(cur, rule, step.selector)
            params = dict(site.params)
            params.update(step.params)
            cur = apply(cur, MoveSite(rule.name, site.mapping, params))
        except (KeyError, StaleSiteError, RealizationError, ValueError) as exc:
            raise ScriptError(str(exc), i) from exc
        relabel = step.params.get("relabels")
        if relabel:
            labels = cur.node_ids_by_label()
            for old, new in relabel.items():
                if old in labels:
                    cur = cur.with_label(labels[old], new)
    return cur


def verify(src: FrontDiagram, script: MoveScript, tgt: FrontDiagram):
    """Run the script on src and compare with tgt up to isomorphism.

    Returns (ok, trace); the trace records per-step Euler characteristics,
    component counts and signatures, plus any error.
    """
    trace: dict = {"steps": [], "verified": False, "error": None}

    def snapshot(d, label):
        trace["steps"].append(
            {
                "label": label,
                "chi": euler_characteristic(d),
                "components": components(d),
                "signature": str(signature(d)),
            }
        )

    try:
        snapshot(src, "source")
        cur = src
        for i, step in enumerate(script.steps):
            rule = rule_by_name(step.rule)
            site = resolve_selector(cur, rule, step.selector)
            params = dict(site.params)
            params.update(step.params)
            cur = apply(cur, MoveSite(rule.name, site.mapping, params))
            relabel = step.params.get("relabels")
            if relabel:
                labels = cur.node_ids_by_label()
                for old, new in relabel.items():
                    if old in labels:
                        cur = cur.with_label(labels[old], new)
            snapshot(cur, f"{i}:{step.rule}")
        ok = isomorphic(cur, tgt)
        trace["verified"] = bool(ok)
        trace["target_signature"] = str(signature(tgt))
        return ok, trace
    except (ScriptError, StaleSiteError, RealizationError, KeyError, ValueError) as exc:
        trace["error"] = str(exc)
        return False, trace


def script_armadillo_to_mothership(t, o=None) -> MoveScript:
    from treefronts.scripts import build_a2m

    return build_a2m(t, o)


def script_mothership_to_arboreal(t) -> MoveScript:
    from treefronts.scripts import build_m2a

    return build_m2a(t)
