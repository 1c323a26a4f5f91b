from fractions import Fraction

import pytest

from treefronts.diagram import (
    CROSSING,
    JUNCTION,
    LEFT_CUSP,
    RIGHT_CUSP,
    Arc,
    CyclicOrderTieError,
    DiagramFormatError,
    FrontDiagram,
    Node,
    components,
    cyclic_order,
    euler_characteristic,
    from_json,
    isomorphic,
    signature,
    to_json,
    underlying_graph,
    validate,
)
from treefronts.generators import SaucerParams, gen_arboreal, gen_armadillo, gen_saucer
from treefronts.tree import parse_tree


def saucer():
    return gen_saucer()


def test_saucer_validates():
    assert validate(saucer()).ok


def test_saucer_node_kinds():
    kinds = sorted(n.kind for n in saucer().nodes.values())
    assert kinds == [LEFT_CUSP, RIGHT_CUSP]


def test_singular_saucer():
    d = gen_saucer(SaucerParams(singular=True))
    assert validate(d).ok
    kinds = [n.kind for n in d.nodes.values()]
    assert kinds.count(JUNCTION) == 2
    assert LEFT_CUSP not in kinds and RIGHT_CUSP not in kinds


def test_saucer_zero_half_width_rejected():
    with pytest.raises(ValueError):
        SaucerParams(half_width=Fraction(0))


def test_vertical_perturbation_detected():
    d = saucer().copy()
    aid = min(d.arcs)
    arc = d.arcs[aid]
    pts = list(arc.points)
    pts[1] = (pts[0][0], pts[1][1])  # make first segment vertical
    d.arcs[aid] = Arc(arc.id, arc.ends, tuple(pts))
    report = validate(d)
    assert not report.ok
    assert any(v.rule == "vertical_tangency" for v in report.violations)


def test_saucer_graph():
    g = underlying_graph(saucer())
    assert len(g.vertices) == 0
    assert len(g.edges) == 0
    assert g.isolated_loops == 1


def test_saucer_chi_and_components():
    assert euler_characteristic(saucer()) == 0
    assert components(saucer()) == 1


def test_two_disjoint_saucers():
    d1 = gen_saucer()
    d2 = gen_saucer(SaucerParams(center=(Fraction(0), Fraction(10))))
    merged_nodes = dict(d1.nodes)
    merged_arcs = dict(d1.arcs)
    offset = max(merged_nodes) + max(d1.arcs) + 2
    for nid, n in d2.nodes.items():
        merged_nodes[nid + offset] = Node(nid + offset, n.kind, n.x, n.z, n.label)
    for aid, a in d2.arcs.items():
        ends = None if a.ends is None else (a.ends[0] + offset, a.ends[1] + offset)
        merged_arcs[aid + offset] = Arc(aid + offset, ends, a.points)
    d = FrontDiagram(merged_nodes, merged_arcs)
    assert components(d) == 2


def test_arboreal_path2_graph():
    d = gen_arboreal(parse_tree("(())"))
    g = underlying_graph(d)
    assert len(g.vertices) == 2
    assert len(g.edges) == 3
    assert g.isolated_loops == 0
    assert euler_characteristic(d) == -1


def test_arboreal_path3_graph():
    # V - E must give chi = -2 (the 4 junctions span a K4)
    d = gen_arboreal(parse_tree("((()))"))
    g = underlying_graph(d)
    assert len(g.vertices) == 4
    assert len(g.edges) == 6
    assert euler_characteristic(d) == -2


def test_cyclic_order_two_sided_junction():
    d = gen_arboreal(parse_tree("(())"))
    labels = d.node_ids_by_label()
    ja = labels["h1a"]
    order = cyclic_order(d, ja)
    sides = [d.end_side(*x) for x in order]
    # rightward ends first (increasing slope), then leftward
    assert sides == [1, 1, -1]
    right_slopes = [d.near_slope(*x) for x in order[:2]]
    assert right_slopes == sorted(right_slopes)


def test_cyclic_order_three_right_arcs():
    b_nodes = {}
    b_arcs = {}
    j = Node(0, JUNCTION, Fraction(0), Fraction(0))
    b_nodes[0] = j
    ends = []
    for i, s in enumerate((-1, 0, 1)):
        nid = i + 1
        b_nodes[nid] = Node(nid, JUNCTION, Fraction(4), Fraction(4 * s) + i)
        b_arcs[i + 10] = Arc(
            i + 10,
            (0, nid),
            ((Fraction(0), Fraction(0)), (Fraction(4), Fraction(4 * s) + i)),
        )
        ends.append((i + 10, 0))
    d = FrontDiagram(b_nodes, b_arcs)
    order = cyclic_order(d, 0)
    slopes = [d.near_slope(*x) for x in order]
    assert slopes == sorted(slopes)


def test_cyclic_order_tie_error():
    nodes = {
        0: Node(0, JUNCTION, Fraction(0), Fraction(0)),
        1: Node(1, JUNCTION, Fraction(4), Fraction(0)),
        2: Node(2, JUNCTION, Fraction(8), Fraction(0)),
    }
    arcs = {
        3: Arc(3, (0, 1), ((Fraction(0), Fraction(0)), (Fraction(4), Fraction(0)))),
        4: Arc(4, (0, 2), ((Fraction(0), Fraction(0)), (Fraction(8), Fraction(0)))),
    }
    d = FrontDiagram(nodes, arcs)
    with pytest.raises(CyclicOrderTieError):
        cyclic_order(d, 0)


def test_signature_invariant_under_relabeling():
    d = gen_arboreal(parse_tree("(())"))
    remap = {nid: nid + 100 for nid in d.nodes}
    nodes = {
        remap[nid]: Node(remap[nid], n.kind, n.x, n.z, None)
        for nid, n in d.nodes.items()
    }
    arcs = {}
    for aid, a in d.arcs.items():
        ends = (remap[a.ends[0]], remap[a.ends[1]])
        arcs[aid + 500] = Arc(aid + 500, ends, a.points)
    d2 = FrontDiagram(nodes, arcs)
    assert isomorphic(d, d2)


def test_signature_invariant_under_scaling():
    d = gen_arboreal(parse_tree("(())"))
    nodes = {nid: Node(nid, n.kind, 2 * n.x, n.z, n.label) for nid, n in d.nodes.items()}
    arcs = {
        aid: Arc(aid, a.ends, tuple((2 * x, z) for x, z in a.points))
        for aid, a in d.arcs.items()
    }
    assert isomorphic(d, FrontDiagram(nodes, arcs))


def test_signature_distinguishes_sizes():
    assert not isomorphic(
        gen_arboreal(parse_tree("(())")), gen_arboreal(parse_tree("((()))"))
    )


def test_json_roundtrip_signature_fixed_point():
    d = gen_arboreal(parse_tree("(()())"))
    text = to_json(d)
    d2 = from_json(text)
    assert signature(d) == signature(d2)
    assert to_json(d2) == text


def test_json_deterministic():
    t = parse_tree("((()))")
    assert to_json(gen_armadillo(t)) == to_json(gen_armadillo(t))


def test_json_rejects_garbage():
    with pytest.raises(DiagramFormatError):
        from_json("{not json")
    with pytest.raises(DiagramFormatError):
        from_json('{"nodes": []}')


def test_crossing_structure():
    d = gen_arboreal(parse_tree("(()())"))
    crossings = [n for n in d.nodes.values() if n.kind == CROSSING]
    assert len(crossings) == 1
    assert validate(d).ok
    g = underlying_graph(d)
    assert len(g.vertices) == 4
    assert len(g.edges) == 6
    assert euler_characteristic(d) == -2
