import pytest

from treefronts.diagram import (
    JUNCTION,
    LEFT_CUSP,
    RIGHT_CUSP,
    components,
    euler_characteristic,
    isomorphic,
    validate,
)
from treefronts.generators import (
    UnsupportedDimensionError,
    gen_arboreal,
    gen_armadillo,
    gen_coordinated_mothership,
    gen_mothership,
    gen_saucer,
)
from treefronts.tree import TotalOrder, all_total_orders, all_trees, parse_tree


def junction_count(d):
    return sum(1 for n in d.nodes.values() if n.kind == JUNCTION)


def test_arboreal_single_vertex_is_saucer():
    d = gen_arboreal(parse_tree("()"))
    assert isomorphic(d, gen_saucer())
    assert euler_characteristic(d) == 0


def test_arboreal_dimension_limit():
    with pytest.raises(UnsupportedDimensionError):
        gen_arboreal(parse_tree("(()()())"))
    with pytest.raises(UnsupportedDimensionError):
        gen_coordinated_mothership(parse_tree("((()()))"))


def test_arboreal_path_chi_matches_milnor_fibre():
    for n in (1, 2, 3):
        t = parse_tree("(" * n + ")" * n)
        assert euler_characteristic(gen_arboreal(t)) == 1 - n


def test_arboreal_shrub_counts():
    d = gen_arboreal(parse_tree("(()())"))
    assert junction_count(d) == 4
    assert euler_characteristic(d) == -2


def test_armadillo_single_vertex_plain_saucer():
    d = gen_armadillo(parse_tree("()"))
    kinds = sorted(n.kind for n in d.nodes.values())
    assert kinds == [LEFT_CUSP, RIGHT_CUSP]


def test_armadillo_path2_counts():
    d = gen_armadillo(parse_tree("(())"))
    assert junction_count(d) == 2
    assert euler_characteristic(d) == -1
    assert components(d) == 1


def test_armadillo_shrub2_counts():
    d = gen_armadillo(parse_tree("(()())"))
    assert junction_count(d) == 4
    assert euler_characteristic(d) == -2
    assert components(d) == 1


def test_mothership_path2_counts():
    d = gen_mothership(parse_tree("(())"))
    assert euler_characteristic(d) == -1
    assert junction_count(d) == 2


def test_mothership_path3_doubly_nested():
    d = gen_mothership(parse_tree("((()))"))
    assert euler_characteristic(d) == -2
    assert junction_count(d) == 4


def test_invalid_order_rejected():
    t = parse_tree("(())")
    with pytest.raises(ValueError):
        gen_armadillo(t, TotalOrder((1, 0)))
    with pytest.raises(ValueError):
        gen_mothership(t, TotalOrder((1, 0)))


def test_all_generators_validate_all_trees():
    """Acceptance-grade sweep: every generator output validates (trees <= 5,
    <= 3 for the dimension-limited generators), every compatible order."""
    for t in all_trees(5):
        for o in all_total_orders(t):
            assert validate(gen_armadillo(t, o)).ok, (t.serialize(), o.sequence)
            assert validate(gen_mothership(t, o)).ok, (t.serialize(), o.sequence)
        if len(t) <= 3:
            assert validate(gen_arboreal(t)).ok, t.serialize()
            assert validate(gen_coordinated_mothership(t)).ok, t.serialize()


def test_chi_agreement_across_families():
    for t in all_trees(5):
        n = len(t)
        assert euler_characteristic(gen_armadillo(t)) == 1 - n
        assert euler_characteristic(gen_mothership(t)) == 1 - n
        if n <= 3:
            assert euler_characteristic(gen_arboreal(t)) == 1 - n
            assert euler_characteristic(gen_coordinated_mothership(t)) == 1 - n


def test_connectedness():
    for t in all_trees(5):
        assert components(gen_armadillo(t)) == 1
        assert components(gen_mothership(t)) == 1
        if len(t) <= 3:
            assert components(gen_arboreal(t)) == 1


def test_coordinated_isomorphic_to_mothership():
    for t in all_trees(3):
        assert isomorphic(gen_coordinated_mothership(t), gen_mothership(t))


def test_armadillo_identical_under_cousin_swap():
    # swapping order positions of non-adjacent non-sibling vertices leaves
    # every sibling order unchanged, so the diagram is unchanged
    t = parse_tree("((())(()))")  # root, children 1 and 3, grandchildren 2, 4
    o1 = TotalOrder((0, 1, 3, 2, 4))
    o2 = TotalOrder((0, 1, 3, 4, 2))  # swap the two cousins 2 and 4
    assert isomorphic(gen_armadillo(t, o1), gen_armadillo(t, o2))


def test_armadillo_sibling_swap_isomorphic_shapes():
    t = parse_tree("(()())")
    o1 = TotalOrder((0, 1, 2))
    o2 = TotalOrder((0, 2, 1))
    assert isomorphic(gen_armadillo(t, o1), gen_armadillo(t, o2))
