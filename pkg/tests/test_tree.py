import pytest

from treefronts.tree import (
    RootedTree,
    TotalOrder,
    TreeParseError,
    all_total_orders,
    all_trees,
    default_total_order,
    is_shrub,
    is_valid_total_order,
    parse_tree,
    prune_to_shrub,
    subtree_from,
)


def test_parse_single_vertex():
    t = parse_tree("()")
    assert len(t) == 1
    assert t.root == 0


def test_parse_path_two():
    t = parse_tree("(())")
    assert len(t) == 2
    assert t.parent[1] == 0


def test_parse_shrub():
    t = parse_tree("(()())")
    assert len(t) == 3
    assert t.children[0] == (1, 2)


@pytest.mark.parametrize("bad", ["", "(", ")", "(()", "())", "()()", "(a)"])
def test_parse_errors(bad):
    with pytest.raises(TreeParseError):
        parse_tree(bad)


def test_parse_error_position():
    with pytest.raises(TreeParseError) as exc:
        parse_tree("())")
    assert exc.value.position == 2


def test_subtree_from_middle_of_path():
    t = parse_tree("((()))")
    s = subtree_from(t, 1)
    assert s.serialize() == "(())"


def test_subtree_from_root_is_identity():
    t = parse_tree("(()(()))")
    assert subtree_from(t, 0).serialize() == t.serialize()


def test_subtree_from_leaf():
    t = parse_tree("(()()())")
    assert subtree_from(t, 2).serialize() == "()"


def test_subtree_unknown_vertex():
    with pytest.raises(KeyError):
        subtree_from(parse_tree("()"), 5)


def test_prune_path3():
    assert prune_to_shrub(parse_tree("((()))")).serialize() == "(())"


def test_prune_shrub_identity():
    t = parse_tree("(()()())")
    assert prune_to_shrub(t).serialize() == t.serialize()


def test_prune_five_vertex():
    t = parse_tree("((())(()))")
    assert prune_to_shrub(t).serialize() == "(()())"


def test_prune_idempotent():
    for t in all_trees(6):
        once = prune_to_shrub(t)
        assert prune_to_shrub(once).serialize() == once.serialize()


def test_is_shrub():
    assert is_shrub(parse_tree("()"))
    assert not is_shrub(parse_tree("((()))"))
    assert is_shrub(parse_tree("(()()()())"))


def test_default_order_examples():
    assert default_total_order(parse_tree("()")).sequence == (0,)
    assert default_total_order(parse_tree("(()())")).sequence == (0, 1, 2)
    assert default_total_order(parse_tree("((()))")).sequence == (0, 1, 2)


def test_roundtrip_exhaustive():
    for t in all_trees(6):
        assert parse_tree(t.serialize()).serialize() == t.serialize()


def test_default_order_valid_exhaustive():
    for t in all_trees(6):
        assert is_valid_total_order(t, default_total_order(t))


def test_all_total_orders_shrub():
    t = parse_tree("(()())")
    orders = all_total_orders(t)
    assert len(orders) == 2
    assert all(o.sequence[0] == 0 for o in orders)


def test_invalid_order_rejected():
    t = parse_tree("(())")
    assert not is_valid_total_order(t, TotalOrder((1, 0)))


def test_tree_counts():
    # plane rooted trees are counted by Catalan numbers: 1, 1, 2, 5, 14
    by_size = {}
    for t in all_trees(5):
        by_size.setdefault(len(t), []).append(t)
    assert [len(by_size[n]) for n in range(1, 6)] == [1, 1, 2, 5, 14]


def test_rejects_cycle():
    with pytest.raises(ValueError):
        RootedTree((None, 2, 1), ((), (2,), (1,)))
