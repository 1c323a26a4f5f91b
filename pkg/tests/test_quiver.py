import itertools

import pytest

from treefronts.quiver import (
    NotFiniteTypeError,
    TreeQuiver,
    classify,
    count_indecomposables,
    positive_roots,
)
from treefronts.tree import all_trees, parse_tree


def path(n: int):
    return parse_tree("(" * n + ")" * n)


def interval_count(n: int) -> int:
    """Independent oracle: A_n positive roots are exactly the intervals."""
    return sum(1 for i in range(n) for j in range(i, n))


def test_classify_paths():
    for n in range(1, 9):
        assert classify(path(n)) == f"A_{n}"


def test_classify_d4():
    assert classify(parse_tree("(()()())")) == "D_4"


def test_classify_affine_e6_shape():
    # three arms of length 2 from the center
    t = parse_tree("((())(())(()))")
    assert classify(t) == "not-finite-type"


def test_classify_degree_four_star():
    assert classify(parse_tree("(()()()())")) == "not-finite-type"


def test_classify_e_series():
    assert classify(parse_tree("((())(())())")) == "E6"
    assert classify(parse_tree("(((()))(())())")) == "E7"
    assert classify(parse_tree("((((())))(())())")) == "E8"


def test_single_vertex():
    assert count_indecomposables(TreeQuiver(parse_tree("()"))) == 1


def test_paths_match_interval_oracle():
    for n in range(1, 9):
        got = count_indecomposables(TreeQuiver(path(n)))
        assert got == interval_count(n) == n * (n + 1) // 2


def test_d4_is_twelve():
    assert count_indecomposables(TreeQuiver(parse_tree("(()()())"))) == 12


def test_not_finite_type_raises():
    with pytest.raises(NotFiniteTypeError):
        count_indecomposables(TreeQuiver(parse_tree("(()()()())")))


def test_orientation_invariance_up_to_five():
    for t in all_trees(5):
        if classify(t) == "not-finite-type":
            continue
        base = count_indecomposables(TreeQuiver(t))
        n_edges = len(t) - 1
        for bits in itertools.product([True, False], repeat=n_edges):
            assert count_indecomposables(TreeQuiver(t, bits)) == base


def test_simple_roots_present():
    roots = positive_roots(path(3))
    assert (1, 0, 0) in roots and (0, 1, 0) in roots
    assert (1, 1, 1) in roots
    assert all(all(c >= 0 for c in r) for r in roots)
