"""Tree-indexed singular Legendrian fronts and their move calculus.

The package builds planar front diagrams for the tree-indexed families of
singular Legendrians (arboreal links, armadillos, motherships), provides a
local rewrite calculus (graph Reidemeister moves and ribbotopies), and
certifies the armadillo -> mothership -> arboreal transformations at desk
scale, together with the tree-quiver indecomposable count shared by both
sides' module categories.
"""

from treefronts.tree import RootedTree, TotalOrder, parse_tree

__all__ = ["RootedTree", "TotalOrder", "parse_tree"]
