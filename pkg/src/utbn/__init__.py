"""Universal tree-based phylogenetic networks with O(n log n) reticulations.

Build U_n with :func:`build_universal`, certify any tree on ``1..n`` as a
base tree with :func:`embed_tree`, and check certificates with
:func:`verify_base_tree`.
"""
from .analyze import bound_report, is_stack_free, temporal_labeling
from .benes import apply, build_benes, route, switch_count
from .construct import (
    build_bottom,
    build_caterpillar,
    build_top_scaffold,
    build_universal,
    subdivision_count,
)
from .embed import check_universal, embed_shape_top, embed_tree, required_permutation
from .graph import (
    PhyloNetwork,
    PhyloTree,
    TreeShape,
    displays_bruteforce,
    resolve_choice,
    shape_of,
    suppress_degree_two,
    tree_equal,
    validate_network,
    verify_base_tree,
)
from .io import parse_newick, to_dot, to_enewick, to_newick
from .treegen import count_trees, enumerate_trees, random_tree

__version__ = "0.1.0"
