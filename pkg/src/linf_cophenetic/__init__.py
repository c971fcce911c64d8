"""l-infinity cophenetic distance between phylogenetic trees, computed in
closed form and certified as an interleaving distance."""

from .cophenetic import (
    CopheneticVector,
    cophenetic_vector,
    hom_exists,
    linf_distance,
    lp_distance,
    tree_distance,
)
from .errors import NewickSyntaxError, PhyloError, TreeStructureError
from .estimator import CopheneticEmbedding
from .flow import (
    InterleavingCertificate,
    PhTreeFlow,
    PosetWithFlow,
    RnFlow,
    interleave,
    interleaving_distance,
    is_interleaved,
    phtree_distance_closed_form,
    smooth,
)
from .lca import LcaIndex, build_index, join
from .matrix import MatrixReport, distance_matrix
from .morphism import explicit_morphism, morphism_exists
from .newick import HeightConvention, dumps, load, loads, parse_newick, serialize, to_phylo
from .tree_core import MergeTree, PhyloTree, build_merge_tree, label_tree, leaves, leq

__version__ = "0.1.0"
