"""Exact Bayesian network structure learning by branch and cut.

Local scores in, provably optimal acyclic digraph out, via an LP
relaxation over family variables, cluster-constraint cutting planes found
by an exact separation search, and branching.  The ``polytope`` subpackage
certifies the underlying geometry (complete facet catalogues for small
node counts, lift/restrict transforms, faces, the sink-based extended
representation) in exact rational arithmetic; ``reductions`` maps
instances to bounded parent-set size and to the acyclic subgraph problem
and back.
"""

from .model import (BnslInstance, Family, FamilyIndex, decode_digraph,
                    encode_digraph, enumerate_acyclic_digraphs, is_acyclic,
                    total_score)
from .scoreio import parse_scores, write_scores, write_solution
from .separation import (ClusterCut, SeparationReport, build_vc_gadget,
                         kcluster_separate, subip_objective,
                         weak_separate_exact, weak_separate_heuristic)
from .solver import SolveConfig, SolveResult, solve

__version__ = "0.1.0"

__all__ = [
    "BnslInstance", "Family", "FamilyIndex", "decode_digraph",
    "encode_digraph", "enumerate_acyclic_digraphs", "is_acyclic",
    "total_score", "parse_scores", "write_scores", "write_solution",
    "ClusterCut", "SeparationReport", "build_vc_gadget", "kcluster_separate",
    "subip_objective", "weak_separate_exact", "weak_separate_heuristic",
    "SolveConfig", "SolveResult", "solve", "__version__",
]
