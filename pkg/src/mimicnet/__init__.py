"""Perfect matchings, minimum-weight perfect matchings and maximum flows in
graphs built from planar and bounded-treewidth pieces by small clique-sums,
computed by replacing decomposition subtrees with small mimicking networks."""

from .decompose import DecompositionTree, decompose, decompose_exhaustive
from .engine import find_min_weight_pm, find_perfect_matching, run_matching
from .errors import MimicError, NotInFamily
from .flowengine import find_max_flow, run_max_flow
from .flowmimic import FlowMimick, combine, flow_mimick
from .generators import GenSpec, generate, random_in_family, random_planar, wagner_graph
from .graph import Graph, Matching, is_perfect_matching
from .mimic_matching import MimickingNetwork, enumerate_realizable_patterns, network_for
from .pattern import MatchingPattern

__all__ = [
    "DecompositionTree",
    "FlowMimick",
    "GenSpec",
    "Graph",
    "Matching",
    "MatchingPattern",
    "MimicError",
    "MimickingNetwork",
    "NotInFamily",
    "combine",
    "decompose",
    "decompose_exhaustive",
    "enumerate_realizable_patterns",
    "find_max_flow",
    "find_min_weight_pm",
    "find_perfect_matching",
    "flow_mimick",
    "generate",
    "is_perfect_matching",
    "network_for",
    "random_in_family",
    "random_planar",
    "run_matching",
    "run_max_flow",
    "wagner_graph",
]
