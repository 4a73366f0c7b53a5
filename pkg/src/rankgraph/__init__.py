"""rankgraph - Random graphs from node-pair rank structures.

A structure ranks every node pair from most to least likely to be connected;
a single parameter epsilon then moves the generated graphs between the
structure itself (epsilon = 0) and an Erdos-Renyi graph (epsilon = 1).
"""

from rankgraph.metrics import (
    ProfileResult,
    clustering_coefficient,
    delta_hat,
    largest_component,
    mean_distance,
    smallworld_profile,
)
from rankgraph.profile import ProbabilityProfile, epsilon_to_weight, probability_vector
from rankgraph.rank import NodePair, RankModel, build_rank_model, rank_from_costs, rank_matrix, rank_of
from rankgraph.sampler import GeneratorSpec, Graph, generate, generate_batch
from rankgraph.zoo import ZooSpec, available_structures, build_structure

__version__ = "0.1.0"
__all__ = [
    "GeneratorSpec",
    "Graph",
    "NodePair",
    "ProbabilityProfile",
    "ProfileResult",
    "RankModel",
    "ZooSpec",
    "available_structures",
    "build_rank_model",
    "build_structure",
    "clustering_coefficient",
    "delta_hat",
    "epsilon_to_weight",
    "generate",
    "generate_batch",
    "largest_component",
    "mean_distance",
    "probability_vector",
    "rank_from_costs",
    "rank_matrix",
    "rank_of",
    "smallworld_profile",
]
