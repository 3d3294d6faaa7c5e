"""Community detection for a single observer from its h-hop local topology."""

from .classify import Prediction, test_set, threshold_by_count, threshold_by_prior
from .data import LabelMap, SbmSpec, export_id_map, gen_sbm, load_labels
from .errors import ConfigError, ConvergenceError, DataError, EgoRankError, ParseError
from .evaluate import ConfusionMatrix, RocCurve, auc, confusion, metrics, relative_improvement, roc
from .graph import EgoView, Graph, degrees, extract_ego, load_graph, write_edge_list
from .ranking import (
    EscapeVector, PprParams, ScoreVector, adamic_adar, common_neighbors, ev_from_set, ev_strategy,
    ev_uniform, heuristic_scores, pagerank_basic, pagerank_escape, ppr_power, ppr_push,
)

__version__ = "0.1.0"
