"""Outlier detection and member replacement for academic teams."""

from .corpus import CollaborationNetwork, PublicationRecord, Team, build_network, load_teams, parse_publications
from .errors import ConvergenceError, DataError, ParameterError, TeamrepError
from .familiarity import detect_outliers, higher_order_familiarity, outlier_degree, pairwise_familiarity
from .kernel import KernelProblem, ablation_score, build_problem, candidate_pool, omr_score, recommend
from .metrics import accuracy, avg_shortest_path, evaluate_run, sum_distance, temporal_split
from .motifs import MotifIndex, enumerate_motifs, motif_partner_count, multi_col

__version__ = "0.1.0"
