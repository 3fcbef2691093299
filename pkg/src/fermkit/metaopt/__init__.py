from .beh import beh_optimize, beh_segment
from .common import cluster_cost, roulette_select
from .ngn import NgnNetwork, ngn_segment, ngn_train
from .vao import feature_selection_cost, vao_select
from .wdoa import wdoa_enhance, wdoa_optimize

__all__ = [
    "NgnNetwork", "beh_optimize", "beh_segment", "cluster_cost", "feature_selection_cost",
    "ngn_segment", "ngn_train", "roulette_select", "vao_select", "wdoa_enhance", "wdoa_optimize",
]
