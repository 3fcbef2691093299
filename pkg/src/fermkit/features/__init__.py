from .depthface import extract_depth_face, find_nose_tip
from .facs import facs_expression
from .gabor import GaborBank, gabor_bank, gabor_features, gabor_responses
from .hog import hog_features
from .lbp import lbp_codes, lbp_features, lbp_histogram256
from .lpq import lpq_features
from .matrix import FeatureMatrix, stack_features

__all__ = [
    "FeatureMatrix", "GaborBank", "extract_depth_face", "facs_expression", "find_nose_tip",
    "gabor_bank", "gabor_features", "gabor_responses", "hog_features", "lbp_codes",
    "lbp_features", "lbp_histogram256", "lpq_features", "stack_features",
]
