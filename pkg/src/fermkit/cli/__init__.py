from .corpus import CorpusIndex, Sample, ingest, read_crop_boxes
from .curves import emit_curves, read_curve
from .pipeline import load_config, run_pipeline
from .synthetic import make_corpus

__all__ = [
    "CorpusIndex", "Sample", "emit_curves", "ingest", "load_config", "make_corpus", "read_crop_boxes",
    "read_curve", "run_pipeline",
]
