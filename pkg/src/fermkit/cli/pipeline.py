"""Batch pipeline: ingest, preprocess, describe, select, split, train, evaluate.

Outputs are staged in a temporary directory next to the output directory
and moved in only after every stage has succeeded.
"""

from __future__ import annotations

import copy
import functools
import json
import logging
import shutil
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from .. import __version__
from ..classify import LabeledDataset, confusion, holdout_split, model_from_json, roc_one_vs_rest, train
from ..edgemorph import detect_edges
from ..enhance import (adjust_contrast, equalize_hist, gaussian_blur, median_filter, repair_black_spots,
                       unsharp_mask, wiener_adaptive)
from ..errors import ConfigError, EmptySelection, InvalidArgument, PipelineError
from ..features import (FeatureMatrix, extract_depth_face, gabor_bank, gabor_features, hog_features,
                        lbp_features, lpq_features, stack_features)
from ..freq import butterworth_bandpass
from ..imgcore import ensure_gray, is_rgb, load_image, resize, to_gray
from ..selection import apply_selection, lasso_cv
from .corpus import DEFAULT_PATTERNS, CorpusIndex, ingest
from .curves import emit_curves

log = logging.getLogger(__name__)

REPORT_SCHEMA = 1
CLASSIFIERS = ("knn", "gnb", "cart", "lda", "mlp")
SELECTIONS = ("none", "lasso")


def _channelwise(fn):
    """Lift a gray operation so RGB inputs are processed per channel."""
    def op(img, **kw):
        if is_rgb(img):
            return np.stack([fn(img[..., c], **kw) for c in range(3)], axis=-1)
        return fn(img, **kw)
    return op


def _sharp_polished(img, radius=1.0, amount=0.8, sigma=1.0):
    # stand-in composition: unsharp masking with canny edges painted white
    sharp = unsharp_mask(ensure_gray(img), radius, amount)
    edges = detect_edges(sharp, "canny", sigma=sigma)
    return np.where(edges, 1.0, sharp)


def _resize(img, w, h):
    return resize(img, int(w), int(h))


def _depth_face(img, crop_half_width=40, side_trim=0.1, ellipse_sigmas=2.0):
    return extract_depth_face(ensure_gray(img), crop_half_width, side_trim, ellipse_sigmas)


PREPROCESS_OPS = {
    "to_gray": lambda img: to_gray(img) if is_rgb(img) else img,
    "resize": _resize,
    "adjust_contrast": _channelwise(adjust_contrast),
    "equalize_hist": _channelwise(equalize_hist),
    "median_filter": _channelwise(median_filter),
    "gaussian_blur": _channelwise(gaussian_blur),
    "unsharp_mask": _channelwise(unsharp_mask),
    "wiener_adaptive": _channelwise(wiener_adaptive),
    "repair_black_spots": _channelwise(repair_black_spots),
    "butterworth_bandpass": _channelwise(butterworth_bandpass),
    "depth_face": _depth_face,
    "sharp_polished": _sharp_polished,
}

SUBSTITUTED_OPS = {
    "sharp_polished": "unsharp_mask followed by canny edges overlaid at full intensity "
                      "(the original routine is not available)",
}


@functools.lru_cache(maxsize=8)
def _cached_bank(u, v, m, n):
    return gabor_bank(u, v, m, n)


def _gabor(img, u=5, v=8, m=39, n=39, d1=8, d2=8):
    return gabor_features(img, _cached_bank(u, v, m, n), d1, d2)


DESCRIPTORS = {
    "lbp": lambda img, **kw: lbp_features(img, **kw),
    "hog": lambda img, **kw: hog_features(img, **kw),
    "lpq": lambda img, **kw: lpq_features(img, **kw),
    "gabor": _gabor,
}

DEFAULT_CONFIG = {
    "input_dir": None,
    "patterns": dict(DEFAULT_PATTERNS),
    "crop_boxes": None,
    "preprocess": {"color": [], "depth": []},
    "descriptors": [
        {"name": "lbp", "modality": "color", "params": {}},
        {"name": "hog", "modality": "color", "params": {}},
        {"name": "lpq", "modality": "depth", "params": {}},
        {"name": "gabor", "modality": "depth", "params": {}},
    ],
    "selection": {"method": "lasso", "k_folds": 5},
    "classifier": {"algo": "knn", "params": {"k": 5}},
    "split": {"test_fraction": 0.3},
    "seed": 0,
    "workers": 1,
    "output_dir": None,
}


# -- config -------------------------------------------------------------------
def load_config(source=None, **overrides) -> dict:
    """Merge a JSON document (a path, a dict or None) over the defaults.

    Keyword overrides with a non-None value replace top-level keys.
    """
    if source is None:
        doc = {}
    elif isinstance(source, dict):
        doc = copy.deepcopy(source)
    else:
        try:
            doc = json.loads(Path(source).read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {source}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    unknown = set(doc) - set(DEFAULT_CONFIG)
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    cfg = copy.deepcopy(DEFAULT_CONFIG)
    cfg.update(doc)
    cfg.update({k: v for k, v in overrides.items() if v is not None})
    if cfg["input_dir"] is None:
        raise ConfigError("input_dir is required")
    if cfg["output_dir"] is None:
        raise ConfigError("output_dir is required")
    if not isinstance(cfg["seed"], int) or isinstance(cfg["seed"], bool) or cfg["seed"] < 0:
        raise ConfigError("seed must be a non-negative integer")
    if not isinstance(cfg["workers"], int) or cfg["workers"] < 1:
        raise ConfigError("workers must be a positive integer")
    return cfg


def _steps(chain, where):
    if not isinstance(chain, list):
        raise ConfigError(f"{where} must be a list of steps")
    out = []
    for step in chain:
        if isinstance(step, str):
            step = {"op": step}
        if not isinstance(step, dict) or "op" not in step:
            raise ConfigError(f"{where}: each step needs an 'op'")
        out.append((step["op"], {k: v for k, v in step.items() if k != "op"}))
    return out


def _validate(cfg):
    """Check names against the registries; raise PipelineError naming the stage."""
    modalities = list(cfg["patterns"])
    try:
        pre = cfg["preprocess"] or {}
        chains = {m: _steps(pre.get(m, []), f"preprocess.{m}") for m in modalities}
        for m in pre:
            if m not in modalities:
                raise ConfigError(f"preprocess names unknown modality {m!r}")
        for m, chain in chains.items():
            for op, _ in chain:
                if op not in PREPROCESS_OPS:
                    raise ConfigError(f"unknown preprocessing op {op!r}")
    except ConfigError as exc:
        raise PipelineError("preprocess", exc) from exc
    try:
        descs = cfg["descriptors"]
        if not descs:
            raise ConfigError("at least one descriptor is required")
        for d in descs:
            if d.get("name") not in DESCRIPTORS:
                raise ConfigError(f"unknown descriptor {d.get('name')!r}")
            if d.get("modality") not in modalities:
                raise ConfigError(f"descriptor {d['name']} names unknown modality {d.get('modality')!r}")
    except (ConfigError, AttributeError) as exc:
        raise PipelineError("features", exc) from exc
    if cfg["selection"].get("method", "none") not in SELECTIONS:
        raise PipelineError("selection", ConfigError(f"unknown selection {cfg['selection'].get('method')!r}"))
    if cfg["classifier"].get("algo") not in CLASSIFIERS:
        raise PipelineError("train", ConfigError(f"unknown classifier {cfg['classifier'].get('algo')!r}"))
    return chains


# -- per-sample work ------------------------------------------------------------
def _crop(img, box):
    x, y, w, h = box
    out = img[y:y + h, x:x + w]
    if out.shape[0] < 1 or out.shape[1] < 1:
        raise InvalidArgument(f"crop box {box} lies outside the image")
    return out


def _process_sample(sample, chains, descriptors):
    """Returns one row of descriptor blocks, in descriptor order."""
    images = {}
    for m, chain in chains.items():
        img = load_image(sample.paths[m])
        if sample.crop is not None:
            img = _crop(img, sample.crop)
        for op, params in chain:
            img = PREPROCESS_OPS[op](img, **params)
        images[m] = img
    return [np.asarray(DESCRIPTORS[d["name"]](ensure_gray(images[d["modality"]]), **d.get("params", {})),
                       dtype=np.float64).ravel() for d in descriptors]


def extract_features(index: CorpusIndex, chains, descriptors, workers=1):
    """List of per-descriptor FeatureMatrix blocks (rows follow the index)."""
    def job(s):
        try:
            return _process_sample(s, chains, descriptors)
        except Exception as exc:
            log.error("sample %s/%s failed: %s", s.class_name, s.key, exc)
            raise

    with ThreadPoolExecutor(max_workers=workers) as pool:
        rows = list(pool.map(job, index.samples))  # map keeps input order
    blocks = []
    for b, d in enumerate(descriptors):
        lengths = {len(r[b]) for r in rows}
        if len(lengths) != 1:
            raise InvalidArgument(f"descriptor {d['name']} lengths differ across samples: {sorted(lengths)}; "
                                  "add a resize step")
        vals = np.vstack([r[b] for r in rows])
        names = [f"{d['name']}_{d['modality']}_{i}" for i in range(vals.shape[1])]
        blocks.append(FeatureMatrix(vals, None, names))
    return blocks


def select_blocks(blocks, y, k_folds=5, seed=0):
    """Lasso per block; blocks with an empty selection are dropped.

    Returns (kept blocks, summary per block)."""
    kept, summary = [], []
    for blk in blocks:
        fit = lasso_cv(blk.values, y, k_folds=k_folds, seed=seed)
        try:
            sel = apply_selection(blk, fit)
        except EmptySelection:
            summary.append({"block": blk.names[0].rsplit("_", 1)[0], "in": blk.n_cols, "kept": 0})
            continue
        summary.append({"block": blk.names[0].rsplit("_", 1)[0], "in": blk.n_cols, "kept": sel.n_cols})
        kept.append(sel)
    if not kept:
        raise EmptySelection("lasso kept no columns in any descriptor block")
    return kept, summary


def train_eval(fm: FeatureMatrix, n_classes, algo, params, test_fraction, seed):
    """Holdout split, train, evaluate.  Returns a dict with the artefacts."""
    ds = LabeledDataset(fm.values, fm.labels, n_classes)
    part = holdout_split(ds, test_fraction, seed)
    params = dict(params or {})
    if algo == "mlp":
        params.setdefault("seed", seed)
    model = train(ds.subset(part.train), algo, **params)
    test = ds.subset(part.test)
    proba = model.predict_proba(test.X)
    pred = model.predict(test.X)
    cm = confusion(test.y, pred, n_classes)
    return {"model": model, "partition": part, "confusion": cm,
            "roc": roc_one_vs_rest(proba, test.y, n_classes), "test_counts": test.class_counts()}


def evaluate_model(model_json: str, fm: FeatureMatrix, n_classes=None):
    model = model_from_json(model_json)
    C = n_classes or int(fm.labels.max())
    pred = model.predict(fm.values)
    return confusion(fm.labels, pred, C)


# -- orchestration ------------------------------------------------------------------
class _Stages:
    def __init__(self):
        self.timings = {}
        self.op_log = []

    def run(self, name, fn, *args, **kw):
        t0 = time.perf_counter()
        try:
            out = fn(*args, **kw)
        except PipelineError:
            raise
        except Exception as exc:
            raise PipelineError(name, exc) from exc
        self.timings[name] = round(time.perf_counter() - t0, 6)
        return out


def run_pipeline(cfg) -> dict:
    """Run the full pipeline described by ``cfg`` (see ``load_config``).

    Returns the report dict, also written as report.json.
    """
    if not isinstance(cfg, dict) or "input_dir" not in cfg:
        cfg = load_config(cfg)
    chains = _validate(cfg)
    st = _Stages()
    seed = int(cfg["seed"])
    out_dir = Path(cfg["output_dir"])
    out_dir.parent.mkdir(parents=True, exist_ok=True)
    stage_dir = Path(tempfile.mkdtemp(prefix=".fermkit-", dir=out_dir.parent))
    try:
        index = st.run("ingest", ingest, cfg["input_dir"], cfg["patterns"], cfg["crop_boxes"])
        st.op_log.append("ingest")
        for m, chain in chains.items():
            st.op_log.extend(f"preprocess:{m}:{op}" for op, _ in chain)
        descs = cfg["descriptors"]
        st.op_log.extend(f"features:{d['modality']}:{d['name']}" for d in descs)
        blocks = st.run("features", extract_features, index, chains, descs, cfg["workers"])
        y = np.asarray(index.labels, dtype=np.int64)

        sel_cfg = cfg["selection"]
        method = sel_cfg.get("method", "none")
        summary = [{"block": b.names[0].rsplit("_", 1)[0], "in": b.n_cols, "kept": b.n_cols} for b in blocks]
        if method == "lasso":
            st.op_log.append("selection:lasso")
            blocks, summary = st.run("selection", select_blocks, blocks, y,
                                     int(sel_cfg.get("k_folds", 5)), seed)
        fm = st.run("stack", lambda: stack_features(blocks).with_labels(y))
        st.op_log.append("stack")

        clf = cfg["classifier"]
        st.op_log.append(f"train:{clf['algo']}")
        res = st.run("train", train_eval, fm, index.n_classes, clf["algo"], clf.get("params", {}),
                     float(cfg["split"].get("test_fraction", 0.3)), seed)
        st.op_log.append("evaluate")

        def write():
            fm.to_csv(stage_dir / "features.csv")
            (stage_dir / "model.json").write_text(res["model"].to_json(), encoding="utf-8")
            (stage_dir / "confusion.csv").write_text(res["confusion"].to_csv(), encoding="utf-8", newline="")
            files = ["features.csv", "model.json", "confusion.csv"]
            for i, pts in enumerate(res["roc"], start=1):
                if pts is not None:
                    emit_curves(pts, stage_dir / f"roc_class_{i}.csv")
                    files.append(f"roc_class_{i}.csv")
            return files

        files = st.run("write", write)
        cm = res["confusion"]
        report = {
            "schema": REPORT_SCHEMA,
            "version": __version__,
            "n_samples": fm.n_rows,
            "n_features": fm.n_cols,
            "class_names": index.class_names,
            "n_train": int(res["partition"].train.size),
            "n_test": int(res["partition"].test.size),
            "test_counts": [int(v) for v in res["test_counts"]],
            "accuracy": cm.accuracy,
            "precision": [float(v) for v in cm.precision()],
            "recall": [float(v) for v in cm.recall()],
            "confusion": cm.counts.tolist(),
            "selection": summary,
            "substitutions": [{"op": op, "replacement": SUBSTITUTED_OPS[op]}
                              for op in sorted({op for c in chains.values() for op, _ in c} & set(SUBSTITUTED_OPS))],
            "op_log": st.op_log,
            "timings": st.timings,
            "config": cfg,
            "outputs": files + ["report.json"],
        }
        (stage_dir / "report.json").write_text(json.dumps(report, indent=1, default=str), encoding="utf-8")
        out_dir.mkdir(parents=True, exist_ok=True)
        for name in report["outputs"]:
            shutil.move(str(stage_dir / name), str(out_dir / name))
        return report
    finally:
        shutil.rmtree(stage_dir, ignore_errors=True)
