"""Command-line entry point.

Exit codes: 0 success, 2 configuration error, 3 data error,
4 numeric or convergence error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from .. import __version__
from ..classify import LabeledDataset
from ..errors import (ConfigError, ConvergenceError, EmptySelection, FermkitError, PipelineError)
from ..features import FeatureMatrix, stack_features
from ..imgcore import ensure_gray, load_image, save_image
from ..iqa import assess
from ..metaopt import beh_segment, ngn_segment, vao_select, wdoa_enhance
from .corpus import ingest
from .curves import emit_curves
from .pipeline import (_steps, evaluate_model, extract_features, load_config, run_pipeline, select_blocks,
                       train_eval)
from .synthetic import make_corpus

EXIT_OK, EXIT_CONFIG, EXIT_DATA, EXIT_NUMERIC = 0, 2, 3, 4

log = logging.getLogger("fermkit")


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, PipelineError):
        return exit_code_for(exc.cause)
    if isinstance(exc, (ConfigError, json.JSONDecodeError)):
        return EXIT_CONFIG
    if isinstance(exc, (ConvergenceError, EmptySelection, FloatingPointError, np.linalg.LinAlgError)):
        return EXIT_NUMERIC
    return EXIT_DATA


def _json_arg(path) -> dict:
    if path is None:
        return {}
    try:
        doc = json.loads(Path(path).read_text(encoding="utf-8"))
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return doc


def _out_dir(args, default="."):
    out = Path(args.out or default)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _params(args, keys):
    """Config params for a tool command, with flags (when given) on top."""
    p = _json_arg(args.config)
    for k in keys:
        v = getattr(args, k, None)
        if v is not None:
            p[k] = v
    return p


def _dataset(fm: FeatureMatrix) -> LabeledDataset:
    if fm.labels is None:
        raise ConfigError("feature CSV needs a final 'label' column")
    return LabeledDataset(fm.values, fm.labels)


def _blocks_by_prefix(fm: FeatureMatrix):
    groups = {}
    for j, name in enumerate(fm.names or [f"f{i}" for i in range(fm.n_cols)]):
        groups.setdefault(name.rsplit("_", 1)[0], []).append(j)
    return [fm.take_columns(idx) for idx in groups.values()]


# -- subcommands ----------------------------------------------------------------
def cmd_ingest(args):
    cfg = _json_arg(args.config)
    index = ingest(args.input or cfg.get("input_dir"), cfg.get("patterns"), cfg.get("crop_boxes"))
    text = index.to_json()
    if args.out:
        (_out_dir(args) / "index.json").write_text(text, encoding="utf-8")
    else:
        print(text)
    log.info("%d samples in %d classes", len(index.samples), index.n_classes)


def cmd_extract(args):
    cfg = load_config(args.config, seed=args.seed, output_dir=args.out or ".", input_dir=args.input)
    pre = cfg["preprocess"] or {}
    chains = {m: _steps(pre.get(m, []), m) for m in cfg["patterns"]}
    index = ingest(cfg["input_dir"], cfg["patterns"], cfg["crop_boxes"])
    blocks = extract_features(index, chains, cfg["descriptors"], cfg["workers"])
    fm = stack_features(blocks).with_labels(index.labels)
    fm.to_csv(_out_dir(args) / "features.csv")
    log.info("wrote %d x %d features", fm.n_rows, fm.n_cols)


def cmd_select(args):
    fm = FeatureMatrix.from_csv(args.features)
    p = _params(args, ["k_folds"])
    seed = args.seed if args.seed is not None else int(p.get("seed", 0))
    blocks, summary = select_blocks(_blocks_by_prefix(fm), fm.labels, int(p.get("k_folds", 5)), seed)
    out = _out_dir(args)
    stack_features(blocks).with_labels(fm.labels).to_csv(out / "selected.csv")
    (out / "selection.json").write_text(json.dumps(summary, indent=1), encoding="utf-8")


def cmd_train(args):
    fm = FeatureMatrix.from_csv(args.features)
    p = _params(args, ["algo", "test_fraction"])
    ds = _dataset(fm)
    seed = args.seed if args.seed is not None else int(p.get("seed", 0))
    res = train_eval(fm, ds.n_classes, p.get("algo", "knn"), p.get("params", {}),
                     float(p.get("test_fraction", 0.3)), seed)
    out = _out_dir(args)
    (out / "model.json").write_text(res["model"].to_json(), encoding="utf-8")
    split = {"train": res["partition"].train.tolist(), "test": res["partition"].test.tolist()}
    (out / "split.json").write_text(json.dumps(split), encoding="utf-8")
    print(json.dumps({"accuracy": res["confusion"].accuracy}))


def cmd_eval(args):
    fm = FeatureMatrix.from_csv(args.features)
    _dataset(fm)
    if args.split:
        idx = np.asarray(json.loads(Path(args.split).read_text(encoding="utf-8"))["test"], dtype=np.intp)
        n_classes = int(fm.labels.max())
        fm = FeatureMatrix(fm.values[idx], fm.labels[idx], fm.names)
    else:
        n_classes = None
    cm = evaluate_model(Path(args.model).read_text(encoding="utf-8"), fm, n_classes)
    out = _out_dir(args)
    (out / "confusion.csv").write_text(cm.to_csv(), encoding="utf-8", newline="")
    metrics = {"accuracy": cm.accuracy, "precision": cm.precision().tolist(), "recall": cm.recall().tolist()}
    print(json.dumps(metrics))


def cmd_pipeline(args):
    cfg = load_config(args.config, seed=args.seed, output_dir=args.out, input_dir=args.input)
    if args.workers is not None:
        cfg["workers"] = args.workers
    report = run_pipeline(cfg)
    print(json.dumps({"accuracy": report["accuracy"], "outputs": report["outputs"]}))


def cmd_enhance_wdoa(args):
    p = _params(args, ["k", "max_it", "n_pop"])
    img = load_image(args.image)
    out_img, hist = wdoa_enhance(img, seed=args.seed or 0, **p)
    out = _out_dir(args)
    save_image(out_img, out / "enhanced.png")
    if len(hist):
        emit_curves(hist, out / "history.csv", kind="history")


def cmd_segment_beh(args):
    p = _params(args, ["k", "max_it", "n_pop"])
    quant, labels, hist = beh_segment(load_image(args.image), seed=args.seed or 0, **p)
    out = _out_dir(args)
    save_image(quant, out / "quantized.png")
    np.savetxt(out / "labels.csv", labels, fmt="%d", delimiter=",")
    emit_curves(hist, out / "history.csv", kind="history")


def cmd_segment_ngn(args):
    p = _params(args, ["N"])
    N = int(p.pop("N", 8))
    labels, quant = ngn_segment(ensure_gray(load_image(args.image)), N=N, params=p, seed=args.seed or 0)
    out = _out_dir(args)
    save_image(quant, out / "quantized.png")
    np.savetxt(out / "labels.csv", labels, fmt="%d", delimiter=",")


def cmd_select_vao(args):
    fm = FeatureMatrix.from_csv(args.features)
    p = _params(args, ["max_it", "n_pop"])
    sel, hist = vao_select(_dataset(fm), args.nf, p, seed=args.seed or 0)
    out = _out_dir(args)
    (out / "vao.json").write_text(json.dumps({"selected": sel}), encoding="utf-8")
    emit_curves(hist, out / "history.csv", kind="history")
    print(json.dumps({"selected": sel}))


def cmd_iqa(args):
    # the metrics are defined on gray images; color inputs are converted
    rep = assess(ensure_gray(load_image(args.reference)), ensure_gray(load_image(args.distorted)))
    print(json.dumps({"mse": rep.mse, "psnr": rep.psnr, "ssim": rep.ssim}))


def cmd_make_corpus(args):
    root = make_corpus(args.out or "corpus", per_class=args.per_class, size=args.size,
                       seed=args.seed if args.seed is not None else 0)
    log.info("corpus written to %s", root)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON config file")
    common.add_argument("--seed", type=int, help="RNG seed (overrides config)")
    common.add_argument("--out", help="output directory")
    common.add_argument("--verbose", "-v", action="store_true")

    ap = argparse.ArgumentParser(prog="fermkit", description="Facial-expression image analysis toolkit.")
    ap.add_argument("--version", action="version", version=f"fermkit {__version__}")
    sub = ap.add_subparsers(dest="command", required=True)

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_)
        p.set_defaults(func=fn)
        return p

    add("ingest", cmd_ingest, "index a folder-labeled corpus").add_argument("--input")
    add("extract", cmd_extract, "preprocess and extract descriptors").add_argument("--input")
    p = add("select", cmd_select, "lasso selection per descriptor block")
    p.add_argument("features")
    p.add_argument("--k-folds", dest="k_folds", type=int)
    p = add("train", cmd_train, "holdout split and train a classifier")
    p.add_argument("features")
    p.add_argument("--algo", choices=["knn", "gnb", "cart", "lda", "mlp"])
    p.add_argument("--test-fraction", dest="test_fraction", type=float)
    p = add("eval", cmd_eval, "evaluate a saved model")
    p.add_argument("model")
    p.add_argument("features")
    p.add_argument("--split", help="split.json written by train (evaluates its test rows)")
    p = add("pipeline", cmd_pipeline, "run the full batch pipeline")
    p.add_argument("--input")
    p.add_argument("--workers", type=int)
    for name, fn, what in (("enhance-wdoa", cmd_enhance_wdoa, "WDOA contrast enhancement"),
                           ("segment-beh", cmd_segment_beh, "BEH color quantization")):
        p = add(name, fn, what)
        p.add_argument("image")
        p.add_argument("--k", type=int)
        p.add_argument("--max-it", dest="max_it", type=int)
        p.add_argument("--n-pop", dest="n_pop", type=int)
    p = add("segment-ngn", cmd_segment_ngn, "neural gas segmentation")
    p.add_argument("image")
    p.add_argument("--N", dest="N", type=int)
    p = add("select-vao", cmd_select_vao, "VAO wrapper feature selection")
    p.add_argument("features")
    p.add_argument("--nf", type=int, required=True)
    p.add_argument("--max-it", dest="max_it", type=int)
    p.add_argument("--n-pop", dest="n_pop", type=int)
    p = add("iqa", cmd_iqa, "full-reference quality metrics")
    p.add_argument("reference")
    p.add_argument("distorted")
    p = add("make-corpus", cmd_make_corpus, "write the synthetic color+depth corpus")
    p.add_argument("--per-class", dest="per_class", type=int, default=20)
    p.add_argument("--size", type=int, default=64)
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    args = ap.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        args.func(args)
    except (FermkitError, OSError, ValueError, ArithmeticError, np.linalg.LinAlgError) as exc:
        code = exit_code_for(exc)
        print(f"fermkit {args.command}: {exc}", file=sys.stderr)
        return code
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
