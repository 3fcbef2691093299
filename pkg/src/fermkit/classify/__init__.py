from .dataset import LabeledDataset, Partition, holdout_split, kfold_split, make_blobs
from .metrics import ConfusionMatrix, accuracy, auc, confusion, loss_01, roc_one_vs_rest, roc_points
from .mlp import MlpModel, TrainHistory, loss_and_grad, mlp_train, numeric_grad
from .models import CartModel, GnbModel, KnnModel, LdaModel, model_from_json, train

__all__ = [
    "CartModel", "ConfusionMatrix", "GnbModel", "KnnModel", "LabeledDataset", "LdaModel", "MlpModel",
    "Partition", "TrainHistory", "accuracy", "auc", "confusion", "holdout_split", "kfold_split",
    "loss_01", "loss_and_grad", "make_blobs", "mlp_train", "model_from_json", "numeric_grad", "roc_one_vs_rest",
    "roc_points", "train",
]
