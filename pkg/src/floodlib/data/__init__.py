"""Dataset construction, ingestion and corruption."""

from .csvio import export_csv, load_csv
from .dataset import Dataset, Task, concat, split, stratified_order
from .noise import add_skew_noise, flip_labels, skew_normal_noise
from .toy import ToyGaussianPair, gen_toy_gaussian, gen_toy_gaussian_test, gen_toy_regression

__all__ = [
    "Dataset",
    "Task",
    "ToyGaussianPair",
    "add_skew_noise",
    "concat",
    "export_csv",
    "flip_labels",
    "gen_toy_gaussian",
    "gen_toy_gaussian_test",
    "gen_toy_regression",
    "load_csv",
    "skew_normal_noise",
    "split",
    "stratified_order",
]
