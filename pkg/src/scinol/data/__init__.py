"""Datasets: the synthetic toy problem, file formats, splits and rescaling."""
from .dataset import (Dataset, ScalingTransform, apply_scaling, as_binary, as_classes,
                      dataset_stats, infer_labels, shuffle_split)
from .formats import (dumps_libsvm, load_dataset, parse_csv, parse_libsvm, save_dataset,
                      write_csv, write_libsvm)
from .toy import ToySpec, gen_toy, gen_toy_arrays, write_toy

__all__ = [
    "Dataset", "ScalingTransform", "ToySpec", "apply_scaling", "as_binary", "as_classes",
    "dataset_stats", "dumps_libsvm", "gen_toy", "gen_toy_arrays", "infer_labels",
    "load_dataset", "parse_csv", "parse_libsvm", "save_dataset", "shuffle_split", "write_csv",
    "write_libsvm", "write_toy",
]
