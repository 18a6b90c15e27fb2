"""LibSVM and CSV readers/writers.

LibSVM lines look like ``label idx:val idx:val ...`` with 1-based, strictly
ascending indices. CSV files hold numeric cells only; zeros are dropped when
rows are converted to sparse vectors.
"""
from __future__ import annotations

import csv
import io
import math
from pathlib import Path
from typing import Optional, TextIO, Union

import numpy as np

from ..core import BinaryLabel, ClassLabel, FeatureVector, LabeledExample
from ..errors import ParseError
from .dataset import Dataset, infer_labels


def _number(text, line, column=None):
    try:
        value = float(text)
    except ValueError:
        raise ParseError(f"not a number: {text!r}", line, column) from None
    if not math.isfinite(value):
        raise ParseError(f"non-finite value {text!r}", line, column)
    return value


def parse_libsvm(stream: TextIO, dim: Optional[int] = None, label_kind: str = "auto",
                 num_classes: Optional[int] = None, source: Optional[str] = None) -> Dataset:
    raw_labels, rows = [], []
    max_index = 0
    for lineno, line in enumerate(stream, start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        raw_labels.append(_number(tokens[0], lineno))
        idx, val = [], []
        for tok in tokens[1:]:
            name, sep, value = tok.partition(":")
            if not sep or not name.isdigit():
                raise ParseError(f"malformed feature {tok!r}", lineno)
            i = int(name)
            if i < 1:
                raise ParseError("feature indices are 1-based", lineno)
            if idx and i - 1 <= idx[-1]:
                raise ParseError("feature indices must be strictly ascending", lineno)
            idx.append(i - 1)
            val.append(_number(value, lineno))
        rows.append((idx, val))
        if idx:
            max_index = max(max_index, idx[-1] + 1)
    if dim is None:
        dim = max(max_index, 1)
    elif max_index > dim:
        raise ParseError(f"feature index {max_index} exceeds dim {dim}")
    labels, k = infer_labels(raw_labels, label_kind, num_classes)
    examples = tuple(LabeledExample(FeatureVector(dim, i, v), y) for (i, v), y in zip(rows, labels))
    return Dataset(examples, dim, k, {"source": source, "format": "libsvm"})


def _label_text(y) -> str:
    if isinstance(y, BinaryLabel):
        return str(y.y)
    if isinstance(y, ClassLabel):
        return str(y.k)
    return repr(float(y.y))


def write_libsvm(ds: Dataset, stream: TextIO) -> None:
    for ex in ds:
        feats = " ".join(f"{i + 1}:{v!r}" for i, v in zip(ex.x.indices.tolist(), ex.x.values.tolist()))
        stream.write(f"{_label_text(ex.y)} {feats}".rstrip() + "\n")


def dumps_libsvm(ds: Dataset) -> str:
    buf = io.StringIO()
    write_libsvm(ds, buf)
    return buf.getvalue()


def parse_csv(stream: TextIO, label_column: Union[int, str] = -1, has_header: bool = True,
              label_kind: str = "auto", num_classes: Optional[int] = None,
              source: Optional[str] = None) -> Dataset:
    reader = csv.reader(stream)
    header = None
    raw_labels, rows = [], []
    width = None
    label_at = None
    for lineno, cells in enumerate(reader, start=1):
        if not cells or all(not c.strip() for c in cells):
            continue
        if has_header and header is None:
            header = [c.strip() for c in cells]
            continue
        if width is None:
            width = len(cells)
            if isinstance(label_column, str):
                if header is None or label_column not in header:
                    raise ParseError(f"no column named {label_column!r}", lineno)
                label_at = header.index(label_column)
            else:
                label_at = label_column % width
        if len(cells) != width:
            raise ParseError(f"expected {width} cells, found {len(cells)}", lineno)
        values = [_number(c, lineno, col + 1) for col, c in enumerate(cells)]
        raw_labels.append(values.pop(label_at))
        rows.append(values)
    dim = max((width or 1) - 1, 1)
    labels, k = infer_labels(raw_labels, label_kind, num_classes)
    examples = tuple(LabeledExample(FeatureVector.from_dense(r), y) for r, y in zip(rows, labels))
    return Dataset(examples, dim, k, {"source": source, "format": "csv"})


def write_csv(ds: Dataset, stream: TextIO, header: bool = True) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    if header:
        writer.writerow([f"f{i + 1}" for i in range(ds.dim)] + ["y"])
    for ex in ds:
        row = [repr(v) for v in ex.x.to_dense().tolist()]
        writer.writerow(row + [_label_text(ex.y)])


def load_dataset(path, fmt: Optional[str] = None, **kwargs) -> Dataset:
    path = Path(path)
    fmt = fmt or ("csv" if path.suffix.lower() == ".csv" else "libsvm")
    with open(path) as fh:
        if fmt == "csv":
            return parse_csv(fh, source=str(path), **kwargs)
        return parse_libsvm(fh, source=str(path), **kwargs)


def save_dataset(ds: Dataset, path, fmt: Optional[str] = None) -> None:
    path = Path(path)
    fmt = fmt or ("csv" if path.suffix.lower() == ".csv" else "libsvm")
    with open(path, "w") as fh:
        (write_csv if fmt == "csv" else write_libsvm)(ds, fh)
