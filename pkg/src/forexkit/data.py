"""Monthly rate series, supervised dataset construction, splitting, scaling, metrics.

The pipeline is: ``load_csv`` -> ``build_supervised`` -> ``split`` ->
``fit_scaler``/``apply_scaler`` -> model training -> ``rmse``.  All types are
frozen dataclasses wrapping read-only numpy arrays, so they are safe to share
across workers; every operation is a pure function of its inputs plus an
explicit seed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

RECIPES = ("mp1", "mp5")


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.flags.writeable = False
    return a


@dataclass(frozen=True)
class RateSeries:
    """A named, contiguous monthly rate series starting at a given year-month."""

    currency_code: str
    start_year: int
    start_month: int
    values: np.ndarray

    def __post_init__(self):
        vals = _readonly(np.asarray(self.values, dtype=float))
        object.__setattr__(self, "values", vals)
        if vals.ndim != 1 or vals.size == 0:
            raise ValueError("rate series must be a non-empty 1-d sequence")
        if not np.all(np.isfinite(vals)) or np.any(vals <= 0.0):
            raise ValueError(
                f"rates for {self.currency_code!r} must be finite and strictly positive")
        if not 1 <= self.start_month <= 12:
            raise ValueError(f"start_month must be in 1..12, got {self.start_month}")

    def __len__(self) -> int:
        return self.values.size


@dataclass(frozen=True)
class Dataset:
    """Supervised regression table: feature matrix, target column, names.

    ``provenance``, when present, holds one original month index per row
    (0-based index of the month the row's features were drawn from); the
    row's target is the raw series value at ``provenance + 1``.
    """

    feature_names: tuple
    features: np.ndarray
    targets: np.ndarray
    provenance: np.ndarray | None = None

    def __post_init__(self):
        X = _readonly(np.atleast_2d(np.asarray(self.features, dtype=float)))
        y = _readonly(np.asarray(self.targets, dtype=float))
        object.__setattr__(self, "feature_names", tuple(self.feature_names))
        object.__setattr__(self, "features", X)
        object.__setattr__(self, "targets", y)
        if X.shape[1] != len(self.feature_names):
            raise ValueError(
                f"{X.shape[1]} feature columns but {len(self.feature_names)} names")
        if y.ndim != 1 or y.size != X.shape[0]:
            raise ValueError("targets must be 1-d with one entry per row")
        if self.provenance is not None:
            prov = _readonly(np.asarray(self.provenance, dtype=int))
            object.__setattr__(self, "provenance", prov)
            if prov.shape != (X.shape[0],):
                raise ValueError("provenance must have one entry per row")

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    def take(self, idx: np.ndarray) -> "Dataset":
        """Row subset preserving the order of ``idx``."""
        prov = None if self.provenance is None else self.provenance[idx]
        return Dataset(self.feature_names, self.features[idx], self.targets[idx], prov)


@dataclass(frozen=True)
class FeatureSpec:
    """Names the currency to forecast and the feature recipe.

    Recipes: ``mp1`` = (month index, previous rate of the target currency);
    ``mp5`` = (month index, previous rates of every currency in the file).
    The month feature is the sequential index 1..L, not the calendar month,
    so that time acts as a trend axis.
    """

    target: str
    recipe: str = "mp1"

    def __post_init__(self):
        if self.recipe not in RECIPES:
            raise ValueError(f"unknown recipe {self.recipe!r}; choose from {RECIPES}")


def load_csv(path) -> dict:
    """Load a monthly rates CSV into one RateSeries per currency column.

    Schema: header ``date,<code1>,...,<codeN>``; one row per month with
    ``date`` in ``YYYY-MM`` form; months must be consecutive.  Returns a dict
    keyed by currency code, in file column order.
    """
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"empty file: {path}") from None
        header = [h.strip() for h in header]
        if not header or header[0] != "date":
            raise ValueError(f"first column must be 'date', got {header[:1]}")
        codes = header[1:]
        if not codes:
            raise ValueError("no rate columns in header")

        months = []
        columns = [[] for _ in codes]
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(header):
                raise ValueError(f"row {lineno}: expected {len(header)} fields, got {len(row)}")
            months.append(_parse_month(row[0].strip(), lineno))
            for j, cell in enumerate(row[1:]):
                try:
                    columns[j].append(float(cell))
                except ValueError:
                    raise ValueError(
                        f"row {lineno}: non-numeric rate {cell!r} for {codes[j]}") from None

    if not months:
        raise ValueError(f"empty file: {path}")
    for i in range(1, len(months)):
        if months[i] != months[i - 1] + 1:
            raise ValueError(
                f"non-consecutive months at row {i + 2}: "
                f"{_month_str(months[i - 1])} then {_month_str(months[i])}")

    year, month = divmod(months[0], 12)
    return {
        code: RateSeries(code, year, month + 1, np.array(col))
        for code, col in zip(codes, columns)
    }


def _parse_month(text: str, lineno: int) -> int:
    parts = text.split("-")
    if len(parts) != 2 or not (parts[0].isdigit() and parts[1].isdigit()):
        raise ValueError(f"row {lineno}: date {text!r} is not YYYY-MM")
    year, month = int(parts[0]), int(parts[1])
    if not 1 <= month <= 12:
        raise ValueError(f"row {lineno}: month {month} out of range in {text!r}")
    return year * 12 + (month - 1)


def _month_str(index: int) -> str:
    year, month = divmod(index, 12)
    return f"{year:04d}-{month + 1:02d}"


def build_supervised(series_map: dict, spec: FeatureSpec) -> Dataset:
    """One-step-ahead supervised table: features at month t, target at t+1.

    Row t (t = 1..L-1, 1-based months) carries the month index t plus the
    configured previous-month rates; the target is the spec's currency at
    month t+1, giving L-1 rows from an L-month series.
    """
    if spec.target not in series_map:
        raise ValueError(f"unknown currency {spec.target!r}; have {sorted(series_map)}")
    lengths = {len(s) for s in series_map.values()}
    if len(lengths) != 1:
        raise ValueError(f"series lengths differ: {sorted(lengths)}")
    L = lengths.pop()
    if L < 2:
        raise ValueError("need at least 2 months to build a one-step-ahead dataset")

    target_vals = series_map[spec.target].values
    month_idx = np.arange(1, L, dtype=float)
    if spec.recipe == "mp1":
        names = ("month", f"prev_{spec.target}")
        cols = [month_idx, target_vals[:-1]]
    else:  # mp5
        names = ("month",) + tuple(f"prev_{c}" for c in series_map)
        cols = [month_idx] + [s.values[:-1] for s in series_map.values()]
    X = np.column_stack(cols)
    y = target_vals[1:]
    return Dataset(names, X, y, provenance=np.arange(L - 1))


def split(ds: Dataset, train_fraction: float, seed: int):
    """Reproducible random partition into (train, test).

    A seeded uniform permutation is prefix-split at round(fraction * N);
    each side keeps its rows in original dataset order.
    """
    if not 0.0 < train_fraction < 1.0:
        raise ValueError(f"train_fraction must be in (0, 1), got {train_fraction}")
    if ds.n_rows == 0:
        raise ValueError("cannot split an empty dataset")
    n_train = int(round(train_fraction * ds.n_rows))
    perm = np.random.default_rng(seed).permutation(ds.n_rows)
    train_idx = np.sort(perm[:n_train])
    test_idx = np.sort(perm[n_train:])
    return ds.take(train_idx), ds.take(test_idx)


@dataclass(frozen=True)
class ScalerParams:
    """Per-column min/max fitted on training data; min-max affine to [0, 1].

    Columns with max == min are passed through unscaled.  Test values may
    land outside [0, 1]; no clipping is applied.
    """

    feature_min: np.ndarray
    feature_max: np.ndarray
    target_min: float
    target_max: float
    scale_target: bool = True

    def __post_init__(self):
        object.__setattr__(self, "feature_min", _readonly(np.asarray(self.feature_min, float)))
        object.__setattr__(self, "feature_max", _readonly(np.asarray(self.feature_max, float)))
        if np.any(self.feature_max < self.feature_min):
            raise ValueError("feature_max must be >= feature_min per column")


def fit_scaler(train: Dataset, scale_target: bool = True) -> ScalerParams:
    if train.n_rows == 0:
        raise ValueError("cannot fit a scaler on an empty dataset")
    return ScalerParams(
        feature_min=train.features.min(axis=0),
        feature_max=train.features.max(axis=0),
        target_min=float(train.targets.min()),
        target_max=float(train.targets.max()),
        scale_target=scale_target,
    )


def _scale_cols(X: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    span = hi - lo
    live = span > 0
    out = X.astype(float).copy()
    out[:, live] = (X[:, live] - lo[live]) / span[live]
    return out


def scale_features(X: np.ndarray, p: ScalerParams) -> np.ndarray:
    return _scale_cols(np.atleast_2d(np.asarray(X, float)), p.feature_min, p.feature_max)


def scale_target(y: np.ndarray, p: ScalerParams) -> np.ndarray:
    y = np.asarray(y, float)
    if not p.scale_target or p.target_max <= p.target_min:
        return y.copy()
    return (y - p.target_min) / (p.target_max - p.target_min)


def unscale_target(y: np.ndarray, p: ScalerParams) -> np.ndarray:
    y = np.asarray(y, float)
    if not p.scale_target or p.target_max <= p.target_min:
        return y.copy()
    return y * (p.target_max - p.target_min) + p.target_min


def apply_scaler(ds: Dataset, p: ScalerParams) -> Dataset:
    return Dataset(ds.feature_names, scale_features(ds.features, p),
                   scale_target(ds.targets, p), ds.provenance)


def invert_scaler(ds: Dataset, p: ScalerParams) -> Dataset:
    """Inverse of ``apply_scaler`` for non-degenerate columns."""
    span = p.feature_max - p.feature_min
    live = span > 0
    X = ds.features.copy()
    X[:, live] = X[:, live] * span[live] + p.feature_min[live]
    return Dataset(ds.feature_names, X, unscale_target(ds.targets, p), ds.provenance)


def rmse(predicted, actual) -> float:
    """Root mean squared error between two equal-length sequences."""
    pred = np.asarray(predicted, dtype=float)
    act = np.asarray(actual, dtype=float)
    if pred.shape != act.shape or pred.ndim != 1:
        raise ValueError(f"length mismatch: {pred.shape} vs {act.shape}")
    if pred.size == 0:
        raise ValueError("rmse of empty sequences is undefined")
    return float(np.sqrt(np.mean((pred - act) ** 2)))
