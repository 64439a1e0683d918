"""Self-contained predictor files: engine dump + feature pipeline metadata.

A fitted engine alone cannot forecast from a rates CSV — it needs to know
which currency it models, which feature recipe built its inputs, and the
min-max scaler fitted on its training sample.  ``save_predictor`` wraps all
of that with the engine's own plain-text dump under a ``forexkit-predictor
v1`` header; ``load_predictor`` restores it and ``predict_rates`` runs the
whole pipeline on a fresh rates file, returning forecasts in rate units.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import anfis, cart, hybrid, mars, scg
from .data import (FeatureSpec, ScalerParams, build_supervised,
                   scale_features, unscale_target)

_DUMPERS = {
    "mars": mars.dump_model,
    "cart": cart.dump_tree,
    "hybrid": hybrid.dump_hybrid,
    "mlp": scg.dump_network,
    "anfis": anfis.dump_model,
}
_LOADERS = {
    "mars": mars.load_model,
    "cart": cart.load_tree,
    "hybrid": hybrid.load_hybrid,
    "mlp": scg.load_network,
    "anfis": anfis.load_model,
}


@dataclass(frozen=True)
class Predictor:
    model_kind: str
    currency: str
    recipe: str
    scaler: ScalerParams
    engine: object

    def __post_init__(self):
        if self.model_kind not in _DUMPERS:
            raise ValueError(f"unknown model kind {self.model_kind!r}")


def predict_scaled(p: Predictor, X: np.ndarray) -> np.ndarray:
    """Engine predictions on already-scaled feature rows."""
    if p.model_kind == "mars":
        return np.asarray(mars.predict(p.engine, X), dtype=float)
    if p.model_kind == "cart":
        return np.asarray(cart.predict(p.engine, X), dtype=float)
    if p.model_kind == "hybrid":
        return np.asarray(hybrid.predict(p.engine, X), dtype=float)
    if p.model_kind == "mlp":
        return np.asarray(scg.forward(p.engine, X), dtype=float)
    return np.asarray(anfis.predict(p.engine, X), dtype=float)


def predict_rates(p: Predictor, series_map: dict):
    """One-step-ahead forecasts for every supervised row of a rates file.

    Returns (forecast month indices, predictions in original rate units);
    month indices are 0-based positions in the input series of the month
    being forecast.
    """
    ds = build_supervised(series_map, FeatureSpec(p.currency, p.recipe))
    scaled = scale_features(ds.features, p.scaler)
    preds = unscale_target(predict_scaled(p, scaled), p.scaler)
    return ds.provenance + 1, preds


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def save_predictor(p: Predictor) -> str:
    scaler = p.scaler
    lines = [
        "forexkit-predictor v1",
        f"model {p.model_kind}",
        f"currency {p.currency}",
        f"recipe {p.recipe}",
        "feature_min " + " ".join(_fmt(v) for v in scaler.feature_min),
        "feature_max " + " ".join(_fmt(v) for v in scaler.feature_max),
        f"target_min {_fmt(scaler.target_min)}",
        f"target_max {_fmt(scaler.target_max)}",
        f"scale_target {int(scaler.scale_target)}",
        "[model]",
    ]
    return "\n".join(lines) + "\n" + _DUMPERS[p.model_kind](p.engine)


def load_predictor(text: str) -> Predictor:
    lines = text.splitlines()
    if not lines or lines[0] != "forexkit-predictor v1":
        raise ValueError("not a forexkit-predictor v1 file")
    header: dict = {}
    body_at = None
    for i, line in enumerate(lines[1:], start=1):
        if line == "[model]":
            body_at = i + 1
            break
        key, _, value = line.partition(" ")
        header[key] = value
    if body_at is None:
        raise ValueError("missing [model] section")
    for key in ("model", "currency", "recipe", "feature_min", "feature_max",
                "target_min", "target_max", "scale_target"):
        if key not in header:
            raise ValueError(f"missing {key} in predictor header")
    if header["model"] not in _LOADERS:
        raise ValueError(f"unknown model kind {header['model']!r}")
    scaler = ScalerParams(
        feature_min=np.array([float(t) for t in header["feature_min"].split()]),
        feature_max=np.array([float(t) for t in header["feature_max"].split()]),
        target_min=float(header["target_min"]),
        target_max=float(header["target_max"]),
        scale_target=bool(int(header["scale_target"])),
    )
    engine = _LOADERS[header["model"]]("\n".join(lines[body_at:]))
    return Predictor(header["model"], header["currency"], header["recipe"],
                     scaler, engine)
