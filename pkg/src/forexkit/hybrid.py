"""Cooperative CART-then-MARS hybrid.

A regression tree is grown, pruned, and selected on the test sample; the
terminal-node information it assigns to each row is appended to the feature
matrix as either one-hot leaf indicators or the leaf prediction value; MARS
is then fitted on the augmented data.  The tree runs once and goes to the
background — prediction augments the incoming row with the stored tree and
encoding, then delegates to the MARS model.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import cart, mars
from .data import Dataset

ENCODINGS = ("one_hot_leaf", "leaf_prediction")


@dataclass(frozen=True)
class HybridModel:
    cart: cart.CartTree
    mars: mars.MarsModel
    encoding: str
    augmented_names: tuple

    def __post_init__(self):
        if self.encoding not in ENCODINGS:
            raise ValueError(f"encoding must be one of {ENCODINGS}")
        object.__setattr__(self, "augmented_names", tuple(self.augmented_names))


def _augment_features(X: np.ndarray, tree: cart.CartTree, encoding: str) -> np.ndarray:
    if encoding == "one_hot_leaf":
        ids = cart.node_id(tree, X)
        extra = np.zeros((X.shape[0], tree.n_leaves))
        extra[np.arange(X.shape[0]), ids] = 1.0
    elif encoding == "leaf_prediction":
        extra = np.asarray(cart.predict(tree, X), dtype=float)[:, None]
    else:
        raise ValueError(f"encoding must be one of {ENCODINGS}")
    return np.concatenate([X, extra], axis=1)


def _augmented_names(names, tree: cart.CartTree, encoding: str) -> tuple:
    if encoding == "one_hot_leaf":
        return tuple(names) + tuple(f"leaf_{k}" for k in range(tree.n_leaves))
    return tuple(names) + ("leaf_prediction",)


def augment(ds: Dataset, tree: cart.CartTree, encoding: str = "one_hot_leaf") -> Dataset:
    """Append the tree's node information as extra feature columns; row
    order, targets, and provenance are preserved bit-exactly."""
    if ds.n_features != tree.n_features:
        raise ValueError(f"dataset has {ds.n_features} features, tree expects "
                         f"{tree.n_features}")
    return Dataset(feature_names=_augmented_names(ds.feature_names, tree, encoding),
                   features=_augment_features(ds.features, tree, encoding),
                   targets=ds.targets,
                   provenance=ds.provenance)


def fit_hybrid(train: Dataset, test: Dataset,
               cart_cfg: cart.CartConfig = cart.CartConfig(),
               mars_cfg: mars.MarsConfig = mars.MarsConfig(),
               encoding: str = "one_hot_leaf") -> HybridModel:
    """Tree selection by minimum test cost, then MARS on augmented features."""
    if train.n_rows == 0:
        raise ValueError("training set is empty")
    seq = cart.prune_sequence(cart.grow(train, cart_cfg), train)
    tree = cart.select_min_cost(seq, test)
    augmented = augment(train, tree, encoding)
    model = mars.fit(augmented, mars_cfg)
    return HybridModel(tree, model, encoding, augmented.feature_names)


def predict(h: HybridModel, x):
    """Equal to MARS prediction on the augmented feature vector."""
    x = np.asarray(x, dtype=float)
    if x.shape[-1] != h.cart.n_features:
        raise ValueError(f"expected {h.cart.n_features} features, got {x.shape[-1]}")
    single = x.ndim == 1
    X = x[None, :] if single else x
    out = mars.predict(h.mars, _augment_features(X, h.cart, h.encoding))
    return float(out[0]) if single else out


# --- composite serialization ----------------------------------------------------


def dump_hybrid(h: HybridModel) -> str:
    return ("hybrid-cart-mars v1\n"
            f"encoding {h.encoding}\n"
            f"augmented_names {' '.join(h.augmented_names)}\n"
            "[tree]\n" + cart.dump_tree(h.cart) +
            "[mars]\n" + mars.dump_model(h.mars))


def load_hybrid(text: str) -> HybridModel:
    lines = text.splitlines()
    if not lines or lines[0] != "hybrid-cart-mars v1":
        raise ValueError("not a hybrid-cart-mars v1 dump")
    if not lines[1].startswith("encoding "):
        raise ValueError("missing encoding line")
    encoding = lines[1].split()[1]
    if not lines[2].startswith("augmented_names"):
        raise ValueError("missing augmented_names line")
    names = tuple(lines[2].split()[1:])
    try:
        tree_at = lines.index("[tree]")
        mars_at = lines.index("[mars]")
    except ValueError as exc:
        raise ValueError("missing [tree]/[mars] section") from exc
    tree = cart.load_tree("\n".join(lines[tree_at + 1:mars_at]))
    model = mars.load_model("\n".join(lines[mars_at + 1:]))
    return HybridModel(tree, model, encoding, names)
