"""Multivariate adaptive regression splines: paired hinge bases, knot search,
least-squares refits, backward pruning.

Forward stage: starting from the constant model, repeatedly add the
primary/mirror hinge pair (optionally multiplied into an existing basis when
interactions are enabled) that most reduces training MSE, refitting every
coefficient by least squares after each addition.  The result deliberately
overfits.  Backward stage: greedy elimination of the basis whose removal
least degrades the criterion (GCV or holdout MSE), returning the best-scoring
subset visited.

Knot candidates are every observed training value of a variable.  Ties in
the forward search resolve to the lowest parent index, then lowest variable
index, then smallest knot; near-ties within 1e-10 relative gain count as
ties so float noise cannot flip the deterministic choice.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .data import Dataset

_TIE_REL = 1e-10        # forward-search gains closer than this are tied
_DEP_TOL = 1e-10        # column treated as linearly dependent below this
_STOP_REL = 1e-12       # relative MSE reduction below this stops the forward pass

POSITIVE = "positive"
NEGATIVE = "negative"


def eval_hinge(x, knot: float, direction: str):
    """Hockey-stick map: max(0, x - knot) or its mirror max(0, knot - x)."""
    x = np.asarray(x, dtype=float)
    if direction == POSITIVE:
        out = np.maximum(0.0, x - knot)
    elif direction == NEGATIVE:
        out = np.maximum(0.0, knot - x)
    else:
        raise ValueError(f"direction must be {POSITIVE!r} or {NEGATIVE!r}")
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Hinge:
    var: int
    knot: float
    direction: str


@dataclass(frozen=True)
class HingeBasis:
    """Product of hinge factors; the empty product is the constant basis."""

    factors: tuple = ()

    def __post_init__(self):
        seen = [f.var for f in self.factors]
        if len(set(seen)) != len(seen):
            raise ValueError("a basis may use each variable at most once")

    @property
    def degree(self) -> int:
        return len(self.factors)

    def uses(self, var: int) -> bool:
        return any(f.var == var for f in self.factors)

    def column(self, X: np.ndarray) -> np.ndarray:
        out = np.ones(X.shape[0])
        for f in self.factors:
            out = out * eval_hinge(X[:, f.var], f.knot, f.direction)
        return out


@dataclass(frozen=True)
class MarsConfig:
    """Knobs for the forward/backward fit.

    ``max_basis_functions`` caps the non-constant bases; a forward step needs
    room for a full pair, so odd caps leave one slot unused.  ``pruning`` is
    "gcv" (penalty ``gcv_penalty`` per non-constant basis) or "holdout".
    """

    max_basis_functions: int = 30
    max_interaction: int = 1
    pruning: str = "gcv"
    gcv_penalty: float = 3.0
    knot_candidates: str = "all_observed"

    def __post_init__(self):
        if self.max_basis_functions < 1:
            raise ValueError("max_basis_functions must be >= 1")
        if self.max_interaction < 1:
            raise ValueError("max_interaction must be >= 1")
        if self.pruning not in ("gcv", "holdout"):
            raise ValueError(f"pruning must be 'gcv' or 'holdout', got {self.pruning!r}")
        if self.knot_candidates != "all_observed":
            raise ValueError("only knot_candidates='all_observed' is supported")


@dataclass(frozen=True)
class MarsModel:
    bases: tuple                 # HingeBasis, index 0 is the constant term
    coefficients: np.ndarray
    n_features: int
    training_mse: float
    forward_trace: tuple = ()    # training MSE after each accepted forward step
    pruning_trace: tuple = ()    # (subset size, score) per visited subset

    def __post_init__(self):
        coef = np.asarray(self.coefficients, dtype=float)
        object.__setattr__(self, "coefficients", coef)
        object.__setattr__(self, "bases", tuple(self.bases))
        if coef.shape != (len(self.bases),):
            raise ValueError("one coefficient per retained basis required")

    def design_matrix(self, X: np.ndarray) -> np.ndarray:
        return np.column_stack([b.column(X) for b in self.bases])


def predict(model: MarsModel, x):
    """Sum of coefficient times the product of factor hinge values."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = np.atleast_2d(x)
    if X.shape[1] != model.n_features:
        raise ValueError(f"expected {model.n_features} features, got {X.shape[1]}")
    out = model.design_matrix(X) @ model.coefficients
    return float(out[0]) if single else out


def _lstsq(B: np.ndarray, y: np.ndarray):
    coef, _, _, _ = np.linalg.lstsq(B, y, rcond=None)
    resid = y - B @ coef
    return coef, float(resid @ resid)


def _orthonormalize(u: np.ndarray, Q: np.ndarray):
    """Component of u orthogonal to span(Q), or None if u is dependent."""
    norm_u = np.linalg.norm(u)
    if norm_u == 0.0:
        return None
    v = u - Q @ (Q.T @ u)
    v = v - Q @ (Q.T @ v)  # second pass for numerical orthogonality
    norm_v = np.linalg.norm(v)
    if norm_v <= _DEP_TOL * norm_u:
        return None
    return v / norm_v


def _best_candidate(X, r, Q, bases, cfg):
    """Scan every (parent, variable, knot) pair; return the best SSE gain.

    Gains for all knots of one (parent, variable) block are computed with a
    handful of matrix products; the scan order (parent, variable, ascending
    knot) breaks ties deterministically.
    """
    n, d = X.shape
    best = (0.0, None)  # (gain, (parent_idx, var, knot))
    for pi, parent in enumerate(bases):
        if parent.degree >= cfg.max_interaction:
            continue
        bp = parent.column(X)
        for var in range(d):
            if parent.uses(var):
                continue
            knots = np.unique(X[:, var])
            xv = X[:, var][:, None]
            up = np.maximum(0.0, xv - knots[None, :]) * bp[:, None]
            um = np.maximum(0.0, knots[None, :] - xv) * bp[:, None]
            gains = _pair_gains(up, um, Q, r)
            top = float(gains.max())
            if top <= 0.0:
                continue
            # smallest knot among the near-tied best: keeps e.g. exactly
            # linear data on a boundary knot instead of a noise-chosen one
            k = int(np.argmax(gains >= top - _TIE_REL * top))
            gain = float(gains[k])
            if gain > best[0] + _TIE_REL * max(gain, best[0]):
                best = (gain, (pi, var, float(knots[k])))
    return best


def _pair_gains(up, um, Q, r):
    """SSE reduction from adding each column pair, vectorized over knots."""
    vp = up - Q @ (Q.T @ up)
    vm = um - Q @ (Q.T @ um)
    a = np.einsum("ij,ij->j", vp, vp)
    b = np.einsum("ij,ij->j", vp, vm)
    c = np.einsum("ij,ij->j", vm, vm)
    rp = vp.T @ r
    rm = vm.T @ r
    det = a * c - b * b
    norm_p = np.einsum("ij,ij->j", up, up)
    norm_m = np.einsum("ij,ij->j", um, um)
    ok_p = a > (_DEP_TOL ** 2) * norm_p
    ok_m = c > (_DEP_TOL ** 2) * norm_m
    # single-column gains cover the degenerate cases
    gain_p = np.where(ok_p, rp ** 2 / np.where(ok_p, a, 1.0), 0.0)
    gain_m = np.where(ok_m, rm ** 2 / np.where(ok_m, c, 1.0), 0.0)
    single = np.maximum(gain_p, gain_m)
    well = ok_p & ok_m & (det > 1e-12 * a * c)
    safe_det = np.where(well, det, 1.0)
    pair = (c * rp ** 2 - 2.0 * b * rp * rm + a * rm ** 2) / safe_det
    return np.where(well, np.maximum(pair, single), single)


def forward_pass(train: Dataset, cfg: MarsConfig) -> MarsModel:
    """Grow the deliberately overfit model by repeated best-pair insertion."""
    if train.n_features == 0:
        raise ValueError("no features")
    if train.n_rows < 2:
        raise ValueError("need at least 2 rows")
    X, y = train.features, train.targets
    n = train.n_rows

    bases = [HingeBasis()]
    B = np.ones((n, 1))
    coef, sse = _lstsq(B, y)
    ss0 = sse  # constant-model SSE sets the noise floor once sse reaches 0
    trace = [sse / n]

    while len(bases) - 1 + 2 <= cfg.max_basis_functions:
        Q, _ = np.linalg.qr(B)
        r = y - Q @ (Q.T @ y)
        gain, pick = _best_candidate(X, r, Q, bases, cfg)
        if pick is None or gain <= _STOP_REL * sse + 1e-16 * ss0:
            break
        pi, var, knot = pick
        parent = bases[pi]
        added = False
        for direction in (POSITIVE, NEGATIVE):
            u = parent.column(X) * eval_hinge(X[:, var], knot, direction)
            if _orthonormalize(u, Q) is None:
                continue  # drop the linearly dependent member of the pair
            bases.append(HingeBasis(parent.factors + (Hinge(var, knot, direction),)))
            B = np.column_stack([B, u])
            Q, _ = np.linalg.qr(B)
            added = True
        if not added:
            break
        coef, sse = _lstsq(B, y)
        trace.append(sse / n)

    return MarsModel(tuple(bases), coef, train.n_features, sse / n,
                     forward_trace=tuple(trace))


def gcv(mse: float, n_rows: int, n_bases: int, penalty: float) -> float:
    """Penalized training MSE: each non-constant basis costs 1 + penalty
    effective parameters.  Returns inf once the model saturates the data."""
    c_eff = n_bases + penalty * (n_bases - 1)
    denom = 1.0 - c_eff / n_rows
    if denom <= 0.0:
        return float("inf")
    return mse / (denom * denom)


def backward_prune(model: MarsModel, train: Dataset, cfg: MarsConfig,
                   holdout: Dataset | None = None) -> MarsModel:
    """Greedy backward elimination; returns the best-scoring visited subset.

    The constant term is never removed.  Ties prefer the smaller subset
    (visited later), so pruning errs toward parsimony.
    """
    if cfg.pruning == "holdout" and holdout is None:
        raise ValueError("holdout pruning requires a holdout dataset")
    X, y = train.features, train.targets
    n = train.n_rows
    full = model.design_matrix(X)

    def score(cols):
        coef, sse = _lstsq(full[:, cols], y)
        if cfg.pruning == "gcv":
            return gcv(sse / n, n, len(cols), cfg.gcv_penalty)
        sub = MarsModel(tuple(model.bases[i] for i in cols), coef, model.n_features, sse / n)
        resid = predict(sub, holdout.features) - holdout.targets
        return float(np.mean(resid ** 2))

    retained = list(range(len(model.bases)))
    trace = [(len(retained), score(retained))]
    best_cols, best_score = list(retained), trace[0][1]
    while len(retained) > 1:
        scored = [(score(retained[:j] + retained[j + 1:]), j)
                  for j in range(1, len(retained))]
        s, j = min(scored, key=lambda t: (t[0], t[1]))
        retained = retained[:j] + retained[j + 1:]
        trace.append((len(retained), s))
        if s <= best_score:
            best_cols, best_score = list(retained), s

    coef, sse = _lstsq(full[:, best_cols], y)
    return MarsModel(tuple(model.bases[i] for i in best_cols), coef,
                     model.n_features, sse / n,
                     forward_trace=model.forward_trace, pruning_trace=tuple(trace))


def fit(train: Dataset, cfg: MarsConfig = MarsConfig(),
        holdout: Dataset | None = None) -> MarsModel:
    """Forward pass then backward prune."""
    return backward_prune(forward_pass(train, cfg), train, cfg, holdout)


# --- plain-text serialization -------------------------------------------------

_DIR_CODE = {POSITIVE: "+", NEGATIVE: "-"}
_CODE_DIR = {"+": POSITIVE, "-": NEGATIVE}


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def dump_model(model: MarsModel) -> str:
    lines = ["mars-model v1", f"features {model.n_features}", f"bases {len(model.bases)}"]
    for b in model.bases:
        parts = [f"{f.var} {_DIR_CODE[f.direction]} {_fmt(f.knot)}" for f in b.factors]
        lines.append("basis " + (" ".join(parts) if parts else "const"))
    lines.append("coefficients")
    lines.extend(_fmt(c) for c in model.coefficients)
    lines.append(f"training_mse {_fmt(model.training_mse)}")
    return "\n".join(lines) + "\n"


def load_model(text: str) -> MarsModel:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "mars-model v1":
        raise ValueError("not a mars-model v1 dump")
    n_features = int(lines[1].split()[1])
    n_bases = int(lines[2].split()[1])
    bases = []
    for ln in lines[3:3 + n_bases]:
        body = ln.split(None, 1)[1]
        if body == "const":
            bases.append(HingeBasis())
            continue
        toks = body.split()
        factors = tuple(Hinge(int(toks[i]), float(toks[i + 2]), _CODE_DIR[toks[i + 1]])
                        for i in range(0, len(toks), 3))
        bases.append(HingeBasis(factors))
    pos = 3 + n_bases
    if lines[pos] != "coefficients":
        raise ValueError("malformed dump: expected coefficients block")
    coef = np.array([float(ln) for ln in lines[pos + 1:pos + 1 + n_bases]])
    mse = float(lines[pos + 1 + n_bases].split()[1])
    return MarsModel(tuple(bases), coef, n_features, mse)
