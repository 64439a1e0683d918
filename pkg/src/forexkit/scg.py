"""Feedforward tanh MLP trained by scaled conjugate gradient.

The optimizer is Moller's SCG: conjugate directions with the line search
replaced by a one-sided finite-difference estimate of the Hessian-vector
product, s_k = (E'(w_k + sigma_k p_k) - E'(w_k)) / sigma_k + lambda_k p_k,
where lambda_k is raised or lowered from the comparison parameter so that
the local quadratic model stays positive definite.  The core minimizer is
generic over (fun, grad) callables; `scg_train` binds it to the batch
half-SSE error of an MlpNetwork.

With `freeze_lambda` the regulator is pinned at zero, which on a quadratic
makes every step an exact line minimum and the direction update plain
conjugate gradient — handy for convergence tests.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .data import Dataset


class ScgDivergence(RuntimeError):
    """Raised when the training error or gradient turns non-finite."""

    def __init__(self, epoch: int, message: str):
        super().__init__(message)
        self.epoch = epoch


@dataclass(frozen=True)
class ScgConfig:
    sigma0: float = 1e-4
    lambda0: float = 1e-6
    grad_tol: float = 1e-10
    freeze_lambda: bool = False
    restart_every: int | None = None  # None: every |w| iterations

    def __post_init__(self):
        if self.sigma0 <= 0.0:
            raise ValueError("sigma0 must be > 0")
        if self.lambda0 < 0.0:
            raise ValueError("lambda0 must be >= 0")


@dataclass
class ScgState:
    """Loop state: weights, search direction, negative gradient, regulator."""

    w: np.ndarray
    p: np.ndarray
    r: np.ndarray
    lam: float
    lam_bar: float
    fw: float
    success: bool = True
    epoch: int = 0


@dataclass(frozen=True)
class ScgResult:
    w: np.ndarray
    fun_value: float
    trace: tuple  # fun value before iteration 1, then after each iteration
    iterations: int
    converged: bool


def scg_minimize(fun, grad, w0, *, max_iterations: int,
                 cfg: ScgConfig = ScgConfig()) -> ScgResult:
    """Minimize fun(w) from w0; one iteration = one candidate step."""
    if max_iterations < 1:
        raise ValueError("max_iterations must be >= 1 (epochs >= 1)")
    w = np.asarray(w0, dtype=float).copy()
    n = w.size
    restart = cfg.restart_every if cfg.restart_every is not None else n
    st = ScgState(w=w, p=np.empty(n), r=np.empty(n),
                  lam=0.0 if cfg.freeze_lambda else cfg.lambda0,
                  lam_bar=0.0, fw=_finite_fun(fun, w, 0))
    st.r = -_finite_grad(grad, w, 0)
    st.p = st.r.copy()
    trace = [st.fw]
    converged = False
    delta_raw = 0.0
    p_sq = 0.0

    for k in range(1, max_iterations + 1):
        st.epoch = k
        if float(np.sqrt(st.r @ st.r)) < cfg.grad_tol:
            converged = True
            break
        if st.success:
            p_sq = float(st.p @ st.p)
            if p_sq == 0.0:
                converged = True
                break
            sigma_k = cfg.sigma0 / np.sqrt(p_sq)
            g_here = -st.r
            g_there = _finite_grad(grad, st.w + sigma_k * st.p, k)
            delta_raw = float(st.p @ (g_there - g_here)) / sigma_k
        delta = delta_raw + (st.lam - st.lam_bar) * p_sq
        if delta <= 0.0 and not cfg.freeze_lambda:
            # raise lambda until the quadratic model is positive definite
            st.lam_bar = 2.0 * (st.lam - delta / p_sq)
            delta = -delta + st.lam * p_sq
            st.lam = st.lam_bar
        mu = float(st.p @ st.r)
        alpha = mu / delta
        f_new = fun(st.w + alpha * st.p)
        if np.isfinite(f_new):
            comparison = 2.0 * delta * (st.fw - f_new) / (mu * mu)
        else:
            comparison = -1.0  # force rejection; lambda will rise
        if comparison >= 0.0:
            st.w = st.w + alpha * st.p
            st.fw = _require_finite(f_new, k)
            r_new = -_finite_grad(grad, st.w, k)
            st.lam_bar = 0.0
            st.success = True
            if k % restart == 0:
                st.p = r_new.copy()
            else:
                beta = float(r_new @ r_new - r_new @ st.r) / mu
                st.p = r_new + beta * st.p
            st.r = r_new
            if comparison >= 0.75 and not cfg.freeze_lambda:
                st.lam = 0.25 * st.lam
        else:
            st.lam_bar = st.lam
            st.success = False
        if comparison < 0.25 and not cfg.freeze_lambda:
            st.lam = st.lam + delta * (1.0 - comparison) / p_sq
        trace.append(st.fw)

    return ScgResult(w=st.w, fun_value=st.fw, trace=tuple(trace),
                     iterations=st.epoch, converged=converged)


def _require_finite(value: float, epoch: int) -> float:
    if not np.isfinite(value):
        raise ScgDivergence(epoch, f"training error diverged at epoch {epoch}")
    return float(value)


def _finite_fun(fun, w, epoch):
    return _require_finite(fun(w), epoch)


def _finite_grad(grad, w, epoch):
    g = np.asarray(grad(w), dtype=float)
    if not np.all(np.isfinite(g)):
        raise ScgDivergence(epoch, f"gradient diverged at epoch {epoch}")
    return g


# --- the network ---------------------------------------------------------------


@dataclass(frozen=True)
class MlpNetwork:
    """Dense tanh network with identity output; weights[i] maps layer i to i+1."""

    layer_sizes: tuple
    weights: tuple  # of (out, in) arrays
    biases: tuple   # of (out,) arrays

    def __post_init__(self):
        sizes = tuple(int(s) for s in self.layer_sizes)
        if len(sizes) < 2 or any(s < 1 for s in sizes):
            raise ValueError("need at least input and output layers, all sizes >= 1")
        if len(self.weights) != len(sizes) - 1 or len(self.biases) != len(sizes) - 1:
            raise ValueError("one weight matrix and bias vector per layer transition")
        for i, (wm, bv) in enumerate(zip(self.weights, self.biases)):
            if wm.shape != (sizes[i + 1], sizes[i]):
                raise ValueError(f"weight {i} shape {wm.shape} != {(sizes[i + 1], sizes[i])}")
            if bv.shape != (sizes[i + 1],):
                raise ValueError(f"bias {i} shape {bv.shape} != {(sizes[i + 1],)}")
        object.__setattr__(self, "layer_sizes", sizes)
        object.__setattr__(self, "weights", tuple(self.weights))
        object.__setattr__(self, "biases", tuple(self.biases))

    @property
    def n_params(self) -> int:
        return sum(w.size + b.size for w, b in zip(self.weights, self.biases))


def init_network(layer_sizes, seed: int) -> MlpNetwork:
    """Uniform +-1/sqrt(fan-in) weights and biases from the seed."""
    rng = np.random.default_rng(seed)
    sizes = tuple(int(s) for s in layer_sizes)
    weights, biases = [], []
    for fan_in, fan_out in zip(sizes[:-1], sizes[1:]):
        bound = 1.0 / np.sqrt(fan_in)
        weights.append(rng.uniform(-bound, bound, size=(fan_out, fan_in)))
        biases.append(rng.uniform(-bound, bound, size=fan_out))
    return MlpNetwork(sizes, tuple(weights), tuple(biases))


def get_params(net: MlpNetwork) -> np.ndarray:
    parts = []
    for w, b in zip(net.weights, net.biases):
        parts.append(w.ravel())
        parts.append(b)
    return np.concatenate(parts)


def set_params(net: MlpNetwork, flat: np.ndarray) -> MlpNetwork:
    flat = np.asarray(flat, dtype=float)
    if flat.size != net.n_params:
        raise ValueError(f"expected {net.n_params} parameters, got {flat.size}")
    weights, biases, at = [], [], 0
    for w, b in zip(net.weights, net.biases):
        weights.append(flat[at:at + w.size].reshape(w.shape).copy())
        at += w.size
        biases.append(flat[at:at + b.size].copy())
        at += b.size
    return MlpNetwork(net.layer_sizes, tuple(weights), tuple(biases))


def _forward_cached(net: MlpNetwork, X: np.ndarray):
    """Activations per layer; hidden layers tanh, final layer identity."""
    acts = [X]
    a = X
    last = len(net.weights) - 1
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        z = a @ w.T + b
        a = z if i == last else np.tanh(z)
        acts.append(a)
    return acts


def forward(net: MlpNetwork, x):
    """Network output; scalar for a single sample of a single-output net."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    X = x[None, :] if single else x
    if X.shape[1] != net.layer_sizes[0]:
        raise ValueError(f"expected {net.layer_sizes[0]} inputs, got {X.shape[1]}")
    out = _forward_cached(net, X)[-1]
    if single:
        return float(out[0, 0]) if out.shape[1] == 1 else out[0]
    return out[:, 0] if out.shape[1] == 1 else out


def _batch_targets(net: MlpNetwork, batch: Dataset) -> np.ndarray:
    y = batch.targets
    return y[:, None] if net.layer_sizes[-1] == 1 else y


def error(net: MlpNetwork, batch: Dataset) -> float:
    """E = half the summed squared error over the batch."""
    if batch.n_rows == 0:
        raise ValueError("batch is empty")
    resid = _forward_cached(net, batch.features)[-1] - _batch_targets(net, batch)
    return 0.5 * float(np.sum(resid * resid))


def gradient(net: MlpNetwork, batch: Dataset) -> np.ndarray:
    """Exact backpropagation gradient of E, flattened like get_params."""
    if batch.n_rows == 0:
        raise ValueError("batch is empty")
    acts = _forward_cached(net, batch.features)
    delta = acts[-1] - _batch_targets(net, batch)
    grads_w = [None] * len(net.weights)
    grads_b = [None] * len(net.biases)
    for i in range(len(net.weights) - 1, -1, -1):
        grads_w[i] = delta.T @ acts[i]
        grads_b[i] = delta.sum(axis=0)
        if i > 0:
            delta = (delta @ net.weights[i]) * (1.0 - acts[i] ** 2)
    parts = []
    for gw, gb in zip(grads_w, grads_b):
        parts.append(gw.ravel())
        parts.append(gb)
    return np.concatenate(parts)


def hessian_vector_approx(net: MlpNetwork, batch: Dataset, p: np.ndarray,
                          sigma_k: float, lambda_k: float = 0.0) -> np.ndarray:
    """s_k = (E'(w + sigma_k p) - E'(w)) / sigma_k + lambda_k p."""
    if sigma_k <= 0.0:
        raise ValueError("sigma_k must be > 0")
    p = np.asarray(p, dtype=float)
    if not np.any(p):
        raise ValueError("direction p must be non-zero")
    w = get_params(net)
    g0 = gradient(net, batch)
    g1 = gradient(set_params(net, w + sigma_k * p), batch)
    return (g1 - g0) / sigma_k + lambda_k * p


def scg_train(net: MlpNetwork, train: Dataset, epochs: int,
              seed: int | None = None, cfg: ScgConfig = ScgConfig()):
    """Full-batch SCG training.  With a seed, weights are re-initialized from
    it first, so the whole trajectory is a function of (seed, data, epochs).
    Returns (trained network, per-epoch error trace)."""
    if epochs < 1:
        raise ValueError("epochs must be >= 1")
    if train.n_rows == 0:
        raise ValueError("training set is empty")
    if seed is not None:
        net = init_network(net.layer_sizes, seed)

    def fun(w):
        return error(set_params(net, w), train)

    def grad(w):
        return gradient(set_params(net, w), train)

    result = scg_minimize(fun, grad, get_params(net), max_iterations=epochs, cfg=cfg)
    return set_params(net, result.w), list(result.trace)


# --- plain-text serialization -------------------------------------------------


def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def dump_network(net: MlpNetwork) -> str:
    lines = ["mlp-network v1", "layers " + " ".join(str(s) for s in net.layer_sizes)]
    for i, (w, b) in enumerate(zip(net.weights, net.biases)):
        lines.append(f"weights {i} {w.shape[0]} {w.shape[1]}")
        for row in w:
            lines.append(" ".join(_fmt(v) for v in row))
        lines.append(f"biases {i} {b.size}")
        lines.append(" ".join(_fmt(v) for v in b))
    return "\n".join(lines) + "\n"


def load_network(text: str) -> MlpNetwork:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or lines[0] != "mlp-network v1":
        raise ValueError("not an mlp-network v1 dump")
    if not lines[1].startswith("layers "):
        raise ValueError("missing layers line")
    sizes = tuple(int(tok) for tok in lines[1].split()[1:])
    weights, biases = [], []
    at = 2
    for i in range(len(sizes) - 1):
        head = lines[at].split()
        if head[:2] != ["weights", str(i)]:
            raise ValueError(f"expected 'weights {i}' at line {at + 1}")
        rows, cols = int(head[2]), int(head[3])
        block = [[float(tok) for tok in lines[at + 1 + r].split()] for r in range(rows)]
        weights.append(np.array(block, dtype=float).reshape(rows, cols))
        at += 1 + rows
        head = lines[at].split()
        if head[:2] != ["biases", str(i)]:
            raise ValueError(f"expected 'biases {i}' at line {at + 1}")
        biases.append(np.array([float(tok) for tok in lines[at + 1].split()], dtype=float))
        at += 2
    if at != len(lines):
        raise ValueError("trailing content after network body")
    return MlpNetwork(sizes, tuple(weights), tuple(biases))
