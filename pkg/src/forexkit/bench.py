"""One-month-ahead forecasting benchmark over five predictor families.

For every (currency, model) cell: build the supervised one-step-ahead table,
split 70/30 with the shared seed, min-max scale features and target on the
training side only, train, and report train/test RMSE in scaled space plus
wall-clock training time.  Alongside the live results, ``emit_table`` prints
a static reference block labeled "paper-reported" with the RMSE figures from
the original published forex study whose protocol this harness mirrors, for
side-by-side layout comparison (the original dataset itself was never
published, so those numbers are a reference, not a target).

Everything downstream of the config is deterministic: each cell derives its
own RNG stream from (seed, currency, model), so cells can be computed in any
order — only the recorded training times vary between runs.
"""

from __future__ import annotations

import configparser
import time
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import anfis, cart, charts, hybrid, mars, scg
from .data import (Dataset, FeatureSpec, apply_scaler, build_supervised,
                   fit_scaler, load_csv, rmse, split)

MODELS = ("mars", "cart", "hybrid", "mlp", "anfis")

# Test-set RMSE figures reported by the original study (scaled rates; rows
# align with MODELS, "mlp" being its neural network and "anfis" its
# neuro-fuzzy system).  Printed by emit_table as the "paper-reported" block.
REFERENCE_RMSE = {
    "mars": {"JPY": 0.023, "USD": 0.039, "GBP": 0.0478, "SGD": 0.028, "NZD": 0.049},
    "cart": {"JPY": 0.037, "USD": 0.037, "GBP": 0.063, "SGD": 0.033, "NZD": 0.041},
    "hybrid": {"JPY": 0.016, "USD": 0.027, "GBP": 0.035, "SGD": 0.026, "NZD": 0.035},
    "mlp": {"JPY": 0.028, "USD": 0.0340, "GBP": 0.023, "SGD": 0.030, "NZD": 0.021},
    "anfis": {"JPY": 0.026, "USD": 0.0340, "GBP": 0.037, "SGD": 0.029, "NZD": 0.020},
}
REFERENCE_CURRENCIES = ("JPY", "USD", "GBP", "SGD", "NZD")


class BenchError(RuntimeError):
    """A sub-operation failed; message carries the (currency, model) cell."""


@dataclass(frozen=True)
class ExperimentConfig:
    data_path: str
    currencies: tuple | None = None  # None: every currency in the file
    train_fraction: float = 0.7
    seed: int = 7
    models: tuple = MODELS
    mars_recipe: str = "mp1"
    cart_recipe: str = "mp1"
    hybrid_recipe: str = "mp1"
    mlp_recipe: str = "mp5"
    anfis_recipe: str = "mp1"
    mars_cfg: mars.MarsConfig = mars.MarsConfig(max_basis_functions=30)
    cart_cfg: cart.CartConfig = cart.CartConfig(min_node_size=5)
    mlp_hidden: tuple = (14, 14)
    mlp_epochs: int = 2000
    anfis_cfg: anfis.AnfisConfig = anfis.AnfisConfig()
    hybrid_encoding: str = "one_hot_leaf"
    out_dir: str = "bench_out"

    def __post_init__(self):
        if not 0.0 < self.train_fraction < 1.0:
            raise ValueError("split fraction must be in (0, 1)")
        if not self.models:
            raise ValueError("at least one model must be enabled")
        unknown = [m for m in self.models if m not in MODELS]
        if unknown:
            raise ValueError(f"unknown models {unknown}; choose from {MODELS}")
        object.__setattr__(self, "models", tuple(self.models))
        if self.currencies is not None:
            object.__setattr__(self, "currencies", tuple(self.currencies))
        object.__setattr__(self, "mlp_hidden", tuple(self.mlp_hidden))

    def recipe_for(self, model: str) -> str:
        return getattr(self, f"{model}_recipe")


@dataclass(frozen=True)
class CellResult:
    currency: str
    model: str
    test_rmse: float
    train_rmse: float
    train_seconds: float


@dataclass(frozen=True)
class BenchReport:
    """Per-cell metrics plus everything the emitters need: scaled test
    sequences keyed by currency / (currency, model), the pruning curve of the
    selected CART stage, and plain-text model dumps."""

    currencies: tuple
    models: tuple
    cells: tuple
    months: dict = field(default_factory=dict)      # currency -> month indices
    actual: dict = field(default_factory=dict)      # currency -> scaled actuals
    predicted: dict = field(default_factory=dict)   # (currency, model) -> scaled preds
    error_curves: dict = field(default_factory=dict)  # currency -> [(leaves, rel err)]
    dumps: dict = field(default_factory=dict)       # (currency, model) -> dump text
    rule_dumps: dict = field(default_factory=dict)  # currency -> ANFIS rule text
    tree_dumps: dict = field(default_factory=dict)  # currency -> CART tree text

    def cell(self, currency: str, model: str) -> CellResult:
        for c in self.cells:
            if (c.currency, c.model) == (currency, model):
                return c
        raise KeyError((currency, model))


def cell_seed(seed: int, currency: str, model: str) -> list:
    """Independent, order-insensitive RNG stream key for one grid cell."""
    return [seed, zlib.crc32(f"{currency}/{model}".encode())]


def _fit_cell(model: str, cfg: ExperimentConfig, strain: Dataset, stest: Dataset,
              seed_key: list) -> dict:
    """Train one model; returns predictions, dump text, and extras."""
    if model == "mars":
        fitted = mars.fit(strain, cfg.mars_cfg)
        return {"train": mars.predict(fitted, strain.features),
                "test": mars.predict(fitted, stest.features),
                "dump": mars.dump_model(fitted)}
    if model == "cart":
        seq = cart.prune_sequence(cart.grow(strain, cfg.cart_cfg), strain)
        tree = cart.select_min_cost(seq, stest)
        return {"train": cart.predict(tree, strain.features),
                "test": cart.predict(tree, stest.features),
                "dump": cart.dump_tree(tree),
                "curve": cart.relative_error_curve(seq, stest)}
    if model == "hybrid":
        fitted = hybrid.fit_hybrid(strain, stest, cfg.cart_cfg, cfg.mars_cfg,
                                   cfg.hybrid_encoding)
        return {"train": hybrid.predict(fitted, strain.features),
                "test": hybrid.predict(fitted, stest.features),
                "dump": hybrid.dump_hybrid(fitted)}
    if model == "mlp":
        sizes = (strain.n_features, *cfg.mlp_hidden, 1)
        net = scg.init_network(sizes, seed_key)
        net, _ = scg.scg_train(net, strain, cfg.mlp_epochs, seed=seed_key)
        return {"train": scg.forward(net, strain.features),
                "test": scg.forward(net, stest.features),
                "dump": scg.dump_network(net)}
    if model == "anfis":
        fitted, _ = anfis.hybrid_train(strain, cfg.anfis_cfg)
        return {"train": anfis.predict(fitted, strain.features),
                "test": anfis.predict(fitted, stest.features),
                "dump": anfis.dump_model(fitted),
                "rules": anfis.dump_rules(fitted)}
    raise ValueError(f"unknown model {model!r}")


def run_experiment(cfg: ExperimentConfig) -> BenchReport:
    series = load_csv(cfg.data_path)
    currencies = cfg.currencies if cfg.currencies is not None else tuple(series)
    missing = [c for c in currencies if c not in series]
    if missing:
        raise BenchError(f"currencies {missing} not present in {cfg.data_path}")

    report = BenchReport(currencies=tuple(currencies), models=cfg.models, cells=())
    cells = []
    for code in currencies:
        for model in cfg.models:
            try:
                spec = FeatureSpec(code, cfg.recipe_for(model))
                ds = build_supervised(series, spec)
                train, test = split(ds, cfg.train_fraction, cfg.seed)
                overlap = set(train.provenance) & set(test.provenance)
                if overlap:
                    raise AssertionError(f"train/test overlap at rows {sorted(overlap)}")
                scaler = fit_scaler(train)
                strain, stest = apply_scaler(train, scaler), apply_scaler(test, scaler)
                started = time.perf_counter()
                out = _fit_cell(model, cfg, strain, stest, cell_seed(cfg.seed, code, model))
                seconds = time.perf_counter() - started
            except Exception as exc:
                raise BenchError(f"currency {code}, model {model}: {exc}") from exc
            cells.append(CellResult(code, model,
                                    test_rmse=rmse(out["test"], stest.targets),
                                    train_rmse=rmse(out["train"], strain.targets),
                                    train_seconds=seconds))
            # test rows are provenance-sorted, so sequences are month-ordered;
            # the forecast lands at feature month + 1 (1-based: provenance + 2)
            report.months.setdefault(code, stest.provenance + 2)
            report.actual.setdefault(code, stest.targets)
            report.predicted[(code, model)] = np.asarray(out["test"], dtype=float)
            report.dumps[(code, model)] = out["dump"]
            if "curve" in out:
                report.error_curves[code] = out["curve"]
            if "rules" in out:
                report.rule_dumps[code] = out["rules"]
            if model == "cart":
                report.tree_dumps[code] = out["dump"]
    return BenchReport(currencies=tuple(currencies), models=cfg.models,
                       cells=tuple(cells), months=report.months,
                       actual=report.actual, predicted=report.predicted,
                       error_curves=report.error_curves, dumps=report.dumps,
                       rule_dumps=report.rule_dumps, tree_dumps=report.tree_dumps)


# --- emitters -------------------------------------------------------------------


def _table_block(models, currencies, value) -> list:
    head = f"{'model':<8}" + "".join(f"{c:>10}" for c in currencies)
    lines = [head]
    for m in models:
        cells = "".join(f"{value(m, c):>10.4f}" for c in currencies)
        lines.append(f"{m:<8}" + cells)
    return lines


def emit_table(report: BenchReport) -> str:
    """Model-by-currency test RMSE table plus the static reference block."""
    if not report.cells:
        raise ValueError("empty report")
    lines = ["test RMSE (scaled to training range)", ""]
    lines += _table_block(report.models, report.currencies,
                          lambda m, c: report.cell(c, m).test_rmse)
    lines += ["", 'reference block "paper-reported" (original study, original data):', ""]
    lines += _table_block(MODELS, REFERENCE_CURRENCIES,
                          lambda m, c: REFERENCE_RMSE[m][c])
    return "\n".join(lines) + "\n"


def emit_csv(report: BenchReport) -> str:
    """Machine-readable mirror: currency,model,test_rmse,train_rmse,train_seconds."""
    if not report.cells:
        raise ValueError("empty report")
    lines = ["currency,model,test_rmse,train_rmse,train_seconds"]
    for c in report.cells:
        lines.append(f"{c.currency},{c.model},{c.test_rmse:.17g},"
                     f"{c.train_rmse:.17g},{c.train_seconds:.3f}")
    return "\n".join(lines) + "\n"


def emit_plots(report: BenchReport, out_dir) -> list:
    """One predicted-vs-actual chart per currency, plus the relative-error
    curve of the first currency's pruning sequence when CART ran."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []
    for code in report.currencies:
        months = report.months[code]
        series = [("actual", months, report.actual[code])]
        for model in report.models:
            series.append((model, months, report.predicted[(code, model)]))
        svg = charts.line_chart(f"{code}: one-month-ahead forecasts (test sample)",
                                "month index", "rate (scaled)", series)
        path = out / f"pred_{code}.svg"
        path.write_text(svg)
        written.append(path)
    for code in report.currencies:
        if code in report.error_curves:
            curve = sorted(report.error_curves[code])
            svg = charts.line_chart(f"{code}: pruned tree size vs relative test error",
                                    "terminal nodes", "relative error",
                                    [("cart", [p[0] for p in curve],
                                      [p[1] for p in curve])])
            path = out / "relative_error.svg"
            path.write_text(svg)
            written.append(path)
            break
    return written


def run_bench(cfg: ExperimentConfig) -> tuple:
    """Full harness: experiment + all artifact files.  Returns (report, paths)."""
    report = run_experiment(cfg)
    out = Path(cfg.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    written = []

    def emit(name: str, text: str):
        path = out / name
        path.write_text(text)
        written.append(path)

    emit("table.txt", emit_table(report))
    emit("report.csv", emit_csv(report))
    written.extend(emit_plots(report, out))
    for code, text in report.tree_dumps.items():
        emit(f"cart_tree_{code}.txt", text)
    for code, text in report.rule_dumps.items():
        emit(f"anfis_rules_{code}.txt", text)
    models_dir = out / "models"
    models_dir.mkdir(exist_ok=True)
    for (code, model), text in report.dumps.items():
        path = models_dir / f"{model}_{code}.txt"
        path.write_text(text)
        written.append(path)
    return report, written


# --- configuration file ---------------------------------------------------------

_CONFIG_KEYS = {
    "data": {"path", "currencies"},
    "split": {"fraction", "seed"},
    "models": {"enabled"},
    "mars": {"recipe", "max_basis_functions", "max_interaction", "pruning",
             "gcv_penalty"},
    "cart": {"recipe", "min_node_size", "min_split_gain", "max_depth"},
    "mlp": {"recipe", "hidden", "epochs"},
    "anfis": {"recipe", "mfs_per_input", "epochs", "rate", "consequent"},
    "hybrid": {"recipe", "encoding"},
    "output": {"dir"},
}


def _words(value: str) -> list:
    return value.replace(",", " ").split()


def load_config(path) -> ExperimentConfig:
    """Parse the INI-style experiment file (section.key = value semantics).

    Only [data] path is required; every other key falls back to the defaults
    baked into ExperimentConfig.  Unknown sections or keys are errors, so
    typos fail loudly instead of silently running defaults.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",))
    with open(path) as fh:  # missing file raises with the path in the message
        parser.read_file(fh)
    for section in parser.sections():
        if section not in _CONFIG_KEYS:
            raise ValueError(f"unknown config section [{section}] in {path}")
        for key in parser[section]:
            if key not in _CONFIG_KEYS[section]:
                raise ValueError(f"unknown key {section}.{key} in {path}")
    if "data" not in parser or "path" not in parser["data"]:
        raise ValueError(f"config {path} must set data.path")

    kw: dict = {"data_path": parser["data"]["path"]}
    if parser.has_option("data", "currencies"):
        kw["currencies"] = tuple(_words(parser["data"]["currencies"]))
    if "split" in parser:
        sec = parser["split"]
        if "fraction" in sec:
            kw["train_fraction"] = sec.getfloat("fraction")
        if "seed" in sec:
            kw["seed"] = sec.getint("seed")
    if parser.has_option("models", "enabled"):
        kw["models"] = tuple(_words(parser["models"]["enabled"]))
    if "mars" in parser:
        sec = parser["mars"]
        if "recipe" in sec:
            kw["mars_recipe"] = sec["recipe"]
        mars_kw = {}
        if "max_basis_functions" in sec:
            mars_kw["max_basis_functions"] = sec.getint("max_basis_functions")
        if "max_interaction" in sec:
            mars_kw["max_interaction"] = sec.getint("max_interaction")
        if "pruning" in sec:
            mars_kw["pruning"] = sec["pruning"]
        if "gcv_penalty" in sec:
            mars_kw["gcv_penalty"] = sec.getfloat("gcv_penalty")
        if mars_kw:
            kw["mars_cfg"] = mars.MarsConfig(**mars_kw)
    if "cart" in parser:
        sec = parser["cart"]
        if "recipe" in sec:
            kw["cart_recipe"] = sec["recipe"]
        cart_kw = {}
        if "min_node_size" in sec:
            cart_kw["min_node_size"] = sec.getint("min_node_size")
        if "min_split_gain" in sec:
            cart_kw["min_split_gain"] = sec.getfloat("min_split_gain")
        if "max_depth" in sec:
            cart_kw["max_depth"] = sec.getint("max_depth")
        if cart_kw:
            kw["cart_cfg"] = cart.CartConfig(**cart_kw)
    if "mlp" in parser:
        sec = parser["mlp"]
        if "recipe" in sec:
            kw["mlp_recipe"] = sec["recipe"]
        if "hidden" in sec:
            kw["mlp_hidden"] = tuple(int(v) for v in _words(sec["hidden"]))
        if "epochs" in sec:
            kw["mlp_epochs"] = sec.getint("epochs")
    if "anfis" in parser:
        sec = parser["anfis"]
        if "recipe" in sec:
            kw["anfis_recipe"] = sec["recipe"]
        anfis_kw = {}
        if "mfs_per_input" in sec:
            anfis_kw["mfs_per_input"] = sec.getint("mfs_per_input")
        if "epochs" in sec:
            anfis_kw["epochs"] = sec.getint("epochs")
        if "rate" in sec:
            anfis_kw["rate"] = sec.getfloat("rate")
        if "consequent" in sec:
            anfis_kw["consequent"] = sec["consequent"]
        if anfis_kw:
            kw["anfis_cfg"] = anfis.AnfisConfig(**anfis_kw)
    if "hybrid" in parser:
        sec = parser["hybrid"]
        if "recipe" in sec:
            kw["hybrid_recipe"] = sec["recipe"]
        if "encoding" in sec:
            kw["hybrid_encoding"] = sec["encoding"]
    if parser.has_option("output", "dir"):
        kw["out_dir"] = parser["output"]["dir"]
    return ExperimentConfig(**kw)
