"""A Takagi-Sugeno fuzzy system trained by the hybrid LSE / gradient scheme.

Each input is covered by a grid of Gaussian memberships; every combination of
memberships forms one rule with a linear consequent.  Training alternates a
least-squares solve for the consequents with a gradient step on the Gaussian
centers and widths.  A globally linear target is absorbed by the very first
least-squares pass; a non-separable target needs the premise updates too.
"""

import numpy as np

from forexkit import anfis
from forexkit.data import Dataset


def make_dataset(fn, seed):
    rng = np.random.default_rng(seed)
    X = rng.uniform(0.0, 1.0, (300, 2))
    return Dataset(("x1", "x2"), X, fn(X[:, 0], X[:, 1]))


# --- a linear target is one LSE solve away ----------------------------------
train = make_dataset(lambda a, b: 1.5 * a - 0.7 * b + 0.3, seed=1)
model, trace = anfis.hybrid_train(train, anfis.AnfisConfig(epochs=1))
print(f"linear target: {model.n_rules} rules, first-epoch RMSE {trace[0]:.2e}")

# --- a non-separable target exercises the premise updates -------------------
train = make_dataset(lambda a, b: np.sin(4.0 * a * b), seed=2)
model, trace = anfis.hybrid_train(train,
                                  anfis.AnfisConfig(mfs_per_input=2, epochs=30))
print(f"sin(4*x1*x2) with a 2x2 grid: RMSE {trace[0]:.4f} -> {trace[-1]:.4f} "
      f"over {len(trace)} epochs (premise tuning, consequents re-solved each "
      f"epoch)")

x = np.array([0.4, 0.6])
print(f"predict({x.tolist()}) = {anfis.predict(model, x):.4f} "
      f"(target {np.sin(4.0 * 0.4 * 0.6):.4f})")

rules = anfis.dump_rules(model)
print(f"\nrule base ({len(rules.splitlines())} lines):")
print(rules)
