"""Cooperating models: a pruned tree feeding leaf features into the spline fit.

The target mixes a sharp level shift (easy for a tree, hard for a small spline
basis) with a smooth ramp (easy for splines, staircased by a tree).  The
hybrid grows and prunes a tree first, appends its leaf-membership indicators
to the feature matrix, and runs the spline fit on the augmented data - so it
can spend hinge bases on the ramp and leaf indicators on the shift.
"""

import numpy as np

from forexkit import cart, hybrid, mars
from forexkit.data import Dataset, rmse, split


def plateau_ramp(seed, n=160, noise=0.05):
    rng = np.random.default_rng(seed)
    x = np.sort(rng.uniform(0.0, 3.0, n))
    y = np.where(x < 1.0, 0.5, 2.0) + np.where(x > 2.0, 2.5 * (x - 2.0), 0.0)
    return Dataset(("x",), x[:, None], y + noise * rng.normal(size=n))


train, test = split(plateau_ramp(seed=100), 0.7, seed=100)
cart_cfg = cart.CartConfig(min_node_size=8)
mars_cfg = mars.MarsConfig(max_basis_functions=5)

tree = cart.select_min_cost(cart.prune_sequence(cart.grow(train, cart_cfg),
                                                train), test)
spline = mars.fit(train, mars_cfg)
both = hybrid.fit_hybrid(train, test, cart_cfg, mars_cfg)

print("test RMSE on a level shift plus ramp (noise 0.05):")
print(f"  tree alone    {rmse(cart.predict(tree, test.features), test.targets):.4f}")
print(f"  spline alone  {rmse(mars.predict(spline, test.features), test.targets):.4f}")
print(f"  hybrid        {rmse(hybrid.predict(both, test.features), test.targets):.4f}")

names = {f.var: both.augmented_names[f.var]
         for b in both.mars.bases for f in b.factors}
print(f"\nhybrid spline built on features: {sorted(names.values())}")
print(f"(leaf_* columns are the {both.cart.n_leaves}-leaf tree's "
      f"membership indicators)")
