"""Growing, pruning, and reading a regression tree.

A full tree is grown on noisy staircase data, collapsed node by node with
cost-complexity (weakest-link) pruning, and the subtree with the lowest
held-out cost is selected.  The relative-error curve shows how test error
falls and then turns back up as extra leaves start fitting noise.
"""

import numpy as np

from forexkit import cart
from forexkit.data import Dataset, split

rng = np.random.default_rng(6)
x = np.sort(rng.uniform(0.0, 4.0, 240))
y = np.floor(x) + rng.normal(0.0, 0.2, x.size)   # 4 steps at x = 1, 2, 3

train, test = split(Dataset(("x",), x[:, None], y), 0.7, seed=6)

full = cart.grow(train, cart.CartConfig(min_node_size=5))
print(f"full tree: {full.n_leaves} leaves")

seq = cart.prune_sequence(full, train)
print(f"pruning sequence: {[e.tree.n_leaves for e in seq]} leaves")
print(f"alphas:           {[round(e.alpha, 4) for e in seq]}")

best = cart.select_min_cost(seq, test)
print(f"selected subtree: {best.n_leaves} leaves  (true step count is 4)")

print("\nleaves vs relative test error:")
for n_leaves, rel in cart.relative_error_curve(seq, test):
    print(f"  {n_leaves:3d} leaves  {rel:.3f}")

print("\nselected tree:")
print(cart.dump_tree(best))
