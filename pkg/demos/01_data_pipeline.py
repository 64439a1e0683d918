"""From raw monthly rates to a supervised, scaled train/test split.

Generates the five-currency synthetic dataset, writes it through the standard
CSV schema, reads it back bit-exact, and shows both feature recipes:

  mp1  (month index, previous own rate)          -> next-month rate
  mp5  (month index, previous rate of all five)  -> next-month rate
"""

import tempfile
from pathlib import Path

from forexkit.data import (FeatureSpec, apply_scaler, build_supervised,
                           fit_scaler, load_csv, split)
from forexkit.synth import forex5_series, write_rates_csv

out = Path(tempfile.mkdtemp()) / "rates.csv"
write_rates_csv(out, forex5_series(seed=7))
print(f"wrote {out}")

series = load_csv(out)
print(f"currencies: {', '.join(series)}")
jpy = series["JPY"]
print(f"JPY: {len(jpy)} months from {jpy.start_year}-{jpy.start_month:02d}, "
      f"first rates {jpy.values[:3]}")

for recipe in ("mp1", "mp5"):
    ds = build_supervised(series, FeatureSpec("JPY", recipe))
    print(f"\nrecipe {recipe}: {ds.n_rows} rows x {ds.n_features} features "
          f"{ds.feature_names}")

ds = build_supervised(series, FeatureSpec("JPY", "mp1"))
train, test = split(ds, 0.7, seed=7)
print(f"\nsplit 70/30 with seed 7: {train.n_rows} train / {test.n_rows} test rows")

scaler = fit_scaler(train)
strain, stest = apply_scaler(train, scaler), apply_scaler(test, scaler)
print(f"train features scaled into [{strain.features.min():.3f}, "
      f"{strain.features.max():.3f}]")
print(f"test features may leave the unit box: [{stest.features.min():.3f}, "
      f"{stest.features.max():.3f}] (scaler was fit on train only)")
