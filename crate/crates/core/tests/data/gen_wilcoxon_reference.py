"""Regenerates wilcoxon_reference.json with scipy (reference implementation)."""
import json

import numpy as np
from scipy import stats

rng = np.random.default_rng(20240611)
cases = []


def add(name, x, y, alternative, method):
    r = stats.wilcoxon(x, y, alternative=alternative, method=method, zero_method="wilcox", correction=True)
    cases.append({
        "name": name,
        "x": [float(v) for v in x],
        "y": [float(v) for v in y],
        "alternative": alternative,
        "statistic": float(r.statistic),
        "p": float(r.pvalue),
    })


# n = 8, distinct dyadic magnitudes, no zeros: exact distribution
for k in range(8):
    mags = rng.choice(np.arange(1, 64), size=8, replace=False) / 16.0
    signs = rng.choice([-1.0, 1.0], size=8)
    y = rng.integers(0, 32, size=8) / 8.0
    x = y + signs * mags
    add(f"exact-n8-{k}", x, y, ["two-sided", "less", "greater"][k % 3], "exact")

# n = 30, ties and two zeros: normal approximation
for k in range(6):
    y = rng.integers(0, 8, size=30) / 4.0
    x = y + rng.integers(-4, 5, size=30) / 4.0 + (0.25 if k % 2 else 0.0)
    x[:2] = y[:2]
    x[2:][x[2:] == y[2:]] += 0.5
    add(f"approx-n30-{k}", x, y, ["two-sided", "less", "greater"][k % 3], "approx")

# n = 5100, reward-like values with heavy ties
for k in range(6):
    y = rng.integers(-4, 5, size=5100) / 4.0
    lo, hi = [(-2, 3), (-3, 3), (-2, 3), (-2, 3), (-3, 3), (-2, 4)][k]
    x = np.clip(y + rng.integers(lo, hi, size=5100) / 4.0, -1.0, 1.0)
    add(f"approx-n5100-{k}", x, y, ["two-sided", "less", "greater"][k % 3], "approx")

with open("wilcoxon_reference.json", "w") as f:
    json.dump({"generator": f"scipy {__import__('scipy').__version__}", "cases": cases}, f)
    f.write("\n")
print(len(cases))
