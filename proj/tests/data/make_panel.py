"""Writes panel_small.csv: three synthetic quarterly CPI series.

usa covers 1970Q1-2019Q4, fra misses 1975Q3 (so its usable block starts in
1975Q4) and jpn starts in 1980Q1. Inflation loads on a common AR(1) factor;
usa responds at once, fra and jpn two quarters later.

    python3 tests/data/make_panel.py > tests/data/panel_small.csv
"""
import math

import numpy as np

rng = np.random.default_rng(20240601)
quarters = [(y, q) for y in range(1970, 2020) for q in range(1, 5)]
T = len(quarters)
factor = np.zeros(T)
for t in range(1, T):
    factor[t] = 0.9 * factor[t - 1] + rng.normal(scale=1.5)

print("country,date,hcpi")
for code, start, level, load, delay in (("usa", 0, 3.0, 1.0, 0), ("fra", 0, 4.0, 0.8, 2), ("jpn", 40, 2.0, 0.6, 2)):
    own = 0.0
    price = 100.0
    for t in range(T):
        own = 0.5 * own + rng.normal(scale=1.0)
        infl = level + load * factor[max(t - delay, 0)] + own
        price *= math.exp(infl / 400.0)
        y, q = quarters[t]
        if t < start:
            continue
        text = f"{price:.6f}"
        if code == "fra" and (y, q) == (1975, 3):
            text = "NA"
        print(f"{code},{y}-Q{q},{text}")
