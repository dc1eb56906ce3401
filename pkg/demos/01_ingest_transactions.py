"""
From point-of-sale lines to basket vectors
==========================================

A supermarket export has one line per product sold, with no notion of a
basket. Here we treat everything one client bought on one day as a single
basket and encode it as a 0/1 vector over the product catalog.
"""

from collections import Counter
from pathlib import Path

import numpy as np

from basketsom import build_catalog, group_baskets, parse_transactions

HERE = Path(__file__).resolve().parent
source = HERE.parent / "tests" / "fixtures" / "transactions_50.csv"

# %%
# The export is ``;`` separated with a Spanish header and prices written
# with a thousands dot (``1.990``). The default dialect handles both.
print(source.read_text(encoding="utf-8").splitlines()[:3])

rows = parse_transactions(source)
print(f"{len(rows)} sale lines, first: {rows[0]}")

# %%
# The catalog is every distinct product name, sorted, so column ``j`` means
# the same product in every run.
catalog = build_catalog(rows)
for j, name in enumerate(catalog.products):
    print(f"  column {j}: {name}")

# %%
# Group by (client, date). Buying the same product twice still gives a 1.
baskets = group_baskets(rows, catalog)
print(f"{len(baskets)} baskets")
b = baskets[0]
print(f"basket {b.basket_id}: client {b.client_id} on {b.date}")
print("  " + " ".join(f"{name[:10]:>10}" for name in catalog.products))
print("  " + " ".join(f"{v:>10d}" for v in b.vector))

# %%
# Baskets per month, and how often each product shows up.
months = Counter(b.date.strftime("%Y-%m") for b in baskets)
print(dict(sorted(months.items())))
counts = np.sum([b.vector for b in baskets], axis=0).astype(int)
for name, k in sorted(zip(catalog.products, counts), key=lambda t: -t[1]):
    print(f"  {name:32s} {k:3d} baskets")
