"""
Products per cell and co-purchase statistics
============================================

A prototype component of at least 0.5 means the cell's typical basket
contains that product. Collecting those labels per cluster gives the
products that dominate each cluster, and plain counting over the baskets
gives support (how common a product is) and confidence (of the baskets
with A, the share that also have B).
"""

import io

from basketsom import SomConfig, build_report, compute_umatrix, confidence, support, train
from basketsom.report import emit_grid_map, write_stats_csv
from basketsom.synth import default_spec, generate, synthetic_catalog

spec = default_spec(seed=2)
baskets = generate(spec)
catalog = synthetic_catalog(spec.n_products)
grid, _ = train(baskets, SomConfig(seed=2))

report = build_report(grid, compute_umatrix(grid), baskets, catalog)
for cl in report.clusters:
    print(f"C{cl.id} ({len(cl.cells)} cells): {', '.join(cl.dominant_products) or '-'}")

# %%
# The labeled map, in the style of a product-id grid with a legend.
buf = io.StringIO()
emit_grid_map(grid.rows, grid.cols, report.cell_labels, report.clusters, buf)
print(buf.getvalue())

# %%
# Statistics for the first cluster's leading product.
lead = report.clusters[0].dominant_products[0]
print(f"support({lead}) = {support(baskets, catalog, lead):.3f}")
for other in report.clusters[0].dominant_products[1:]:
    print(f"confidence({lead} -> {other}) = {confidence(baskets, catalog, lead, other):.3f}")

# %%
# The same numbers as they land in stats.csv.
buf = io.StringIO()
write_stats_csv(report, buf)
print("\n".join(buf.getvalue().splitlines()[:12]))
