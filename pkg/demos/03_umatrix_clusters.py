"""
Reading clusters off the U-matrix
=================================

Each U-matrix cell holds the mean distance from a prototype to its four
lattice neighbours. Dark basins are groups of similar baskets; bright
ridges separate them.
"""

import sys
from pathlib import Path

import numpy as np

from basketsom import SomConfig, compute_umatrix, extract_clusters, train
from basketsom.report import render_umatrix, write_pgm
from basketsom.synth import default_spec, generate

out_dir = Path(sys.argv[1] if len(sys.argv) > 1 else "demo_output")
out_dir.mkdir(exist_ok=True)

baskets = generate(default_spec(seed=1))
grid, _ = train(baskets, SomConfig(seed=1))
umatrix = compute_umatrix(grid)

# %%
# A coarse text rendering: digits 0 (dark) to 9 (bright).
u = umatrix.values
levels = np.floor(9.999 * (u - u.min()) / (u.max() - u.min())).astype(int)
for row in levels:
    print("".join(str(v) for v in row))

# %%
# Cells at or below the 40th percentile count as "low"; connected low
# regions become clusters, biggest first.
clusters = extract_clusters(umatrix, 40)
for cl in clusters:
    print(f"C{cl.id}: {len(cl.cells)} cells")

# %%
# Save the image; each cell becomes a 16 x 16 block.
with open(out_dir / "umatrix.pgm", "wb") as fh:
    write_pgm(render_umatrix(umatrix, 16), fh)
print(f"wrote {out_dir / 'umatrix.pgm'}")
