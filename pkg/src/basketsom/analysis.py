"""U-matrix, cluster extraction and co-purchase statistics for a trained map."""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from .errors import DimensionMismatchError, UndefinedConditionalError
from .ingest import ProductCatalog, basket_matrix
from .som import CellIndex, SomGrid

__all__ = [
    "UMatrix",
    "Cluster",
    "AssociationReport",
    "ReportParams",
    "compute_umatrix",
    "extract_clusters",
    "cell_associations",
    "support",
    "confidence",
    "build_report",
]


@dataclass(frozen=True, eq=False)
class UMatrix:
    values: np.ndarray

    def __post_init__(self):
        vals = np.array(self.values, dtype=np.float64)
        if vals.ndim != 2:
            raise DimensionMismatchError("U-matrix must be 2-D")
        if not np.all(np.isfinite(vals)) or np.any(vals < 0):
            raise ValueError("U-matrix values must be finite and non-negative")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def rows(self):
        return self.values.shape[0]

    @property
    def cols(self):
        return self.values.shape[1]


@dataclass(frozen=True)
class Cluster:
    id: int
    cells: frozenset[CellIndex]
    dominant_products: tuple[str, ...] = ()

    def sorted_cells(self):
        return sorted(self.cells)


@dataclass(frozen=True)
class ReportParams:
    percentile: float = 40.0
    theta: float = 0.5
    # a product is dominant in a cluster when labeled on at least this share of its cells
    dominant_share: float = 0.5

    def __post_init__(self):
        if not 0 < self.percentile < 100:
            raise ValueError("percentile must be in (0, 100)")
        if not 0 < self.theta <= 1:
            raise ValueError("theta must be in (0, 1]")
        if not 0 < self.dominant_share <= 1:
            raise ValueError("dominant_share must be in (0, 1]")


@dataclass
class AssociationReport:
    clusters: list[Cluster]
    cell_labels: dict[CellIndex, list[str]]
    support: dict[str, float] = field(default_factory=dict)
    confidence: dict[tuple[str, str], float] = field(default_factory=dict)


def compute_umatrix(grid: SomGrid) -> UMatrix:
    """Mean distance from each cell's prototype to its 4-neighbours.

    Border cells average over the 2 or 3 neighbours they actually have.
    """
    w = grid.weights
    total = np.zeros((grid.rows, grid.cols))
    count = np.zeros((grid.rows, grid.cols))

    down = np.sqrt(np.sum((w[1:] - w[:-1]) ** 2, axis=2))
    total[:-1] += down
    total[1:] += down
    count[:-1] += 1
    count[1:] += 1

    right = np.sqrt(np.sum((w[:, 1:] - w[:, :-1]) ** 2, axis=2))
    total[:, :-1] += right
    total[:, 1:] += right
    count[:, :-1] += 1
    count[:, 1:] += 1

    # a 1x1 grid has no neighbours
    values = np.divide(total, count, out=np.zeros_like(total), where=count > 0)
    return UMatrix(values)


def extract_clusters(umatrix: UMatrix, threshold_percentile: float = 40.0) -> list[Cluster]:
    """Connected basins of low U-values.

    Cells at or below the given percentile (linear interpolation) are
    "low"; 4-connected groups of low cells become clusters, largest first,
    ties broken by the smallest row-major cell, ids from 1.
    """
    if not 0 < threshold_percentile < 100:
        raise ValueError("threshold_percentile must be in (0, 100)")
    vals = umatrix.values
    tau = np.percentile(vals, threshold_percentile, method="linear")
    low = vals <= tau
    labels, n = ndimage.label(low)  # default structure is 4-connectivity in 2-D

    groups = []
    for lab in range(1, n + 1):
        rr, cc = np.nonzero(labels == lab)
        cells = frozenset(CellIndex(int(r), int(c)) for r, c in zip(rr, cc))
        first = int(rr[0]) * umatrix.cols + int(cc[0])
        groups.append((-len(cells), first, cells))
    groups.sort(key=lambda g: (g[0], g[1]))
    return [Cluster(i, cells) for i, (_, _, cells) in enumerate(groups, start=1)]


def cell_associations(
    grid: SomGrid, catalog: ProductCatalog, theta: float = 0.5
) -> dict[CellIndex, list[str]]:
    """Products whose prototype component is at least ``theta``, per cell.

    Lists are ordered by descending component value, then product name.
    """
    if grid.dim != len(catalog):
        raise DimensionMismatchError(f"grid dim {grid.dim} != catalog size {len(catalog)}")
    if not 0 < theta <= 1:
        raise ValueError("theta must be in (0, 1]")
    names = catalog.products
    out = {}
    for r in range(grid.rows):
        for c in range(grid.cols):
            w = grid.weights[r, c]
            hits = np.flatnonzero(w >= theta)
            out[CellIndex(r, c)] = [names[j] for j in sorted(hits, key=lambda j: (-w[j], names[j]))]
    return out


def _counts(baskets, catalog):
    mat = basket_matrix(baskets, len(catalog))
    return mat.astype(bool)


def support(baskets, catalog: ProductCatalog, product: str) -> float:
    """Fraction of baskets that contain ``product``."""
    j = catalog.column(product)
    present = _counts(baskets, catalog)
    return int(present[:, j].sum()) / present.shape[0]


def confidence(baskets, catalog: ProductCatalog, a: str, b: str) -> float:
    """Of the baskets containing ``a``, the fraction that also contain ``b``."""
    if a == b:
        raise ValueError("confidence needs two distinct products")
    ja, jb = catalog.column(a), catalog.column(b)
    present = _counts(baskets, catalog)
    with_a = present[:, ja]
    n_a = int(with_a.sum())
    if n_a == 0:
        raise UndefinedConditionalError(f"no basket contains {a!r}")
    return int((with_a & present[:, jb]).sum()) / n_a


def _dominant(cluster, labels, share):
    tally = Counter()
    for cell in cluster.cells:
        tally.update(labels.get(cell, ()))
    need = share * len(cluster.cells)
    ranked = sorted(tally.items(), key=lambda kv: (-kv[1], kv[0]))
    return tuple(name for name, k in ranked if k >= need)


def build_report(
    grid: SomGrid,
    umatrix: UMatrix,
    baskets,
    catalog: ProductCatalog,
    params: ReportParams | None = None,
) -> AssociationReport:
    """Clusters with their dominant products, cell labels and statistics.

    Support is reported for every product labeled on some cell; directed
    confidence for every ordered pair of distinct products labeled within
    the same cluster.
    """
    params = params or ReportParams()
    if (umatrix.rows, umatrix.cols) != (grid.rows, grid.cols):
        raise DimensionMismatchError("U-matrix and grid shapes differ")
    present = _counts(baskets, catalog)
    n = present.shape[0]
    col_counts = present.sum(axis=0)

    labels = cell_associations(grid, catalog, params.theta)
    clusters = [
        Cluster(c.id, c.cells, _dominant(c, labels, params.dominant_share))
        for c in extract_clusters(umatrix, params.percentile)
    ]

    labeled = sorted({name for names in labels.values() for name in names}, key=catalog.column)
    supp = {name: int(col_counts[catalog.column(name)]) / n for name in labeled}

    conf = {}
    for cluster in clusters:
        members = sorted(
            {name for cell in cluster.cells for name in labels.get(cell, ())}, key=catalog.column
        )
        for a in members:
            ja = catalog.column(a)
            if col_counts[ja] == 0:
                continue
            for b in members:
                if a == b or (a, b) in conf:
                    continue
                jb = catalog.column(b)
                conf[(a, b)] = int((present[:, ja] & present[:, jb]).sum()) / int(col_counts[ja])
    cell_labels = {cell: names for cell, names in labels.items() if names}
    return AssociationReport(clusters, cell_labels, supp, conf)
