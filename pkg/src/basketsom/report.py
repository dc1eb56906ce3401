"""Output artifacts: U-matrix image, text grid map and CSV tables."""

from __future__ import annotations

import csv
import math
import re
from dataclasses import dataclass

import numpy as np

from .analysis import AssociationReport, Cluster, UMatrix

__all__ = [
    "GrayscaleImage",
    "render_umatrix",
    "write_pgm",
    "read_pgm",
    "emit_grid_map",
    "write_clusters_csv",
    "write_labels_csv",
    "write_stats_csv",
]


@dataclass(frozen=True, eq=False)
class GrayscaleImage:
    """8-bit image, ``pixels`` shaped ``(height, width)``."""

    pixels: np.ndarray

    def __post_init__(self):
        px = np.asarray(self.pixels)
        if px.ndim != 2 or px.size == 0:
            raise ValueError("pixels must be a non-empty 2-D array")
        if px.dtype != np.uint8:
            if np.any(px < 0) or np.any(px > 255):
                raise ValueError("pixel values must be in [0, 255]")
            px = px.astype(np.uint8)
        object.__setattr__(self, "pixels", px)

    @property
    def width(self):
        return self.pixels.shape[1]

    @property
    def height(self):
        return self.pixels.shape[0]

    def __eq__(self, other):
        if not isinstance(other, GrayscaleImage):
            return NotImplemented
        return np.array_equal(self.pixels, other.pixels)


def render_umatrix(umatrix: UMatrix, scale: int = 1) -> GrayscaleImage:
    """Min/max normalize to 0..255 (round half up) and blow each cell up to ``scale`` pixels.

    Smallest distance is black, largest white; a flat matrix renders black.
    """
    if scale < 1:
        raise ValueError("scale must be ≥ 1")
    v = umatrix.values
    lo, hi = float(v.min()), float(v.max())
    if hi == lo:
        levels = np.zeros(v.shape, dtype=np.uint8)
    else:
        levels = np.floor(255.0 * (v - lo) / (hi - lo) + 0.5).astype(np.uint8)
    return GrayscaleImage(np.kron(levels, np.ones((scale, scale), dtype=np.uint8)))


def write_pgm(image: GrayscaleImage, sink) -> None:
    """Binary PGM: ``P5\\n<w> <h>\\n255\\n`` followed by raw row-major bytes."""
    sink.write(f"P5\n{image.width} {image.height}\n255\n".encode("ascii"))
    sink.write(image.pixels.tobytes(order="C"))


_PGM_HEADER = re.compile(rb"P5\s+(\d+)\s+(\d+)\s+(\d+)\s")


def read_pgm(data: bytes) -> GrayscaleImage:
    m = _PGM_HEADER.match(data)
    if m is None:
        raise ValueError("not a binary PGM (P5) file")
    width, height, maxval = (int(g) for g in m.groups())
    if maxval != 255:
        raise ValueError(f"unsupported maxval {maxval}")
    body = data[m.end() :]
    if len(body) != width * height:
        raise ValueError(f"expected {width * height} pixel bytes, got {len(body)}")
    return GrayscaleImage(np.frombuffer(body, dtype=np.uint8).reshape(height, width))


def _product_ids(cell_labels):
    names = sorted({n for names in cell_labels.values() for n in names})
    return {name: i for i, name in enumerate(names, start=1)}


def emit_grid_map(rows: int, cols: int, cell_labels, clusters, sink) -> dict[str, int]:
    """Fixed-width text map of the lattice plus a product legend.

    Each cell reads ``<cluster>:[<product ids>]``; ``.`` stands for "no
    cluster" and a cell with no labels shows only the cluster part. Product
    ids number the labeled products in name order. Returns that id map.
    """
    owner = {cell: cl.id for cl in clusters for cell in cl.cells}
    ids = _product_ids(cell_labels)
    for cell in cell_labels:
        if not (0 <= cell[0] < rows and 0 <= cell[1] < cols):
            raise ValueError(f"label for cell {tuple(cell)} outside {rows}x{cols} grid")

    text = []
    for r in range(rows):
        line = []
        for c in range(cols):
            tag = str(owner.get((r, c), "."))
            names = cell_labels.get((r, c), ())
            if names:
                tag += ":[" + ",".join(str(ids[n]) for n in names) + "]"
            line.append(tag)
        text.append(line)
    width = max(len(t) for line in text for t in line)
    for line in text:
        sink.write(" ".join(t.ljust(width) for t in line).rstrip() + "\n")
    sink.write("\n")
    for name, i in ids.items():
        sink.write(f"{i} {name}\n")
    return ids


def write_clusters_csv(clusters: list[Cluster], sink) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["cluster_id", "cells", "dominant_products"])
    for cl in clusters:
        cells = ";".join(f"{r}:{c}" for r, c in cl.sorted_cells())
        writer.writerow([cl.id, cells, ";".join(cl.dominant_products)])


def write_labels_csv(cell_labels, sink) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["row", "col", "products"])
    for cell in sorted(cell_labels):
        if cell_labels[cell]:
            writer.writerow([cell[0], cell[1], ";".join(cell_labels[cell])])


def _fixed4(value):
    # round half up at 4 decimals, independent of binary representation quirks
    return f"{math.floor(value * 10000 + 0.5) / 10000:.4f}"


def write_stats_csv(report: AssociationReport, sink) -> None:
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["kind", "product_a", "product_b", "value"])
    for name, value in report.support.items():
        writer.writerow(["support", name, "", _fixed4(value)])
    for (a, b), value in report.confidence.items():
        writer.writerow(["confidence", a, b, _fixed4(value)])
