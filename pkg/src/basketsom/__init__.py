"""Market-basket analysis with Kohonen self-organizing maps.

Pipeline: parse a point-of-sale export into binary basket vectors
(:mod:`~basketsom.ingest`), train a SOM (:mod:`~basketsom.som`), read
clusters and product associations off the map (:mod:`~basketsom.analysis`)
and write images and tables (:mod:`~basketsom.report`).
"""

__version__ = "0.1.0"

from .analysis import (
    AssociationReport,
    Cluster,
    ReportParams,
    UMatrix,
    build_report,
    cell_associations,
    compute_umatrix,
    confidence,
    extract_clusters,
    support,
)
from .ingest import (
    Basket,
    CsvFormatSpec,
    ProductCatalog,
    TransactionRow,
    basket_matrix,
    build_catalog,
    group_baskets,
    parse_transactions,
    read_basket_matrix,
    write_basket_matrix,
)
from .som import (
    CellIndex,
    SomConfig,
    SomGrid,
    TrainReport,
    find_bmu,
    init_grid,
    neighborhood_weight,
    quantization_error,
    train,
    train_step,
)

__all__ = [
    "AssociationReport",
    "Basket",
    "CellIndex",
    "Cluster",
    "CsvFormatSpec",
    "ProductCatalog",
    "ReportParams",
    "SomConfig",
    "SomGrid",
    "TrainReport",
    "TransactionRow",
    "UMatrix",
    "basket_matrix",
    "build_catalog",
    "build_report",
    "cell_associations",
    "compute_umatrix",
    "confidence",
    "extract_clusters",
    "find_bmu",
    "group_baskets",
    "init_grid",
    "neighborhood_weight",
    "parse_transactions",
    "quantization_error",
    "read_basket_matrix",
    "support",
    "train",
    "train_step",
    "write_basket_matrix",
]
