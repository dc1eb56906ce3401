"""Transaction log parsing and basket vectorization.

A raw point-of-sale export has one line per product sold. Lines bought by
the same client on the same calendar day form one basket, which is encoded
as a 0/1 vector over the product catalog.
"""

from __future__ import annotations

import csv
import io
import os
import unicodedata
from dataclasses import dataclass, field
from datetime import date, datetime
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    BadRow,
    BadRowsError,
    DimensionMismatchError,
    EmptyInputError,
    MalformedHeaderError,
    UnknownProductError,
)

__all__ = [
    "CsvFormatSpec",
    "TransactionRow",
    "ProductCatalog",
    "Basket",
    "parse_transactions",
    "build_catalog",
    "group_baskets",
    "basket_matrix",
    "write_basket_matrix",
    "read_basket_matrix",
]

FIELDS = (
    "client_id",
    "transaction_date",
    "weekday",
    "day_of_month",
    "year",
    "category",
    "subcategory",
    "product_name",
    "price",
)

# Header spellings accepted for each field, compared after normalization
# (accents stripped, lowercase, separators collapsed to "_").
_ALIASES = {
    "client_id": ("client_id", "client", "id_cliente", "cliente"),
    "transaction_date": ("transaction_date", "date", "fecha_transaccion", "fecha"),
    "weekday": ("weekday", "dia", "dia_semana"),
    "day_of_month": ("day_of_month", "mes", "dia_mes"),
    "year": ("year", "ano", "anio"),
    "category": ("category", "categoria"),
    "subcategory": ("subcategory", "sub_category", "sub_categoria", "subcategoria"),
    "product_name": ("product_name", "product", "producto", "nombre_producto"),
    "price": ("price", "precio"),
}


def _normalize_header(name):
    text = unicodedata.normalize("NFKD", name.strip().lstrip("﻿"))
    text = "".join(ch for ch in text if not unicodedata.combining(ch)).lower()
    for sep in (" ", "-", "."):
        text = text.replace(sep, "_")
    return text


@dataclass(frozen=True)
class CsvFormatSpec:
    """Dialect of the raw transaction export.

    Defaults match the supermarket export: ``;`` separated, dates as
    ``D/MM/YYYY``, prices written with ``.`` as thousands separator.
    """

    delimiter: str = ";"
    date_format: str = "%d/%m/%Y"
    thousands_sep: str = "."
    decimal_sep: str = ","
    encoding: str = "utf-8"


@dataclass(frozen=True)
class TransactionRow:
    client_id: str
    transaction_date: date
    weekday: int
    day_of_month: int
    year: int
    category: str
    subcategory: str
    product_name: str
    price: int


@dataclass(frozen=True)
class ProductCatalog:
    """Ordered, duplicate-free product list with its column index."""

    products: tuple[str, ...]
    index: dict[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        products = tuple(self.products)
        object.__setattr__(self, "products", products)
        index = {name: j for j, name in enumerate(products)}
        if len(index) != len(products):
            raise ValueError("duplicate product names in catalog")
        object.__setattr__(self, "index", index)

    def __len__(self):
        return len(self.products)

    def __contains__(self, name):
        return name in self.index

    def __iter__(self):
        return iter(self.products)

    def column(self, name):
        try:
            return self.index[name]
        except KeyError:
            raise UnknownProductError(name) from None


@dataclass(frozen=True, eq=False)
class Basket:
    """One transaction: the grouping key plus its 0/1 product vector."""

    basket_id: int
    client_id: str
    date: date
    vector: np.ndarray

    def __post_init__(self):
        vec = np.asarray(self.vector, dtype=np.uint8)
        if vec.ndim != 1:
            raise ValueError("basket vector must be one-dimensional")
        if np.any(vec > 1):
            raise ValueError("basket vector components must be 0 or 1")
        if not vec.any():
            raise ValueError("basket must contain at least one product")
        vec.setflags(write=False)
        object.__setattr__(self, "vector", vec)

    def __eq__(self, other):
        if not isinstance(other, Basket):
            return NotImplemented
        return (
            self.basket_id == other.basket_id
            and self.client_id == other.client_id
            and self.date == other.date
            and np.array_equal(self.vector, other.vector)
        )

    def __hash__(self):
        return hash((self.basket_id, self.client_id, self.date, self.vector.tobytes()))

    @property
    def products(self):
        """Column indices present in the basket."""
        return np.flatnonzero(self.vector)


def _open_text(source, encoding):
    if isinstance(source, (str, os.PathLike)):
        return open(source, "r", encoding=encoding, newline="")
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(bytes(source).decode(encoding), newline="")
    if isinstance(source, io.TextIOBase):
        return source
    # binary stream
    return io.TextIOWrapper(source, encoding=encoding, newline="")


def _parse_int(text, what):
    try:
        return int(text.strip())
    except ValueError:
        raise ValueError(f"{what} is not an integer: {text!r}") from None


def _parse_price(text, fmt):
    raw = text.strip()
    if fmt.thousands_sep:
        raw = raw.replace(fmt.thousands_sep, "")
    whole, _, frac = raw.partition(fmt.decimal_sep) if fmt.decimal_sep else (raw, "", "")
    if frac and set(frac) != {"0"}:
        raise ValueError(f"price must be a whole number of currency units: {text!r}")
    if not whole.isdigit():
        raise ValueError(f"price must be a non-negative integer: {text!r}")
    return int(whole)


def _parse_record(values, fmt):
    if values["client_id"].strip() == "":
        raise ValueError("client_id is empty")
    try:
        when = datetime.strptime(values["transaction_date"].strip(), fmt.date_format).date()
    except ValueError:
        raise ValueError(
            f"transaction_date {values['transaction_date']!r} does not match {fmt.date_format!r}"
        ) from None
    weekday = _parse_int(values["weekday"], "weekday")
    if not 1 <= weekday <= 7:
        raise ValueError(f"weekday {weekday} outside 1..7")
    day_of_month = _parse_int(values["day_of_month"], "day_of_month")
    if not 1 <= day_of_month <= 31:
        raise ValueError(f"day_of_month {day_of_month} outside 1..31")
    year = _parse_int(values["year"], "year")
    product = values["product_name"].strip()
    if not product:
        raise ValueError("product_name is empty")
    return TransactionRow(
        client_id=values["client_id"].strip(),
        transaction_date=when,
        weekday=weekday,
        day_of_month=day_of_month,
        year=year,
        category=values["category"].strip(),
        subcategory=values["subcategory"].strip(),
        product_name=product,
        price=_parse_price(values["price"], fmt),
    )


def parse_transactions(source, fmt: CsvFormatSpec | None = None) -> list[TransactionRow]:
    """Parse a delimiter-separated transaction export.

    ``source`` may be a path, raw bytes, or a text/binary stream. The first
    line must be a header naming the nine columns (English field names or
    the Spanish export headers). Every invalid line is collected; if any
    exist a :class:`BadRowsError` is raised listing them by physical line
    number, with the valid rows attached.
    """
    fmt = fmt or CsvFormatSpec()
    stream = _open_text(source, fmt.encoding)
    owns = isinstance(source, (str, os.PathLike))
    try:
        reader = csv.reader(stream, delimiter=fmt.delimiter)
        header = next(reader, None)
        while header is not None and not any(cell.strip() for cell in header):
            header = next(reader, None)
        if header is None:
            raise EmptyInputError(
                "empty input: missing header row (expected columns: " + ", ".join(FIELDS) + ")"
            )
        positions = {}
        normalized = [_normalize_header(h) for h in header]
        for name in FIELDS:
            for alias in _ALIASES[name]:
                if alias in normalized:
                    positions[name] = normalized.index(alias)
                    break
        missing = [name for name in FIELDS if name not in positions]
        if missing:
            raise MalformedHeaderError(missing)

        rows, bad = [], []
        for record in reader:
            line = reader.line_num
            if not any(cell.strip() for cell in record):
                continue
            if len(record) < len(header):
                bad.append(BadRow(line, f"expected {len(header)} fields, got {len(record)}"))
                continue
            values = {name: record[pos] for name, pos in positions.items()}
            try:
                rows.append(_parse_record(values, fmt))
            except ValueError as exc:
                bad.append(BadRow(line, str(exc)))
    finally:
        if owns:
            stream.close()
    if bad:
        raise BadRowsError(bad, rows)
    return rows


def build_catalog(rows: Iterable[TransactionRow]) -> ProductCatalog:
    names = {row.product_name.strip() for row in rows}
    if not names:
        raise EmptyInputError("cannot build a catalog from zero rows")
    return ProductCatalog(tuple(sorted(names)))


def group_baskets(rows: Iterable[TransactionRow], catalog: ProductCatalog) -> list[Basket]:
    """Collapse rows into one binary basket per (client, date) pair.

    Baskets come out ordered by (date, client_id) with ids starting at 1,
    so the result does not depend on input row order.
    """
    members: dict[tuple[date, str], set[int]] = {}
    for row in rows:
        j = catalog.column(row.product_name.strip())
        members.setdefault((row.transaction_date, row.client_id), set()).add(j)

    baskets = []
    for basket_id, key in enumerate(sorted(members), start=1):
        vec = np.zeros(len(catalog), dtype=np.uint8)
        vec[sorted(members[key])] = 1
        day, client = key
        baskets.append(Basket(basket_id, client, day, vec))
    return baskets


def basket_matrix(baskets: Sequence[Basket] | np.ndarray, dim: int | None = None) -> np.ndarray:
    """Stack basket vectors into an ``(n, dim)`` uint8 array.

    Plain 2-D arrays pass through (after a shape check) so numeric callers
    need not wrap data in :class:`Basket` objects.
    """
    if isinstance(baskets, np.ndarray):
        mat = baskets
        if mat.ndim != 2:
            raise DimensionMismatchError("basket matrix must be 2-D")
    else:
        if len(baskets) == 0:
            raise EmptyInputError("no baskets")
        dims = {b.vector.shape[0] for b in baskets}
        if len(dims) != 1:
            raise DimensionMismatchError(f"baskets have differing lengths: {sorted(dims)}")
        mat = np.stack([b.vector for b in baskets])
    if mat.shape[0] == 0:
        raise EmptyInputError("no baskets")
    if dim is not None and mat.shape[1] != dim:
        raise DimensionMismatchError(f"basket length {mat.shape[1]} != expected {dim}")
    return mat


def write_basket_matrix(baskets: Sequence[Basket], catalog: ProductCatalog, sink) -> None:
    """Write ``basket_id,client_id,date,<products...>`` then one 0/1 row per basket."""
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(["basket_id", "client_id", "date", *catalog.products])
    for b in baskets:
        if b.vector.shape[0] != len(catalog):
            raise DimensionMismatchError(
                f"basket {b.basket_id} has length {b.vector.shape[0]}, catalog has {len(catalog)}"
            )
        writer.writerow([b.basket_id, b.client_id, b.date.isoformat(), *b.vector.tolist()])


def read_basket_matrix(source) -> tuple[list[Basket], ProductCatalog]:
    """Inverse of :func:`write_basket_matrix`."""
    stream = _open_text(source, "utf-8")
    owns = isinstance(source, (str, os.PathLike))
    try:
        reader = csv.reader(stream)
        header = next(reader, None)
        if header is None:
            raise EmptyInputError("basket matrix file is empty")
        if header[:3] != ["basket_id", "client_id", "date"]:
            raise MalformedHeaderError(
                [c for c, h in zip(["basket_id", "client_id", "date"], header[:3] + ["", "", ""]) if c != h]
            )
        catalog = ProductCatalog(tuple(header[3:]))
        baskets = []
        for record in reader:
            if not record:
                continue
            if len(record) != len(header):
                raise BadRowsError([BadRow(reader.line_num, "wrong number of fields")], [])
            bits = np.array([int(v) for v in record[3:]], dtype=np.uint8)
            baskets.append(
                Basket(int(record[0]), record[1], date.fromisoformat(record[2]), bits)
            )
    finally:
        if owns:
            stream.close()
    return baskets, catalog
