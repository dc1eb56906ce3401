"""Exception types shared across the toolkit."""

from __future__ import annotations

from dataclasses import dataclass


class BasketSomError(Exception):
    """Base class for all toolkit errors."""


class EmptyInputError(BasketSomError, ValueError):
    pass


class MalformedHeaderError(BasketSomError, ValueError):
    def __init__(self, missing):
        self.missing = list(missing)
        super().__init__("missing required column(s): " + ", ".join(self.missing))


@dataclass(frozen=True)
class BadRow:
    line: int
    reason: str

    def __str__(self):
        return f"line {self.line}: {self.reason}"


class BadRowsError(BasketSomError, ValueError):
    """One or more data lines failed validation.

    ``bad_rows`` lists every rejected line; ``rows`` holds the rows that
    parsed cleanly, in input order, so callers may choose to continue.
    """

    def __init__(self, bad_rows, rows):
        self.bad_rows = list(bad_rows)
        self.rows = list(rows)
        lines = "\n".join(f"  {b}" for b in self.bad_rows)
        super().__init__(f"{len(self.bad_rows)} invalid row(s):\n{lines}")


class UnknownProductError(BasketSomError, KeyError):
    def __init__(self, name):
        self.name = name
        super().__init__(name)

    def __str__(self):
        return f"unknown product: {self.name!r}"


class DimensionMismatchError(BasketSomError, ValueError):
    pass


class UndefinedConditionalError(BasketSomError, ZeroDivisionError):
    pass


class ConfigError(BasketSomError, ValueError):
    pass
