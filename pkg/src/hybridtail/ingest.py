"""CSV ingestion of loss amounts with a record of every dropped row."""

from __future__ import annotations

import csv
import datetime as dt
import hashlib
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import InputError

__all__ = ["LossTable", "ingest", "file_digest", "MAX_ERROR_RATE"]

MAX_ERROR_RATE = 0.10


@dataclass(frozen=True)
class LossTable:
    """Parsed amounts with optional dates and group labels.

    ``provenance`` reconciles ``kept + sum(dropped.values()) == input_rows``;
    ``errors`` lists the unparseable rows as ``(line, reason)``.
    """

    amounts: np.ndarray
    source: str
    digest: str
    provenance: dict
    report_dates: tuple | None = None
    groups: tuple | None = None
    errors: tuple = field(default=())

    @property
    def n(self) -> int:
        return int(self.amounts.size)


def file_digest(path: str) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def _parse_amount(raw: str) -> float:
    v = float(raw.strip())
    if not math.isfinite(v):
        raise ValueError("not a finite number")
    return v


def ingest(path: str, column: str = "amount", min_amount: float | None = None,
           drop_nonpositive: bool = False, date_column: str | None = None,
           group_column: str | None = None) -> LossTable:
    """Read one numeric column of a headed CSV file.

    Parameters
    ----------
    path : str
        CSV file with a header row.
    column : str
        Name of the amount column.
    min_amount : float, optional
        Rows with an amount strictly below it are dropped.
    drop_nonpositive : bool
        Drop amounts ``<= 0``.
    date_column : str, optional
        Column of ISO-8601 dates kept alongside the amounts.
    group_column : str, optional
        Column of class labels kept alongside the amounts.

    Raises
    ------
    InputError
        Missing file or column, or more than 10% unparseable rows.
    """
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    with fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in (column, date_column, group_column):
            if col is not None and col not in header:
                raise InputError(f"column {col!r} not found in {path}; header is {header}")
        amounts, dates, groups, errors = [], [], [], []
        dropped = {"unparseable": 0, "nonpositive": 0, "below_min_amount": 0}
        n_rows = 0
        for row in reader:
            n_rows += 1
            line = reader.line_num
            try:
                v = _parse_amount(row[column] or "")
                d = dt.date.fromisoformat(row[date_column].strip()) if date_column else None
            except (ValueError, TypeError, AttributeError) as exc:
                errors.append((line, f"{exc}"))
                dropped["unparseable"] += 1
                continue
            if drop_nonpositive and v <= 0:
                dropped["nonpositive"] += 1
                continue
            if min_amount is not None and v < min_amount:
                dropped["below_min_amount"] += 1
                continue
            amounts.append(v)
            if date_column:
                dates.append(d)
            if group_column:
                groups.append(row[group_column])
    if n_rows and len(errors) / n_rows > MAX_ERROR_RATE:
        raise InputError(f"{len(errors)} of {n_rows} rows could not be parsed")
    prov = {"input_rows": n_rows, "kept": len(amounts), "dropped": dropped,
            "filters": {"column": column, "min_amount": min_amount,
                        "drop_nonpositive": drop_nonpositive}}
    return LossTable(amounts=np.asarray(amounts, dtype=float), source=str(path),
                     digest=file_digest(path), provenance=prov,
                     report_dates=tuple(dates) if date_column else None,
                     groups=tuple(groups) if group_column else None,
                     errors=tuple(errors))
