"""Data model and ingestion for the observed record cross-classification.

Events (killings) are classified two ways: whether the event is mentioned in
independent sources (rows), and how many of the m documents addressed to the
killer survive (columns j = 0..m).  The cell (no mention, 0 letters) is the
estimand — events invisible to both systems — and is structurally absent from
the data: it is never read from a file and never stored as a number.
"""

from __future__ import annotations

import csv
import importlib.resources
from dataclasses import dataclass

import numpy as np

from .lognum import log_factorial

__all__ = [
    "CaptureDataError",
    "CaptureTable",
    "ReducedTable",
    "SummaryStats",
    "load_capture_table",
    "reduce",
    "summarize",
    "bundled_data_path",
]

CSV_HEADER = ["mentioned_other", "letters", "count"]

BUNDLED_DATASET = "norway_killings_1300_1569.csv"


class CaptureDataError(ValueError):
    """Raised for malformed capture-table files or cell values."""


@dataclass(frozen=True)
class CaptureTable:
    """Observed 2 x (m+1) cross-classification with the (0,0) cell absent.

    Attributes
    ----------
    m : int
        Maximum number of letters per event (column count minus one).
    counts_no_mention : tuple
        Counts for the unmentioned row, j = 0..m; index 0 is ``None``
        because that cell is the unknown being estimated.
    counts_mention : tuple of int
        Counts for the mentioned row, j = 0..m.
    """

    m: int
    counts_no_mention: tuple
    counts_mention: tuple

    def __post_init__(self):
        if self.m < 1:
            raise CaptureDataError("m must be a positive integer")
        if len(self.counts_no_mention) != self.m + 1:
            raise CaptureDataError(
                f"counts_no_mention must have m+1={self.m + 1} entries"
            )
        if len(self.counts_mention) != self.m + 1:
            raise CaptureDataError(
                f"counts_mention must have m+1={self.m + 1} entries"
            )
        if self.counts_no_mention[0] is not None:
            raise CaptureDataError(
                "the (no mention, 0 letters) cell is the estimand and must be absent"
            )
        for label, row, start in (
            ("no_mention", self.counts_no_mention, 1),
            ("mention", self.counts_mention, 0),
        ):
            for j in range(start, self.m + 1):
                c = row[j]
                if not isinstance(c, (int, np.integer)) or c < 0:
                    raise CaptureDataError(
                        f"cell ({label}, letters={j}) must be a non-negative "
                        f"integer, got {c!r}"
                    )

    @property
    def observed_total(self) -> int:
        """Sum of all known cells (every event seen by at least one system)."""
        return int(sum(self.counts_no_mention[1:]) + sum(self.counts_mention))


@dataclass(frozen=True)
class ReducedTable:
    """2 x 2 collapse: letters kept only as present (j >= 1) vs absent.

    n01: unmentioned events with at least one letter; n10: mentioned events
    with no letters; n11: mentioned events with at least one letter.  The
    fourth cell (unmentioned, no letters) is the unknown.
    """

    n01: int
    n10: int
    n11: int

    def __post_init__(self):
        for name in ("n01", "n10", "n11"):
            v = getattr(self, name)
            if not isinstance(v, (int, np.integer)) or v < 0:
                raise CaptureDataError(f"{name} must be a non-negative integer")

    @property
    def observed_total(self) -> int:
        return int(self.n01 + self.n10 + self.n11)


@dataclass(frozen=True)
class SummaryStats:
    """Sufficient statistics of the known cells for the letters-count models.

    Attributes
    ----------
    no_mention_known : int
        Known part of the unmentioned row total (excludes the unknown cell).
    mentioned_total : int
        Total of the mentioned row.
    letters_total : int
        Total letters observed, sum over columns of j * (column total).
    split_logfact_known : float
        Sum over known cells of count * ln(j! (m-j)!).  The unknown cell
        would add n * ln(0! m!) = n * ln(m!); that correction is applied at
        model-evaluation time, keeping this object a pure function of the
        observed data.
    observed_total : int
        Sum of all known cells.
    m : int
        Letters per event.
    """

    no_mention_known: int
    mentioned_total: int
    letters_total: int
    split_logfact_known: float
    observed_total: int
    m: int


def log_split_factorial(j: int, m: int) -> float:
    """ln(j! (m-j)!) — the per-column factorial-split constant."""
    if not 0 <= j <= m:
        raise ValueError(f"need 0 <= j <= m, got j={j}, m={m}")
    return float(log_factorial(j) + log_factorial(m - j))


def load_capture_table(path) -> CaptureTable:
    """Load and validate a capture table from CSV.

    Schema (header required): ``mentioned_other,letters,count`` with
    mentioned_other in {0,1}, 0 <= letters <= m, count >= 0.  The row
    (0,0,...) is forbidden — that cell is the estimand.  m is inferred as the
    maximum ``letters`` value present; cells not listed default to zero.
    """
    cells: dict[tuple[int, int], int] = {}
    try:
        fh = open(path, newline="", encoding="utf-8")
    except OSError as exc:
        raise CaptureDataError(f"cannot open {path}: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise CaptureDataError(f"{path}: empty file") from None
        if [h.strip() for h in header] != CSV_HEADER:
            raise CaptureDataError(
                f"{path}: row 1: header must be "
                f"{','.join(CSV_HEADER)!r}, got {','.join(header)!r}"
            )
        for rownum, row in enumerate(reader, start=2):
            if not row or all(not f.strip() for f in row):
                continue
            if len(row) != 3:
                raise CaptureDataError(
                    f"{path}: row {rownum}: expected 3 fields, got {len(row)}"
                )
            try:
                mentioned, letters, count = (int(f) for f in row)
            except ValueError:
                raise CaptureDataError(
                    f"{path}: row {rownum}: non-integer field in {row!r}"
                ) from None
            if mentioned not in (0, 1):
                raise CaptureDataError(
                    f"{path}: row {rownum}: mentioned_other must be 0 or 1"
                )
            if letters < 0:
                raise CaptureDataError(
                    f"{path}: row {rownum}: letters must be non-negative"
                )
            if count < 0:
                raise CaptureDataError(
                    f"{path}: row {rownum}: count must be non-negative"
                )
            if (mentioned, letters) == (0, 0):
                raise CaptureDataError(
                    f"{path}: row {rownum}: cell (0,0) is the estimand and "
                    f"may not be supplied"
                )
            if (mentioned, letters) in cells:
                raise CaptureDataError(
                    f"{path}: row {rownum}: duplicate cell "
                    f"({mentioned},{letters})"
                )
            cells[(mentioned, letters)] = count

    if not cells:
        raise CaptureDataError(f"{path}: no data rows")
    m = max(j for (_, j) in cells)
    if m < 1:
        raise CaptureDataError(f"{path}: need at least one letters >= 1 column")
    no_mention = tuple(
        [None] + [cells.get((0, j), 0) for j in range(1, m + 1)]
    )
    mention = tuple(cells.get((1, j), 0) for j in range(m + 1))
    return CaptureTable(m=m, counts_no_mention=no_mention, counts_mention=mention)


def reduce(table: CaptureTable) -> ReducedTable:
    """Collapse the letters columns to presence/absence (the 2 x 2 view)."""
    return ReducedTable(
        n01=int(sum(table.counts_no_mention[1:])),
        n10=int(table.counts_mention[0]),
        n11=int(sum(table.counts_mention[1:])),
    )


def summarize(table: CaptureTable) -> SummaryStats:
    """Compute the sufficient statistics of the known cells."""
    m = table.m
    col_known = [
        (0 if j == 0 else table.counts_no_mention[j]) + table.counts_mention[j]
        for j in range(m + 1)
    ]
    letters_total = sum(j * c for j, c in enumerate(col_known))
    split_logfact = sum(
        c * log_split_factorial(j, m) for j, c in enumerate(col_known)
    )
    return SummaryStats(
        no_mention_known=int(sum(table.counts_no_mention[1:])),
        mentioned_total=int(sum(table.counts_mention)),
        letters_total=int(letters_total),
        split_logfact_known=float(split_logfact),
        observed_total=table.observed_total,
        m=m,
    )


def bundled_data_path() -> str:
    """Filesystem path of the packaged Norway 1300-1569 killings dataset."""
    resource = importlib.resources.files("dualsys.data").joinpath(BUNDLED_DATASET)
    return str(resource)
