"""Correlation screening of configuration parameters against total energy.

Three statistics per parameter: the Pearson (normalized cross-) correlation,
the order-2 correlation (Pearson correlation of the element-wise squared
series) and a two-sided p-value for the null of no linear association.
Parameters whose p-value falls below ``alpha`` are reported as effective.

The p-value uses the usual t-test for a Pearson coefficient,
``t = r * sqrt((M - 2) / (1 - r**2))`` with ``M - 2`` degrees of freedom.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .config import PARAMETER_LABELS, PARAMETER_NAMES
from .errors import DatasetParseError, DegenerateInputError, InsufficientDataError
from .special import student_t_two_sided

DEFAULT_ALPHA = 0.05
CSV_HEADER = ("parameter", "p_value", "linear_corr", "nonlinear_corr", "effective")


def _pair(x, y) -> tuple[np.ndarray, np.ndarray]:
    x = np.asarray(x, dtype=float).ravel()
    y = np.asarray(y, dtype=float).ravel()
    if len(x) != len(y):
        raise ValueError(f"series lengths differ ({len(x)} vs {len(y)})")
    if len(x) < 3:
        raise InsufficientDataError(f"need at least 3 samples, got {len(x)}")
    return x, y


def linear_corr(x, y) -> float:
    """Normalized cross-correlation (Pearson r) of two equal-length series.

    Two-pass: means first, then centered sums.  The result is clamped to
    [-1, 1] against rounding overshoot.

    Raises:
        DegenerateInputError: if either series is constant.
    """
    x, y = _pair(x, y)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(np.dot(dx, dx))
    syy = float(np.dot(dy, dy))
    if sxx == 0.0 or syy == 0.0:
        raise DegenerateInputError("correlation undefined for a constant series")
    r = float(np.dot(dx, dy)) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def order_m_corr(x, y, order: int = 2) -> float:
    """Correlation of the element-wise ``order``-th powers of x and y.

    ``order=1`` is :func:`linear_corr`; ``order=2`` is the nonlinear
    correlation used for screening.
    """
    if int(order) != order or order < 1:
        raise ValueError("order must be a positive integer")
    x, y = _pair(x, y)
    if order == 1:
        return linear_corr(x, y)
    return linear_corr(x**order, y**order)


def corr_p_value(r: float, m: int) -> float:
    """Two-sided p-value of a Pearson coefficient ``r`` from ``m`` samples."""
    if m < 3:
        raise InsufficientDataError(f"need at least 3 samples, got {m}")
    if not -1.0 <= r <= 1.0 or math.isnan(r):
        raise ValueError(f"correlation must lie in [-1, 1], got {r}")
    if r == 0.0:
        return 1.0
    if abs(r) == 1.0:
        return 0.0
    df = m - 2
    t = r * math.sqrt(df / (1.0 - r * r))
    return student_t_two_sided(t, df)


@dataclass(frozen=True)
class HypothesisTest:
    p_value: float
    alpha: float = DEFAULT_ALPHA

    @property
    def rejected(self) -> bool:
        return self.p_value < self.alpha


def is_effective(p_value: float, alpha: float = DEFAULT_ALPHA) -> bool:
    return HypothesisTest(p_value, alpha).rejected


@dataclass(frozen=True)
class SensitivityRow:
    parameter: str
    p_value: float
    corr_linear: float
    corr_nonlinear: float
    effective: bool
    degenerate: bool = False
    diagnostic: str = ""


@dataclass(frozen=True)
class SensitivityReport:
    rows: tuple[SensitivityRow, ...]
    alpha: float
    M: int

    @property
    def effective(self) -> list[str]:
        return [row.parameter for row in self.rows if row.effective]

    @property
    def degenerate(self) -> list[str]:
        return [row.parameter for row in self.rows if row.degenerate]

    def row(self, parameter: str) -> SensitivityRow:
        for row in self.rows:
            if row.parameter == parameter:
                return row
        raise KeyError(parameter)

    def to_csv(self) -> str:
        return report_to_csv(self)

    def to_text(self) -> str:
        return render_table(self.rows, self.alpha, self.M)


def _sort_rows(rows: Sequence[SensitivityRow]) -> tuple[SensitivityRow, ...]:
    ok = sorted((r for r in rows if not r.degenerate), key=lambda r: (r.p_value, r.parameter))
    bad = sorted((r for r in rows if r.degenerate), key=lambda r: r.parameter)
    return tuple(ok + bad)


def screen_columns(
    columns: Mapping[str, Sequence[float]],
    energy: Sequence[float],
    alpha: float = DEFAULT_ALPHA,
) -> SensitivityReport:
    """Screen arbitrary named columns against ``energy``."""
    if not 0.0 < alpha < 1.0:
        raise ValueError("alpha must lie in (0, 1)")
    e = np.asarray(energy, dtype=float)
    m = len(e)
    if m < 3:
        raise InsufficientDataError(f"need at least 3 runs, got {m}")
    rows = []
    for name, values in columns.items():
        x = np.asarray(values, dtype=float)
        try:
            r = linear_corr(x, e)
        except DegenerateInputError:
            what = "energy" if np.all(e == e[0]) else "column"
            rows.append(
                SensitivityRow(name, math.nan, math.nan, math.nan, False, True, f"constant {what}")
            )
            continue
        diagnostic = ""
        try:
            r2 = order_m_corr(x, e, 2)
        except DegenerateInputError:
            r2 = math.nan
            diagnostic = "squared series constant; nonlinear correlation undefined"
        p = corr_p_value(r, m)
        rows.append(SensitivityRow(name, p, r, r2, is_effective(p, alpha), False, diagnostic))
    return SensitivityReport(_sort_rows(rows), alpha, m)


def extract_effective(dataset, alpha: float = DEFAULT_ALPHA) -> SensitivityReport:
    """Screen the eight configuration parameters of a profiling dataset."""
    columns = {name: dataset.column(name) for name in PARAMETER_NAMES}
    return screen_columns(columns, dataset.energy(), alpha)


# --- rendering ---------------------------------------------------------------


def _fmt_p(p: float) -> str:
    return "nan" if math.isnan(p) else f"{p:.4e}"


def _fmt_r(r: float) -> str:
    return "nan" if math.isnan(r) else f"{r:.6f}"


def report_to_csv(report: SensitivityReport) -> str:
    """CSV with header ``parameter,p_value,linear_corr,nonlinear_corr,effective``.

    Degenerate rows carry ``degenerate`` in the ``effective`` column.
    """
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for row in report.rows:
        flag = "degenerate" if row.degenerate else ("true" if row.effective else "false")
        writer.writerow(
            [row.parameter, _fmt_p(row.p_value), _fmt_r(row.corr_linear), _fmt_r(row.corr_nonlinear), flag]
        )
    return buf.getvalue()


def rows_from_csv(text: str) -> tuple[SensitivityRow, ...]:
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise DatasetParseError("empty report", line=1) from None
    if tuple(header) != CSV_HEADER:
        raise DatasetParseError(f"unexpected header {header!r}", line=1)
    rows = []
    for lineno, fields in enumerate(reader, start=2):
        if len(fields) != len(CSV_HEADER):
            raise DatasetParseError(f"expected {len(CSV_HEADER)} fields, got {len(fields)}", line=lineno)
        name, p, r1, r2, flag = fields
        if flag not in ("true", "false", "degenerate"):
            raise DatasetParseError(f"bad effective flag {flag!r}", line=lineno)
        try:
            rows.append(
                SensitivityRow(name, float(p), float(r1), float(r2), flag == "true", flag == "degenerate")
            )
        except ValueError as exc:
            raise DatasetParseError(str(exc), line=lineno) from None
    return tuple(rows)


def render_table(rows: Sequence[SensitivityRow], alpha: float | None = None, m: int | None = None) -> str:
    """Aligned plain-text table; effective rows are starred."""
    head = ("", "Parameter", "P-value", "Linear corr", "Non-linear corr")
    body = []
    for row in rows:
        mark = "*" if row.effective else ("!" if row.degenerate else "")
        body.append(
            (
                mark,
                PARAMETER_LABELS.get(row.parameter, row.parameter),
                _fmt_p(row.p_value),
                "nan" if math.isnan(row.corr_linear) else f"{row.corr_linear:+.4f}",
                "nan" if math.isnan(row.corr_nonlinear) else f"{row.corr_nonlinear:+.4f}",
            )
        )
    widths = [max(len(r[i]) for r in [head, *body]) for i in range(len(head))]
    align = ["<", "<", ">", ">", ">"]

    def line(cells):
        return "  ".join(f"{c:{a}{w}}" for c, a, w in zip(cells, align, widths)).rstrip()

    out = [line(head), "  ".join("-" * w for w in widths)]
    out.extend(line(r) for r in body)
    notes = []
    if alpha is not None:
        notes.append(f"* effective (p < {alpha:g})")
    if any(r.degenerate for r in rows):
        notes.append("! degenerate column (constant input)")
    if m is not None:
        notes.append(f"M = {m}")
    if notes:
        out.append("")
        out.append("; ".join(notes))
    return "\n".join(out) + "\n"
