"""Empirical CCDF construction and survey/rich-list data fusion.

Survey microdata give the body of the income distribution; rich-list wealth
records, differenced between consecutive years, proxy the incomes of the very
top.  The two are joined on a common scale by a single multiplicative factor
chosen so the scaled rich-list minimum coincides with the minimum of the
survey's high-income segment (min-alignment).  Plotting positions follow the
Weibull rule l/(n+1) for the l-th richest of n records, which keeps every
record (no binning) and never produces p = 0 or p = 1.
"""

from __future__ import annotations

import csv
import warnings
from dataclasses import dataclass
from math import isfinite

import numpy as np

__all__ = [
    "ParseError",
    "OverlapWarning",
    "EmptyFileWarning",
    "IncomeRecord",
    "WealthPair",
    "EmpiricalCCDF",
    "rank_ccdf",
    "forbes_incomes",
    "find_scale_factor",
    "fuse",
    "load_incomes",
    "load_wealth_pairs",
]


class ParseError(ValueError):
    """Malformed input row; carries 1-based line and column positions."""

    def __init__(self, message: str, line: int, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class OverlapWarning(UserWarning):
    """Scaled rich list does not span the survey high segment from above."""


class EmptyFileWarning(UserWarning):
    """An input file contained no data rows."""


@dataclass(frozen=True)
class IncomeRecord:
    """One annual household income, EUR, strictly positive."""

    income: float

    def __post_init__(self) -> None:
        if not (self.income > 0.0 and isfinite(self.income)):
            raise ValueError(f"income must be positive and finite, got {self.income}")


@dataclass(frozen=True)
class WealthPair:
    """Wealth of one individual in two consecutive years, EUR."""

    id: str
    wealth_prev: float
    wealth_curr: float

    def __post_init__(self) -> None:
        for name in ("wealth_prev", "wealth_curr"):
            v = getattr(self, name)
            if not (v >= 0.0 and isfinite(v)):
                raise ValueError(f"{name} must be >= 0 and finite, got {v}")


def _incomes_array(records) -> np.ndarray:
    try:
        arr = np.asarray(records, dtype=float)
    except (TypeError, ValueError):
        arr = np.array([r.income for r in records], dtype=float)
    if arr.ndim != 1:
        raise ValueError("expected a flat sequence of incomes")
    return arr


@dataclass(frozen=True)
class EmpiricalCCDF:
    """Rank-ordered empirical CCDF: incomes descending, p = l/(n+1) ascending.

    Equal incomes are allowed (consecutive ranks in stable input order), so
    the income column is non-increasing rather than strictly decreasing.
    """

    incomes: np.ndarray
    p: np.ndarray

    def __post_init__(self) -> None:
        inc = np.asarray(self.incomes, dtype=float)
        pp = np.asarray(self.p, dtype=float)
        object.__setattr__(self, "incomes", inc)
        object.__setattr__(self, "p", pp)
        if inc.shape != pp.shape or inc.ndim != 1 or inc.size == 0:
            raise ValueError("incomes and p must be equal-length non-empty 1-d arrays")
        if np.any(inc <= 0.0) or not np.all(np.isfinite(inc)):
            raise ValueError("incomes must be positive and finite")
        if np.any(np.diff(inc) > 0.0):
            raise ValueError("incomes must be non-increasing")
        if np.any(pp <= 0.0) or np.any(pp >= 1.0) or np.any(np.diff(pp) <= 0.0):
            raise ValueError("p must be strictly increasing inside (0, 1)")

    @property
    def n(self) -> int:
        return int(self.incomes.size)

    @property
    def points(self) -> list[tuple[float, float]]:
        return list(zip(self.incomes.tolist(), self.p.tolist()))

    def to_csv(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write("income,ccdf\n")
            for m, p in zip(self.incomes.tolist(), self.p.tolist()):
                fh.write(f"{m!r},{p!r}\n")

    @classmethod
    def from_csv(cls, path) -> "EmpiricalCCDF":
        incomes, ps = [], []
        with open(path, encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                text = raw.strip()
                if not text:
                    continue
                if lineno == 1 and text.lower() == "income,ccdf":
                    continue
                parts = text.split(",")
                if len(parts) != 2:
                    raise ParseError("expected two comma-separated fields", lineno)
                try:
                    incomes.append(float(parts[0]))
                except ValueError:
                    raise ParseError(f"bad income {parts[0]!r}", lineno, 1) from None
                try:
                    ps.append(float(parts[1]))
                except ValueError:
                    raise ParseError(f"bad ccdf value {parts[1]!r}", lineno, 2) from None
        if not incomes:
            warnings.warn(f"no data rows in {path}", EmptyFileWarning, stacklevel=2)
            raise ValueError(f"empty CCDF file: {path}")
        return cls(incomes=np.array(incomes), p=np.array(ps))


def rank_ccdf(records) -> EmpiricalCCDF:
    """Weibull plotting positions: the l-th richest of n gets p = l/(n+1).

    Sort is stable and descending, so tied incomes keep their input order and
    receive consecutive ranks.  Output size equals input size.
    """
    arr = _incomes_array(records)
    if arr.size == 0:
        raise ValueError("need at least one record")
    if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
        raise ValueError("incomes must be positive and finite")
    order = np.argsort(-arr, kind="stable")
    n = arr.size
    ranks = np.arange(1, n + 1, dtype=float)
    return EmpiricalCCDF(incomes=arr[order], p=ranks / (n + 1.0))


def forbes_incomes(pairs) -> list[IncomeRecord]:
    """Year-over-year wealth gains as effective incomes; losses are dropped."""
    out = []
    for pair in pairs:
        diff = pair.wealth_curr - pair.wealth_prev
        if diff > 0.0:
            out.append(IncomeRecord(income=diff))
    return out


def find_scale_factor(survey_high, rich_list) -> float:
    """Factor s with min(s * rich) = min(survey_high), the min-alignment rule.

    Warns (OverlapWarning) when the scaled rich list fails to reach the top
    of the survey segment, i.e. the overlap is only partial.
    """
    hi = _incomes_array(survey_high)
    rich = _incomes_array(rich_list)
    if hi.size == 0 or rich.size == 0:
        raise ValueError("both income lists must be non-empty")
    s = float(hi.min() / rich.min())
    if s * rich.max() < hi.max():
        warnings.warn(
            f"scaled rich maximum {s * rich.max():.6g} below survey maximum "
            f"{hi.max():.6g}; overlap is partial",
            OverlapWarning,
            stacklevel=2,
        )
    return s


def fuse(survey, rich_incomes, factor: float | None = None, *,
         cut: float | None = None, top_k: int = 6) -> list[IncomeRecord]:
    """Concatenate survey incomes with factor-scaled rich-list incomes.

    When factor is None it is derived by find_scale_factor from the survey's
    high-income segment: incomes above `cut` if given, else the top_k survey
    points.  An empty rich list leaves the survey unchanged.
    """
    survey_arr = _incomes_array(survey)
    if survey_arr.size == 0:
        raise ValueError("survey must be non-empty")
    rich_arr = _incomes_array(rich_incomes)
    if rich_arr.size == 0:
        return [IncomeRecord(income=float(m)) for m in survey_arr]
    if factor is None:
        if cut is not None:
            seg = survey_arr[survey_arr > cut]
        else:
            k = min(int(top_k), survey_arr.size)
            if k < 1:
                raise ValueError("top_k must be >= 1")
            seg = np.sort(survey_arr)[-k:]
        factor = find_scale_factor(seg, rich_arr)
    if not (factor > 0.0 and isfinite(factor)):
        raise ValueError(f"scale factor must be positive, got {factor}")
    fused = np.concatenate([survey_arr, factor * rich_arr])
    return [IncomeRecord(income=float(m)) for m in fused]


def load_incomes(path) -> list[IncomeRecord]:
    """Read a one-column income CSV: one positive decimal per line.

    An optional single header cell "income" is accepted.  Malformed rows
    raise ParseError with the 1-based line number.
    """
    out: list[IncomeRecord] = []
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.strip()
            if not text:
                continue
            if lineno == 1 and text.lower() == "income":
                continue
            try:
                value = float(text)
            except ValueError:
                raise ParseError(f"not a decimal income: {text!r}", lineno) from None
            try:
                out.append(IncomeRecord(income=value))
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
    if not out:
        warnings.warn(f"no income rows in {path}", EmptyFileWarning, stacklevel=2)
    return out


def load_wealth_pairs(path) -> list[WealthPair]:
    """Read a wealth-pair CSV with header id,wealth_prev,wealth_curr."""
    out: list[WealthPair] = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            warnings.warn(f"empty wealth-pair file {path}", EmptyFileWarning, stacklevel=2)
            return out
        expected = ["id", "wealth_prev", "wealth_curr"]
        if [h.strip().lower() for h in header] != expected:
            raise ParseError(f"expected header {','.join(expected)}", 1)
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 3:
                raise ParseError(f"expected 3 fields, got {len(row)}", lineno)
            values = []
            for col, cell in enumerate(row[1:], start=2):
                try:
                    values.append(float(cell))
                except ValueError:
                    raise ParseError(f"bad wealth value {cell!r}", lineno, col) from None
            try:
                out.append(WealthPair(id=row[0], wealth_prev=values[0], wealth_curr=values[1]))
            except ValueError as exc:
                raise ParseError(str(exc), lineno) from None
    if not out:
        warnings.warn(f"no wealth rows in {path}", EmptyFileWarning, stacklevel=2)
    return out
