"""Three-step parameter estimation from empirical CCDFs, plus the rank estimator.

Step 1 locates the two crossovers (m0, m1) by a two-change-point grid search:
candidate boundaries are drawn from empirical quantiles and an extra
log-spaced set concentrated in the extreme tail (the high-income class can
hold fewer than 0.5% of records, so a plain quantile grid would never place a
candidate inside it).  For each candidate pair, segment 1 is fit by OLS of
ln p on income (exponential law), segments 2 and 3 by OLS of ln p on ln income
(power laws); the pair minimizing the total SSR wins, ties broken toward
smaller m0, then smaller m1.  Weights are uniform: log-spacing and
per-segment normalizations were tried and measured either inert or unstable
on heavy-tailed rank data.

The SSR optimum is a biased locator for the lower crossover.  The true curve
leaves the exponential regime gradually, so the first boundary settles where
the exponential and power residuals balance, around two thirds of the
generative crossover, with the second boundary about a tenth low.  This is a
property of three-straight-line segmentation itself, not of the search, and
no admissible reweighting moves it: pointwise weights multiply both sides of
the residual comparison equally.  Callers needing the generative value should
treat m0_hat as the end of the strictly-exponential description.

Step 2 reads the temperature T from segment 1 and the exponents alpha, alpha1
from segments 2 and 3; T1 = T is imposed throughout.

Step 3 refines T alone by minimizing the log-CCDF misfit of the full
normalized model over all points, searching [T, 1.5 T] (the global fit wants
a noticeably higher temperature than the segment fit because the exponential
segment of the true curve is depressed below the pure exponential near m0).

Everything is OLS on log plotting positions, not maximum likelihood; reported
standard errors are the OLS asymptotic ones.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, replace

import numpy as np
from scipy import optimize

from incomedist.empirics import EmpiricalCCDF
from incomedist.model import (
    ModelParams,
    ParetoFit,
    TailDivergenceError,
    ccdf_eval_many,
    normalize,
)

__all__ = [
    "EstimationError",
    "DegenerateTailWarning",
    "ParetoSegmentFit",
    "RankFit",
    "FitReport",
    "detect_crossovers",
    "fit_temperature",
    "fit_pareto_exponent",
    "fit_rank",
    "refine_temperature",
    "fit_full",
]

MIN_SEGMENT = 5


class EstimationError(ValueError):
    """The data cannot support the requested fit."""


class DegenerateTailWarning(UserWarning):
    """The third segment sits at the data edge; no distinct high-income regime."""


@dataclass(frozen=True)
class ParetoSegmentFit:
    """Power-law fit of one CCDF segment with its OLS diagnostics."""

    fit: ParetoFit
    stderr: float
    ssr: float
    n_points: int


@dataclass(frozen=True)
class RankFit:
    """Log-log rank-plot fit: value ~ rank^(-alpha_rank), alpha_pareto = 1/alpha_rank."""

    alpha_rank: float
    alpha_pareto: float
    stderr: float

    def __post_init__(self) -> None:
        if not (self.alpha_rank > 0.0 and self.alpha_pareto > 0.0):
            raise ValueError("rank-fit exponents must be positive")
        if abs(self.alpha_pareto * self.alpha_rank - 1.0) > 1e-9:
            raise ValueError("alpha_pareto must be the reciprocal of alpha_rank")


@dataclass(frozen=True)
class FitReport:
    """Full three-step fit: parameters, per-step diagnostics, uncertainties."""

    params: ModelParams
    T_bg: float
    alpha_fit: float
    alpha_se: float
    alpha1_fit: float
    alpha1_se: float
    m0_hat: float
    m0_rel_unc: float
    m1_hat: float
    m1_rel_unc: float
    ssr_per_segment: tuple[float, float, float]
    refined_T: float
    degenerate_tail: bool = False

    def __post_init__(self) -> None:
        if not (self.m0_hat < self.m1_hat):
            raise ValueError("m0_hat must be below m1_hat")
        if min(self.alpha_se, self.alpha1_se, self.m0_rel_unc, self.m1_rel_unc) < 0.0:
            raise ValueError("uncertainties must be non-negative")
        if not (self.T_bg <= self.refined_T <= 1.5 * self.T_bg * (1 + 1e-12)):
            raise ValueError("refined_T must lie in [T_bg, 1.5 T_bg]")

    def to_json(self) -> str:
        obj = {
            "params": json.loads(self.params.to_json()),
            "T_bg": self.T_bg,
            "alpha_fit": self.alpha_fit, "alpha_se": self.alpha_se,
            "alpha1_fit": self.alpha1_fit, "alpha1_se": self.alpha1_se,
            "m0_hat": self.m0_hat, "m0_rel_unc": self.m0_rel_unc,
            "m1_hat": self.m1_hat, "m1_rel_unc": self.m1_rel_unc,
            "ssr_per_segment": list(self.ssr_per_segment),
            "refined_T": self.refined_T,
            "degenerate_tail": self.degenerate_tail,
        }
        return json.dumps(obj, sort_keys=True)

    def summary(self) -> str:
        lines = [
            f"T (segment fit)    {self.T_bg:.6g}",
            f"T (refined)        {self.refined_T:.6g}",
            f"alpha              {self.alpha_fit:.4f} +- {self.alpha_se:.4f}",
            f"alpha1             {self.alpha1_fit:.4f} +- {self.alpha1_se:.4f}",
            f"m0                 {self.m0_hat:.6g} (+- {100 * self.m0_rel_unc:.1f}%)",
            f"m1                 {self.m1_hat:.6g} (+- {100 * self.m1_rel_unc:.1f}%)",
            f"SSR per segment    {self.ssr_per_segment[0]:.4g} / "
            f"{self.ssr_per_segment[1]:.4g} / {self.ssr_per_segment[2]:.4g}",
        ]
        if self.degenerate_tail:
            lines.append("WARNING: degenerate third segment at the data edge")
        return "\n".join(lines)


class _PrefixOLS:
    """O(1) OLS over any contiguous index range of a fixed sample.

    Prefix sums are taken on globally centered data to keep the catastrophic
    cancellation in var/cov differences at bay.
    """

    def __init__(self, x: np.ndarray, y: np.ndarray):
        self.x_shift = float(x.mean())
        self.y_shift = float(y.mean())
        cx = x - self.x_shift
        cy = y - self.y_shift
        z = np.zeros(1)
        self.n_pts = np.concatenate([z, np.cumsum(np.ones_like(x))])
        self.sx = np.concatenate([z, np.cumsum(cx)])
        self.sy = np.concatenate([z, np.cumsum(cy)])
        self.sxx = np.concatenate([z, np.cumsum(cx * cx)])
        self.sxy = np.concatenate([z, np.cumsum(cx * cy)])
        self.syy = np.concatenate([z, np.cumsum(cy * cy)])

    def moments(self, i, j):
        """Segment moments (n, var_x, cov, var_y) for [i, j)."""
        i = np.asarray(i)
        j = np.asarray(j)
        with np.errstate(divide="ignore", invalid="ignore"):
            n = self.n_pts[j] - self.n_pts[i]
            sx = self.sx[j] - self.sx[i]
            sy = self.sy[j] - self.sy[i]
            var_x = (self.sxx[j] - self.sxx[i]) - sx * sx / n
            cov = (self.sxy[j] - self.sxy[i]) - sx * sy / n
            var_y = (self.syy[j] - self.syy[i]) - sy * sy / n
        return n, var_x, cov, var_y

    def ssr(self, i, j):
        n, var_x, cov, var_y = self.moments(i, j)
        with np.errstate(divide="ignore", invalid="ignore"):
            out = var_y - np.where(var_x > 0.0, cov * cov / var_x, 0.0)
        return np.maximum(out, 0.0)

    def line(self, i: int, j: int) -> tuple[float, float, float, float]:
        """slope, intercept (original coordinates), ssr, slope stderr."""
        n, var_x, cov, var_y = self.moments(i, j)
        n = float(n)
        if not (var_x > 0.0):
            raise EstimationError("zero x-variance in regression window")
        slope = float(cov / var_x)
        ssr = max(float(var_y - cov * cov / var_x), 0.0)
        sx = float(self.sx[j] - self.sx[i])
        sy = float(self.sy[j] - self.sy[i])
        intercept = (
            (sy - slope * sx) / n + self.y_shift - slope * self.x_shift
        )
        stderr = math.sqrt(ssr / ((n - 2.0) * var_x)) if n > 2 else 0.0
        return slope, intercept, ssr, stderr


def _ascending(ccdf: EmpiricalCCDF) -> tuple[np.ndarray, np.ndarray]:
    # stored richest-first; fits index from poorest to richest
    return ccdf.incomes[::-1].copy(), ccdf.p[::-1].copy()


def _candidate_indices(n: int, min_segment: int) -> np.ndarray:
    lo = min_segment
    hi = n - min_segment
    if hi <= lo:
        raise EstimationError(f"too few points ({n}) for three segments")
    # every 0.5% of the sample
    base = np.arange(lo, hi + 1, max(1, int(round(0.005 * n))))
    # log-spaced survival ranks so the grid can resolve a sub-percent tail class
    tail_counts = np.unique(np.geomspace(min_segment, max(min_segment + 1, 0.02 * n), 48).astype(int))
    tail = n - tail_counts
    idx = np.unique(np.concatenate([base, tail, [lo, hi]]))
    return idx[(idx >= lo) & (idx <= hi)]


def _search_segments(ccdf: EmpiricalCCDF, min_segment: int = MIN_SEGMENT):
    """Grid search over boundary index pairs; returns the optimum and profiles."""
    x, p = _ascending(ccdf)
    n = x.size
    if n < 30:
        raise EstimationError(f"need at least 30 points, got {n}")
    span = x.max() / x.min()
    if span < 1e3:
        raise EstimationError(
            f"need >= 3 decades of income span, got {math.log10(span):.2f}"
        )
    lnp = np.log(p)
    lnx = np.log(x)
    lin = _PrefixOLS(x, lnp)
    loglog = _PrefixOLS(lnx, lnp)

    idx = _candidate_indices(n, min_segment)
    k = idx.size
    ii = idx[:, None].repeat(k, 1)
    jj = idx[None, :].repeat(k, 0)
    valid = (jj - ii) >= min_segment
    ssr1 = lin.ssr(np.zeros_like(idx), idx)[:, None]
    ssr3 = loglog.ssr(idx, np.full_like(idx, n))[None, :]
    ssr2 = np.where(valid, loglog.ssr(np.minimum(ii, jj), np.maximum(ii, jj)), np.inf)
    total = np.where(valid, ssr1 + ssr2 + ssr3, np.inf)

    flat = int(np.argmin(total))  # first minimum: smallest m0, then smallest m1
    i_opt, j_opt = idx[flat // k], idx[flat % k]
    best = float(total.flat[flat])
    if not math.isfinite(best):
        raise EstimationError("no admissible segmentation found")

    # profile sets for the +5% SSR uncertainty band
    thresh = 1.05 * best if best > 0.0 else np.inf
    m0_profile = np.min(total, axis=1)
    m1_profile = np.min(total, axis=0)
    m0_set = x[idx[m0_profile <= thresh]]
    m1_set = x[idx[m1_profile <= thresh]]

    degenerate = j_opt >= n - min_segment
    if degenerate:
        warnings.warn(
            "third segment pinned at the data edge; no distinct high-income regime",
            DegenerateTailWarning,
            stacklevel=3,
        )
    return {
        "i": int(i_opt), "j": int(j_opt),
        "m0": float(x[i_opt]), "m1": float(x[j_opt]),
        "ssr": (float(ssr1[np.searchsorted(idx, i_opt), 0]),
                float(ssr2[np.searchsorted(idx, i_opt), np.searchsorted(idx, j_opt)]),
                float(ssr3[0, np.searchsorted(idx, j_opt)])),
        "m0_rel_unc": float((m0_set.max() - m0_set.min()) / (2.0 * x[i_opt])) if m0_set.size else 0.0,
        "m1_rel_unc": float((m1_set.max() - m1_set.min()) / (2.0 * x[j_opt])) if m1_set.size else 0.0,
        "degenerate": bool(degenerate),
        "x": x, "lnp": lnp, "lnx": lnx, "lin": lin, "loglog": loglog, "n": n,
    }


def detect_crossovers(ccdf: EmpiricalCCDF, min_segment: int = MIN_SEGMENT) -> tuple[float, float]:
    """Locate the exponential/power and power/power crossover incomes.

    Pure grid search over empirical candidate boundaries; the degenerate case
    (best third segment glued to the data edge) is reported by warning, with
    m1 returned at the edge candidate.
    """
    res = _search_segments(ccdf, min_segment)
    return res["m0"], res["m1"]


def _window(ccdf: EmpiricalCCDF, lo: float, hi: float) -> tuple[np.ndarray, np.ndarray]:
    x, p = _ascending(ccdf)
    mask = (x >= lo) & (x < hi)
    return x[mask], p[mask]


def fit_temperature(ccdf: EmpiricalCCDF, m_init: float, m0: float) -> float:
    """Income temperature from the exponential segment: OLS ln p on (m - m_init)."""
    x, p = _window(ccdf, m_init, m0)
    if x.size < MIN_SEGMENT:
        raise EstimationError(
            f"need >= {MIN_SEGMENT} points in [{m_init}, {m0}), got {x.size}"
        )
    ols = _PrefixOLS(x - m_init, np.log(p))
    slope, _, _, _ = ols.line(0, x.size)
    if slope >= 0.0:
        raise EstimationError("exponential window has non-decaying CCDF")
    return -1.0 / slope


def fit_pareto_exponent(ccdf: EmpiricalCCDF, lo: float, hi: float = math.inf) -> ParetoSegmentFit:
    """Weak Pareto fit over incomes in [lo, hi): OLS ln p on ln m.

    alpha = -slope, m_sp = exp(intercept/alpha); stderr is the OLS slope
    standard error (alpha and the slope differ only in sign).
    """
    x, p = _window(ccdf, lo, hi)
    if x.size < MIN_SEGMENT:
        raise EstimationError(
            f"need >= {MIN_SEGMENT} points in [{lo}, {hi}), got {x.size}"
        )
    ols = _PrefixOLS(np.log(x), np.log(p))
    slope, intercept, ssr, stderr = ols.line(0, x.size)
    if slope >= 0.0:
        raise EstimationError("window is not power-law decreasing")
    alpha = -slope
    m_sp = math.exp(intercept / alpha)
    return ParetoSegmentFit(
        fit=ParetoFit(m_sp=m_sp, alpha=alpha),
        stderr=stderr, ssr=ssr, n_points=int(x.size),
    )


def fit_rank(values) -> RankFit:
    """Rank-plot estimator: OLS of ln value on ln rank (richest = rank 1).

    alpha_rank is the slope magnitude; its reciprocal estimates the Pareto
    exponent; stderr propagates the slope error through the reciprocal.
    """
    try:
        arr = np.asarray(values, dtype=float)
    except (TypeError, ValueError):
        arr = np.array([v.income for v in values], dtype=float)
    if arr.size < 3:
        raise EstimationError(f"need at least 3 values, got {arr.size}")
    if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
        raise EstimationError("values must be positive and finite")
    ordered = np.sort(arr)[::-1]
    ln_rank = np.log(np.arange(1, arr.size + 1, dtype=float))
    ols = _PrefixOLS(ln_rank, np.log(ordered))
    slope, _, _, stderr = ols.line(0, arr.size)
    if slope >= 0.0:
        raise EstimationError("values do not decay with rank; exponent undefined")
    alpha_rank = -slope
    return RankFit(
        alpha_rank=alpha_rank,
        alpha_pareto=1.0 / alpha_rank,
        stderr=stderr / (alpha_rank * alpha_rank),
    )


def _log_ccdf_objective(ccdf: EmpiricalCCDF, params: ModelParams, n_grid: int = 800) -> float:
    model_pi = ccdf_eval_many(params, ccdf.incomes, n_grid=n_grid)
    resid = np.log(model_pi) - np.log(ccdf.p)
    return float(resid @ resid)


def refine_temperature(ccdf: EmpiricalCCDF, params: ModelParams) -> ModelParams:
    """Global one-parameter refinement of T on [T, 1.5 T].

    Minimizes the summed squared log-CCDF residual of the fully normalized
    model over every data point; T1 moves with T whenever the input had
    T1 = T (the imposed equal-temperature convention).  Returns the input
    params unchanged when no interior improvement is found.
    """
    tied = params.T1 == params.T

    def with_T(T: float) -> ModelParams:
        return normalize(replace(
            params, T=T, T1=(T if tied else params.T1), c_lo=None, c_hi=None
        ))

    def objective(T: float) -> float:
        return _log_ccdf_objective(ccdf, with_T(T))

    base = objective(params.T)
    res = optimize.minimize_scalar(
        objective, bounds=(params.T, 1.5 * params.T), method="bounded",
        options={"xatol": params.T * 1e-4},
    )
    if not res.success or res.fun >= base:
        return params
    return with_T(float(res.x))


def fit_full(ccdf: EmpiricalCCDF, m_init: float) -> FitReport:
    """Run the complete three-step procedure and assemble a FitReport.

    Steps: crossover search, segment fits for T/alpha/alpha1 (T1 = T
    imposed), model assembly and normalization, then global T refinement.
    """
    res = _search_segments(ccdf)
    m0_hat, m1_hat = res["m0"], res["m1"]
    T_bg = fit_temperature(ccdf, m_init, m0_hat)
    seg2 = fit_pareto_exponent(ccdf, m0_hat, m1_hat)
    seg3 = fit_pareto_exponent(ccdf, m1_hat)
    try:
        params = normalize(ModelParams(
            T=T_bg, T1=T_bg, alpha=seg2.fit.alpha, alpha1=seg3.fit.alpha,
            m0=m0_hat, m1=m1_hat, m_init=m_init,
        ))
    except (TailDivergenceError, ValueError) as exc:
        raise EstimationError(f"segment fits give no valid model: {exc}") from exc
    refined = refine_temperature(ccdf, params)
    return FitReport(
        params=refined,
        T_bg=T_bg,
        alpha_fit=seg2.fit.alpha, alpha_se=seg2.stderr,
        alpha1_fit=seg3.fit.alpha, alpha1_se=seg3.stderr,
        m0_hat=m0_hat, m0_rel_unc=res["m0_rel_unc"],
        m1_hat=m1_hat, m1_rel_unc=res["m1_rel_unc"],
        ssr_per_segment=res["ssr"],
        refined_T=refined.T,
        degenerate_tail=res["degenerate"],
    )
