"""Bundled parameter sets: EU-wide equivalised-income fits, 2006 and 2008 waves.

Temperatures and crossover incomes are in nominal EUR/year of the survey
wave; m_init is the 1-cent accounting floor used throughout.  The reference
class statistics are the published values these parameter sets should
reproduce (fractions in percent of population, ratios dimensionless).
"""

from __future__ import annotations

from incomedist.model import ModelParams, normalize

__all__ = ["EU_2006", "EU_2008", "PRESETS", "REFERENCE_STATS", "preset_params"]

EU_2006 = dict(
    T=43.0e3, T1=43.0e3, alpha=3.171, alpha1=0.90,
    m0=1.20e5, m1=3.70e5, m_init=0.01,
)

EU_2008 = dict(
    T=39.5e3, T1=39.5e3, alpha=2.902, alpha1=0.79,
    m0=1.40e5, m1=4.00e5, m_init=0.01,
)

PRESETS = {"2006": EU_2006, "2008": EU_2008}

REFERENCE_STATS = {
    "2006": dict(f_low=96.85, f_med=2.97, f_high=0.18, r1=32.66, r2=16.48),
    "2008": dict(f_low=97.86, f_med=2.00, f_high=0.14, r1=48.98, r2=13.97),
}


def preset_params(year: str) -> ModelParams:
    """Normalized ModelParams for a bundled wave ("2006" or "2008")."""
    try:
        raw = PRESETS[str(year)]
    except KeyError:
        raise KeyError(f"no preset for {year!r}; have {sorted(PRESETS)}") from None
    return normalize(ModelParams(**raw))
