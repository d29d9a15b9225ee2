import json
import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from incomedist import (
    LangevinCoeffs,
    ModelParams,
    ParetoFit,
    TailDivergenceError,
    bg_ccdf,
    ccdf_eval,
    ccdf_eval_many,
    ccdf_table,
    coeffs_to_effective,
    continuity_ratio,
    effective_to_coeffs,
    normalize,
    pareto_ccdf,
    pdf_eval,
    quantile,
    sample_incomes,
)

# Frozen two-branch constants for the bundled parameter sets, computed once
# against a 50-digit arbitrary-precision quadrature of the same integrals.
FROZEN_2008 = dict(
    c_lo=2.864600845852303e-05,
    c_hi=2.7614618021610556e-06,
    ratio=0.09639953175882832,
    pi_m0=2.140780083799867e-02,
    pi_m1=1.429816391449484e-03,
)
FROZEN_2006 = dict(
    c_lo=2.8347056094562234e-05,
    c_hi=1.961649762936117e-06,
    ratio=0.0692011811170902,
    pi_m0=3.145158498814864e-02,
    pi_m1=1.799632247033120e-03,
)


def test_bg_ccdf_exact_values():
    assert bg_ccdf(4.0e4, 0.01, 0.01) == 1.0
    assert bg_ccdf(4.0e4, 0.01, 0.01 + 4.0e4) == pytest.approx(0.367879441171442, rel=1e-12)
    assert bg_ccdf(4.0e4, 0.01, 0.01 + 8.0e4) == pytest.approx(0.135335283236613, rel=1e-12)


def test_pareto_ccdf_exact_value():
    fit = ParetoFit(m_sp=1.0e5, alpha=2.902)
    # 2**-2.902
    assert pareto_ccdf(fit, 2.0e5) == pytest.approx(0.133786087303328, rel=1e-12)
    assert pareto_ccdf(fit, 1.0e5) == 1.0


@pytest.mark.parametrize("fixture,frozen", [
    ("params08", FROZEN_2008), ("params06", FROZEN_2006),
])
def test_normalization_constants_frozen(fixture, frozen, request):
    params = request.getfixturevalue(fixture)
    assert params.c_lo == pytest.approx(frozen["c_lo"], rel=1e-10)
    assert params.c_hi == pytest.approx(frozen["c_hi"], rel=1e-10)
    assert continuity_ratio(params) == pytest.approx(frozen["ratio"], rel=1e-12)


@pytest.mark.parametrize("fixture,frozen", [
    ("params08", FROZEN_2008), ("params06", FROZEN_2006),
])
def test_ccdf_frozen_anchor_points(fixture, frozen, request):
    params = request.getfixturevalue(fixture)
    assert ccdf_eval(params, params.m_init) == pytest.approx(1.0, abs=1e-12)
    assert ccdf_eval(params, params.m0) == pytest.approx(frozen["pi_m0"], rel=1e-9)
    assert ccdf_eval(params, params.m1) == pytest.approx(frozen["pi_m1"], rel=1e-9)


def test_density_continuous_at_threshold(params08):
    eps = 1e-9 * params08.m1
    below = pdf_eval(params08, params08.m1 - eps)
    above = pdf_eval(params08, params08.m1 + eps)
    assert above == pytest.approx(below, rel=1e-6)
    # the branch constants themselves satisfy the matching identity exactly
    assert params08.c_hi == pytest.approx(params08.c_lo * continuity_ratio(params08), rel=1e-12)


def test_pdf_integrates_to_one(params08):
    # trapezoid over a dense log grid, plus the analytic power tail remainder
    ms = np.geomspace(params08.m_init, 1e12, 200000)
    dens = pdf_eval(params08, ms)
    total = np.trapezoid(dens, ms)
    k = params08.m0 / params08.T1
    tail = (
        params08.c_hi
        * math.exp(-k * math.pi / 2.0)
        * params08.m0 ** params08.alpha1
        / params08.alpha1
        * (1e12) ** -params08.alpha1
    )
    assert total + tail == pytest.approx(1.0, rel=1e-6)


def test_ccdf_eval_many_matches_scalar(params08):
    ms = np.geomspace(params08.m_init * 5, 50 * params08.m1, 25)
    bulk = ccdf_eval_many(params08, ms)
    scalar = np.array([ccdf_eval(params08, m) for m in ms])
    assert np.max(np.abs(bulk / scalar - 1.0)) < 5e-5


def test_ccdf_table_monotone(params08):
    grid_m, grid_pi = ccdf_table(params08, 1e9)
    assert grid_m[0] == params08.m_init
    assert grid_pi[0] == pytest.approx(1.0, abs=1e-12)
    assert np.all(np.diff(grid_pi) < 0.0)
    assert params08.m1 in grid_m  # threshold node inserted exactly


def test_quantile_round_trip(params08):
    for q in (0.1, 0.5, 0.9, 0.99, 0.9999):
        m = quantile(params08, q)
        assert ccdf_eval(params08, m) == pytest.approx(1.0 - q, abs=1e-6)
    with pytest.raises(ValueError):
        quantile(params08, 0.0)


def test_sampler_deterministic_and_bounded(params08):
    a = sample_incomes(params08, 500, seed=123)
    b = sample_incomes(params08, 500, seed=123)
    c = sample_incomes(params08, 500, seed=124)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)
    assert np.all(a >= params08.m_init)


def test_sampler_matches_model_ks(params08):
    samp = sample_incomes(params08, 20000, seed=5)
    xs = np.sort(samp)
    cdf = 1.0 - ccdf_eval_many(params08, xs)
    grid = np.arange(1, xs.size + 1) / xs.size
    ks = max(np.max(grid - cdf), np.max(cdf - (grid - 1.0 / xs.size)))
    assert ks < 0.015


def test_coeff_round_trip(params08):
    coeffs = effective_to_coeffs(params08)
    back = coeffs_to_effective(coeffs, params08.m1, params08.m_init)
    assert back.T == pytest.approx(params08.T, rel=1e-12)
    assert back.T1 == pytest.approx(params08.T1, rel=1e-12)
    assert back.alpha == pytest.approx(params08.alpha, rel=1e-12)
    assert back.alpha1 == pytest.approx(params08.alpha1, rel=1e-12)
    assert back.m0 == pytest.approx(params08.m0, rel=1e-12)
    assert coeffs.b == 1.0


def test_effective_to_coeffs_rejects_subunit_alpha(params08):
    from dataclasses import replace
    bad = replace(params08, alpha=0.9, c_lo=None, c_hi=None)
    with pytest.raises(ValueError):
        effective_to_coeffs(bad)


def test_divergent_tail_rejected():
    p = ModelParams(T=4e4, T1=4e4, alpha=2.5, alpha1=0.0,
                    m0=1e5, m1=3e5, m_init=0.01)
    with pytest.raises(TailDivergenceError):
        normalize(p)


def test_params_validation():
    with pytest.raises(ValueError):
        ModelParams(T=-1.0, T1=4e4, alpha=2.5, alpha1=0.8, m0=1e5, m1=3e5, m_init=0.01)
    with pytest.raises(ValueError):
        # m_init must sit below m0
        ModelParams(T=4e4, T1=4e4, alpha=2.5, alpha1=0.8, m0=1e5, m1=3e5, m_init=2e5)
    with pytest.raises(ValueError):
        # threshold below the crossover scale
        ModelParams(T=4e4, T1=4e4, alpha=2.5, alpha1=0.8, m0=4e5, m1=3e5, m_init=0.01)


def test_params_json_round_trip(params08):
    text = params08.to_json()
    keys = set(json.loads(text))
    assert keys == {"T", "T1", "alpha", "alpha1", "m0", "m1", "m_init"}
    back = ModelParams.from_json(text)
    assert back.is_normalized
    assert back.c_lo == pytest.approx(params08.c_lo, rel=1e-12)


def test_coeffs_json_round_trip():
    c = LangevinCoeffs(A0=496202.5316455696, a=1.902, A0_hi=496202.5316455696,
                       a_hi=-0.21, B0=1.96e10, b=1.0)
    assert LangevinCoeffs.from_json(c.to_json()) == c


@st.composite
def _param_sets(draw):
    T = draw(st.floats(1e3, 1e5))
    alpha = draw(st.floats(1.2, 4.0))
    alpha1 = draw(st.floats(0.3, 2.0))
    m0 = draw(st.floats(1e4, 5e5))
    m1 = m0 * draw(st.floats(1.0, 30.0))
    return ModelParams(T=T, T1=T, alpha=alpha, alpha1=alpha1,
                       m0=m0, m1=m1, m_init=0.01)


@given(_param_sets(), st.floats(0.2, 50.0))
def test_scale_covariance_of_ccdf(raw, lam):
    from dataclasses import replace
    params = normalize(raw)
    scaled = normalize(replace(
        raw, T=raw.T * lam, T1=raw.T1 * lam, m0=raw.m0 * lam,
        m1=raw.m1 * lam, m_init=raw.m_init * lam,
    ))
    for f in (0.5, 2.0, 10.0):
        m = f * raw.m0
        assert ccdf_eval(scaled, lam * m) == pytest.approx(
            ccdf_eval(params, m), rel=1e-8)


@given(_param_sets())
def test_ccdf_monotone_property(raw):
    params = normalize(raw)
    ms = np.geomspace(params.m_init, 100 * params.m1, 60)
    pi = ccdf_eval_many(params, ms)
    assert np.all(np.diff(pi) <= 0.0)
    assert pi[0] == pytest.approx(1.0, abs=1e-9)


def test_single_branch_reduction_threshold_independence():
    base = dict(T=5e4, T1=5e4, alpha=2.2, alpha1=2.2, m0=9e4, m_init=0.01)
    a = normalize(ModelParams(m1=2e5, **base))
    b = normalize(ModelParams(m1=3.3e6, **base))
    ms = np.geomspace(0.02, 5e7, 40)
    pa = ccdf_eval_many(a, ms)
    pb = ccdf_eval_many(b, ms)
    assert np.max(np.abs(pa / pb - 1.0)) < 1e-9
