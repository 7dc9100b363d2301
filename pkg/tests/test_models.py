"""Trawl families and seed laws against quadrature and sampling oracles."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from trawlkit import (
    CompactTriangleTrawl,
    ExponentialTrawl,
    GammaSeed,
    GaussianSeed,
    PoissonSeed,
    PowerLawTrawl,
    sample_seed,
    seed_from_dict,
    trawl_from_dict,
)

from conftest import ALL_TRAWLS, ALL_SEEDS


# -- closed forms vs quadrature ------------------------------------------


@pytest.mark.parametrize("t", [0.0, 0.3, 1.0, 2.7])
def test_tail_integral_matches_quadrature(trawl, t):
    hi = trawl.support_end if trawl.support_end < math.inf else np.inf
    expect, _ = integrate.quad(lambda s: float(trawl.a(s)), t, hi)
    assert float(trawl.tail_integral(t)) == pytest.approx(expect, abs=1e-9)


@pytest.mark.parametrize("p", [1.0, 2.0, 4.0])
@pytest.mark.parametrize("t", [0.0, 0.8])
def test_power_tail_integral_matches_quadrature(trawl, t, p):
    hi = trawl.support_end if trawl.support_end < math.inf else np.inf
    expect, _ = integrate.quad(lambda s: float(trawl.a(s)) ** p, t, hi)
    assert float(trawl.power_tail_integral(t, p)) == pytest.approx(expect, abs=1e-9)


def test_phi_reconstructs_a(trawl):
    for s in [0.0, 0.2, 1.1]:
        hi = trawl.support_end if trawl.support_end < math.inf else np.inf
        expect, _ = integrate.quad(lambda y: float(trawl.phi(y)), s, hi)
        assert float(trawl.a(s)) == pytest.approx(expect, abs=1e-8)


def test_autocorrelation_normalized(trawl):
    h = np.array([0.0, 0.5, 1.5, 4.0])
    rho = trawl.autocorrelation(h)
    assert rho[0] == pytest.approx(1.0)
    assert np.all(np.diff(rho) <= 1e-15)
    assert np.all((0.0 <= rho) & (rho <= 1.0))


# -- invariants ----------------------------------------------------------


@settings(max_examples=25, deadline=None)
@given(t1=st.floats(0.0, 5.0), t2=st.floats(0.0, 5.0))
def test_tail_integral_monotone(t1, t2):
    for trawl in ALL_TRAWLS:
        lo, hi = sorted((t1, t2))
        assert float(trawl.tail_integral(lo)) >= float(trawl.tail_integral(hi)) - 1e-15


@settings(max_examples=25, deadline=None)
@given(t=st.floats(0.0, 5.0))
def test_power_tail_integral_reduces_to_tail_integral(t):
    for trawl in ALL_TRAWLS:
        assert float(trawl.power_tail_integral(t, 1.0)) == pytest.approx(
            float(trawl.tail_integral(t)), rel=1e-12, abs=1e-300
        )


@settings(max_examples=50, deadline=None)
@given(y=st.floats(1e-6, 1.0))
def test_inverse_a_round_trip(y):
    for trawl in ALL_TRAWLS:
        s = float(trawl.inverse_a(y))
        assert float(trawl.a(s)) == pytest.approx(y, rel=1e-12, abs=1e-12)


@settings(max_examples=50, deadline=None)
@given(frac=st.floats(1e-6, 1.0 - 1e-9))
def test_tail_integral_inverse_round_trip(frac):
    for trawl in ALL_TRAWLS:
        m = frac * trawl.leb_A
        t = float(trawl.tail_integral_inverse(m))
        assert float(trawl.tail_integral(t)) == pytest.approx(m, rel=1e-10)


def test_a_non_increasing(trawl):
    s = np.linspace(0.0, 6.0, 200)
    vals = trawl.a(s)
    assert np.all(np.diff(vals) <= 1e-15)


def test_support_flags():
    assert CompactTriangleTrawl(1.0).violates_assumption1
    assert CompactTriangleTrawl(2.0).support_end == 2.0
    assert not ExponentialTrawl(1.0).violates_assumption1
    assert math.isinf(ExponentialTrawl(1.0).support_end)
    assert PowerLawTrawl(2.5, 1.0).tail_exponent == 2.5
    assert math.isinf(ExponentialTrawl(1.0).tail_exponent)


# -- seed laws -----------------------------------------------------------


def test_seed_cumulants():
    g = GaussianSeed(0.3, 2.0)
    assert (g.kappa1, g.kappa2, g.kappa3, g.kappa4, g.k4_levy) == (0.3, 2.0, 0.0, 0.0, 0.0)
    p = PoissonSeed(0.7)
    assert (p.kappa1, p.kappa2, p.kappa3, p.kappa4, p.k4_levy) == (0.7,) * 5
    gam = GammaSeed(2.0, 0.5)
    assert gam.kappa1 == pytest.approx(1.0)
    assert gam.kappa2 == pytest.approx(0.5)
    assert gam.kappa3 == pytest.approx(0.5)
    assert gam.kappa4 == pytest.approx(0.75)
    assert gam.k4_levy == gam.kappa4


def test_unit_variance_flag():
    assert GaussianSeed(0.0, 1.0).unit_variance
    assert PoissonSeed(1.0).unit_variance
    assert not GammaSeed(2.0, 0.5).unit_variance


def test_sample_moments(seed_spec):
    rng = np.random.default_rng(123)
    area = 1.7
    draws = seed_spec.sample_iid(area, 200_000, rng)
    se_mean = math.sqrt(seed_spec.kappa2 * area / len(draws))
    assert np.mean(draws) == pytest.approx(seed_spec.kappa1 * area, abs=6 * se_mean)
    assert np.var(draws) == pytest.approx(seed_spec.kappa2 * area, rel=0.03)


def test_sample_additivity(seed_spec):
    """L(B1 u B2) =d L(B1) + L(B2): variance of split draws matches."""
    rng = np.random.default_rng(5)
    split = seed_spec.sample_iid(0.6, 100_000, rng) + seed_spec.sample_iid(0.4, 100_000, rng)
    whole = seed_spec.sample_iid(1.0, 100_000, rng)
    assert np.mean(split) == pytest.approx(np.mean(whole), abs=0.05 * max(1.0, seed_spec.kappa1))
    assert np.var(split) == pytest.approx(np.var(whole), rel=0.05)


def test_sample_seed_zero_area(seed_spec):
    rng = np.random.default_rng(0)
    assert sample_seed(seed_spec, 0.0, rng) == 0.0
    out = sample_seed(seed_spec, np.array([0.0, 1.0, 0.0]), rng)
    assert out[0] == 0.0 and out[2] == 0.0


def test_sample_seed_rejects_negative_area(seed_spec):
    rng = np.random.default_rng(0)
    with pytest.raises(ValueError):
        sample_seed(seed_spec, -0.1, rng)


# -- dict round trips and validation -------------------------------------


def test_trawl_dict_round_trip(trawl):
    assert trawl_from_dict(trawl.to_dict()) == trawl


def test_seed_dict_round_trip(seed_spec):
    assert seed_from_dict(seed_spec.to_dict()) == seed_spec


@pytest.mark.parametrize(
    "cfg",
    [
        {"family": "nope"},
        {},
        {"family": "exponential", "rate": 1.0, "bogus": 2},
        {"family": "triangle", "rate": 1.0},
    ],
)
def test_trawl_from_dict_rejects_bad_config(cfg):
    with pytest.raises(ValueError):
        trawl_from_dict(cfg)


@pytest.mark.parametrize(
    "build",
    [
        lambda: ExponentialTrawl(0.0),
        lambda: ExponentialTrawl(-1.0),
        lambda: PowerLawTrawl(1.0, 1.0),
        lambda: PowerLawTrawl(2.0, -1.0),
        lambda: CompactTriangleTrawl(0.0),
        lambda: GaussianSeed(0.0, 0.0),
        lambda: PoissonSeed(-1.0),
        lambda: GammaSeed(0.0, 1.0),
    ],
)
def test_parameter_validation(build):
    with pytest.raises(ValueError):
        build()


def test_power_tail_integral_rejects_small_p(trawl):
    with pytest.raises(ValueError):
        trawl.power_tail_integral(0.0, 0.5)


def test_inverse_a_domain(trawl):
    with pytest.raises(ValueError):
        trawl.inverse_a(0.0)
    with pytest.raises(ValueError):
        trawl.inverse_a(1.5)
