"""T-dependence ratio test."""

import json
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from trawlkit import (
    CompactTriangleTrawl,
    ExponentialTrawl,
    GridScheme,
    PoissonSeed,
    PowerLawTrawl,
    SampledPath,
    simulate_points,
    tau_test,
    tdep_characterization,
)


def _poisson_path(trawl, n=4096, master_seed=0):
    delta = n**-0.5
    return simulate_points(trawl, PoissonSeed(1.0), GridScheme(n=n, delta=delta, master_seed=master_seed))


def test_report_fields_and_json():
    path = _poisson_path(ExponentialTrawl(1.0))
    report = tau_test(path, T=1.0)
    assert report.T == 1.0 and report.p == 4.0
    assert report.scaled == pytest.approx(math.sqrt(path.n * path.delta) * report.tau)
    assert not report.p_below_clt_threshold
    payload = json.loads(report.to_json())
    for key in ("tau", "scaled", "T", "p", "numerator", "denominator", "n", "delta"):
        assert key in payload


def test_tau_is_tail_to_head_ratio():
    path = _poisson_path(ExponentialTrawl(1.0))
    report = tau_test(path, T=1.0)
    assert report.tau == pytest.approx(report.numerator / report.denominator, rel=1e-12)
    assert report.tau >= 0.0 or report.numerator < 0.0


def test_small_p_advisory_flag():
    path = _poisson_path(ExponentialTrawl(1.0))
    assert tau_test(path, T=1.0, p=2.0).p_below_clt_threshold
    assert not tau_test(path, T=1.0, p=3.5).p_below_clt_threshold


def test_null_vs_alternative_tendency():
    """tau is near 0 when a vanishes beyond T and visibly positive when not."""
    null_scaled = [
        abs(tau_test(_poisson_path(CompactTriangleTrawl(1.0), n=2**14, master_seed=k), T=1.0).scaled)
        for k in range(20)
    ]
    alt_scaled = [
        abs(tau_test(_poisson_path(ExponentialTrawl(1.0), n=2**14, master_seed=k), T=1.0).scaled)
        for k in range(20)
    ]
    assert np.median(alt_scaled) > 2 * np.median(null_scaled)
    assert np.median(alt_scaled) > np.quantile(null_scaled, 0.95)


@settings(max_examples=20, deadline=None)
@given(c=st.floats(0.2, 5.0), shift=st.floats(-3.0, 3.0))
def test_tau_affine_invariant(c, shift):
    """The ratio statistic ignores affine rescalings of the path."""
    rng = np.random.default_rng(8)
    values = rng.standard_normal(300)
    base = tau_test(SampledPath(0.1, values), T=1.0).tau
    transformed = tau_test(SampledPath(0.1, c * values + shift), T=1.0).tau
    assert transformed == pytest.approx(base, rel=1e-9, abs=1e-9)


def test_validation():
    path = _poisson_path(ExponentialTrawl(1.0), n=64)
    with pytest.raises(ValueError):
        tau_test(path, T=0.0)
    with pytest.raises(ValueError):
        tau_test(path, T=1.0, p=0.0)
    with pytest.raises(ValueError):
        tau_test(path, T=(path.n + 5) * path.delta)
    flat = SampledPath(0.1, np.zeros(50))
    with pytest.raises(ValueError):
        tau_test(flat, T=1.0)


def test_tdep_characterization():
    assert tdep_characterization(CompactTriangleTrawl(1.0), 1.0)
    assert tdep_characterization(CompactTriangleTrawl(1.0), 2.0)
    assert not tdep_characterization(CompactTriangleTrawl(1.0), 0.5)
    assert not tdep_characterization(ExponentialTrawl(1.0), 100.0)
    assert not tdep_characterization(PowerLawTrawl(2.0, 1.0), 10.0)
    with pytest.raises(ValueError):
        tdep_characterization(ExponentialTrawl(1.0), -1.0)
