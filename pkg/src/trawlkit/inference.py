"""A memory-robust test for T-dependence.

A trawl process is T-dependent exactly when its trawl function vanishes
beyond T, equivalently when the tail functional ``int_T^inf |a(s)|^p ds`` is
zero for some (hence every) p > 0.  The ratio statistic

    tau = [delta * sum_{l=0}^{n-1} |a_hat(l delta)|^p]
        / [delta * sum_{l=0}^{ceil(T/delta)-1} |a_hat(l delta)|^p]  -  1

compares the full tail sum with its head part; scaled by sqrt(n * delta) it
vanishes under the null and diverges otherwise, provided p > 3.  No critical
value is attached: the limit theory gives no null CLT, so thresholds must
come from Monte Carlo quantiles.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .estimators import estimate_trawl
from .models import TrawlSpec
from .simulate import SampledPath

__all__ = ["TestReport", "tau_test", "tdep_characterization"]


@dataclass(frozen=True)
class TestReport:
    """Outcome of the T-dependence ratio test."""

    T: float
    p: float
    tau: float
    scaled: float
    numerator: float
    denominator: float
    n: int
    delta: float
    p_below_clt_threshold: bool

    def to_json(self, **kwargs) -> str:
        return json.dumps(asdict(self), **kwargs)


def tau_test(path: SampledPath, T: float, p: float = 4.0, method: str = "fft") -> TestReport:
    """Compute the T-dependence ratio statistic on an observed path.

    ``p`` defaults to 4, the smallest integer satisfying the p > 3 moment
    condition of the divergence result; smaller p is allowed but flagged.
    """
    if T <= 0:
        raise ValueError("T must be positive")
    if p <= 0:
        raise ValueError("p must be positive")
    n, delta = path.n, path.delta
    if T > (n - 1) * delta:
        raise ValueError("T exceeds the observed horizon (n-1)*delta")
    est = estimate_trawl(path, method=method)
    powers = np.abs(est.a_hat) ** p
    head_terms = int(math.ceil(T / delta - 1e-12))
    denominator = float(delta * np.sum(powers[:head_terms]))
    full = float(delta * np.sum(powers))
    numerator = full - denominator  # tail part, = Lambda_T^n(|x|^p)
    if denominator <= 0.0:
        raise ValueError("degenerate path: head functional vanished")
    tau = full / denominator - 1.0
    return TestReport(
        T=T,
        p=p,
        tau=tau,
        scaled=math.sqrt(n * delta) * tau,
        numerator=numerator,
        denominator=denominator,
        n=n,
        delta=delta,
        p_below_clt_threshold=p <= 3.0,
    )


def tdep_characterization(trawl: TrawlSpec, T: float) -> bool:
    """Analytic ground truth: is the trawl process T-dependent?"""
    if T < 0:
        raise ValueError("T must be non-negative")
    return float(trawl.tail_integral(T)) == 0.0
