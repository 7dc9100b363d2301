"""Asymptotic-variance theory of the trawl-function estimator.

Everything here is deterministic: the three sigma kernels, their symmetrized
sum Sigma_a, the pointwise asymptotic variance sigma_a^2(t), the limit
covariance integrals of the head and tail functionals, and the ten limit
kernels of the martingale-block decomposition whose sum reproduces Sigma_a.

Closed-form tail integrals from the trawl spec are used wherever a term is a
plain tail mass; everything else goes through adaptive quadrature with the
integrand split at every kink so the rule sees smooth pieces.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate

from .estimators import TestFunction
from .models import TrawlSpec

__all__ = ["QuadratureError", "AvarKernel"]


class QuadratureError(RuntimeError):
    """Raised when adaptive quadrature fails to converge."""


@dataclass(frozen=True)
class AvarKernel:
    """Asymptotic variance kernels for a trawl spec and seed fourth moment.

    ``k4`` is the fourth moment of the Levy measure of the seed (0 for a
    Gaussian seed, the rate for a Poisson seed).
    """

    trawl: TrawlSpec
    k4: float = 0.0
    abs_tol: float = 1e-9
    rel_tol: float = 1e-7

    def __post_init__(self):
        if self.k4 < 0:
            raise ValueError("k4 must be non-negative")

    # -- plumbing ---------------------------------------------------------

    def _quad(self, f, lo, hi, tol_scale=1.0, kinks=()):
        """Adaptive quadrature with the trawl support end as a hard cutoff.

        ``kinks`` lists points where the integrand loses smoothness; those
        inside the (finite) range are handed to the rule as breakpoints.
        """
        hi = min(hi, self.trawl.support_end) if hi == math.inf else hi
        if lo >= hi:
            return 0.0
        points = sorted({p for p in kinks if lo < p < hi}) if hi < math.inf else None
        res, err = integrate.quad(
            f,
            lo,
            hi,
            epsabs=self.abs_tol * tol_scale,
            epsrel=self.rel_tol,
            limit=200,
            points=points or None,
        )
        if not math.isfinite(res):
            raise QuadratureError(f"quadrature diverged on [{lo}, {hi}]")
        if err > max(self.abs_tol * tol_scale, self.rel_tol * abs(res)) * 50:
            raise QuadratureError(f"quadrature failed to converge on [{lo}, {hi}]")
        return res

    def _cross(self, shift_a: float, shift_b: float, lo: float, hi: float = math.inf):
        """int_lo^hi a(u + shift_a) a(u + shift_b) du with shifts >= -lo."""
        a = self.trawl.a
        end = self.trawl.support_end
        return self._quad(
            lambda u: float(a(u + shift_a) * a(u + shift_b)),
            lo,
            hi,
            kinks=(end - shift_a, end - shift_b),
        )

    # -- sigma kernels ----------------------------------------------------

    def sigma1(self, s: float, r: float) -> float:
        """k4 * a(max(s, r))."""
        _check_times(s, r)
        return self.k4 * float(self.trawl.a(max(s, r)))

    def sigma2(self, s: float, r: float) -> float:
        """int_0^inf a(u) a(|u - (s-r)|) sgn(u - (s-r)) du, sgn(0) := 0."""
        _check_times(s, r)
        d = s - r
        if d <= 0:
            return self._cross(0.0, -d, 0.0)
        end = self.trawl.support_end
        head = self._quad(
            lambda u: float(self.trawl.a(u) * self.trawl.a(d - u)),
            0.0,
            d,
            kinks=(end, d - end),
        )
        return self._cross(0.0, -d, d) - head

    def sigma3(self, s: float, r: float) -> float:
        """int_0^inf a(u + r) a(|s - u|) sgn(s - u) du, sgn(0) := 0."""
        _check_times(s, r)
        end = self.trawl.support_end
        head = self._quad(
            lambda u: float(self.trawl.a(u + r) * self.trawl.a(s - u)),
            0.0,
            s,
            kinks=(end - r, s - end),
        )
        return head - self._cross(r, -s, s)

    def sigma_a_matrix(self, s: float, r: float) -> float:
        """Sigma_a(s, r): sigma1 plus the symmetrized sigma2 and sigma3."""
        return (
            self.sigma1(s, r)
            + self.sigma2(s, r)
            + self.sigma2(r, s)
            + self.sigma3(s, r)
            + self.sigma3(r, s)
        )

    def sigma_a_sq(self, t: float) -> float:
        """Pointwise asymptotic variance of the trawl-function estimator.

        Independent four-term form; agrees with ``sigma_a_matrix(t, t)`` and
        serves as its cross-check.
        """
        _check_times(t)
        a = self.trawl.a
        term1 = self.k4 * float(a(t))
        term2 = 2.0 * self._cross(0.0, 0.0, 0.0)
        end = self.trawl.support_end
        term3 = 2.0 * self._quad(
            lambda u: float(a(t - u) * a(t + u)), 0.0, t, kinks=(t - end, end - t)
        )
        term4 = 2.0 * self._cross(-t, t, t)
        return term1 + term2 + term3 - term4

    # -- limit covariances -------------------------------------------------

    def limit_cov_psi(self, g: TestFunction, t: float, s: float) -> float:
        """Limit covariance of the head-functional CLT at times (t, s).

        Iterated adaptive quadrature of dg(a(u)) Sigma_a(u, r) dg(a(r)) over
        [0, t] x [0, s]; the inner integral splits at r = u where the kernel
        has a ridge.
        """
        _check_times(t, s)
        _require_dg(g)
        if t == 0.0 or s == 0.0:
            return 0.0

        def inner(u):
            du = float(g.dg(self.trawl.a(u)))

            def f(r):
                return float(g.dg(self.trawl.a(r))) * self.sigma_a_matrix(u, r)

            lo_part = self._quad(f, 0.0, min(u, s), tol_scale=10.0)
            hi_part = self._quad(f, min(u, s), s, tol_scale=10.0)
            return du * (lo_part + hi_part)

        res, err = integrate.quad(inner, 0.0, t, epsabs=1e-7, epsrel=1e-5, limit=80)
        if not math.isfinite(res):
            raise QuadratureError("outer quadrature diverged")
        return res

    def limit_cov_lambda(self, g: TestFunction, t: float, s: float) -> float:
        """Limit covariance of the tail-functional CLT at times (t, s).

        Same kernel as the head functional but integrated over the tails
        [t, inf) x [s, inf); requires the dg(a(u)) factor to decay, i.e. a
        test function vanishing fast enough at 0.
        """
        _check_times(t, s)
        _require_dg(g)
        if g.p is None or g.d is None:
            raise ValueError("tail covariance needs smoothness metadata (d, p, q)")
        if g.d + g.p <= 3.0 and not self.trawl.support_end < math.inf:
            raise ValueError(
                "tail CLT needs a test function of power order > 3 (quadratic g has a "
                "non-central limit instead); got d + p = {:g}".format(g.d + g.p)
            )
        end = self.trawl.support_end
        if end < math.inf and t >= end and s >= end:
            return 0.0

        def inner(u):
            du = float(g.dg(self.trawl.a(u)))
            if du == 0.0:
                return 0.0

            def f(r):
                return float(g.dg(self.trawl.a(r))) * self.sigma_a_matrix(u, r)

            mid = max(u, s)
            lo_part = self._quad(f, s, mid, tol_scale=10.0)
            hi_part = self._quad(f, mid, math.inf, tol_scale=10.0)
            return du * (lo_part + hi_part)

        hi = end if end < math.inf else math.inf
        res, err = integrate.quad(inner, t, hi, epsabs=1e-7, epsrel=1e-5, limit=80)
        if not math.isfinite(res):
            raise QuadratureError("outer quadrature diverged")
        return res

    # -- martingale-block limit kernels -----------------------------------

    def appendix_f(self, l1: int, l2: int, s: float, r: float) -> float:
        """Limit kernel of block pair (l1, l2), 1 <= l1 <= l2 <= 4.

        The ten kernels arise as limits of conditional-covariance sums of
        the four martingale blocks of the estimation error; their symmetrized
        sum equals Sigma_a, which ``decomposition_residual`` verifies.
        """
        if not 1 <= l1 <= l2 <= 4:
            raise ValueError("need 1 <= l1 <= l2 <= 4")
        _check_times(s, r)
        a = self.trawl.a
        A = self.trawl.tail_integral
        a0 = float(a(0.0))
        hi, lo = max(s, r), min(s, r)

        if (l1, l2) == (1, 1):
            return self.k4 * float(a(hi)) + a0 * float(A(hi - lo) - A(hi))
        if (l1, l2) == (2, 2):
            return a0 * float(A(hi))
        if (l1, l2) == (3, 3):
            return self._cross(0.0, -hi, hi) + a0 * float(A(hi - lo) - A(hi))
        if (l1, l2) == (4, 4):
            return a0 * float(A(hi)) - self._cross(0.0, -hi, hi)
        end = self.trawl.support_end
        if (l1, l2) == (1, 2):
            return self._quad(
                lambda u: float(a(u) * a(s + r - u)), r, s + r, kinks=(end, s + r - end)
            )
        if (l1, l2) == (1, 3):
            gap = float(a(max(s - r, 0.0)))
            part1 = self._quad(
                lambda u: (float(a(u - s)) - float(a(u))) * (gap - float(a(u - r))),
                hi,
                math.inf if end == math.inf else end + s,
                kinks=(end, end + r, end + s),
            )
            part2 = self._quad(
                lambda u: float(a(u)) * (float(a(max(s - r - u, 0.0))) - gap),
                0.0,
                s,
                kinks=(end, s - r, s - r - end),
            )
            return -part1 - part2
        if (l1, l2) == (1, 4):
            return -self._quad(
                lambda u: (float(a(u - s)) - float(a(u))) * float(a(u + r)),
                s,
                math.inf if end == math.inf else end + s,
                kinks=(end, end - r, end + s),
            )
        if (l1, l2) == (2, 3):
            return -self._cross(0.0, r, s)
        if (l1, l2) == (2, 4):
            gap = float(a(max(s - r, 0.0)))
            part1 = (a0 - gap) * float(A(s))
            part2 = self._quad(
                lambda u: float(a(u)) * (gap - float(a(u - r))),
                hi,
                math.inf if end == math.inf else end + r,
                kinks=(end, end + r),
            )
            return -part1 - part2
        # (3, 4) vanishes identically.
        return 0.0

    def decomposition_residual(self, s: float, r: float) -> float:
        """|sum of all (symmetrized) limit kernels - Sigma_a(s, r)|."""
        total = sum(self.appendix_f(l, l, s, r) for l in range(1, 5))
        for l1 in range(1, 4):
            for l2 in range(l1 + 1, 5):
                total += self.appendix_f(l1, l2, s, r) + self.appendix_f(l1, l2, r, s)
        return abs(total - self.sigma_a_matrix(s, r))


def _check_times(*values):
    for v in values:
        if v < 0:
            raise ValueError("time arguments must be non-negative")


def _require_dg(g: TestFunction):
    if g.dg is None:
        raise ValueError("limit covariances need the derivative dg of the test function")
