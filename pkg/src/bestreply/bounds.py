"""Competitive-ratio constants for polynomial costs of maximum degree d.

Quantities that grow like ``d**(d+1)`` are returned as base-10 logarithms;
``materialize`` turns one back into a float when it fits.
"""

from __future__ import annotations

import math
import numbers
from dataclasses import dataclass
from typing import Callable, NamedTuple

# tight ratio for d = 1 on unweighted instances, (phi + 1)**2 / phi rounded up
UNWEIGHTED_D1_RATIO = 4.24
# tight ratio for d = 1 on weighted instances
WEIGHTED_D1_RATIO = 3 + 2 * math.sqrt(2)

_MATERIALIZE_MAX = 300.0


def lambert_w(x: float) -> float:
    """Principal branch of Lambert-W on [0, inf): the w >= 0 with w*exp(w) = x."""
    x = float(x)
    if math.isnan(x) or x < 0:
        raise ValueError(f"lambert_w is defined for x >= 0, got {x}")
    if x == 0:
        return 0.0
    if math.isinf(x):
        return math.inf
    w = math.log1p(x)
    for _ in range(64):
        ew = math.exp(w)
        f = w * ew - x
        denom = ew * (w + 1) - (w + 2) * f / (2 * w + 2)
        step = f / denom
        w -= step
        if abs(step) <= 4e-16 * (1 + abs(w)):
            break
    if not (w >= 0 and abs(w * math.exp(w) - x) <= 1e-13 * max(1.0, x)):
        w = bisect(lambda t: t * math.exp(t) - x, 0.0, min(max(1.0, x), 710.0))
    return w


def bisect(f: Callable[[float], float], lo: float, hi: float) -> float:
    """Root of a monotone ``f`` on [lo, hi], bisected to float resolution."""
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise ValueError(f"no sign change on [{lo}, {hi}]")
    rising = fhi > 0
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = f(mid)
        if fm == 0:
            return mid
        if (fm > 0) == rising:
            hi = mid
        else:
            lo = mid
    return lo if abs(f(lo)) <= abs(f(hi)) else hi


# -- Psi_d: (d+1)(x+1)^d = x^(d+1) ---------------------------------------------


def _psi_log_gap(d: float, x: float) -> float:
    # log of (d+1)(x+1)^d / x^(d+1); decreasing in x
    return math.log(d + 1) + d * math.log1p(x) - (d + 1) * math.log(x)


def psi_bracket(d: float) -> tuple[float, float]:
    hi = d / lambert_w(d / (d + 1))
    return hi - 1, hi


def psi(d: float) -> float:
    """Unique positive root of ``(d+1)(x+1)**d = x**(d+1)``."""
    if d < 0:
        raise ValueError("psi needs d >= 0")
    if d == 0:
        return 1.0
    lo, hi = psi_bracket(d)
    lo = max(lo, hi * 1e-12) * (1 - 1e-12)
    hi *= 1 + 1e-12
    return bisect(lambda x: -_psi_log_gap(d, x), lo, hi)


def psi_residual(d: float, x: float) -> float:
    """|(d+1)(x+1)^d - x^(d+1)| / x^(d+1), evaluated through logarithms."""
    return abs(math.expm1(_psi_log_gap(d, x)))


# -- Xi_d -----------------------------------------------------------------------


def _check_xi_degree(d) -> int:
    if isinstance(d, bool) or not isinstance(d, numbers.Integral):
        raise TypeError(f"xi is defined for integer d, got {d!r}")
    if d < 2:
        raise ValueError(f"xi is defined for d >= 2, got {d}")
    return int(d)


def _xi_coefficient(d: int, lemma_variant: bool) -> float:
    return 2 - 1 / d if lemma_variant else 2.0


def xi_rearranged(x: float, d: int, lemma_variant: bool = False) -> float:
    """``x^2 e^(-1/x) - x^2 + k x - e^(1/x)(1 + 1/d)``, increasing in x.

    ``k`` is 2, or ``2 - 1/d`` for the variant. The root of this function is
    the root of ``d (k x e^(1/x) + x^2 - e^(2/x) - x^2 e^(1/x)) = e^(2/x)``.
    """
    k = _xi_coefficient(d, lemma_variant)
    return x * x * math.expm1(-1 / x) + k * x - math.exp(1 / x) * (1 + 1 / d)


def xi_solver_bracket(d: int, lemma_variant: bool = False) -> tuple[float, float]:
    """Bracket from ``1 <= x e^(-1/x) - x + 2 <= 2``, valid for every x > 0."""
    d = _check_xi_degree(d)
    if lemma_variant:
        return 1 / lambert_w((2 * d - 1) / (d + 1)), 1 / lambert_w((d - 1) / (d + 1))
    return 1 / lambert_w(2 * d / (d + 1)), 1 / lambert_w(d / (d + 1))


def xi(d: int, lemma_variant: bool = False) -> float:
    """Root of ``d (2x e^(1/x) + x^2 - e^(2/x) - x^2 e^(1/x)) = e^(2/x)``.

    With ``lemma_variant`` the leading 2 becomes ``2 - 1/d``.
    """
    d = _check_xi_degree(d)
    lo, hi = xi_solver_bracket(d, lemma_variant)
    return bisect(lambda x: xi_rearranged(x, d, lemma_variant), lo * (1 - 1e-12), hi * (1 + 1e-12))


def xi_residual(d: int, x: float, lemma_variant: bool = False) -> float:
    """Relative residual of the defining equation in its original form."""
    k = _xi_coefficient(d, lemma_variant)
    e1, e2 = math.exp(1 / x), math.exp(2 / x)
    lhs = d * (k * x * e1 + x * x - e2 - x * x * e1)
    return abs(lhs - e2) / e2


def xi_interval(d: int) -> tuple[float, float]:
    """``[1/W((1.27d-1)/(d+1)), 1/W((1.20d-1)/(d+1))]``."""
    return 1 / lambert_w((1.27 * d - 1) / (d + 1)), 1 / lambert_w((1.20 * d - 1) / (d + 1))


def xi_interval_tight(d: int) -> tuple[float, float]:
    """``[1/W(1.27d/(d+1)), 1/W(1.20d/(d+1))]``."""
    return 1 / lambert_w(1.27 * d / (d + 1)), 1 / lambert_w(1.20 * d / (d + 1))


# -- bounds ---------------------------------------------------------------------


def materialize(log10_value: float | None) -> float | None:
    if log10_value is None or log10_value > _MATERIALIZE_MAX:
        return None
    return 10.0**log10_value


def unweighted_upper_bound(d: int) -> float:
    """log10 of the unweighted ratio bound ``d (xi_d d)^(d+1)``; 4.24 for d = 1."""
    if d < 1:
        raise ValueError("d must be >= 1")
    if d == 1:
        return math.log10(UNWEIGHTED_D1_RATIO)
    return math.log10(d) + (d + 1) * math.log10(xi(d) * d)


class WeightedBound(NamedTuple):
    psi_power: float  # log10 psi_d^(d+1)
    closed_form: float  # log10 (d / W(d/(d+1)))^(d+1)


def weighted_upper_bound(d: int) -> WeightedBound:
    if d < 1:
        raise ValueError("d must be >= 1")
    return WeightedBound(
        (d + 1) * math.log10(psi(d)),
        (d + 1) * math.log10(d / lambert_w(d / (d + 1))),
    )


class SmoothnessParams(NamedTuple):
    log10_lambda: float
    mu: float


def smoothness_params_unweighted(d: int) -> SmoothnessParams:
    """``lambda = (xi_d d)^(d+1)`` (as log10) and ``mu = 1 - 1/d``."""
    d = _check_xi_degree(d)
    return SmoothnessParams((d + 1) * math.log10(xi(d) * d), 1 - 1 / d)


def h(x: float, d: float) -> float:
    """First-order condition ``d (x+1)^(d-1) / ((d+1) x^d)`` of the weighted certificate."""
    return d * (x + 1) ** (d - 1) / ((d + 1) * x**d)


def mu_hat(d: int) -> float:
    p = psi(d)
    m = (1 / (d + 1)) * (d / (d + 1)) * (p / (p + 1))
    if not 0 < m < 1 / (d + 1):
        raise ArithmeticError(f"mu_hat({d}) = {m} outside (0, 1/(d+1))")
    return m


def theoretical_bound(d: int, weighted: bool) -> float:
    """log10 of the proven ratio bound for instances of maximum degree d."""
    if d == 0:
        return 0.0
    if weighted:
        return weighted_upper_bound(d).psi_power
    return unweighted_upper_bound(d)


@dataclass(frozen=True)
class BoundReport:
    d: int
    lambert_arg_values: dict  # name -> (argument, W(argument))
    psi: float
    xi: float | None
    lambda_unweighted: float | None
    mu_unweighted: float | None
    upper_unweighted: float
    upper_weighted_psi: float
    upper_weighted_closed: float
    beta: int
    mu_hat: float


def bound_report(d: int) -> BoundReport:
    args = {
        "d/(d+1)": d / (d + 1),
        "1.27d/(d+1)": 1.27 * d / (d + 1),
        "1.20d/(d+1)": 1.20 * d / (d + 1),
        "(1.27d-1)/(d+1)": (1.27 * d - 1) / (d + 1),
        "(1.20d-1)/(d+1)": (1.20 * d - 1) / (d + 1),
    }
    wb = weighted_upper_bound(d)
    if d >= 2:
        sp = smoothness_params_unweighted(d)
        x, lam, mu = xi(d), sp.log10_lambda, sp.mu
    else:
        x = lam = mu = None
    return BoundReport(
        d=d,
        lambert_arg_values={name: (a, lambert_w(a)) for name, a in args.items()},
        psi=psi(d),
        xi=x,
        lambda_unweighted=lam,
        mu_unweighted=mu,
        upper_unweighted=unweighted_upper_bound(d),
        upper_weighted_psi=wb.psi_power,
        upper_weighted_closed=wb.closed_form,
        beta=d + 1,
        mu_hat=mu_hat(d),
    )
