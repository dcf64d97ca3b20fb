"""Grid verification of the smoothness inequalities behind the ratio bounds.

Everything here is a finite check: a report lists the ranges it covered and
every grid point where the claimed inequality failed.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import bounds

STRICT_TOL = 1e-12
CSV_COLUMNS = ("kind", "d", "d_r", "x", "y", "lhs", "rhs", "gap")


@dataclass(frozen=True)
class Violation:
    kind: str
    d: int
    d_r: int
    x: float
    y: float
    lhs: float
    rhs: float
    gap: float  # rhs - lhs


@dataclass
class ViolationReport:
    kind: str
    ranges: str
    checked_points: int = 0
    violations: list[Violation] = field(default_factory=list)
    max_slack: float = math.inf  # smallest rhs - lhs seen

    @property
    def ok(self) -> bool:
        return not self.violations

    def add(self, v: Violation, violated: bool) -> None:
        self.checked_points += 1
        self.max_slack = min(self.max_slack, v.gap)
        if violated:
            self.violations.append(v)

    def finish(self) -> "ViolationReport":
        self.violations.sort(key=lambda v: (v.d, v.d_r, v.x, v.y))
        return self

    def merge(self, other: "ViolationReport") -> None:
        self.checked_points += other.checked_points
        self.violations.extend(other.violations)
        self.max_slack = min(self.max_slack, other.max_slack)


def write_violations_csv(reports, out=None) -> str:
    """CSV of all violations (header always present)."""
    buf = out if out is not None else io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rep in reports:
        for v in rep.violations:
            w.writerow([v.kind, v.d, v.d_r, repr(v.x), repr(v.y), repr(v.lhs), repr(v.rhs), repr(v.gap)])
    return buf.getvalue() if out is None else ""


# -- unweighted -------------------------------------------------------------------


def check_unweighted_inequality(
    d: int,
    log10_lambda: float,
    mu: float,
    x_max: int = 50,
    y_max: int = 50,
) -> ViolationReport:
    """Check, for integers 0 <= x <= x_max, 1 <= y <= y_max and 1 <= d_r <= d,

        (d_r+1)(y+1)^d_r x - y^(d_r+1) + (y^(d_r+2) - (y-1)^(d_r+2) + d_r + 1)/(d_r+2)
            <= lambda x^(d_r+1) + mu y^(d_r+1).

    lambda and mu are turned into exact rationals, so the comparison is exact
    for the given binary64 parameters.
    """
    lam = Fraction(10.0**log10_lambda)
    mu_q = Fraction(mu)
    rep = ViolationReport("unweighted", f"d={d} d_r=1..{d} x=0..{x_max} y=1..{y_max}")
    for dr in range(1, d + 1):
        scale = (dr + 2) * lam.denominator * mu_q.denominator
        lam_k = lam.numerator * (dr + 2) * mu_q.denominator
        mu_k = mu_q.numerator * (dr + 2) * lam.denominator
        for x in range(0, x_max + 1):
            xp = x ** (dr + 1)
            for y in range(1, y_max + 1):
                yp = y ** (dr + 1)
                lhs_num = (dr + 2) * ((dr + 1) * (y + 1) ** dr * x - yp) + y ** (dr + 2) - (y - 1) ** (dr + 2) + dr + 1
                rhs_num = lam_k * xp + mu_k * yp
                lhs_scaled = lhs_num * lam.denominator * mu_q.denominator
                gap_num = rhs_num - lhs_scaled
                rep.add(
                    Violation(
                        "unweighted", d, dr, x, y,
                        lhs_num / (dr + 2), rhs_num / scale, gap_num / scale,
                    ),
                    gap_num < 0,
                )
    return rep.finish()


# -- weighted ---------------------------------------------------------------------


def default_weighted_grid(points: int = 64, lo_exp: float = -6, hi_exp: float = 6) -> np.ndarray:
    axis = 2.0 ** np.linspace(lo_exp, hi_exp, points)
    xs, ys = np.meshgrid(axis, axis, indexing="ij")
    return np.column_stack([xs.ravel(), ys.ravel()])


def weighted_certificate(d: int) -> tuple[float, float]:
    """(lambda, mu) with mu = mu_hat and lambda = (psi+1)^d - mu_hat psi^(d+1)."""
    p = bounds.psi(d)
    m = bounds.mu_hat(d)
    return (p + 1) ** d - m * p ** (d + 1), m


def check_weighted_inequality(d: int, lam: float, mu: float, grid=None) -> ViolationReport:
    """Check ``x c(x+y) <= lam x c(x) + mu y c(y)`` for ``c(t) = t^d_r``, 0 <= d_r <= d."""
    pts = default_weighted_grid() if grid is None else np.asarray(grid, dtype=float).reshape(-1, 2)
    x, y = pts[:, 0], pts[:, 1]
    rep = ViolationReport("weighted", f"d={d} d_r=0..{d} points={len(pts)}")
    for dr in range(0, d + 1):
        # kept in the x c(x+y) <= lam (x c(x)) + mu (y c(y)) shape so y = 0 compares equal terms
        lhs = x * (x + y) ** dr
        rhs = lam * (x * x**dr) + mu * (y * y**dr)
        gap = rhs - lhs
        rep.checked_points += len(pts)
        rep.max_slack = min(rep.max_slack, float(gap.min()))
        for k in np.flatnonzero(gap < 0):
            rep.violations.append(
                Violation("weighted", d, dr, float(x[k]), float(y[k]), float(lhs[k]), float(rhs[k]), float(gap[k]))
            )
    return rep.finish()


@dataclass(frozen=True)
class GMaxResult:
    d: int
    max_g: float
    at_z: float
    psi_power: float
    ratio: float  # max_g / psi_power

    @property
    def ok(self) -> bool:
        return 1 - 1e-4 <= self.ratio <= 1 + 1e-6


def verify_g_max(d: int, z_max: float | None = None, samples: int = 10**5) -> GMaxResult:
    """Grid maximum of ``g(z) = ((z+1)^d - mu_hat z^(d+1)) / (1/(d+1) - mu_hat)``.

    The maximum should equal psi_d^(d+1). g is evaluated divided by
    psi_d^(d+1) to stay in range for larger d.
    """
    p = bounds.psi(d)
    if z_max is None:
        z_max = 4 * p
    if z_max < 3 * p:
        raise ValueError(f"z_max must be >= 3 psi_d = {3 * p}")
    if samples < 10**4:
        raise ValueError("samples must be >= 10^4")
    m = bounds.mu_hat(d)
    if not m < 1 / (d + 1):
        raise ArithmeticError("mu_hat >= 1/(d+1)")
    z = np.linspace(0.0, z_max, samples)
    scaled = (((z + 1) / p) ** d / p - m * (z / p) ** (d + 1)) / (1 / (d + 1) - m)
    k = int(np.argmax(scaled))
    psi_power = p ** (d + 1)
    return GMaxResult(d, float(scaled[k]) * psi_power, float(z[k]), psi_power, float(scaled[k]))


# -- supporting lemmas ----------------------------------------------------------------


def _case_one(grid_size: int) -> ViolationReport:
    # (y^(d+2) - (y-1)^(d+2) + d + 1) / (d+2) <= y^(d+1), exact integers
    rep = ViolationReport("a_case_one", f"d=1..50 y=1..{grid_size}")
    for d in range(1, 51):
        for y in range(1, grid_size + 1):
            lhs = y ** (d + 2) - (y - 1) ** (d + 2) + d + 1
            rhs = (d + 2) * y ** (d + 1)
            rep.add(Violation(rep.kind, d, d, y, 0, lhs / (d + 2), rhs / (d + 2), (rhs - lhs) / (d + 2)), lhs > rhs)
    return rep.finish()


def _term_below_two(grid_size: int) -> ViolationReport:
    # (d_r+2) e^(-1/c) - d_r e^(-(d_r+2)/(c d_r - 1)) < 2
    rep = ViolationReport("b_term_below_two", f"d_r=2..50 c=[1,10] x{grid_size}")
    for c in np.linspace(1.0, 10.0, grid_size):
        for dr in range(2, 51):
            val = (dr + 2) * math.exp(-1 / c) - dr * math.exp(-(dr + 2) / (c * dr - 1))
            gap = 2 - val
            rep.add(Violation(rep.kind, dr, dr, float(c), 0, val, 2.0, gap), gap <= -STRICT_TOL)
    return rep.finish()


def case3_term(c, dr: int, coefficient: float):
    """``(d_r+1) e^(1/c) - k c d_r + c^2 d_r (1 - e^(-1/c))``."""
    return (dr + 1) * np.exp(1 / c) - coefficient * c * dr + c * c * dr * -np.expm1(-1 / c)


def _term_decreasing(grid_size: int, lemma_variant: bool) -> ViolationReport:
    kind = "c_term_decreasing" + ("" if lemma_variant else "_k2")
    rep = ViolationReport(kind, f"d_r=2..50 c=[1,10] x{grid_size}")
    c = np.linspace(1.0, 10.0, grid_size)
    for dr in range(2, 51):
        k = 2 - 1 / dr if lemma_variant else 2.0
        t = case3_term(c, dr, k)
        for j in range(grid_size - 1):
            # consecutive values must not increase
            rep.add(Violation(kind, dr, dr, float(c[j]), float(c[j + 1]), float(t[j + 1]), float(t[j]),
                              float(t[j] - t[j + 1])), t[j + 1] > t[j])
    return rep.finish()


def z_lemma_endpoint(dr: int) -> float:
    return 1 / (2 * bounds.lambert_w((dr - 1) / (2 * (dr + 1))))


def _z_argmax(grid_size: int) -> ViolationReport:
    # argmax of (z d_r)^d_r ((d_r+1) e^W(1.27) - (d_r-1) z) on [0, endpoint] is the endpoint
    rep = ViolationReport("d_z_argmax", f"d_r=2..50 z grid x{grid_size}")
    ew = math.exp(bounds.lambert_w(1.27))
    for dr in range(2, 51):
        end = z_lemma_endpoint(dr)
        z = np.linspace(0.0, end, grid_size)
        vals = (z * dr) ** dr * ((dr + 1) * ew - (dr - 1) * z)
        k = int(np.argmax(vals))
        # distance from the endpoint in grid steps, must be at most one
        steps = grid_size - 1 - k
        rep.add(Violation(rep.kind, dr, dr, float(z[k]), end, float(steps), 1.0, float(1 - steps)), steps > 1)
    return rep.finish()


def sign_changes(values) -> int:
    s = np.sign(np.asarray(values, dtype=float))
    s = s[s != 0]
    return int(np.count_nonzero(s[1:] != s[:-1]))


def _xi_sign_change(grid_size: int, lemma_variant: bool) -> ViolationReport:
    kind = "e_xi_unique" + ("_variant" if lemma_variant else "")
    rep = ViolationReport(kind, f"d=2..50 solver bracket x{grid_size}")
    for d in range(2, 51):
        lo, hi = bounds.xi_solver_bracket(d, lemma_variant)
        xs = np.linspace(lo, hi, grid_size)
        count = sign_changes([bounds.xi_rearranged(float(x), d, lemma_variant) for x in xs])
        rep.add(Violation(kind, d, d, lo, hi, float(count), 1.0, float(1 - abs(count - 1))), count != 1)
    return rep.finish()


def check_lemma_inequalities(grid_size: int = 200) -> dict[str, ViolationReport]:
    if grid_size < 100:
        raise ValueError("grid_size must be >= 100")
    reports = [
        _case_one(grid_size),
        _term_below_two(grid_size),
        _term_decreasing(grid_size, lemma_variant=True),
        _term_decreasing(grid_size, lemma_variant=False),
        _z_argmax(grid_size),
        _xi_sign_change(grid_size, lemma_variant=False),
        _xi_sign_change(grid_size, lemma_variant=True),
    ]
    return {r.kind: r for r in reports}
