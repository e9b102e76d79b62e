"""Circle averages and growth functionals for the closed function family.

The three basic quantities, all at radius ``r``:

* proximity: the circle mean of ``max(log|f|, 0)``;
* counting: logarithmically weighted tally of poles (or zeros) in the disc,
  ``sum mult * log(r/|b|)`` over nonzero divisor points plus
  ``origin_order * log r``;
* characteristic: their sum, the central growth gauge.

On top of those sit a first-main-theorem balance check, a hyper-order
estimator working on the increments of ``log T``, and an argument-principle
contour count used as an independent cross-check on divisor bookkeeping.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .fnmodel import (
    Divisor,
    FunctionExpr,
    InsufficientGrowth,
    NonIntegerResidual,
    NonMonotone,
    Quotient,
    Const,
    TWO_PI,
    logplus,
    subtract,
)
from .quadrature import adaptive_circle

# nudge applied when a divisor point sits essentially on the contour
NUDGE_FACTOR = 1.0 + 1e-7
ON_CIRCLE_REL = 1e-9
# divisor points within this relative band of the contour become panel cuts
SPLIT_BAND = 0.1


@dataclass(frozen=True)
class CharacteristicSample:
    """One radius worth of growth data.  ``r_used`` differs from ``r`` only
    when the contour had to be nudged off a divisor point."""

    r: float
    m: float
    N: float
    T: float
    quad_err: float
    nudged: bool
    r_used: float

    def as_row(self) -> dict:
        return {
            "r": self.r, "m": self.m, "N": self.N, "T": self.T,
            "quad_err": self.quad_err, "nudged": self.nudged,
        }


def _split_angles(expr: FunctionExpr, r: float) -> list[float]:
    if not expr.is_divisor_transparent:
        return []
    div = expr.divisor_in_disc(r * (1.0 + SPLIT_BAND))
    out = []
    for p, _ in div.entries:
        if abs(abs(p) - r) <= SPLIT_BAND * r:
            out.append(math.atan2(p.imag, p.real) % TWO_PI)
    return out


def _needs_nudge(expr: FunctionExpr, r: float) -> bool:
    if not expr.is_divisor_transparent:
        return False
    div = expr.divisor_in_disc(r * (1.0 + 2.0 * ON_CIRCLE_REL))
    return any(abs(abs(p) - r) <= ON_CIRCLE_REL * r for p, _ in div.entries)


def proximity(expr: FunctionExpr, r: float,
              atol: float = 1e-9, rtol: float = 1e-8) -> CharacteristicSample:
    """Circle mean of log+|f| at radius r, packaged with nudge/error metadata.

    The returned sample has ``N = 0`` and ``T = m``; callers wanting the full
    characteristic should use :func:`characteristic`.
    """
    if r <= 0:
        raise ValueError("radius must be positive")
    r_used, nudged = r, False
    if _needs_nudge(expr, r):
        r_used, nudged = r * NUDGE_FACTOR, True

    def integrand(theta: np.ndarray) -> np.ndarray:
        z = r_used * np.exp(1j * theta)
        lm, _ = expr._log_parts(z)
        out = logplus(lm)
        out[lm == -np.inf] = 0.0  # exact zeros contribute nothing to log+
        return out

    res = adaptive_circle(integrand, _split_angles(expr, r_used),
                          atol=atol * TWO_PI, rtol=rtol)
    m = res.value / TWO_PI
    return CharacteristicSample(r=r, m=m, N=0.0, T=m,
                                quad_err=res.err_estimate / TWO_PI,
                                nudged=nudged, r_used=r_used)


def counting(divisor: Divisor, r: float, kind: str = "poles") -> float:
    """Integrated counting function N(r) for the requested divisor sign."""
    if r <= 0:
        raise ValueError("radius must be positive")
    d = divisor.signed(kind).restrict(r)
    total = d.origin_order * math.log(r) if d.origin_order else 0.0
    for p, m in d.entries:
        total += m * math.log(r / abs(p))
    return total


def n_count(divisor: Divisor, r: float, kind: str = "poles") -> int:
    """Unintegrated count n(r): points in the closed disc, with multiplicity."""
    d = divisor.signed(kind).restrict(r)
    return d.origin_order + sum(m for _, m in d.entries)


def characteristic(expr: FunctionExpr, r: float,
                   atol: float = 1e-9, rtol: float = 1e-8) -> CharacteristicSample:
    """T(r) = m(r) + N(r) for the expression's poles."""
    sample = proximity(expr, r, atol=atol, rtol=rtol)
    if expr.is_divisor_transparent:
        N = counting(expr.divisor_in_disc(sample.r_used), sample.r_used, "poles")
    else:
        N = 0.0 if expr.is_entire else math.nan
        if math.isnan(N):
            raise ValueError("characteristic of a divisor-opaque non-entire expression")
    return CharacteristicSample(r=sample.r, m=sample.m, N=N, T=sample.m + N,
                                quad_err=sample.quad_err, nudged=sample.nudged,
                                r_used=sample.r_used)


def characteristic_sweep(expr: FunctionExpr, radii,
                         atol: float = 1e-9, rtol: float = 1e-8) -> list[CharacteristicSample]:
    return [characteristic(expr, float(r), atol=atol, rtol=rtol) for r in radii]


def log_radii(rmin: float, rmax: float, count: int = 50) -> np.ndarray:
    """Log-spaced radius grid, the default sweep layout."""
    if not (0 < rmin < rmax):
        raise ValueError("need 0 < rmin < rmax")
    return np.exp(np.linspace(math.log(rmin), math.log(rmax), count))


# ---------------------------------------------------------------------------
# first-main-theorem balance
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class BalanceSample:
    r: float
    T_f: float
    T_shifted: float
    delta: float


def fmt_delta(expr: FunctionExpr, a: complex, r: float,
              atol: float = 1e-9, rtol: float = 1e-8) -> BalanceSample:
    """|T(r, 1/(f-a)) - T(r, f)|, which stays bounded in r.

    T of the reciprocal is assembled directly: proximity of 1/(f-a) plus the
    counting function of the a-points of f.
    """
    shifted = subtract(expr, Const(complex(a)))
    recip = Quotient(Const(1.0), shifted)
    base = characteristic(expr, r, atol=atol, rtol=rtol)
    prox = proximity(recip, r, atol=atol, rtol=rtol)
    N_a = counting(shifted.divisor_in_disc(prox.r_used), prox.r_used, "zeros")
    T_shift = prox.m + N_a
    return BalanceSample(r=r, T_f=base.T, T_shifted=T_shift,
                         delta=abs(T_shift - base.T))


# ---------------------------------------------------------------------------
# hyper-order estimation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HyperOrderEstimate:
    varsigma: float
    fit_window: tuple[float, float]
    residual: float
    clamped: bool
    points_used: int


def hyperorder_estimate(radii, T_values, drop_fraction: float = 0.2) -> HyperOrderEstimate:
    """Hyper-order from a sweep of (r, T(r)) samples.

    Works on first differences: for genuinely fast growth,
    ``log(T(r_{k+1})) - log(T(r_k))`` scales like ``r^varsigma`` up to slowly
    varying factors, so the least-squares slope of the log-increments of
    ``log T`` against log-midpoint radii estimates the hyper-order while
    cancelling additive constants that poison a direct double-log fit.  The
    smallest radii (a ``drop_fraction`` share) are discarded as transient.
    Functions of finite order produce a slope near or below zero, clamped to
    zero and flagged.
    """
    r = np.asarray(radii, dtype=float)
    T = np.asarray(T_values, dtype=float)
    if r.ndim != 1 or r.shape != T.shape or r.size < 6:
        raise ValueError("need matching 1-D arrays with at least 6 samples")
    if np.any(np.diff(r) <= 0):
        raise NonMonotone("radii must be strictly increasing")
    if np.any(T <= 0):
        raise InsufficientGrowth("characteristic samples must be positive")

    k0 = int(math.floor(drop_fraction * r.size))
    r, T = r[k0:], T[k0:]
    if T[-1] < math.e:
        raise InsufficientGrowth(
            "largest characteristic sample is below e; growth too weak to classify"
        )
    logT = np.log(T)
    inc = np.diff(logT)
    mid = np.sqrt(r[:-1] * r[1:])
    good = inc > 0
    if int(np.sum(good)) < 4:
        raise InsufficientGrowth("too few increasing characteristic increments")
    x = np.log(mid[good])
    y = np.log(inc[good])
    slope, intercept = np.polyfit(x, y, 1)
    resid = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    clamped = slope < 0
    return HyperOrderEstimate(
        varsigma=float(max(slope, 0.0)),
        fit_window=(float(mid[good][0]), float(mid[good][-1])),
        residual=resid,
        clamped=bool(clamped),
        points_used=int(np.sum(good)),
    )


# ---------------------------------------------------------------------------
# argument-principle cross-check
# ---------------------------------------------------------------------------


def argument_principle_count(expr: FunctionExpr, r: float,
                             atol: float = 1e-7, rtol: float = 1e-7,
                             integer_tol: float = 0.1) -> int:
    """Zeros minus poles inside |z| < r via the contour integral of z f'/f.

    The real part of the mean of ``z f'(z)/f(z)`` over the circle equals the
    signed count.  A residual further than ``integer_tol`` from an integer
    raises :class:`NonIntegerResidual`.
    """
    r_used = r
    if _needs_nudge(expr, r):
        r_used = r * NUDGE_FACTOR

    def integrand(theta: np.ndarray) -> np.ndarray:
        z = r_used * np.exp(1j * theta)
        return (z * expr._logderivs(z)).real

    res = adaptive_circle(integrand, _split_angles(expr, r_used),
                          atol=atol * TWO_PI, rtol=rtol)
    raw = res.value / TWO_PI
    nearest = round(raw)
    if abs(raw - nearest) > integer_tol:
        raise NonIntegerResidual(
            f"contour count {raw:.6f} is not within {integer_tol} of an integer"
        )
    return int(nearest)


# ---------------------------------------------------------------------------
# Poisson-Jensen style oracle (testing aid)
# ---------------------------------------------------------------------------


def jensen_lhs_rhs(expr: FunctionExpr, r: float,
                   atol: float = 1e-10, rtol: float = 1e-9) -> tuple[float, float]:
    """Both sides of Jensen's identity at radius r, for validation.

    lhs: circle mean of log|f|.
    rhs: log|c| + sum over zeros log(r/|b|) - sum over poles log(r/|b|),
    where c is the leading coefficient of f at the origin (the first nonzero
    Laurent coefficient) and origin order contributes ``order * log r``.
    """
    def integrand(theta: np.ndarray) -> np.ndarray:
        z = r * np.exp(1j * theta)
        lm, _ = expr._log_parts(z)
        return lm

    res = adaptive_circle(integrand, _split_angles(expr, r),
                          atol=atol * TWO_PI, rtol=rtol)
    lhs = res.value / TWO_PI

    div = expr.divisor_in_disc(r)
    rhs = counting(div, r, "zeros") - counting(div, r, "poles")
    rhs += _origin_leading_logmod(expr, div)
    return lhs, rhs


def _origin_leading_logmod(expr: FunctionExpr, div: Divisor) -> float:
    """log| lim z^-o f(z) | at the origin, o the origin order of the divisor."""
    o = div.origin_order
    if o == 0:
        lm, _ = expr.logmod_eval(0.0)
        return lm
    # evaluate z^-o f(z) on a tiny circle and average the log-modulus
    eps = 1e-4
    thetas = np.linspace(0.0, TWO_PI, 64, endpoint=False)
    z = eps * np.exp(1j * thetas)
    lm, _ = expr._log_parts(z)
    vals = lm - o * math.log(eps)
    return float(np.mean(vals))
