"""Closed family of meromorphic test functions with log-domain evaluation.

Everything downstream (circle averages, pole/zero counts, bound verifiers)
works through three channels defined on a small symbolic expression family:

* ``eval``          -- plain complex value, for tests and orbit work;
* ``logmod_eval``   -- (log|f(z)|, arg f(z)) computed structurally, so that
  towers like exp(exp(z)) never leave the floating range;
* ``logderiv_eval`` -- f'(z)/f(z) by structural recursion (chain/product
  rules on the representation, never by numeric differentiation).

Each variant also knows its zero/pole divisor inside a disc, which is what
the counting functions and the quadrature panel splitter consume.

The family is deliberately closed: constants, rationals given by their
divisor, exp of a polynomial, exp of an entire child, products, quotients,
differences, precomposition with a polynomial, and exp(poly) minus a
constant.  Smart constructors (`compose_poly`, `subtract`) rewrite
combinations that have a divisor-transparent normal form, e.g.
``e^P - e^Q  ->  e^Q * (e^(P-Q) - 1)``.

All array-shaped internals are numpy-vectorized; the public scalar wrappers
enforce the pole/overflow signalling contract.
"""

from __future__ import annotations

import cmath
import hashlib
import json
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

TWO_PI = 2.0 * math.pi

# Proximity scale under which a point counts as sitting on a divisor point.
POLE_TOL = 1e-12
# Points closer to 0 than this are folded into the divisor's origin order.
ORIGIN_SNAP = 1e-10
# Relative tolerance for merging near-coincident divisor entries.
MERGE_TOL = 1e-9
# Relative cluster width when grouping near-coincident polynomial roots.
ROOT_CLUSTER_TOL = 1e-5

_LOG_HUGE = 709.0  # log of the largest finite double, rounded down


class ToolkitError(Exception):
    """Base class for typed failures raised by the toolkit."""


class PoleSignal(ToolkitError):
    """Evaluation requested at (or within tolerance of) a pole."""


class OverflowSignal(ToolkitError):
    """|f(z)| exceeds the floating range and no log-channel fallback applies."""


class SingularSignal(ToolkitError):
    """Logarithmic derivative requested within tolerance of a zero or pole."""


class OpaqueExpr(ToolkitError):
    """The expression does not expose its divisor in closed form."""


class RootFindFailure(ToolkitError):
    """Polynomial/pre-image root finding did not meet its residual contract."""


class QuadratureFailure(ToolkitError):
    """Adaptive circle quadrature could not reach the requested tolerance."""


class InsufficientGrowth(ToolkitError):
    """A growth-based estimate needs more increase than the samples show."""


class NonIntegerResidual(ToolkitError):
    """Contour count did not land near an integer."""


class IdenticalComposition(ToolkitError):
    """The two compositions coincide, so the comparison is degenerate."""


class OrderMismatch(ToolkitError):
    """Algebraic-map order does not match the requested polynomialization."""


class BranchAmbiguity(ToolkitError):
    """An orbit iterate landed on the branch cut while tracking continuity."""


class OrbitCollision(ToolkitError):
    """Orbit families expected to be disjoint share a point."""


class NonMonotone(ToolkitError):
    """Input samples violate a required monotonicity."""


class GrowthConditionError(ToolkitError):
    """A hyper-order smallness precondition failed."""


def _carray(z) -> np.ndarray:
    return np.asarray(z, dtype=np.complex128)


def logplus(x):
    """max(log-quantity, 0), elementwise."""
    return np.maximum(x, 0.0)


# ---------------------------------------------------------------------------
# polynomials
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Polynomial:
    """Dense polynomial, coefficients lowest degree first.

    The zero polynomial is ``Polynomial((0j,))``; otherwise the leading
    coefficient is nonzero (exact trailing zeros are trimmed on build).
    """

    coeffs: tuple[complex, ...]

    def __post_init__(self):
        cs = tuple(complex(c) for c in self.coeffs)
        if not cs:
            cs = (0j,)
        k = len(cs)
        while k > 1 and cs[k - 1] == 0:
            k -= 1
        object.__setattr__(self, "coeffs", cs[:k])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def leading(self) -> complex:
        return self.coeffs[-1]

    @property
    def is_zero(self) -> bool:
        return len(self.coeffs) == 1 and self.coeffs[0] == 0

    def __call__(self, z):
        zs = _carray(z)
        out = np.full(zs.shape, self.coeffs[-1], dtype=np.complex128)
        for c in self.coeffs[-2::-1]:
            out = out * zs + c
        if np.ndim(z) == 0:
            return complex(out)
        return out

    def deriv(self) -> "Polynomial":
        if self.degree == 0:
            return Polynomial((0j,))
        return Polynomial(tuple(k * c for k, c in enumerate(self.coeffs) if k > 0))

    def __add__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0j] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0j] * (n - len(other.coeffs))
        return Polynomial(tuple(x + y for x, y in zip(a, b)))

    def __neg__(self) -> "Polynomial":
        return Polynomial(tuple(-c for c in self.coeffs))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        return self + (-other)

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        out = [0j] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a == 0:
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] += a * b
        return Polynomial(tuple(out))

    def scale(self, c: complex) -> "Polynomial":
        return Polynomial(tuple(c * a for a in self.coeffs))

    def compose(self, inner: "Polynomial") -> "Polynomial":
        """self(inner(z)) by Horner in the polynomial ring."""
        out = Polynomial((self.coeffs[-1],))
        for c in self.coeffs[-2::-1]:
            out = out * inner + Polynomial((c,))
        return out

    def coeff_bound(self, r: float) -> float:
        """sum_j |c_j| r^j, an upper bound for |p| on the closed disc."""
        return float(sum(abs(c) * r**k for k, c in enumerate(self.coeffs)))

    @classmethod
    def from_roots(cls, roots: Sequence[complex], leading: complex = 1.0) -> "Polynomial":
        out = cls((complex(leading),))
        for rt in roots:
            out = out * cls((-complex(rt), 1.0))
        return out

    @classmethod
    def parse(cls, text: str) -> "Polynomial":
        """Parse sums of monomials, e.g. ``z^2+z``, ``2z-1``, ``(0.5+0.2i)z``."""
        s = text.replace(" ", "")
        if not s:
            raise ValueError("empty polynomial string")
        terms: list[str] = []
        depth, start = 0, 0
        for i, ch in enumerate(s):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch in "+-" and depth == 0 and i > 0 and s[i - 1] not in "eE(+-":
                terms.append(s[start:i])
                start = i
        terms.append(s[start:])
        coeffs: dict[int, complex] = {}
        for term in terms:
            coeffs_part, power = term, 0
            if "z" in term:
                head, _, tail = term.partition("z")
                if "z" in tail:
                    raise ValueError(f"cannot parse term {term!r}")
                if tail == "":
                    power = 1
                elif tail.startswith("^"):
                    power = int(tail[1:])
                else:
                    raise ValueError(f"cannot parse term {term!r}")
                coeffs_part = head.rstrip("*")
            if coeffs_part in ("", "+"):
                c = 1.0 + 0j
            elif coeffs_part == "-":
                c = -1.0 + 0j
            else:
                c = parse_complex(coeffs_part)
            coeffs[power] = coeffs.get(power, 0j) + c
        n = max(coeffs) + 1
        return cls(tuple(coeffs.get(k, 0j) for k in range(n)))

    def to_json(self) -> list[list[float]]:
        return [[c.real, c.imag] for c in self.coeffs]

    @classmethod
    def from_json(cls, data) -> "Polynomial":
        return cls(tuple(complex(re, im) for re, im in data))


def parse_complex(text: str) -> complex:
    """Accept ``1``, ``-0.5``, ``0.37+0.21i``, ``(2-i)``, ``2j`` and friends."""
    s = text.strip().strip("()").replace(" ", "")
    s = s.replace("i", "j")
    if s in ("j", "+j"):
        return 1j
    if s == "-j":
        return -1j
    return complex(s)


# ---------------------------------------------------------------------------
# root finding
# ---------------------------------------------------------------------------


def poly_roots(p: Polynomial, tol: float = 1e-10, max_iter: int = 200) -> np.ndarray:
    """All roots of ``p`` by simultaneous (Aberth/Ehrlich) iteration.

    Initial guesses sit on a deterministically perturbed circle whose radius
    is the Cauchy bound ``1 + max|c_j / c_deg|``.  Residuals are checked
    against ``tol * (1 + |root|)^degree * |leading|``; a violation raises
    :class:`RootFindFailure`.
    """
    cs = np.asarray(p.coeffs, dtype=np.complex128)
    if p.is_zero:
        raise RootFindFailure("zero polynomial has no well-defined root set")
    n = p.degree
    if n == 0:
        return np.empty(0, dtype=np.complex128)

    # Exact roots at the origin peel off cheaply and help conditioning.
    k0 = 0
    while k0 < n and cs[k0] == 0:
        k0 += 1
    cs = cs[k0:]
    n_eff = len(cs) - 1

    roots = np.zeros(n, dtype=np.complex128)
    if n_eff > 0:
        mon = cs / cs[-1]
        bound = 1.0 + float(np.max(np.abs(mon[:-1]))) if n_eff >= 1 else 1.0
        idx = np.arange(n_eff)
        angles = TWO_PI * idx / n_eff + 0.39996 / n_eff + 0.5
        radii = bound * (1.0 + 0.06 * np.sin(2.7 * idx + 0.4))
        z = radii * np.exp(1j * angles)

        dmon = mon[1:] * np.arange(1, n_eff + 1)
        for _ in range(max_iter):
            pv = np.full(n_eff, mon[-1], dtype=np.complex128)
            for c in mon[-2::-1]:
                pv = pv * z + c
            dv = np.full(n_eff, dmon[-1], dtype=np.complex128)
            for c in dmon[-2::-1]:
                dv = dv * z + c
            small = np.abs(dv) < 1e-300
            if np.any(small):
                dv = np.where(small, 1e-300, dv)
            w = pv / dv
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, np.inf)
            s = np.sum(1.0 / diff, axis=1)
            denom = 1.0 - w * s
            denom = np.where(np.abs(denom) < 1e-300, 1e-300, denom)
            step = w / denom
            z = z - step
            if np.max(np.abs(step) / (1.0 + np.abs(z))) < 1e-14:
                break
        roots[:n_eff] = z
    # origin roots occupy the tail (zeros already present in `roots`)
    order = np.lexsort((roots.imag, roots.real, np.abs(roots)))
    roots = roots[order]

    resid = np.abs(p(roots))
    limit = tol * (1.0 + np.abs(roots)) ** p.degree * abs(p.leading)
    if np.any(resid > np.maximum(limit, 1e-300)):
        worst = float(np.max(resid / np.maximum(limit, 1e-300)))
        raise RootFindFailure(
            f"root residual contract violated (worst ratio {worst:.3g}, degree {p.degree})"
        )
    return roots


def cluster_roots(roots: Iterable[complex], rel_tol: float = ROOT_CLUSTER_TOL) -> list[tuple[complex, int]]:
    """Group near-coincident roots into (centroid, multiplicity) pairs."""
    pts = sorted(roots, key=lambda w: (abs(w), w.real, w.imag))
    clusters: list[list[complex]] = []
    for w in pts:
        placed = False
        for cl in reversed(clusters):
            rep = cl[0]
            if abs(w - rep) <= rel_tol * (1.0 + abs(rep)):
                cl.append(w)
                placed = True
                break
            if abs(w) - abs(rep) > 2.0 * rel_tol * (1.0 + abs(w)):
                break
        if not placed:
            clusters.append([w])
    out = []
    for cl in clusters:
        centroid = sum(cl) / len(cl)
        out.append((centroid, len(cl)))
    return out


# ---------------------------------------------------------------------------
# divisors
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Divisor:
    """Multiset of zeros (positive multiplicity) and poles (negative).

    ``entries`` excludes the origin, which is carried by ``origin_order``
    (again signed: +k means a zero of order k at 0).  Entries are sorted by
    modulus, then real, then imaginary part, and no two entries sit within
    merge tolerance of each other.
    """

    entries: tuple[tuple[complex, int], ...] = ()
    origin_order: int = 0

    @staticmethod
    def build(pairs: Iterable[tuple[complex, int]], origin_order: int = 0,
              merge_tol: float = MERGE_TOL) -> "Divisor":
        origin = origin_order
        pts: list[tuple[complex, int]] = []
        for p, m in pairs:
            if m == 0:
                continue
            p = complex(p)
            if abs(p) < ORIGIN_SNAP:
                origin += m
            else:
                pts.append((p, int(m)))
        pts.sort(key=lambda e: (abs(e[0]), e[0].real, e[0].imag))
        merged: list[list] = []  # [point_sum, count, mult]
        for p, m in pts:
            hit = None
            for cl in reversed(merged):
                rep = cl[0] / cl[1]
                if abs(p - rep) <= merge_tol * (1.0 + abs(rep)):
                    hit = cl
                    break
                if abs(p) - abs(rep) > 4.0 * merge_tol * (1.0 + abs(p)):
                    break
            if hit is None:
                merged.append([p, 1, m])
            else:
                hit[0] += p
                hit[1] += 1
                hit[2] += m
        entries = tuple(
            (cl[0] / cl[1], cl[2]) for cl in merged if cl[2] != 0
        )
        entries = tuple(sorted(entries, key=lambda e: (abs(e[0]), e[0].real, e[0].imag)))
        return Divisor(entries, origin)

    @property
    def is_empty(self) -> bool:
        return not self.entries and self.origin_order == 0

    def restrict(self, r: float) -> "Divisor":
        return Divisor(tuple(e for e in self.entries if abs(e[0]) <= r), self.origin_order)

    def negate(self) -> "Divisor":
        return Divisor(tuple((p, -m) for p, m in self.entries), -self.origin_order)

    def merge(self, other: "Divisor") -> "Divisor":
        return Divisor.build(
            list(self.entries) + list(other.entries),
            self.origin_order + other.origin_order,
        )

    def signed(self, kind: str) -> "Divisor":
        """Restrict to zeros (``kind='zeros'``) or poles, multiplicities made positive."""
        if kind == "zeros":
            ent = tuple((p, m) for p, m in self.entries if m > 0)
            org = max(self.origin_order, 0)
        elif kind == "poles":
            ent = tuple((p, -m) for p, m in self.entries if m < 0)
            org = max(-self.origin_order, 0)
        else:
            raise ValueError(f"kind must be 'zeros' or 'poles', got {kind!r}")
        return Divisor(ent, org)

    def points(self) -> np.ndarray:
        return np.array([p for p, _ in self.entries], dtype=np.complex128)

    def multiset(self) -> list[complex]:
        """Entries (origin included) repeated by |multiplicity|."""
        out = [0j] * abs(self.origin_order)
        for p, m in self.entries:
            out.extend([p] * abs(m))
        return out

    def total(self, kind: str) -> int:
        d = self.signed(kind)
        return d.origin_order + sum(m for _, m in d.entries)

    def to_json(self) -> dict:
        return {
            "origin_order": self.origin_order,
            "points": [{"point": [p.real, p.imag], "mult": m} for p, m in self.entries],
        }

    @classmethod
    def from_json(cls, data) -> "Divisor":
        return cls.build(
            [(complex(e["point"][0], e["point"][1]), int(e["mult"])) for e in data["points"]],
            int(data.get("origin_order", 0)),
        )


EMPTY_DIVISOR = Divisor()


# ---------------------------------------------------------------------------
# expression family
# ---------------------------------------------------------------------------


class FunctionExpr:
    """Base class; subclasses are frozen dataclasses, hence hashable."""

    # -- structural capabilities -------------------------------------------------
    @property
    def is_divisor_transparent(self) -> bool:
        raise NotImplementedError

    @property
    def is_entire(self) -> bool:
        raise NotImplementedError

    def children(self) -> tuple["FunctionExpr", ...]:
        return ()

    # -- vectorized channels (numpy arrays in/out) --------------------------------
    def _log_parts(self, z: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(log|f|, arg f) with +/-inf sentinels at poles/zeros."""
        raise NotImplementedError

    def _values(self, z: np.ndarray) -> np.ndarray:
        lm, ag = self._log_parts(z)
        out = np.empty(lm.shape, dtype=np.complex128)
        finite = np.isfinite(lm)
        safe = finite & (lm < _LOG_HUGE)
        with np.errstate(over="ignore", invalid="ignore"):
            out[safe] = np.exp(lm[safe] + 1j * ag[safe])
        out[lm == -np.inf] = 0.0
        out[(lm == np.inf) | (finite & (lm >= _LOG_HUGE))] = np.inf
        return out

    def _logderivs(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def _divisor_impl(self, r: float) -> Divisor:
        raise OpaqueExpr(f"{type(self).__name__} does not expose a divisor")

    # -- public ops ----------------------------------------------------------------
    def divisor_in_disc(self, r: float) -> Divisor:
        """Divisor restricted to |z| <= r.

        Internally computed on a quantized radius and restricted exactly, so
        the result is monotone in ``r`` by construction.
        """
        if not self.is_divisor_transparent:
            raise OpaqueExpr(f"{type(self).__name__} is divisor-opaque")
        if r < 0:
            raise ValueError("disc radius must be nonnegative")
        rq = 2.0 ** math.ceil(math.log2(max(r, 1e-6)) + 1e-12)
        return _divisor_cached(self, rq).restrict(r)

    def eval(self, z: complex) -> complex:
        """Plain value; raises PoleSignal near poles, OverflowSignal past range."""
        z = complex(z)
        tol = POLE_TOL * (1.0 + abs(z))
        if self.is_divisor_transparent:
            div = self.divisor_in_disc(abs(z) + 1.0)
            for p, m in div.entries:
                if m < 0 and abs(z - p) <= tol:
                    raise PoleSignal(f"z={z} is within {tol:.2e} of a pole at {p}")
            if div.origin_order < 0 and abs(z) <= tol:
                raise PoleSignal(f"z={z} is within {tol:.2e} of the pole at 0")
        v = self._values(_carray([z]))[0]
        if np.isnan(v) or (np.isinf(v.real) or np.isinf(v.imag)):
            lm, _ = self._log_parts(_carray([z]))
            if lm[0] == np.inf:
                raise PoleSignal(f"f has a pole at z={z}")
            raise OverflowSignal(f"|f(z)| exceeds the floating range at z={z}")
        return complex(v)

    def logmod_eval(self, z: complex) -> tuple[float, float]:
        """(log|f(z)|, arg f(z) mod 2pi); -inf at exact zeros, PoleSignal at poles."""
        lm, ag = self._log_parts(_carray([complex(z)]))
        if lm[0] == np.inf:
            raise PoleSignal(f"f has a pole at z={z}")
        a = float(ag[0]) % TWO_PI if np.isfinite(ag[0]) else 0.0
        return float(lm[0]), a

    def logderiv_eval(self, z: complex) -> complex:
        z = complex(z)
        tol = POLE_TOL * (1.0 + abs(z))
        if self.is_divisor_transparent:
            div = self.divisor_in_disc(abs(z) + 1.0)
            for p, _ in div.entries:
                if abs(z - p) <= tol:
                    raise SingularSignal(f"z={z} is within tolerance of divisor point {p}")
            if div.origin_order != 0 and abs(z) <= tol:
                raise SingularSignal(f"z={z} is within tolerance of the origin divisor point")
        v = self._logderivs(_carray([z]))[0]
        if not np.isfinite(v.real) or not np.isfinite(v.imag):
            raise SingularSignal(f"logarithmic derivative is singular at z={z}")
        return complex(v)

    # -- serialization ---------------------------------------------------------------
    def to_json(self) -> dict:
        raise NotImplementedError

    def structure_hash(self) -> str:
        blob = json.dumps(self.to_json(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha1(blob.encode()).hexdigest()[:12]


@lru_cache(maxsize=4096)
def _divisor_cached(expr: FunctionExpr, rq: float) -> Divisor:
    return expr._divisor_impl(rq)


@dataclass(frozen=True)
class Const(FunctionExpr):
    value: complex

    def __post_init__(self):
        object.__setattr__(self, "value", complex(self.value))

    @property
    def is_divisor_transparent(self) -> bool:
        return True

    @property
    def is_entire(self) -> bool:
        return True

    def _log_parts(self, z):
        shape = z.shape
        if self.value == 0:
            return np.full(shape, -np.inf), np.zeros(shape)
        return (np.full(shape, math.log(abs(self.value))),
                np.full(shape, cmath.phase(self.value)))

    def _values(self, z):
        return np.full(z.shape, self.value, dtype=np.complex128)

    def _logderivs(self, z):
        return np.zeros(z.shape, dtype=np.complex128)

    def _divisor_impl(self, r):
        return EMPTY_DIVISOR

    def to_json(self):
        return {"variant": "const", "value": [self.value.real, self.value.imag]}


@dataclass(frozen=True)
class RationalFromDivisor(FunctionExpr):
    """scale * z^origin_order * prod (z - p)^mult over divisor entries."""

    scale: complex
    divisor: Divisor

    def __post_init__(self):
        object.__setattr__(self, "scale", complex(self.scale))
        if self.scale == 0:
            raise ValueError("scale must be nonzero")

    @property
    def is_divisor_transparent(self) -> bool:
        return True

    @property
    def is_entire(self) -> bool:
        return self.divisor.origin_order >= 0 and all(m > 0 for _, m in self.divisor.entries)

    def _log_parts(self, z):
        lm = np.full(z.shape, math.log(abs(self.scale)))
        ag = np.full(z.shape, cmath.phase(self.scale))
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.divisor.origin_order:
                o = self.divisor.origin_order
                lm = lm + o * np.log(np.abs(z))
                ag = ag + o * np.angle(z)
            for p, m in self.divisor.entries:
                d = z - p
                lm = lm + m * np.log(np.abs(d))
                ag = ag + m * np.angle(d)
        # a pole (negative mult) hit exactly produces +inf via -m*(-inf); keep as is
        return lm, ag

    def _logderivs(self, z):
        out = np.zeros(z.shape, dtype=np.complex128)
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.divisor.origin_order:
                out = out + self.divisor.origin_order / z
            for p, m in self.divisor.entries:
                out = out + m / (z - p)
        return out

    def _divisor_impl(self, r):
        return self.divisor.restrict(r)

    def to_json(self):
        return {"variant": "rational_from_divisor",
                "scale": [self.scale.real, self.scale.imag],
                "divisor": self.divisor.to_json()}


@dataclass(frozen=True)
class ExpPoly(FunctionExpr):
    """exp(p(z)) for a polynomial p."""

    p: Polynomial

    @property
    def is_divisor_transparent(self) -> bool:
        return True

    @property
    def is_entire(self) -> bool:
        return True

    def _log_parts(self, z):
        w = self.p(z)
        w = _carray(w)
        return w.real.copy(), w.imag.copy()

    def _values(self, z):
        w = _carray(self.p(z))
        out = np.empty(w.shape, dtype=np.complex128)
        big = w.real >= _LOG_HUGE
        with np.errstate(over="ignore"):
            out[~big] = np.exp(w[~big])
        out[big] = np.inf
        return out

    def _logderivs(self, z):
        return _carray(self.p.deriv()(z))

    def _divisor_impl(self, r):
        return EMPTY_DIVISOR

    def to_json(self):
        return {"variant": "exp_poly", "coeffs": self.p.to_json()}


@dataclass(frozen=True)
class Exp(FunctionExpr):
    """exp(child(z)); the child must be entire, checked at construction."""

    child: FunctionExpr

    def __post_init__(self):
        if not self.child.is_entire:
            raise ValueError("Exp child must be entire")

    @property
    def is_divisor_transparent(self) -> bool:
        return True

    @property
    def is_entire(self) -> bool:
        return True

    def children(self):
        return (self.child,)

    def _log_parts(self, z):
        w = self.child._values(z)
        return w.real.copy(), w.imag.copy()

    def _values(self, z):
        w = self.child._values(z)
        out = np.empty(w.shape, dtype=np.complex128)
        big = ~np.isfinite(w.real) | (w.real >= _LOG_HUGE)
        with np.errstate(over="ignore", invalid="ignore"):
            out[~big] = np.exp(w[~big])
        out[big] = np.inf
        return out

    def _logderivs(self, z):
        # (e^u)'/e^u = u'
        if isinstance(self.child, ExpPoly):
            return _carray(self.child.p.deriv()(z)) * self.child._values(z)
        return self.child._values(z) * self.child._logderivs(z)

    def _divisor_impl(self, r):
        return EMPTY_DIVISOR

    def to_json(self):
        return {"variant": "exp", "children": [self.child.to_json()]}


def _binary_json(name, lhs, rhs):
    return {"variant": name, "children": [lhs.to_json(), rhs.to_json()]}


@dataclass(frozen=True)
class Product(FunctionExpr):
    lhs: FunctionExpr
    rhs: FunctionExpr

    @property
    def is_divisor_transparent(self) -> bool:
        return self.lhs.is_divisor_transparent and self.rhs.is_divisor_transparent

    @property
    def is_entire(self) -> bool:
        return self.lhs.is_entire and self.rhs.is_entire

    def children(self):
        return (self.lhs, self.rhs)

    def _log_parts(self, z):
        la, aa = self.lhs._log_parts(z)
        lb, ab = self.rhs._log_parts(z)
        return la + lb, aa + ab

    def _logderivs(self, z):
        return self.lhs._logderivs(z) + self.rhs._logderivs(z)

    def _divisor_impl(self, r):
        return self.lhs.divisor_in_disc(r).merge(self.rhs.divisor_in_disc(r))

    def to_json(self):
        return _binary_json("product", self.lhs, self.rhs)


@dataclass(frozen=True)
class Quotient(FunctionExpr):
    lhs: FunctionExpr
    rhs: FunctionExpr

    @property
    def is_divisor_transparent(self) -> bool:
        return self.lhs.is_divisor_transparent and self.rhs.is_divisor_transparent

    @property
    def is_entire(self) -> bool:
        # quotients by zero-free entire denominators stay entire
        return self.lhs.is_entire and isinstance(self.rhs, (ExpPoly, Exp))

    def children(self):
        return (self.lhs, self.rhs)

    def _log_parts(self, z):
        la, aa = self.lhs._log_parts(z)
        lb, ab = self.rhs._log_parts(z)
        return la - lb, aa - ab

    def _logderivs(self, z):
        return self.lhs._logderivs(z) - self.rhs._logderivs(z)

    def _divisor_impl(self, r):
        return self.lhs.divisor_in_disc(r).merge(self.rhs.divisor_in_disc(r).negate())

    def to_json(self):
        return _binary_json("quotient", self.lhs, self.rhs)


@dataclass(frozen=True)
class Difference(FunctionExpr):
    """lhs - rhs with no structural normal form; divisor-opaque.

    Prefer the :func:`subtract` smart constructor, which rewrites the cases
    that do have a transparent form (exp-poly minus exp-poly, rational minus
    constant, exp-poly minus constant).
    """

    lhs: FunctionExpr
    rhs: FunctionExpr

    @property
    def is_divisor_transparent(self) -> bool:
        return False

    @property
    def is_entire(self) -> bool:
        return self.lhs.is_entire and self.rhs.is_entire

    def children(self):
        return (self.lhs, self.rhs)

    def _log_parts(self, z):
        v = self.lhs._values(z) - self.rhs._values(z)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(np.abs(v)), np.angle(v)

    def _values(self, z):
        return self.lhs._values(z) - self.rhs._values(z)

    def _logderivs(self, z):
        va = self.lhs._values(z)
        vb = self.rhs._values(z)
        da = va * self.lhs._logderivs(z)
        db = vb * self.rhs._logderivs(z)
        return (da - db) / (va - vb)

    def to_json(self):
        return _binary_json("difference", self.lhs, self.rhs)


@dataclass(frozen=True)
class ComposePoly(FunctionExpr):
    """child(p(z)): precomposition with a polynomial."""

    child: FunctionExpr
    p: Polynomial

    @property
    def is_divisor_transparent(self) -> bool:
        return self.child.is_divisor_transparent

    @property
    def is_entire(self) -> bool:
        return self.child.is_entire

    def children(self):
        return (self.child,)

    def _inner(self, z):
        return _carray(self.p(z))

    def _log_parts(self, z):
        return self.child._log_parts(self._inner(z))

    def _values(self, z):
        return self.child._values(self._inner(z))

    def _logderivs(self, z):
        return _carray(self.p.deriv()(z)) * self.child._logderivs(self._inner(z))

    def _divisor_impl(self, r):
        inner_r = self.p.coeff_bound(r)
        base = self.child.divisor_in_disc(inner_r)
        pairs: list[tuple[complex, int]] = []
        targets = list(base.entries)
        if base.origin_order:
            targets.append((0j, base.origin_order))
        for w, m in targets:
            shifted = self.p - Polynomial((w,))
            if shifted.is_zero:
                raise OpaqueExpr("composition inner polynomial is constant at a divisor value")
            for root, k in cluster_roots(poly_roots(shifted)):
                if abs(root) <= r:
                    pairs.append((root, m * k))
        return Divisor.build(pairs)

    def to_json(self):
        return {"variant": "compose_poly", "children": [self.child.to_json()],
                "coeffs": self.p.to_json()}


@dataclass(frozen=True)
class ExpPolyMinusConst(FunctionExpr):
    """exp(p(z)) - a, evaluated stably across all magnitude regimes."""

    p: Polynomial
    a: complex

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))

    @property
    def is_divisor_transparent(self) -> bool:
        return True

    @property
    def is_entire(self) -> bool:
        return True

    def _split(self, z):
        """Masks for the three regimes of |e^p| against |a|."""
        w = _carray(self.p(z))
        if self.a == 0:
            return w, None, None, None
        la = math.log(abs(self.a))
        big = w.real > la + 0.7
        small = w.real < la - 0.7
        mid = ~(big | small)
        return w, big, small, mid

    def _log_parts(self, z):
        w, big, small, mid = self._split(z)
        if big is None:  # a == 0, plain exp
            return w.real.copy(), w.imag.copy()
        lm = np.empty(w.shape)
        ag = np.empty(w.shape)
        # |e^p| >> |a|:  log f = p + log(1 - a e^-p)
        if np.any(big):
            corr = np.log(1.0 - self.a * np.exp(-w[big]))
            lm[big] = w[big].real + corr.real
            ag[big] = w[big].imag + corr.imag
        # |e^p| << |a|:  log f = log(-a) + log(1 - e^p / a)
        if np.any(small):
            corr = np.log(1.0 - np.exp(w[small]) / self.a)
            base = cmath.log(-self.a)
            lm[small] = base.real + corr.real
            ag[small] = base.imag + corr.imag
        if np.any(mid):
            v = np.exp(w[mid]) - self.a
            with np.errstate(divide="ignore", invalid="ignore"):
                lm[mid] = np.log(np.abs(v))
                ag[mid] = np.angle(v)
        return lm, ag

    def _logderivs(self, z):
        w, big, small, mid = self._split(z)
        dp = _carray(self.p.deriv()(z))
        if big is None:
            return dp
        out = np.empty(w.shape, dtype=np.complex128)
        if np.any(big):
            out[big] = dp[big] / (1.0 - self.a * np.exp(-w[big]))
        if np.any(small):
            t = np.exp(w[small]) / self.a
            out[small] = dp[small] * t / (t - 1.0)
        if np.any(mid):
            ew = np.exp(w[mid])
            out[mid] = dp[mid] * ew / (ew - self.a)
        return out

    def _divisor_impl(self, r):
        if self.a == 0:
            return EMPTY_DIVISOR
        la = cmath.log(self.a)  # principal
        bound = self.p.coeff_bound(r)
        kmax = int(math.ceil((bound + abs(la)) / TWO_PI)) + 1
        pairs: list[tuple[complex, int]] = []
        for k in range(-kmax, kmax + 1):
            w = la + TWO_PI * 1j * k
            if abs(w) > bound + 1e-9:
                continue
            shifted = self.p - Polynomial((w,))
            if shifted.is_zero:
                raise OpaqueExpr("exp argument is constant and equals log(a)")
            if shifted.degree == 0:
                continue
            for root, m in cluster_roots(poly_roots(shifted)):
                if abs(root) <= r:
                    pairs.append((root, m))
        return Divisor.build(pairs)

    def to_json(self):
        return {"variant": "exp_poly_minus_const", "coeffs": self.p.to_json(),
                "a": [self.a.real, self.a.imag]}


_VARIANTS = {
    "const": Const,
    "rational_from_divisor": RationalFromDivisor,
    "exp_poly": ExpPoly,
    "exp": Exp,
    "product": Product,
    "quotient": Quotient,
    "difference": Difference,
    "compose_poly": ComposePoly,
    "exp_poly_minus_const": ExpPolyMinusConst,
}


def expr_from_json(data: dict) -> FunctionExpr:
    kind = data["variant"]
    if kind == "const":
        return Const(complex(*data["value"]))
    if kind == "rational_from_divisor":
        return RationalFromDivisor(complex(*data["scale"]), Divisor.from_json(data["divisor"]))
    if kind == "exp_poly":
        return ExpPoly(Polynomial.from_json(data["coeffs"]))
    if kind == "exp":
        return Exp(expr_from_json(data["children"][0]))
    if kind == "exp_poly_minus_const":
        return ExpPolyMinusConst(Polynomial.from_json(data["coeffs"]), complex(*data["a"]))
    if kind == "compose_poly":
        return ComposePoly(expr_from_json(data["children"][0]), Polynomial.from_json(data["coeffs"]))
    if kind in ("product", "quotient", "difference"):
        lhs = expr_from_json(data["children"][0])
        rhs = expr_from_json(data["children"][1])
        return _VARIANTS[kind](lhs, rhs)
    raise ValueError(f"unknown variant {kind!r}")


# ---------------------------------------------------------------------------
# smart constructors
# ---------------------------------------------------------------------------


def compose_poly(expr: FunctionExpr, p: Polynomial) -> FunctionExpr:
    """expr(p(z)), simplified where the family has a closed form."""
    if p.degree == 1 and p.coeffs[0] == 0 and p.coeffs[1] == 1:
        return expr
    if isinstance(expr, Const):
        return expr
    if isinstance(expr, ExpPoly):
        return ExpPoly(expr.p.compose(p))
    if isinstance(expr, ExpPolyMinusConst):
        return ExpPolyMinusConst(expr.p.compose(p), expr.a)
    if isinstance(expr, (Product, Quotient)):
        return type(expr)(compose_poly(expr.lhs, p), compose_poly(expr.rhs, p))
    return ComposePoly(expr, p)


def subtract(expr: FunctionExpr, other: FunctionExpr,
             max_rational_degree: int = 24) -> FunctionExpr:
    """expr - other, rewritten to a divisor-transparent form when possible."""
    if isinstance(expr, Const) and isinstance(other, Const):
        return Const(expr.value - other.value)
    if isinstance(other, Const):
        a = other.value
        if a == 0:
            return expr
        if isinstance(expr, ExpPoly):
            return ExpPolyMinusConst(expr.p, a)
        if isinstance(expr, ExpPolyMinusConst):
            return ExpPolyMinusConst(expr.p, expr.a + a)
        if isinstance(expr, RationalFromDivisor):
            return _rational_shift(expr, a, max_rational_degree)
    if isinstance(expr, ExpPoly) and isinstance(other, ExpPoly):
        diff = expr.p - other.p
        if diff.is_zero:
            raise IdenticalComposition("the two exponentials coincide")
        if diff.degree == 0:
            c = cmath.exp(diff.coeffs[0]) - 1.0
            if c == 0:
                raise IdenticalComposition("the two exponentials coincide")
            return Product(Const(c), other)
        # e^P - e^Q = e^Q (e^(P-Q) - 1)
        return Product(other, ExpPolyMinusConst(diff, 1.0))
    return Difference(expr, other)


def _numerator_denominator(expr: RationalFromDivisor) -> tuple[Polynomial, Polynomial]:
    zeros, poles = [], []
    if expr.divisor.origin_order > 0:
        zeros.extend([0j] * expr.divisor.origin_order)
    elif expr.divisor.origin_order < 0:
        poles.extend([0j] * (-expr.divisor.origin_order))
    for p, m in expr.divisor.entries:
        (zeros if m > 0 else poles).extend([p] * abs(m))
    return Polynomial.from_roots(zeros), Polynomial.from_roots(poles)


def _rational_shift(expr: RationalFromDivisor, a: complex,
                    max_degree: int) -> RationalFromDivisor:
    """(f - a) as a fresh rational: roots of s*N - a*D over the same poles."""
    num, den = _numerator_denominator(expr)
    total = num.degree + den.degree
    if total > max_degree:
        raise OpaqueExpr(
            f"rational shift needs degree {total} expansion; "
            "use preimages_in_disc for large divisors"
        )
    shifted = num.scale(expr.scale) - den.scale(a)
    if shifted.is_zero:
        raise ValueError("f is identically equal to a")
    zeros = cluster_roots(poly_roots(shifted))
    pairs = [(p, m) for p, m in zeros]
    pairs += [(p, -m) for p, m in expr.divisor.signed("poles").entries]
    org = -expr.divisor.signed("poles").origin_order
    div = Divisor.build(pairs, org)
    return RationalFromDivisor(shifted.leading, div)


# ---------------------------------------------------------------------------
# pre-images of a finite value
# ---------------------------------------------------------------------------


def preimages_in_disc(expr: FunctionExpr, a, r: float,
                      residual_tol: float = 1e-6) -> Divisor:
    """Divisor of solutions of f(z) = a in |z| <= r.

    ``a`` may be 0, a finite complex number, or ``None``/``inf`` for poles.
    Finite nonzero values are handled per variant: branch enumeration for
    exponentials, polynomial expansion for small rationals, and a seeded
    Newton pass (one a-point per stored zero) for large rationals whose
    numerator degree dominates.
    """
    if a is None or (isinstance(a, str) and a == "inf") or a == math.inf:
        return expr.divisor_in_disc(r).signed("poles")
    a = complex(a)
    if a == 0:
        return expr.divisor_in_disc(r).signed("zeros")
    if isinstance(expr, Const):
        if expr.value == a:
            raise ValueError("constant expression equals the target everywhere")
        return EMPTY_DIVISOR
    if isinstance(expr, ExpPoly):
        return ExpPolyMinusConst(expr.p, a).divisor_in_disc(r).signed("zeros")
    if isinstance(expr, ExpPolyMinusConst):
        target = a + expr.a
        if target == 0:
            return EMPTY_DIVISOR
        return ExpPolyMinusConst(expr.p, target).divisor_in_disc(r).signed("zeros")
    if isinstance(expr, ComposePoly):
        inner_r = expr.p.coeff_bound(r)
        base = preimages_in_disc(expr.child, a, inner_r, residual_tol)
        pairs = []
        targets = list(base.entries)
        if base.origin_order:
            targets.append((0j, base.origin_order))
        for w, m in targets:
            for root, k in cluster_roots(poly_roots(expr.p - Polynomial((w,)))):
                if abs(root) <= r:
                    pairs.append((root, m * k))
        return Divisor.build(pairs)
    if isinstance(expr, RationalFromDivisor):
        total = sum(abs(m) for _, m in expr.divisor.entries) + abs(expr.divisor.origin_order)
        if total <= 24:
            shifted = _rational_shift(expr, a, 24)
            return shifted.divisor_in_disc(r).signed("zeros")
        return _rational_preimages_newton(expr, a, r, residual_tol)
    raise OpaqueExpr(f"cannot solve f = a for variant {type(expr).__name__}")


def _rational_preimages_newton(expr: RationalFromDivisor, a: complex, r: float,
                               residual_tol: float, steps: int = 60) -> Divisor:
    """a-points of a large rational via damped Newton from many starts.

    Every stored zero contributes nine starts: one analytic step
    z0 + a/f'(z0) (exact in the well-separated regime) and eight points on a
    ring scaled to the local divisor spacing.  Steps are damped to a quarter
    of the local scale so iterates cannot tunnel between basins, and every
    limit is residual-checked before it counts.  The result is a *sound*
    subset of the solution set, not always a complete one; callers that need
    complete multisets (the invariant values 0 and infinity) never reach
    this path.
    """
    zeros_div = expr.divisor.signed("zeros")
    poles_div = expr.divisor.signed("poles")
    nz = zeros_div.origin_order + sum(m for _, m in zeros_div.entries)
    npole = poles_div.origin_order + sum(m for _, m in poles_div.entries)
    if nz < npole:
        raise RootFindFailure(
            "pre-image Newton pass needs numerator degree >= denominator degree"
        )
    seeds = np.asarray(zeros_div.multiset(), dtype=complex)
    if seeds.size == 0:
        return EMPTY_DIVISOR
    allpts = np.asarray(expr.divisor.multiset(), dtype=complex)

    starts: list[complex] = []
    for z0 in seeds:
        gaps = np.abs(allpts - z0)
        dmin = float(np.min(gaps[gaps > 1e-12 * (1.0 + abs(z0))], initial=np.inf))
        if not np.isfinite(dmin):
            dmin = 1.0 + abs(z0)
        log_fp = cmath.log(expr.scale) if expr.scale != 1 else 0j
        for p, m in expr.divisor.entries:
            if z0 != p:
                log_fp += m * cmath.log(z0 - p)
        if expr.divisor.origin_order and z0 != 0:
            log_fp += expr.divisor.origin_order * cmath.log(z0)
        if log_fp.real <= 700.0:
            first = a * cmath.exp(-log_fp)
            if abs(first) <= 0.5 * dmin:
                starts.append(complex(z0) + first)
        for j in range(8):
            starts.append(complex(z0)
                          + 0.35 * dmin * cmath.exp(1j * TWO_PI * (j + 0.5) / 8))

    z = np.asarray(starts, dtype=complex)
    with np.errstate(all="ignore"):
        for _ in range(steps):
            v = expr._values(z)
            d = expr._logderivs(z)
            step = (v - a) / (v * d)
            bad = ~np.isfinite(step)
            step[bad] = 0.0
            cap = 0.25 * (1.0 + np.abs(z))
            big = np.abs(step) > cap
            step[big] *= (cap[big] / np.abs(step[big]))
            z = z - step
        v = expr._values(z)
        ok = (np.isfinite(z) & np.isfinite(v)
              & (np.abs(z) <= r)
              & (np.abs(v - a) <= residual_tol * (1.0 + abs(a))))
    hits = sorted((complex(q) for q in z[ok]),
                  key=lambda q: (abs(q), q.real, q.imag))

    found: list[complex] = []
    for q in hits:
        if not any(abs(q - p) <= 1e-8 * (1.0 + abs(q)) for p in found):
            found.append(q)
    if not found and np.any(np.abs(seeds) <= r):
        raise RootFindFailure(
            "no solution of f = a is separable from the zeros of f in double "
            "precision at this scale"
        )
    return Divisor.build([(q, 1) for q in found], merge_tol=1e-13)
