"""Fixed-branch algebraic self-maps of the plane and their orbit machinery.

A map here is tau(z) = z + a_{n-1} w^{n-1} + ... + a_1 w + a_0 where w is a
chosen single-valued branch of z^{1/n}.  The branch is fixed relative to the
principal argument (Arg in (-pi, pi]); an optional continuity-tracking orbit
mode follows the root along the trajectory instead and reports when it
leaves the principal sheet.

The census operation checks forward invariance of solution multisets: every
point of f^{-1}(a) inside a disc should map under tau onto another point of
the same multiset, up to matching tolerance, unless the image escapes the
disc (counted separately, not a violation).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .fnmodel import (
    BranchAmbiguity,
    FunctionExpr,
    OrderMismatch,
    Polynomial,
    TWO_PI,
    preimages_in_disc,
)


@dataclass(frozen=True)
class AlgebraicMap:
    """tau(z) = z + sum_k alphas[k] * w^k with w a fixed n-th root branch."""

    n: int
    alphas: tuple[complex, ...]
    branch: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("root order must be at least 1")
        al = tuple(complex(a) for a in self.alphas)
        if len(al) != self.n:
            raise ValueError(f"expected {self.n} coefficients, got {len(al)}")
        object.__setattr__(self, "alphas", al)
        if not 0 <= self.branch < self.n:
            raise ValueError("branch index out of range")

    def root(self, z: complex, branch: int | None = None) -> complex:
        """The selected branch of z^{1/n}."""
        if self.n == 1:
            return complex(z)
        b = self.branch if branch is None else branch
        if z == 0:
            return 0j
        mag = abs(z) ** (1.0 / self.n)
        ang = (cmath.phase(z) + TWO_PI * b) / self.n
        return mag * cmath.exp(1j * ang)

    def _shift(self, w: complex) -> complex:
        """The increment sum_k alphas[k] w^k, evaluated one fixed way.

        Orbit stepping and census image-pushing must agree bit for bit, so
        both funnel through here rather than re-deriving the sum.
        """
        acc = 0j
        for a in reversed(self.alphas):
            acc = acc * w + a
        return acc

    def apply_to_root(self, w: complex) -> complex:
        """tau expressed through w: w^n + sum alphas[k] w^k."""
        return w**self.n + self._shift(w)

    def __call__(self, z: complex, branch: int | None = None) -> complex:
        return complex(z) + self._shift(self.root(z, branch))


def tau_eval(m: AlgebraicMap, z: complex, branch: int | None = None) -> complex:
    return m(z, branch)


def binomial_shift_map(n: int, c: complex, branch: int = 0) -> AlgebraicMap:
    """The map (z^{1/n} + c)^n, written out in powers of the root."""
    c = complex(c)
    alphas = [math.comb(n, k) * c ** (n - k) for k in range(n)]
    return AlgebraicMap(n=n, alphas=tuple(alphas), branch=branch)


def polynomialize(m: AlgebraicMap, n: int) -> Polynomial:
    """The polynomial obtained by precomposing tau with z -> z^n and writing
    the root formally as z: z^n + a_{n-1} z^{n-1} + ... + a_0."""
    if n != m.n:
        raise OrderMismatch(f"map has root order {m.n}, not {n}")
    return Polynomial(m.alphas + (1.0 + 0j,))


# ---------------------------------------------------------------------------
# orbits
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Orbit:
    seed: complex
    points: tuple[complex, ...]
    classification: str  # escaped | bounded | undecided
    cut_crossed: tuple[bool, ...]

    @property
    def escape_flag(self) -> bool:
        return self.classification == "escaped"


def _classify(points: tuple[complex, ...]) -> str:
    mods = np.abs(np.asarray(points))
    window = max(5, len(points) // 4)
    tail = mods[-window:]
    if tail.size < 3:
        return "undecided"
    diffs = np.diff(tail)
    if np.all(diffs > 0):
        return "escaped"
    if np.all(np.abs(diffs) <= 1e-9 * (1.0 + tail[:-1])):
        return "bounded"
    if tail.max() <= mods.max() and tail[-1] < mods.max():
        return "bounded"
    return "undecided"


def orbit(m: AlgebraicMap, seed: complex, K: int, mode: str = "fixed") -> Orbit:
    """Iterate tau K times from the seed.

    ``mode='fixed'`` evaluates every step on the map's own branch.
    ``mode='track'`` picks, at each step, the n-th root nearest the previous
    step's root, flagging steps where that choice left the principal branch;
    an exact tie between candidate roots raises :class:`BranchAmbiguity`.
    """
    if K < 0:
        raise ValueError("iteration count must be nonnegative")
    if mode not in ("fixed", "track"):
        raise ValueError("mode must be 'fixed' or 'track'")
    z = complex(seed)
    points = [z]
    cuts = [False]
    prev_w = None
    for _ in range(K):
        if mode == "fixed" or prev_w is None or self_root_trivial(m):
            w = m.root(z)
            crossed = False
        else:
            cands = [m.root(z, b) for b in range(m.n)]
            dists = [abs(w_c - prev_w) for w_c in cands]
            order = sorted(range(m.n), key=dists.__getitem__)
            best = order[0]
            if m.n > 1:
                gap = dists[order[1]] - dists[best]
                if gap <= 1e-12 * (1.0 + abs(cands[best])):
                    raise BranchAmbiguity(
                        f"two root branches equidistant from the tracked root at z={z}"
                    )
            w = cands[best]
            crossed = best != m.branch
        prev_w = w
        z = z + m._shift(w)
        points.append(z)
        cuts.append(crossed)
    return Orbit(seed=complex(seed), points=tuple(points),
                 classification=_classify(tuple(points)),
                 cut_crossed=tuple(cuts))


def self_root_trivial(m: AlgebraicMap) -> bool:
    return m.n == 1


def escape_probe(m: AlgebraicMap, seeds, K: int = 40) -> list[tuple[complex, str]]:
    """Classify each seed's orbit as escaped / bounded / undecided."""
    if K < 10:
        raise ValueError("need at least 10 iterations for a trend test")
    return [(complex(s), orbit(m, s, K).classification) for s in seeds]


# ---------------------------------------------------------------------------
# forward-invariance census
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class InvarianceReport:
    value: complex | None  # None encodes the pole set
    verdict: bool
    n_points: int
    n_matched: int
    n_boundary_leaks: int
    n_violations: int
    max_matched_distance: float
    assignment_ambiguous: bool
    n_value_matched: int = 0
    matched: tuple[tuple[complex, complex, complex, float], ...] = field(repr=False, default=())
    violations: tuple[tuple[complex, complex], ...] = ()

    def describe(self) -> str:
        tag = "inf" if self.value is None else format_complex(self.value)
        state = "pass" if self.verdict else "FAIL"
        extra = (f", {self.n_value_matched} matched by value"
                 if self.n_value_matched else "")
        return (f"value {tag}: {state} ({self.n_matched} matched{extra}, "
                f"{self.n_boundary_leaks} left disc, {self.n_violations} violations, "
                f"max distance {self.max_matched_distance:.3e})")


def format_complex(v: complex) -> str:
    if v.imag == 0:
        return f"{v.real:g}"
    return f"{v.real:g}{v.imag:+g}i"


def _image_hits_value(expr: FunctionExpr, q: complex, a: complex | None,
                      vtol: float) -> bool:
    """Overflow-safe test of |f(q) - a| <= vtol * (1 + |a|).

    Works through the log channel so poles and astronomically large values
    never overflow; ``a=None`` stands for the pole set.
    """
    lm, ag = expr._log_parts(np.asarray([complex(q)], dtype=complex))
    lm = float(lm[0])
    if a is None:
        return lm >= -math.log(vtol)
    if a == 0:
        return lm <= math.log(vtol)
    la = math.log(abs(a))
    if lm - la > 40.0:  # |f(q)| dwarfs |a|: refuted without exponentiating
        return False
    if la - lm > 40.0:  # |f(q)| negligible next to |a|
        return abs(a) <= vtol * (1.0 + abs(a))
    v = cmath.exp(complex(lm, float(ag[0])))
    return abs(v - a) <= vtol * (1.0 + abs(a))


def invariance_census(expr: FunctionExpr, m: AlgebraicMap, values, R: float,
                      tol: float = 1e-9, value_tol: float = 1e-6) -> list[InvarianceReport]:
    """Check tau(f^{-1}(a)) stays inside f^{-1}(a) for each requested value.

    For each value: collect the solution multiset in |z| <= R, push every
    point through tau, drop images leaving the disc (boundary leaks), and
    greedily match the rest to the nearest unconsumed multiset point.  A
    match requires distance <= tol * (1 + |image|).

    An unmatched in-disc image is not condemned on distance alone: the
    multiset may be an incomplete enumeration (generic values of a large
    rational are found by iteration, and basins can hide solutions).  The
    image q is re-tried by value, and counts as matched when f(q) = a holds
    to ``value_tol``; only value-refuted images are violations.  Verdict is
    true when no in-disc image ends up refuted.
    """
    reports = []
    for a in values:
        is_inf = a is None or (isinstance(a, str) and a.lower() in ("inf", "oo"))
        aval = None if is_inf else complex(a)
        div = preimages_in_disc(expr, aval, R)
        pts = div.multiset()
        images = []
        for p in pts:
            images.append((p, m(p)))
        # sort images for deterministic greedy order
        images.sort(key=lambda pq: (abs(pq[1]), pq[1].real, pq[1].imag))
        available = list(pts)
        matched = []
        violations = []
        leaks = 0
        by_value = 0
        ambiguous = False
        for p, q in images:
            if abs(q) > R:
                leaks += 1
                continue
            j = -1
            if available:
                dists = [abs(q - t) for t in available]
                j = int(np.argmin(dists))
            limit = tol * (1.0 + abs(q))
            if j >= 0 and dists[j] <= limit:
                near = sorted(dists)
                if len(near) > 1 and near[1] - near[0] <= 10.0 * limit:
                    ambiguous = True
                matched.append((p, q, available[j], dists[j]))
                available.pop(j)
            elif _image_hits_value(expr, q, aval, value_tol):
                by_value += 1
            else:
                violations.append((p, q))
        verdict = not violations
        reports.append(InvarianceReport(
            value=aval,
            verdict=verdict,
            n_points=len(pts),
            n_matched=len(matched),
            n_boundary_leaks=leaks,
            n_violations=len(violations),
            max_matched_distance=max((d for *_, d in matched), default=0.0),
            assignment_ambiguous=ambiguous,
            n_value_matched=by_value,
            matched=tuple(matched),
            violations=tuple(violations),
        ))
    return reports
