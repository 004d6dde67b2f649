"""Complex polynomial arithmetic, conjugate-reciprocal transform and root finding.

Coefficients are stored in ascending order: ``coeffs[k]`` multiplies ``z**k``.
The root finder is a simultaneous Aberth-Ehrlich iteration started on a
circle, with a companion-matrix eigenvalue fallback when the iteration
stalls.  Root clusters are merged into multiple roots and the cluster
centroid is polished on the matching derivative, so genuinely multiple
roots come back at full accuracy.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    ConvergenceFailureError,
    DegenerateQuotientError,
    DomainError,
    InvalidDegreeError,
    VanishingDerivativeError,
)

# Trailing coefficients below this magnitude are trimmed when fixing the
# degree; deficiency against a larger formal degree is tracked, not erred.
TRIM_THRESHOLD = 1e-300

DEFAULT_ROOT_TOL = 1e-12
MAX_ITERATIONS = 500

# Floor on the merge radius for multiplicity clustering.  Aberth inclusion
# disks widen this adaptively for genuine multiple roots.
CLUSTER_FLOOR = 1e-7

_EPS = float(np.finfo(float).eps)


def _trim(coeffs: Iterable[complex]) -> tuple[complex, ...]:
    cs = [complex(c) for c in coeffs]
    while cs and abs(cs[-1]) < TRIM_THRESHOLD:
        cs.pop()
    return tuple(cs)


@dataclass(frozen=True)
class Polynomial:
    """Immutable complex polynomial with ascending coefficients."""

    coeffs: tuple[complex, ...]

    def __init__(self, coeffs: Iterable[complex]):
        object.__setattr__(self, "coeffs", _trim(coeffs))

    @classmethod
    def from_roots(cls, roots: Sequence[complex], leading: complex = 1.0) -> "Polynomial":
        """Monic-by-default product of (z - r) over the given roots."""
        cs = [complex(leading)]
        for r in roots:
            r = complex(r)
            nxt = [0j] * (len(cs) + 1)
            for k, c in enumerate(cs):
                nxt[k + 1] += c
                nxt[k] -= c * r
            cs = nxt
        return cls(cs)

    @property
    def degree(self) -> int | None:
        """Degree of the trimmed polynomial; None for the zero polynomial."""
        return len(self.coeffs) - 1 if self.coeffs else None

    @cached_property
    def _array(self) -> np.ndarray:
        return np.asarray(self.coeffs, dtype=complex)

    def __call__(self, z: complex) -> complex:
        if not self.coeffs:
            return 0j
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def derivative(self) -> "Polynomial":
        return Polynomial([k * c for k, c in enumerate(self.coeffs)][1:])

    def __mul__(self, other: "Polynomial") -> "Polynomial":
        if not self.coeffs or not other.coeffs:
            return Polynomial(())
        return Polynomial(np.convolve(self._array, other._array))

    def __sub__(self, other: "Polynomial") -> "Polynomial":
        n = max(len(self.coeffs), len(other.coeffs))
        a = list(self.coeffs) + [0j] * (n - len(self.coeffs))
        b = list(other.coeffs) + [0j] * (n - len(other.coeffs))
        return Polynomial([x - y for x, y in zip(a, b)])


def conjugate_reciprocal(p: Polynomial, n: int) -> Polynomial:
    """Reflect zeros across the unit circle: coefficient k becomes conj(c[n-k]).

    ``n`` is the formal degree and must be at least the degree of ``p``;
    zeros of ``p`` at the origin reflect to infinity and simply drop the
    degree of the result.
    """
    deg = p.degree
    if deg is None:
        return Polynomial(())
    if n < deg:
        raise InvalidDegreeError(f"formal degree {n} below polynomial degree {deg}")
    padded = list(p.coeffs) + [0j] * (n + 1 - len(p.coeffs))
    return Polynomial([padded[n - k].conjugate() for k in range(n + 1)])


@dataclass(frozen=True)
class Root:
    """A root cluster: centroid location, multiplicity and backward error."""

    location: complex
    multiplicity: int
    residual: float


@dataclass(frozen=True)
class RootSet:
    roots: tuple[Root, ...]
    infinity_deficiency: int

    def expanded(self) -> list[complex]:
        """Roots repeated according to multiplicity, in deterministic order."""
        out: list[complex] = []
        for r in self.roots:
            out.extend([r.location] * r.multiplicity)
        return out


def _sort_key(z: complex) -> tuple[float, float]:
    return (abs(z), cmath.phase(z))


def _horner_many(coeffs: np.ndarray, x: np.ndarray):
    """Vectorized Horner returning p(x), p'(x) and sum_k |c_k||x|^k."""
    d = coeffs.shape[-1] - 1
    p = np.broadcast_to(coeffs[..., d, None], x.shape).copy()
    dp = np.zeros_like(x)
    alpha = np.abs(p).copy()
    ax = np.abs(x)
    for k in range(d - 1, -1, -1):
        dp = dp * x + p
        p = p * x + coeffs[..., k, None]
        alpha = alpha * ax + np.abs(coeffs[..., k, None])
    return p, dp, alpha


def _initial_circle(coeffs: np.ndarray) -> np.ndarray:
    """Starting points on a circle sized by max |c_k/c_d|^(1/(d-k))."""
    m, width = coeffs.shape
    d = width - 1
    mono = coeffs / coeffs[:, -1:]
    mags = np.abs(mono[:, :-1])
    expo = 1.0 / (d - np.arange(d))
    with np.errstate(divide="ignore"):
        radius = np.max(np.where(mags > 0, mags**expo, 0.0), axis=1)
    radius = np.maximum(radius, 1e-6)
    angles = 2.0 * np.pi * (np.arange(d) + 0.25) / d + 0.39
    return radius[:, None] * np.exp(1j * angles)[None, :]


def _aberth_iterate(coeffs: np.ndarray, x: np.ndarray, max_iter: int):
    """Run Aberth-Ehrlich steps in place; returns (x, row_converged)."""
    m, width = coeffs.shape
    d = width - 1
    tiny = 1e-300
    bound_factor = 4.0 * (d + 1) * _EPS
    idx = np.arange(d)
    row_ok = np.zeros(m, dtype=bool)
    for _ in range(max_iter):
        p, dp, alpha = _horner_many(coeffs, x)
        ok = np.abs(p) <= bound_factor * alpha + tiny
        row_ok = np.all(ok, axis=1)
        if np.all(row_ok):
            break
        diff = x[:, :, None] - x[:, None, :]
        diff[:, idx, idx] = np.inf
        # coincident iterates: nudge apart rather than divide by zero
        coincident = diff == 0
        if np.any(coincident):
            diff = np.where(coincident, 1e-12 * (1 + 1j), diff)
        s = np.sum(1.0 / diff, axis=2)
        w = p / np.where(dp == 0, tiny, dp)
        denom = 1.0 - w * s
        delta = w / np.where(denom == 0, tiny, denom)
        x = x - np.where(ok, 0.0, delta)
    return x, row_ok


def _companion_roots(coeffs: np.ndarray) -> np.ndarray:
    """Eigenvalues of the companion matrices of monic-scaled rows."""
    m, width = coeffs.shape
    d = width - 1
    mono = coeffs / coeffs[:, -1:]
    comp = np.zeros((m, d, d), dtype=complex)
    comp[:, np.arange(1, d), np.arange(d - 1)] = 1.0
    comp[:, :, -1] = -mono[:, :d]
    return np.linalg.eigvals(comp)


def _solve_batch(
    coeffs: np.ndarray, max_iter: int = MAX_ITERATIONS, engine: str = "aberth"
) -> np.ndarray:
    """All roots of each coefficient row (ascending, nonzero leading column)."""
    d = coeffs.shape[1] - 1
    if d == 0:
        return np.zeros((coeffs.shape[0], 0), dtype=complex)
    scale = np.max(np.abs(coeffs), axis=1, keepdims=True)
    c = coeffs / scale
    if d == 1:
        return (-c[:, 0] / c[:, 1])[:, None]
    x = _companion_roots(c) if engine == "companion" else _initial_circle(c)
    x, row_ok = _aberth_iterate(c, x, max_iter)
    if not np.all(row_ok):
        bad = ~row_ok
        x[bad] = _companion_roots(c[bad])
        # polish the fallback rows with a short second iteration
        x[bad], row_ok2 = _aberth_iterate(c[bad], x[bad], 50)
        if not np.all(row_ok2):
            p, _, alpha = _horner_many(c[bad], x[bad])
            worst = float(np.max(np.abs(p) / np.maximum(alpha, 1e-300)))
            raise ConvergenceFailureError(
                f"root iteration stalled (residual {worst:.3e})",
                best_iterate=x[bad][0].tolist(),
                residual=worst,
            )
    return x


def _derivative_coeffs(c: np.ndarray, order: int) -> np.ndarray:
    for _ in range(order):
        c = c[1:] * np.arange(1, len(c))
    return c


def _backward_error(c: np.ndarray, z: complex) -> float:
    """|p(z)| relative to the coefficient scale sum_k |c_k||z|^k."""
    p = 0j
    alpha = 0.0
    az = abs(z)
    for k in range(len(c) - 1, -1, -1):
        p = p * z + c[k]
        alpha = alpha * az + abs(c[k])
    return abs(p) / max(alpha, 1e-300)


def _comp_horner(c, z: complex) -> tuple[complex, complex]:
    """Horner with Kahan-compensated additions; returns (p(z), p'(z))."""
    acc = complex(c[-1])
    comp = 0j
    dacc = 0j
    for k in range(len(c) - 2, -1, -1):
        dacc = dacc * z + acc + comp
        prod = acc * z
        y = complex(c[k]) - comp
        t = prod + y
        comp = (t - prod) - y
        acc = t
    return acc + comp, dacc


def _newton_polish(c, z: complex, steps: int = 40) -> complex:
    """Compensated-evaluation Newton; safe for simple roots."""
    for _ in range(steps):
        p, dp = _comp_horner(c, z)
        if dp == 0:
            break
        step = p / dp
        z = z - step
        if abs(step) <= _EPS * (abs(z) + 1e-300):
            break
    return z


def _cluster(c: np.ndarray, raw: np.ndarray) -> list[tuple[complex, int]]:
    """Merge raw roots into multiplicity clusters via inclusion radii."""
    d = len(raw)
    p, dp, _ = _horner_many(c[None, :], raw[None, :])
    p, dp = p[0], dp[0]
    with np.errstate(divide="ignore", invalid="ignore"):
        incl = d * np.abs(p) / np.abs(dp)
    incl = np.where(np.isfinite(incl), incl, np.inf)

    parent = list(range(d))

    def find(i: int) -> int:
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(d):
        for j in range(i + 1, d):
            floor = CLUSTER_FLOOR * (1.0 + max(abs(raw[i]), abs(raw[j])))
            limit = min(incl[i], 1.0) + min(incl[j], 1.0) + floor
            if abs(raw[i] - raw[j]) <= limit:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri

    groups: dict[int, list[int]] = {}
    for i in range(d):
        groups.setdefault(find(i), []).append(i)

    clusters: list[tuple[complex, int]] = []
    for members in groups.values():
        m = len(members)
        pts = raw[members]
        center = complex(np.mean(pts))
        if m > 1:
            # a multiple root is a simple root of the (m-1)-th derivative
            spread = float(np.max(np.abs(pts - center))) if m else 0.0
            dc = _derivative_coeffs(c, m - 1)
            polished = _newton_polish(dc, center)
            if abs(polished - center) <= 4.0 * spread + 1e-6:
                center = polished
        else:
            center = _newton_polish(c, center, steps=6)
        clusters.append((center, m))
    clusters.sort(key=lambda t: _sort_key(t[0]))
    return clusters


def find_roots(
    p: Polynomial,
    tol: float = DEFAULT_ROOT_TOL,
    formal_degree: int | None = None,
    max_iterations: int = MAX_ITERATIONS,
    refine=None,
    engine: str = "aberth",
) -> RootSet:
    """All roots of ``p`` with multiplicity clusters and residual certificates.

    Residuals are relative backward errors |p(z)| / sum_k |c_k||z|^k and must
    come in below ``tol``.  ``formal_degree`` records how many roots were
    pushed to infinity by trailing-coefficient deficiency.  ``refine``, when
    given, is applied to each raw root before multiplicity clustering;
    callers with extra structure (for example a factored form of the same
    function) use it to sharpen ill-conditioned roots that the expanded
    coefficients cannot resolve.
    """
    deg = p.degree
    if deg is None or deg < 1:
        raise DomainError("root finding requires degree >= 1")
    if formal_degree is None:
        formal_degree = deg
    if formal_degree < deg:
        raise InvalidDegreeError(f"formal degree {formal_degree} below degree {deg}")

    coeffs = list(p.coeffs)
    origin_mult = 0
    while coeffs and coeffs[0] == 0:
        origin_mult += 1
        coeffs.pop(0)

    roots: list[Root] = []
    if origin_mult:
        roots.append(Root(0j, origin_mult, 0.0))

    d = len(coeffs) - 1
    if d >= 1:
        arr = np.asarray(coeffs, dtype=complex)
        scaled = arr / np.max(np.abs(arr))
        raw = _solve_batch(scaled[None, :], max_iterations, engine=engine)[0]
        if refine is not None:
            raw = np.asarray([refine(complex(z)) for z in raw])
        for center, mult in _cluster(scaled, raw):
            center = complex(center)
            res = float(_backward_error(scaled, center))
            if res > tol:
                raise ConvergenceFailureError(
                    f"root residual {res:.3e} exceeds tolerance {tol:.1e}",
                    best_iterate=center,
                    residual=res,
                )
            roots.append(Root(center, mult, res))

    roots.sort(key=lambda r: _sort_key(r.location))
    return RootSet(tuple(roots), formal_degree - deg)


@dataclass(frozen=True)
class PolyQuotients:
    """Mean value quotients of P(z) = z * prod(z - a_i) at its critical points."""

    values: tuple[float, ...]
    smallest: float
    largest: float


def poly_smale_quotients(
    zeros: Sequence[complex], tol: float = DEFAULT_ROOT_TOL
) -> PolyQuotients:
    """Quotients |P(b) / (b P'(0))| over the critical points b of P.

    ``zeros`` are the nonzero roots a_i of the normalized polynomial
    P(z) = z * prod(z - a_i); P'(0) = prod(-a_i) is used in exact product
    form.  The quotient list carries multiplicity and has length deg(P) - 1.
    """
    zs = [complex(a) for a in zeros]
    if not zs:
        raise DomainError("at least one nonzero root is required")
    if any(a == 0 for a in zs):
        raise VanishingDerivativeError("a root at the origin makes P'(0) vanish")

    poly = Polynomial.from_roots([0j] + zs)
    crit = find_roots(poly.derivative(), tol)

    values: list[float] = []
    for b in crit.expanded():
        if abs(b) < 1e-13:
            raise DegenerateQuotientError(f"critical point {b} numerically at the origin")
        num = 1.0
        den = 1.0
        for a in zs:
            num *= abs(b - a)
            den *= abs(a)
        values.append(num / den)
    return PolyQuotients(tuple(values), min(values), max(values))
