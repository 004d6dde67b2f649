"""Smale mean value quotients of Blaschke products, bounds and extremal families.

For a normalized product (simple zero at the origin, nonvanishing derivative
there) the quotient at a critical point zeta is |B(zeta) / (zeta B'(0))|.
The minimum over critical points is ``min_quotient`` and the maximum is
``max_quotient``; every degree obeys a proven ceiling on the former and a
strict floor 4^{-n} on the latter, both computed here in closed form.

Two one-parameter families realize the extremal levels: a rotationally
symmetric family whose min-quotient tends to 1, and a family with a single
multiple critical point whose max-quotient tends to 1/n.  A rescaling
bridge connects Blaschke quotients to plain polynomial quotients.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .blaschke import (
    BlaschkeProduct,
    MobiusAutomorphism,
    compose_pre,
    hyperbolic_derivative,
    pseudo_hyperbolic,
)
from .errors import (
    DegenerateNormalizationError,
    DomainError,
    InvalidZeroError,
    NoCriticalPointsError,
    NotNormalizedError,
    VanishingDerivativeError,
)
from .polycore import DEFAULT_ROOT_TOL, poly_smale_quotients

# Tighter validity edge for the extremal families: parameters this close to
# the unit circle leave the documented conditioning range.
FAMILY_EDGE = 1e-6

QUOTIENT_TIE_TOL = 1e-10


@dataclass(frozen=True)
class QuotientEntry:
    zeta: complex
    value: float


@dataclass(frozen=True)
class BoundFlag:
    """A violated inequality; margin = lhs - rhs (positive = violation)."""

    inequality: str
    lhs: float
    rhs: float
    margin: float


@dataclass(frozen=True)
class QuotientReport:
    product: BlaschkeProduct
    quotients: tuple[QuotientEntry, ...]
    min_quotient: float
    max_quotient: float
    min_indices: tuple[int, ...]
    max_indices: tuple[int, ...]
    min_quotient_bound: float
    max_quotient_floor: float
    flags: tuple[BoundFlag, ...]

    def to_record(self) -> dict:
        return {
            "degree": self.product.degree,
            "min_quotient": self.min_quotient,
            "max_quotient": self.max_quotient,
            "quotients": [
                {"zeta": {"re": q.zeta.real, "im": q.zeta.imag}, "value": q.value}
                for q in self.quotients
            ],
            "min_indices": list(self.min_indices),
            "max_indices": list(self.max_indices),
            "min_quotient_bound": self.min_quotient_bound,
            "max_quotient_floor": self.max_quotient_floor,
            "flags": [
                {
                    "inequality": f.inequality,
                    "lhs": f.lhs,
                    "rhs": f.rhs,
                    "margin": f.margin,
                }
                for f in self.flags
            ],
        }


def _origin_multiplicity(product: BlaschkeProduct) -> int:
    return sum(1 for z in product.zeros if z == 0)


def smale_quotients(
    product: BlaschkeProduct, tol: float = DEFAULT_ROOT_TOL
) -> QuotientReport:
    """Per-critical-point quotients |B(zeta)/(zeta B'(0))| with min and max.

    Requires a simple zero at the origin.  |B(zeta)/zeta| is evaluated as
    the factor product over the nonzero zeros, so the origin factor cancels
    exactly and small critical points lose no accuracy; B'(0) is the exact
    product of the negated nonzero zeros.  All indices attaining the min or
    the max are reported.
    """
    n = product.degree
    if n < 2:
        raise NoCriticalPointsError("quotients need degree >= 2")
    m0 = _origin_multiplicity(product)
    if m0 == 0:
        raise NotNormalizedError("product has no zero at the origin")
    if m0 >= 2:
        raise VanishingDerivativeError(
            f"origin zero of multiplicity {m0} makes B'(0) vanish"
        )
    others = [z for z in product.zeros if z != 0]
    dmag = 1.0
    for z in others:
        dmag *= abs(z)

    entries: list[QuotientEntry] = []
    for point in product.critical_points(tol).interior:
        zeta = point.location
        ratio = 1.0
        for z in others:
            ratio *= abs(zeta - z) / abs(1.0 - z.conjugate() * zeta)
        value = ratio / dmag
        entries.extend([QuotientEntry(zeta, value)] * point.multiplicity)

    values = [e.value for e in entries]
    s, t = min(values), max(values)
    min_idx = tuple(
        i for i, v in enumerate(values) if v - s <= QUOTIENT_TIE_TOL * max(1.0, s)
    )
    max_idx = tuple(
        i for i, v in enumerate(values) if t - v <= QUOTIENT_TIE_TOL * max(1.0, t)
    )
    bound = min_quotient_bound(n)
    floor = max_quotient_floor(n)
    flags: list[BoundFlag] = []
    if s > bound + 1e-9:
        flags.append(BoundFlag("min_quotient_bound", s, bound, s - bound))
    if not t > floor:
        flags.append(BoundFlag("max_quotient_floor", t, floor, floor - t))
    return QuotientReport(
        product, tuple(entries), s, t, min_idx, max_idx, bound, floor, tuple(flags)
    )


def general_quotients(
    product: BlaschkeProduct, w: complex, tol: float = DEFAULT_ROOT_TOL
) -> tuple[float, ...]:
    """Quotients at an arbitrary base point: |[B(zeta), B(w)]/[zeta, w]| / |D_H B(w)|.

    Agrees as a multiset with the quotients of the product normalized at w.
    """
    w = complex(w)
    if not abs(w) < 1.0:
        raise DomainError("base point must lie in the open unit disk")
    if abs(product.derivative(w)) <= 1e-12:
        raise DegenerateNormalizationError(f"derivative vanishes at base point {w}")
    bw = product(w)
    dh = abs(hyperbolic_derivative(product, w))
    values: list[float] = []
    for point in product.critical_points(tol).interior:
        zeta = point.location
        num = abs(pseudo_hyperbolic(product(zeta), bw))
        den = abs(pseudo_hyperbolic(zeta, w)) * dh
        values.extend([num / den] * point.multiplicity)
    return tuple(values)


def min_quotient_bound(n: int) -> float:
    """Universal ceiling 2(2n-1+(2n-3)4^{1/(1-n)})/(2n-1) on the min quotient.

    Strictly below 4 and increasing toward it like 4 - O(1/n).
    """
    if n < 2:
        raise DomainError("bound defined for degree >= 2")
    return 2.0 * (2 * n - 1 + (2 * n - 3) * 4.0 ** (1.0 / (1 - n))) / (2 * n - 1)


def max_quotient_floor(n: int) -> float:
    """Strict lower bound 4^{-n} that every max quotient must exceed."""
    if n < 2:
        raise DomainError("floor defined for degree >= 2")
    return 4.0 ** (-n)


def annulus_covering_bound(r: float) -> float:
    """max{2r, 4r/(1+4r^2)}, always < 4r; the second branch wins iff r <= 1/2.

    Ceiling on lim sup |f| toward the inner edge for univalent self-maps of
    an annulus r < |z| < 1 that fix the outer circle and omit 0.
    """
    if not 0.0 < r < 1.0:
        raise DomainError("radius must lie in (0, 1)")
    return max(2.0 * r, 4.0 * r / (1.0 + 4.0 * r * r))


def symmetric_family(n: int, alpha: float) -> BlaschkeProduct:
    """z (z^d - alpha^d)/(1 - alpha^d z^d) with d = n - 1: zeros on a ring.

    The zeros are 0 plus alpha times the d-th roots of unity, generated by
    angle arithmetic.  The d critical points inside the disk are the d-th
    roots of a common value, so the min quotient is attained d times.
    """
    d = _family_degree(n) - 1
    if not 0.0 < alpha < 1.0:
        raise DomainError("alpha must lie in (0, 1)")
    beta = alpha ** d
    _check_edge(beta)
    zeros = [0j] + [alpha * cmath.exp(2j * math.pi * k / d) for k in range(d)]
    return BlaschkeProduct(0.0, zeros)


def symmetric_family_min_quotient(n: int, beta: float) -> float:
    """Closed-form min quotient of the symmetric family at beta = alpha^{n-1}.

    Always below 1 and increasing to 1 as beta tends to 1, which pins the
    supremum level 1 for every degree >= 3.
    """
    d = _family_degree(n) - 1
    if not 0.0 < beta < 1.0:
        raise DomainError("beta must lie in (0, 1)")
    _check_edge(beta)
    radical = math.sqrt((d + 1) ** 2 - (d - 1) ** 2 * beta * beta)
    s = math.sqrt(1.0 - beta * beta)
    return (radical - (d + 1) * s) / (radical - (d - 1) * s) / (beta * beta)


def monocritical_family(n: int, a: float) -> BlaschkeProduct:
    """The composed family with a single critical point -a of multiplicity n-1.

    Pre-composing (z^n - a^n)/(1 - a^n z^n) with the automorphism sending 0
    to a gives a normalized product whose only critical point is -a.
    """
    deg = _family_degree(n)
    if not 0.0 < a < 1.0:
        raise DomainError("a must lie in (0, 1)")
    _check_edge(a)
    ring = [a * cmath.exp(2j * math.pi * k / deg) for k in range(deg)]
    base = BlaschkeProduct(0.0, ring)
    mobius = MobiusAutomorphism(0.0, -a)
    return compose_pre(base, mobius)


def monocritical_family_max_quotient(n: int, a: float) -> float:
    """Closed form (1/n)(1 - a^{2n})/(1 - a^2); above 1/n, tending to it as a -> 0."""
    deg = _family_degree(n)
    if not 0.0 < a < 1.0:
        raise DomainError("a must lie in (0, 1)")
    _check_edge(a)
    return (1.0 - a ** (2 * deg)) / (1.0 - a * a) / deg


def _family_degree(n: int) -> int:
    if not isinstance(n, int) or n < 2:
        raise DomainError("family degree must be an integer >= 2")
    return n


def _check_edge(param: float) -> None:
    if not param < 1.0 - FAMILY_EDGE:
        raise DomainError(
            f"parameter {param} beyond the documented validity edge 1 - {FAMILY_EDGE}"
        )


@dataclass(frozen=True)
class RescalePair:
    """A polynomial and its disk rescaling B_m, joined by an exact quotient identity.

    B_m has zeros {0} union {a_i / m}; the companion function
    f_m(z) = m^n B_m(z/m) = z prod (z - a_i)/(1 - conj(a_i) z / m^2) is
    evaluated from the unscaled roots, giving a second, independent code
    path for the same quotients.
    """

    m: float
    product: BlaschkeProduct
    source_zeros: tuple[complex, ...]

    def critical_points(self, tol: float = DEFAULT_ROOT_TOL) -> list[complex]:
        return self.product.critical_points(tol).expanded()

    def blaschke_quotients(self, tol: float = DEFAULT_ROOT_TOL) -> list[float]:
        report = smale_quotients(self.product, tol)
        return [e.value for e in report.quotients]

    def scaled_eval(self, z: complex) -> complex:
        acc = complex(z)
        for a in self.source_zeros:
            acc *= (z - a) / (1.0 - a.conjugate() * z / (self.m * self.m))
        return acc

    def scaled_quotients(self, tol: float = DEFAULT_ROOT_TOL) -> list[float]:
        """Quotients of f_m at m * c_i, using f_m'(0) = prod(-a_i)."""
        dmag = 1.0
        for a in self.source_zeros:
            dmag *= abs(a)
        out = []
        for c in self.critical_points(tol):
            d = self.m * c
            ratio = 1.0
            for a in self.source_zeros:
                ratio *= abs(d - a) / abs(1.0 - a.conjugate() * d / (self.m * self.m))
            out.append(ratio / dmag)
        return out

    def identity_residuals(self, tol: float = DEFAULT_ROOT_TOL) -> list[float]:
        """|B_m quotient - f_m quotient| per critical point; an algebraic identity."""
        b = self.blaschke_quotients(tol)
        f = self.scaled_quotients(tol)
        return [abs(x - y) for x, y in zip(b, f)]

    def polynomial_quotients(self, tol: float = DEFAULT_ROOT_TOL) -> list[float]:
        return list(poly_smale_quotients(self.source_zeros, tol).values)

    def quotient_errors(self, tol: float = DEFAULT_ROOT_TOL) -> list[float]:
        """Sorted distance between the rescaled and the polynomial quotients."""
        b = sorted(self.blaschke_quotients(tol))
        p = sorted(self.polynomial_quotients(tol))
        return [abs(x - y) for x, y in zip(b, p)]


def rescale_family(poly_zeros, m: float) -> RescalePair:
    """Build B_m from the nonzero polynomial roots a_i; m must clear the disk."""
    zs = [complex(a) for a in poly_zeros]
    if not zs or any(a == 0 for a in zs):
        raise DomainError("polynomial roots must be nonzero")
    if m <= 0:
        raise DomainError("rescaling factor must be positive")
    scaled = [a / m for a in zs]
    if any(not abs(z) < 1.0 - 1e-12 for z in scaled):
        raise InvalidZeroError(f"m = {m} too small: a rescaled zero leaves the disk")
    product = BlaschkeProduct(0.0, [0j] + scaled)
    return RescalePair(float(m), product, tuple(zs))


@dataclass(frozen=True)
class LargeCriticalValueReport:
    """Quotient bounds that should follow when all critical values are large.

    When r = min |B(zeta_i)| >= 1/2, the min quotient is expected to stay
    below a two-thirds multiple of a separation constant and the max
    quotient above 1/2^n.  Two variants of the separation constant are
    reported: 4^{(n-2)/(n-1)} and plain 4.  Discrepancies are data to
    surface, never assertion failures.
    """

    degree: int
    min_critical_value: float
    hypothesis_met: bool
    min_quotient: float
    max_quotient: float
    first_bound_fractional: float
    first_bound_constant4: float
    first_within_fractional: bool | None
    first_within_constant4: bool | None
    second_bound: float
    second_holds: bool | None

    def to_record(self, variant: str = "both") -> dict:
        rec = {
            "degree": self.degree,
            "min_critical_value": self.min_critical_value,
            "hypothesis_met": self.hypothesis_met,
            "min_quotient": self.min_quotient,
            "max_quotient": self.max_quotient,
            "second_bound": self.second_bound,
            "second_holds": self.second_holds,
        }
        if variant in ("fractional", "both"):
            rec["first_bound_fractional"] = self.first_bound_fractional
            rec["first_within_fractional"] = self.first_within_fractional
        if variant in ("constant4", "both"):
            rec["first_bound_constant4"] = self.first_bound_constant4
            rec["first_within_constant4"] = self.first_within_constant4
        return rec


def large_critical_value_check(
    product: BlaschkeProduct, tol: float = DEFAULT_ROOT_TOL
) -> LargeCriticalValueReport:
    """Evaluate the large-critical-value quotient bounds; report, don't assert."""
    report = smale_quotients(product, tol)
    n = product.degree
    r = min(abs(product(e.zeta)) for e in report.quotients)
    met = r >= 0.5
    frac = 4.0 ** ((n - 2) / (n - 1)) * (2.0 / 3.0)
    const4 = 4.0 * (2.0 / 3.0)
    return LargeCriticalValueReport(
        degree=n,
        min_critical_value=r,
        hypothesis_met=met,
        min_quotient=report.min_quotient,
        max_quotient=report.max_quotient,
        first_bound_fractional=frac,
        first_bound_constant4=const4,
        first_within_fractional=(report.min_quotient <= frac) if met else None,
        first_within_constant4=(report.min_quotient <= const4) if met else None,
        second_bound=0.5 ** n,
        second_holds=(report.max_quotient >= 0.5 ** n) if met else None,
    )
