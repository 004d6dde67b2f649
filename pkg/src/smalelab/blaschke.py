"""Finite Blaschke products on the unit disk.

A degree-n product is stored as a rotation angle plus the multiset of its
zeros; evaluation is always factorwise, which keeps |B| = 1 on the unit
circle to machine precision.  Expanded coefficients appear only transiently
inside the derivative numerator and the preimage solver.

Also houses disk automorphisms, pseudo-hyperbolic distance, hyperbolic
derivatives, composition with automorphisms and the normalization that
moves any base point to the origin.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import (
    BoundaryAmbiguityError,
    ConditioningFailureError,
    DegenerateNormalizationError,
    DomainError,
    InvalidZeroError,
    NoCriticalPointsError,
    PoleEvaluationError,
)
from .polycore import (
    DEFAULT_ROOT_TOL,
    Polynomial,
    _newton_polish,
    _solve_batch,
    _sort_key,
    conjugate_reciprocal,
    find_roots,
)

# Zeros must stay strictly inside this guard band of the unit circle.
ZERO_GUARD = 1e-12
# Critical points landing this close to the unit circle get one round of
# compensated Newton polishing before classification.
AMBIGUITY_BAND = 1e-8
POLE_TOLERANCE = 1e-14
PREIMAGE_RESIDUAL = 1e-9
ROTATION_MATCH = 1e-10


@dataclass(frozen=True)
class CriticalPoint:
    location: complex
    multiplicity: int
    residual: float


@dataclass(frozen=True)
class CriticalSet:
    """Interior critical points plus the reflection-symmetry certificate.

    ``infinity_deficiency`` counts derivative-numerator roots pushed to
    infinity; it must agree with the interior multiplicity at the origin.
    ``reflection_deviation`` is the worst relative mismatch between the
    exterior roots and the reflected interior ones.
    """

    interior: tuple[CriticalPoint, ...]
    exterior_checked: bool
    infinity_deficiency: int
    reflection_deviation: float

    def expanded(self) -> list[complex]:
        out: list[complex] = []
        for c in self.interior:
            out.extend([c.location] * c.multiplicity)
        return out


@dataclass(frozen=True)
class BlaschkeProduct:
    """e^{i rotation} * prod (z - z_k)/(1 - conj(z_k) z) with |z_k| < 1."""

    rotation: float
    zeros: tuple[complex, ...]

    def __init__(self, rotation: float, zeros):
        zs = [complex(z) for z in zeros]
        if not zs:
            raise DomainError("a Blaschke product needs at least one zero")
        for z in zs:
            if not abs(z) < 1.0 - ZERO_GUARD:
                raise InvalidZeroError(f"zero {z} on or outside the guarded disk")
        zs.sort(key=_sort_key)
        rot = float(rotation) % (2.0 * math.pi)
        if 2.0 * math.pi - rot < 1e-12:
            rot = 0.0
        object.__setattr__(self, "rotation", rot)
        object.__setattr__(self, "zeros", tuple(zs))

    @property
    def degree(self) -> int:
        return len(self.zeros)

    @cached_property
    def _phase(self) -> complex:
        return cmath.exp(1j * self.rotation)

    @cached_property
    def numerator(self) -> Polynomial:
        """P(z) = prod (z - z_k); the product is e^{i rotation} P / P*."""
        return Polynomial.from_roots(self.zeros)

    @cached_property
    def denominator(self) -> Polynomial:
        return conjugate_reciprocal(self.numerator, self.degree)

    def __call__(self, z: complex) -> complex:
        z = complex(z)
        acc = self._phase
        for zk in self.zeros:
            den = 1.0 - zk.conjugate() * z
            if abs(den) <= POLE_TOLERANCE:
                raise PoleEvaluationError(f"evaluation at {z} too close to a pole")
            acc *= (z - zk) / den
        return acc

    def derivative(self, z: complex) -> complex:
        """B'(z) by the product rule; valid away from poles."""
        z = complex(z)
        factors = []
        primes = []
        for zk in self.zeros:
            den = 1.0 - zk.conjugate() * z
            if abs(den) <= POLE_TOLERANCE:
                raise PoleEvaluationError(f"derivative at {z} too close to a pole")
            factors.append((z - zk) / den)
            primes.append((1.0 - abs(zk) ** 2) / (den * den))
        n = len(factors)
        prefix = [1.0 + 0j] * (n + 1)
        suffix = [1.0 + 0j] * (n + 1)
        for i in range(n):
            prefix[i + 1] = prefix[i] * factors[i]
            suffix[n - 1 - i] = suffix[n - i] * factors[n - 1 - i]
        total = 0j
        for i in range(n):
            total += prefix[i] * primes[i] * suffix[i + 1]
        return self._phase * total

    def derivative_numerator(self) -> Polynomial:
        """N = P' P* - P (P*)', of formal degree 2n - 2 (possibly deficient).

        B' = e^{i rotation} N / (P*)^2, so the critical points of B are
        exactly the roots of N.  N is exactly self-inversive
        (c_k = conj(c_{2n-2-k})), so the float coefficients are projected
        back onto that structure; the root multiset is then closed under
        reflection across the unit circle up to solver error only.
        """
        p = self.numerator
        q = self.denominator
        raw = (p.derivative() * q - p * q.derivative()).coeffs
        width = 2 * self.degree - 1
        padded = list(raw) + [0j] * (width - len(raw))
        sym = [
            0.5 * (padded[k] + padded[width - 1 - k].conjugate())
            for k in range(width)
        ]
        return Polynomial(sym)

    def critical_points(self, tol: float = DEFAULT_ROOT_TOL) -> CriticalSet:
        """The n - 1 interior critical points, with reflection validated.

        Roots of the derivative numerator split into interior points, their
        exterior reflections 1/conj(zeta) and roots at infinity matching
        interior roots at the origin.  The simultaneous iteration runs
        first; if its output fails the structural validation (near-boundary
        zero crowds make the expanded numerator badly conditioned), the
        solve is retried from companion-matrix eigenvalues before giving
        up.  Any remaining mismatch raises a conditioning error.
        """
        if self.degree < 2:
            raise NoCriticalPointsError("degree-1 products have no critical points")
        try:
            return self._critical_points_attempt(tol, "aberth")
        except ConditioningFailureError:
            return self._critical_points_attempt(tol, "companion")

    def _critical_points_attempt(self, tol: float, engine: str) -> CriticalSet:
        n = self.degree
        numer = self.derivative_numerator()
        formal = 2 * n - 2
        rs = find_roots(
            numer, tol, formal_degree=formal, refine=self._polish_critical, engine=engine
        )

        interior: list[CriticalPoint] = []
        exterior: list[CriticalPoint] = []
        coeffs = numer.coeffs
        for root in rs.roots:
            z = root.location
            if abs(abs(z) - 1.0) < AMBIGUITY_BAND:
                z = _newton_polish(coeffs, z, steps=3)
                if abs(abs(z) - 1.0) < AMBIGUITY_BAND:
                    raise BoundaryAmbiguityError(
                        f"critical point {z} unresolved against the unit circle"
                    )
            point = CriticalPoint(z, root.multiplicity, root.residual)
            (interior if abs(z) < 1.0 else exterior).append(point)

        total = sum(c.multiplicity for c in interior)
        if total != n - 1:
            raise ConditioningFailureError(
                f"found {total} interior critical points, expected {n - 1}"
            )

        origin_mult = sum(c.multiplicity for c in interior if c.location == 0)
        if rs.infinity_deficiency != origin_mult:
            raise ConditioningFailureError(
                f"{rs.infinity_deficiency} roots at infinity vs origin multiplicity {origin_mult}"
            )

        reflected: list[complex] = []
        for c in interior:
            if c.location != 0:
                reflected.extend([1.0 / c.location.conjugate()] * c.multiplicity)
        outside: list[complex] = []
        for c in exterior:
            outside.extend([c.location] * c.multiplicity)
        if len(reflected) != len(outside):
            raise ConditioningFailureError("exterior critical point count mismatch")
        # nearest-unused matching; sorted zipping breaks ties badly when
        # symmetric families put several roots at exactly equal modulus
        deviation = 0.0
        used = [False] * len(outside)
        for b in reflected:
            best, best_dist = -1, math.inf
            for j, a in enumerate(outside):
                if not used[j] and abs(a - b) < best_dist:
                    best, best_dist = j, abs(a - b)
            used[best] = True
            deviation = max(deviation, best_dist / (1.0 + abs(b)))
        if deviation > 1e-8:
            raise ConditioningFailureError(
                f"reflection symmetry violated (deviation {deviation:.3e})"
            )

        interior.sort(key=lambda c: _sort_key(c.location))
        return CriticalSet(tuple(interior), True, rs.infinity_deficiency, deviation)

    def preimages(self, w: complex, tol: float = DEFAULT_ROOT_TOL) -> tuple[complex, ...]:
        """The n solutions of B(z) = w inside the disk, with multiplicity."""
        w = complex(w)
        if not abs(w) < 1.0:
            raise DomainError(f"target {w} outside the open unit disk")
        poly = Polynomial(self._preimage_coeffs(w))
        rs = find_roots(poly, tol)
        pts = [self._polish_preimage(z, w) for z in rs.expanded()]
        inside = [z for z in pts if abs(z) < 1.0]
        if len(inside) != self.degree:
            raise ConditioningFailureError(
                f"{len(inside)} preimages inside the disk, expected {self.degree}"
            )
        worst = max(abs(self(z) - w) for z in inside)
        if worst > PREIMAGE_RESIDUAL:
            raise ConditioningFailureError(f"preimage residual {worst:.3e} too large")
        inside.sort(key=_sort_key)
        return tuple(inside)

    def _polish_critical(self, z: complex, steps: int = 12) -> complex:
        # Newton on the logarithmic derivative L = sum 1/(z-z_k) + c_k/(1-c_k z),
        # whose roots away from the zeros are exactly the critical points.
        # The expanded numerator can be numerically flat near ill-conditioned
        # pairs; the factor form is not.  Runs on raw solver output before
        # multiplicity clustering; moves beyond the trust radius mean a
        # basin hop onto a different critical point and are reverted.
        start = z
        trust = 0.05 * (1.0 + abs(start))
        if any(abs(z - zk) < 1e-8 for zk in self.zeros):
            return start
        prev_step = None
        for _ in range(steps):
            lval = 0j
            lder = 0j
            for zk in self.zeros:
                u = z - zk
                v = 1.0 - zk.conjugate() * z
                if abs(u) < 1e-12 or abs(v) < POLE_TOLERANCE:
                    return start
                lval += 1.0 / u + zk.conjugate() / v
                lder += -1.0 / (u * u) + zk.conjugate() ** 2 / (v * v)
            if lder == 0:
                break
            step = lval / lder
            if prev_step is not None and abs(step) > 0.3 * abs(prev_step):
                # linear contraction = multiple critical point; leave it to
                # the cluster + derivative-polish path
                return start
            z = z - step
            if abs(z - start) > trust:
                return start
            if abs(step) <= 1e-15 * (1.0 + abs(z)):
                break
            prev_step = step
        return z

    def _polish_preimage(self, z: complex, w: complex, steps: int = 5) -> complex:
        # factorwise Newton on B(z) - w: the expanded-coefficient solve
        # supplies the start, the factor form supplies the accuracy
        for _ in range(steps):
            try:
                value = self(z) - w
            except PoleEvaluationError:
                return z
            if abs(value) <= 1e-15 * (1.0 + abs(w)):
                break
            dv = self.derivative(z)
            if abs(dv) <= 1e-12:
                break
            z = z - value / dv
        return z

    def _preimage_coeffs(self, w: complex) -> list[complex]:
        n = self.degree
        p = list(self.numerator.coeffs) + [0j] * (n + 1 - len(self.numerator.coeffs))
        q = list(self.denominator.coeffs) + [0j] * (n + 1 - len(self.denominator.coeffs))
        return [self._phase * a - w * b for a, b in zip(p, q)]

    def preimages_many(self, targets, tol: float = DEFAULT_ROOT_TOL) -> np.ndarray:
        """Batched preimages for nonzero targets; rows follow ``targets``."""
        ws = [complex(w) for w in targets]
        if any(not abs(w) < 1.0 for w in ws):
            raise DomainError("preimage targets must lie in the open unit disk")
        rows = np.asarray([self._preimage_coeffs(w) for w in ws], dtype=complex)
        roots = _solve_batch(rows)
        warr = np.asarray(ws)[:, None]
        roots = self._polish_preimages_array(roots, warr)
        if not np.all(np.abs(roots) < 1.0):
            raise ConditioningFailureError("a batched preimage escaped the disk")
        vals = self.eval_many(roots.ravel()).reshape(roots.shape)
        worst = float(np.max(np.abs(vals - warr)))
        if worst > PREIMAGE_RESIDUAL:
            raise ConditioningFailureError(f"batched preimage residual {worst:.3e}")
        return roots

    def _polish_preimages_array(
        self, roots: np.ndarray, warr: np.ndarray, steps: int = 4
    ) -> np.ndarray:
        for _ in range(steps):
            value = np.full(roots.shape, self._phase, dtype=complex)
            logd = np.zeros(roots.shape, dtype=complex)
            for zk in self.zeros:
                den = 1.0 - zk.conjugate() * roots
                value *= (roots - zk) / den
                logd += 1.0 / (roots - zk) + zk.conjugate() / den
            residual = value - warr
            if np.max(np.abs(residual)) <= 1e-15 * (1.0 + np.max(np.abs(warr))):
                break
            dv = value * logd
            step = np.where(np.abs(dv) > 1e-12, residual / np.where(dv == 0, 1, dv), 0)
            roots = roots - step
        return roots

    def eval_many(self, zs: np.ndarray) -> np.ndarray:
        """Vectorized factorwise evaluation (no pole guard)."""
        zs = np.asarray(zs, dtype=complex)
        acc = np.full(zs.shape, self._phase, dtype=complex)
        for zk in self.zeros:
            acc *= (zs - zk) / (1.0 - zk.conjugate() * zs)
        return acc

    def to_record(self) -> dict:
        return {
            "degree": self.degree,
            "rotation": self.rotation,
            "zeros": [{"re": z.real, "im": z.imag} for z in self.zeros],
        }

    @classmethod
    def from_record(cls, record: dict) -> "BlaschkeProduct":
        zeros = [complex(z["re"], z["im"]) for z in record["zeros"]]
        product = cls(record.get("rotation", 0.0), zeros)
        if "degree" in record and record["degree"] != product.degree:
            raise DomainError(
                f"record degree {record['degree']} != zero count {product.degree}"
            )
        return product


@dataclass(frozen=True)
class MobiusAutomorphism:
    """M(z) = e^{i rotation} (z - center)/(1 - conj(center) z), |center| < 1."""

    rotation: float
    center: complex

    def __init__(self, rotation: float, center: complex):
        center = complex(center)
        if not abs(center) < 1.0:
            raise DomainError(f"automorphism center {center} outside the disk")
        object.__setattr__(self, "rotation", float(rotation))
        object.__setattr__(self, "center", center)

    @classmethod
    def identity(cls) -> "MobiusAutomorphism":
        return cls(0.0, 0j)

    def __call__(self, z: complex) -> complex:
        z = complex(z)
        return cmath.exp(1j * self.rotation) * (z - self.center) / (
            1.0 - self.center.conjugate() * z
        )

    def invert(self, w: complex) -> complex:
        u = complex(w) * cmath.exp(-1j * self.rotation)
        return (u + self.center) / (1.0 + self.center.conjugate() * u)


def pseudo_hyperbolic(z: complex, w: complex) -> complex:
    """[z, w] = (z - w)/(1 - conj(w) z) for points of the open disk."""
    z, w = complex(z), complex(w)
    if not (abs(z) < 1.0 and abs(w) < 1.0):
        raise DomainError("pseudo-hyperbolic distance needs disk points")
    return (z - w) / (1.0 - w.conjugate() * z)


def hyperbolic_derivative(product: BlaschkeProduct, w: complex) -> complex:
    """B'(w) (1 - |w|^2) / (1 - |B(w)|^2), the derivative in hyperbolic units."""
    w = complex(w)
    if not abs(w) < 1.0:
        raise DomainError("hyperbolic derivative needs a disk point")
    value = product(w)
    return product.derivative(w) * (1.0 - abs(w) ** 2) / (1.0 - abs(value) ** 2)


_PROBES = (0j, 0.5 + 0j, -0.5 + 0j, 0.5j, -0.5j, 0.35 + 0.35j, -0.4 + 0.2j, 0.15 - 0.45j)


def _unrotated_eval(zeros, z: complex) -> complex:
    acc = 1.0 + 0j
    for zk in zeros:
        acc *= (z - zk) / (1.0 - zk.conjugate() * z)
    return acc


def _fit_rotation(zeros, target) -> float:
    """Recover the unimodular factor by matching a probe point, validated at a second."""
    ranked = sorted(_PROBES, key=lambda p: -min(abs(p - z) for z in zeros))
    p1, p2 = ranked[0], ranked[1]
    g1 = _unrotated_eval(zeros, p1)
    t1 = target(p1)
    if g1 == 0 or t1 == 0:
        raise ConditioningFailureError("degenerate probe while recovering rotation")
    rotation = cmath.phase(t1 / g1)
    t2 = target(p2)
    fitted = cmath.exp(1j * rotation) * _unrotated_eval(zeros, p2)
    if abs(fitted - t2) > ROTATION_MATCH * max(1.0, abs(t2)):
        raise ConditioningFailureError(
            f"rotation recovery mismatch {abs(fitted - t2):.3e} at second probe"
        )
    return rotation


def compose_pre(product: BlaschkeProduct, mobius: MobiusAutomorphism) -> BlaschkeProduct:
    """B o M as a Blaschke product; zeros are M^{-1}(z_k)."""
    zeros = tuple(mobius.invert(z) for z in product.zeros)
    rotation = _fit_rotation(zeros, lambda z: product(mobius(z)))
    return BlaschkeProduct(rotation, zeros)


def compose_post(mobius: MobiusAutomorphism, product: BlaschkeProduct) -> BlaschkeProduct:
    """M o B as a Blaschke product; zeros are the preimages of M's center."""
    zeros = product.preimages(mobius.center)
    rotation = _fit_rotation(zeros, lambda z: mobius(product(z)))
    return BlaschkeProduct(rotation, zeros)


def normalize(product: BlaschkeProduct, w: complex) -> BlaschkeProduct:
    """Move the base point w to the origin: C = M2 o B o M1 with rotation zeroed.

    M1(0) = w and M2 centers B(w) at 0, so C(0) = 0 and C'(0) is the
    hyperbolic derivative of B at w.  Quotient magnitudes are preserved.
    """
    w = complex(w)
    if not abs(w) < 1.0:
        raise DomainError("normalization point must lie in the open disk")
    if abs(product.derivative(w)) <= 1e-12:
        raise DegenerateNormalizationError(f"derivative vanishes at {w}")
    m1 = MobiusAutomorphism(0.0, -w)
    inner = compose_pre(product, m1)
    value = inner(0j)
    m2 = MobiusAutomorphism(0.0, value)
    outer = compose_post(m2, inner)
    zs = sorted(outer.zeros, key=abs)
    if abs(zs[0]) > 1e-10:
        raise ConditioningFailureError(
            f"normalized product misses the origin by {abs(zs[0]):.3e}"
        )
    return BlaschkeProduct(0.0, (0j,) + tuple(zs[1:]))


def boundary_modulus_deviation(product: BlaschkeProduct, sample_count: int) -> float:
    """max over equispaced boundary samples of ||B(e^{i t})| - 1|."""
    if sample_count < 1:
        raise DomainError("sample_count must be >= 1")
    theta = 2.0 * np.pi * np.arange(sample_count) / sample_count
    pts = np.exp(1j * theta)
    mods = np.abs(product.eval_many(pts))
    return float(np.max(np.abs(mods - 1.0)))


def derivative_constant(product: BlaschkeProduct, tol: float = DEFAULT_ROOT_TOL) -> complex:
    """The constant a in B' = e^{i rotation} a C R^2, recovered numerically.

    C is the Blaschke product over the critical points and R(0) = 1, so
    a = e^{-i rotation} B'(0) / prod(-zeta_k).
    """
    d0 = product.derivative(0j)
    if d0 == 0:
        raise DomainError("B'(0) = 0; the constant is not recoverable at the origin")
    c0 = 1.0 + 0j
    for zeta in product.critical_points(tol).expanded():
        c0 *= -zeta
    return d0 * cmath.exp(-1j * product.rotation) / c0
