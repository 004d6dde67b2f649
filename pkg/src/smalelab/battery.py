"""Invariant battery over sampled products, shared by the CLI and the tests.

Each check reports sample counts, pass counts, a worst margin (positive
margins pass) and the first few counterexample products verbatim.  The
large-critical-value section is report-class: it surfaces numerics but
never fails a run.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .blaschke import (
    BlaschkeProduct,
    MobiusAutomorphism,
    boundary_modulus_deviation,
    compose_pre,
    hyperbolic_derivative,
    normalize,
)
from .errors import SmalelabError
from .quotients import (
    general_quotients,
    large_critical_value_check,
    max_quotient_floor,
    min_quotient_bound,
    smale_quotients,
)
from .search import sample_blaschke

CRITICAL_COUNT_ID = "critical_count"
REFLECTION_ID = "reflection_symmetry"
BOUNDARY_ID = "boundary_modulus"
PREIMAGE_ID = "preimage_count"
SCHWARZ_ID = "schwarz_pick"
UNIT_REFLECTION_ID = "unit_reflection_identity"
COMPOSITION_ID = "composition_consistency"
NORMALIZATION_ID = "normalization_invariance"
MIN_BOUND_ID = "min_quotient_bound"
MAX_FLOOR_ID = "max_quotient_floor"
SANITY_ID = "report_sanity"

CHECK_IDS = (
    CRITICAL_COUNT_ID,
    REFLECTION_ID,
    BOUNDARY_ID,
    PREIMAGE_ID,
    SCHWARZ_ID,
    UNIT_REFLECTION_ID,
    COMPOSITION_ID,
    NORMALIZATION_ID,
    MIN_BOUND_ID,
    MAX_FLOOR_ID,
    SANITY_ID,
)

MAX_COUNTEREXAMPLES = 3
MAX_SECTION_ENTRIES = 20


@dataclass
class CheckAccumulator:
    check_id: str
    samples: int = 0
    passes: int = 0
    worst_margin: float = math.inf
    counterexamples: list = field(default_factory=list)

    def add(self, margin: float, product: BlaschkeProduct, note: str = "") -> None:
        self.samples += 1
        ok = margin >= 0.0
        if ok:
            self.passes += 1
        if margin < self.worst_margin:
            self.worst_margin = margin
        if not ok and len(self.counterexamples) < MAX_COUNTEREXAMPLES:
            entry = {"product": product.to_record(), "margin": margin}
            if note:
                entry["note"] = note
            self.counterexamples.append(entry)

    def to_record(self) -> dict:
        return {
            "id": self.check_id,
            "samples": self.samples,
            "passes": self.passes,
            "worst_margin": self.worst_margin if self.samples else None,
            "counterexamples": self.counterexamples,
        }


def _product_checks(
    product: BlaschkeProduct,
    rng: np.random.Generator,
    acc: dict[str, CheckAccumulator],
    preimage_targets: int,
    boundary_samples: int,
    tol: float,
) -> None:
    n = product.degree

    try:
        critical = product.critical_points(tol)
        count = sum(c.multiplicity for c in critical.interior)
        acc[CRITICAL_COUNT_ID].add(-abs(count - (n - 1)), product)
        acc[REFLECTION_ID].add(1e-8 - critical.reflection_deviation, product)
    except SmalelabError as exc:
        acc[CRITICAL_COUNT_ID].add(-1.0, product, note=str(exc))
        acc[REFLECTION_ID].add(-1.0, product, note=str(exc))

    try:
        report = smale_quotients(product, tol)
        acc[MIN_BOUND_ID].add(
            report.min_quotient_bound + 1e-9 - report.min_quotient, product
        )
        acc[MAX_FLOOR_ID].add(report.max_quotient - report.max_quotient_floor, product)
        sane = 0.0 <= report.min_quotient <= report.max_quotient
        acc[SANITY_ID].add(0.0 if sane else -1.0, product)
    except SmalelabError as exc:
        for cid in (MIN_BOUND_ID, MAX_FLOOR_ID, SANITY_ID):
            acc[cid].add(-1.0, product, note=str(exc))

    dev = boundary_modulus_deviation(product, boundary_samples)
    acc[BOUNDARY_ID].add(1e-10 - dev, product)

    targets = _disk_points(rng, preimage_targets, 0.9)
    try:
        pre = product.preimages_many(targets, tol)
        shortfall = pre.shape[0] * n - pre.size  # any escape already raised
        acc[PREIMAGE_ID].add(-float(shortfall), product)
    except SmalelabError as exc:
        acc[PREIMAGE_ID].add(-1.0, product, note=str(exc))

    pts = _disk_points(rng, 8, 0.97)
    worst = -math.inf
    for z in pts:
        worst = max(worst, abs(hyperbolic_derivative(product, z)))
    acc[SCHWARZ_ID].add(1.0 + 1e-12 - worst, product)

    # B(1/conj(z)) * conj(B(z)) = 1 off the unit circle
    worst = 0.0
    for z in _disk_points(rng, 8, 0.9, r_min=0.3):
        outside = 1.0 / z.conjugate()
        worst = max(worst, abs(product(outside) * product(z).conjugate() - 1.0))
    acc[UNIT_REFLECTION_ID].add(1e-9 - worst, product)

    center = _disk_points(rng, 1, 0.8)[0]
    theta = rng.uniform(0.0, 2.0 * math.pi)
    mobius = MobiusAutomorphism(theta, center)
    try:
        composed = compose_pre(product, mobius)
        worst = 0.0
        for z in _disk_points(rng, 16, 0.95):
            worst = max(worst, abs(composed(z) - product(mobius(z))))
        acc[COMPOSITION_ID].add(1e-10 - worst, product)
    except SmalelabError as exc:
        acc[COMPOSITION_ID].add(-1.0, product, note=str(exc))

    try:
        w = _normalization_point(product, rng)
        direct = sorted(general_quotients(product, w, tol))
        via_normalized = sorted(
            e.value for e in smale_quotients(normalize(product, w), tol).quotients
        )
        worst = max(abs(a - b) for a, b in zip(direct, via_normalized))
        acc[NORMALIZATION_ID].add(1e-9 - worst, product)
    except SmalelabError as exc:
        acc[NORMALIZATION_ID].add(-1.0, product, note=str(exc))


def _disk_points(rng: np.random.Generator, count: int, r_max: float, r_min: float = 0.0):
    us = rng.uniform(0.0, 1.0, count)
    angles = rng.uniform(0.0, 2.0 * math.pi, count)
    out = []
    for u, a in zip(us, angles):
        r = r_min + (r_max - r_min) * math.sqrt(u)
        out.append(complex(r * math.cos(a), r * math.sin(a)))
    return out


def _normalization_point(product: BlaschkeProduct, rng: np.random.Generator) -> complex:
    for _ in range(8):
        w = _disk_points(rng, 1, 0.8)[0]
        if abs(product.derivative(w)) > 1e-9:
            return w
    return 0.1 + 0.1j


def run_battery(
    degrees,
    samples: int,
    seed: int,
    preimage_targets: int = 16,
    boundary_samples: int = 64,
    include: tuple[BlaschkeProduct, ...] = (),
    tol: float = 1e-12,
    bound_variant: str = "both",
) -> dict:
    """Run the invariant battery; returns a JSON-ready summary.

    ``include`` products are injected both into the assertion-class checks
    and into the large-critical-value section.  The summary's ``all_pass``
    reflects assertion-class checks only.
    """
    degrees = list(degrees)
    acc = {cid: CheckAccumulator(cid) for cid in CHECK_IDS}
    section = {
        "hypothesis_met": 0,
        "first_fractional_ok": 0,
        "first_constant4_ok": 0,
        "second_ok": 0,
        "entries": [],
    }

    def prop_entry(product: BlaschkeProduct, injected: bool) -> None:
        try:
            rep = large_critical_value_check(product, tol)
        except SmalelabError:
            return
        if rep.hypothesis_met:
            section["hypothesis_met"] += 1
            section["first_fractional_ok"] += bool(rep.first_within_fractional)
            section["first_constant4_ok"] += bool(rep.first_within_constant4)
            section["second_ok"] += bool(rep.second_holds)
        if injected or (
            rep.hypothesis_met and len(section["entries"]) < MAX_SECTION_ENTRIES
        ):
            entry = rep.to_record(bound_variant)
            entry["injected"] = injected
            section["entries"].append(entry)

    for n in degrees:
        for i in range(samples):
            rng = np.random.Generator(
                np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(n, i)))
            )
            product = sample_blaschke(n, rng)
            _product_checks(product, rng, acc, preimage_targets, boundary_samples, tol)
            prop_entry(product, injected=False)

    for k, product in enumerate(include):
        rng = np.random.Generator(
            np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(0, k)))
        )
        _product_checks(product, rng, acc, preimage_targets, boundary_samples, tol)
        prop_entry(product, injected=True)

    checks = [acc[cid].to_record() for cid in CHECK_IDS]
    all_pass = all(c["passes"] == c["samples"] for c in checks)
    return {
        "config": {
            "degrees": degrees,
            "samples": samples,
            "seed": seed,
            "preimage_targets": preimage_targets,
            "boundary_samples": boundary_samples,
            "tol": tol,
            "included": len(include),
        },
        "bounds": {str(n): min_quotient_bound(n) for n in degrees},
        "floors": {str(n): max_quotient_floor(n) for n in degrees},
        "checks": checks,
        "large_critical_value": section,
        "all_pass": all_pass,
    }
