"""Randomized sampling and multi-start extremal search over normalized products.

Estimates the supremum of the min quotient and the infimum of the max
quotient at a fixed degree.  Each nonzero zero is parameterized by the
smooth plane-to-disk bijection v -> v/(1 + |v|), so the simplex optimizer
runs unconstrained while disk membership holds by construction.  Zero
moduli are additionally kept inside the documented validity band
[1e-6, 1 - 1e-6]; iterates outside it score as objective-worst sentinels,
as do iterates whose critical-point solve fails.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .blaschke import BlaschkeProduct
from .errors import SearchFailureError, SmalelabError
from .quotients import (
    QuotientReport,
    monocritical_family,
    smale_quotients,
    symmetric_family,
)

DEFAULT_RESTARTS = 200
DEFAULT_BUDGET = 2000
SAMPLE_RADIUS = 0.95
SAMPLE_U_MIN = 1e-6

BAND_LOW = 1e-6
BAND_HIGH = 1.0 - 1e-6

_WARM_SUP_BETAS = (0.3, 0.6, 0.9, 0.99, 0.999)
_WARM_SUP_EDGE_ALPHA = 1.0 - 2e-6
_WARM_INF_AS = (0.01, 0.05, 0.1, 0.3, 0.5)


def sample_blaschke(
    n: int,
    rng: np.random.Generator,
    r_max: float = SAMPLE_RADIUS,
    u_min: float = SAMPLE_U_MIN,
) -> BlaschkeProduct:
    """One random normalized product: a simple origin zero plus n-1 nonzero zeros.

    Radii are r_max * sqrt(u) with u uniform on (u_min, 1); the floor keeps
    B'(0) away from zero.  Deterministic for a fixed generator state.
    """
    if n < 2:
        raise SmalelabError("sampling needs degree >= 2")
    us = rng.uniform(u_min, 1.0, n - 1)
    angles = rng.uniform(0.0, 2.0 * math.pi, n - 1)
    zeros = [0j] + [r_max * math.sqrt(u) * complex(math.cos(a), math.sin(a))
                    for u, a in zip(us, angles)]
    return BlaschkeProduct(0.0, zeros)


def _params_to_zeros(x: np.ndarray) -> list[complex]:
    out = []
    for k in range(0, len(x), 2):
        v = complex(x[k], x[k + 1])
        out.append(v / (1.0 + abs(v)))
    return out


def _zeros_to_params(zeros) -> np.ndarray:
    x = []
    for z in zeros:
        r = abs(z)
        v = z / (1.0 - r)
        x.extend([v.real, v.imag])
    return np.asarray(x)


@dataclass(frozen=True)
class SearchResult:
    n: int
    objective: str
    best_value: float
    best_product: BlaschkeProduct
    report: QuotientReport
    seed: int
    restarts: int
    budget: int
    evaluations: int
    wall_seconds: float
    exceeds_unity: bool

    def to_record(self) -> dict:
        return {
            "n": self.n,
            "objective": self.objective,
            "best_value": self.best_value,
            "seed": self.seed,
            "restarts": self.restarts,
            "budget": self.budget,
            "evaluations": self.evaluations,
            "exceeds_unity": self.exceeds_unity,
            "product": self.best_product.to_record(),
            "report": self.report.to_record(),
        }


class _Keeper:
    """Best-so-far tracker over raw objective evaluations."""

    def __init__(self):
        self.count = 0
        self.best_value: float | None = None
        self.best_x: np.ndarray | None = None

    def __call__(self, value: float, x: np.ndarray) -> None:
        self.count += 1
        if math.isinf(value):
            return
        if self.best_value is None or value < self.best_value:
            self.best_value = value
            self.best_x = np.array(x)


def _evaluate(x: np.ndarray, n: int, maximize: bool) -> float:
    """Signed objective (always minimized); sentinel +inf on invalid iterates."""
    zeros = _params_to_zeros(x)
    for z in zeros:
        az = abs(z)
        if not BAND_LOW <= az <= BAND_HIGH:
            return math.inf
    try:
        product = BlaschkeProduct(0.0, [0j] + zeros)
        report = smale_quotients(product)
    except SmalelabError:
        return math.inf
    return -report.min_quotient if maximize else report.max_quotient


def _warm_products(n: int, maximize: bool) -> list[BlaschkeProduct]:
    if maximize:
        d = n - 1
        members = [symmetric_family(n, beta ** (1.0 / d)) for beta in _WARM_SUP_BETAS]
        # edge member built from the zero modulus directly so it stays inside
        # the search band for every degree
        members.append(symmetric_family(n, _WARM_SUP_EDGE_ALPHA))
        return members
    return [monocritical_family(n, a) for a in _WARM_INF_AS]


def _run_search(
    n: int, restarts: int, budget: int, seed: int, maximize: bool
) -> SearchResult:
    if n < 2:
        raise SmalelabError("search needs degree >= 2")
    t0 = time.perf_counter()
    starts = [_zeros_to_params([z for z in p.zeros if z != 0])
              for p in _warm_products(n, maximize)]
    for i in range(restarts):
        rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(i,))))
        sample = sample_blaschke(n, rng)
        starts.append(_zeros_to_params([z for z in sample.zeros if z != 0]))

    keeper = _Keeper()

    def objective(x: np.ndarray) -> float:
        value = _evaluate(x, n, maximize)
        keeper(value, x)
        return value

    for x0 in starts:
        minimize(
            objective,
            x0,
            method="Nelder-Mead",
            options={"maxfev": budget, "xatol": 1e-10, "fatol": 1e-13},
        )

    if keeper.best_value is None:
        raise SearchFailureError("no successful objective evaluation")

    best_zeros = _params_to_zeros(keeper.best_x)
    best_product = BlaschkeProduct(0.0, [0j] + best_zeros)
    report = smale_quotients(best_product)
    best = report.min_quotient if maximize else report.max_quotient
    recomputed = -keeper.best_value if maximize else keeper.best_value
    if abs(best - recomputed) > 1e-10:
        raise SearchFailureError(
            f"certificate mismatch: {best} vs recomputed {recomputed}"
        )
    return SearchResult(
        n=n,
        objective="max_min_quotient" if maximize else "min_max_quotient",
        best_value=best,
        best_product=best_product,
        report=report,
        seed=seed,
        restarts=restarts,
        budget=budget,
        evaluations=keeper.count,
        wall_seconds=time.perf_counter() - t0,
        exceeds_unity=maximize and best > 1.0,
    )


def maximize_min_quotient(
    n: int,
    restarts: int = DEFAULT_RESTARTS,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
) -> SearchResult:
    """Empirical supremum of the min quotient at degree n (warm + random starts)."""
    return _run_search(n, restarts, budget, seed, maximize=True)


def minimize_max_quotient(
    n: int,
    restarts: int = DEFAULT_RESTARTS,
    budget: int = DEFAULT_BUDGET,
    seed: int = 0,
) -> SearchResult:
    """Empirical infimum of the max quotient at degree n (warm + random starts)."""
    return _run_search(n, restarts, budget, seed, maximize=False)
