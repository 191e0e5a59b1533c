"""Atomic spectral measures on (0, 1] and one-sided enlargement feasibility.

The measure induced by a trace on the function algebra of a positive
contraction is finitely supported: one atom per strictly positive
eigenvalue, weighted by multiplicity times the trace normalization.  The
one-sided comparison "mu(U_r) >= nu(U) for every open U" reduces, by
atomicity, to a Hall-type condition over subsets of nu's atoms, decided
exactly as a max-flow feasibility problem on rational-scaled weights.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .errors import MassMismatch, NotAContraction
from .flow import MaxFlow
from .linalg import NEGATIVE_CLAMP, _positive_eigenvalues, entries_of

STRICT_EPS = 1e-12          # enlargements are strict: |x - y| < r - STRICT_EPS
MASS_TOL = 1e-9
CAP_SCALE = 1 << 40         # weights scaled to integers by 2^40
SUBSET_ORACLE_MAX_ATOMS = 10


@dataclass(frozen=True)
class AtomicMeasure:
    """Finitely supported positive measure on (0, 1].

    Atoms are (location, weight) pairs with strictly increasing locations;
    equal locations are merged at construction.  ``mass`` caches the total.
    """

    atoms: tuple[tuple[float, float], ...]
    mass: float

    def __post_init__(self):
        for loc, w in self.atoms:
            if not (0.0 < loc <= 1.0):
                raise ValueError(f"atom location {loc} outside (0, 1]")
            if w <= 0.0:
                raise ValueError(f"atom weight {w} not positive")
        locs = [loc for loc, _ in self.atoms]
        if any(b <= a for a, b in zip(locs, locs[1:])):
            raise ValueError("atom locations must be strictly increasing")
        if abs(self.mass - sum(w for _, w in self.atoms)) > 1e-12:
            raise ValueError("cached mass disagrees with atom weights")

    @classmethod
    def from_pairs(cls, pairs) -> "AtomicMeasure":
        merged: dict[float, float] = {}
        for loc, w in pairs:
            merged[float(loc)] = merged.get(float(loc), 0.0) + float(w)
        atoms = tuple(sorted(merged.items()))
        return cls(atoms, sum(w for _, w in atoms))

    @property
    def locations(self) -> tuple[float, ...]:
        return tuple(loc for loc, _ in self.atoms)

    def to_json(self) -> dict:
        return {"atoms": [[loc, w] for loc, w in self.atoms]}

    @classmethod
    def from_json(cls, obj: dict) -> "AtomicMeasure":
        return cls.from_pairs(obj["atoms"])


@dataclass(frozen=True)
class TraceSpec:
    """A trace on the model algebras: the matrix trace, or the matrix trace
    composed with evaluation at a point of [0, 1], times a normalization."""

    kind: str = "matrix-trace"
    x: float | None = None
    normalization: float = 1.0

    def __post_init__(self):
        if self.kind not in ("matrix-trace", "point-evaluation"):
            raise ValueError(f"unknown trace kind {self.kind!r}")
        if self.kind == "point-evaluation":
            if self.x is None or not (0.0 <= self.x <= 1.0):
                raise ValueError("point-evaluation requires x in [0, 1]")
        if self.normalization <= 0:
            raise ValueError("normalization must be positive")


def measure_from_eigenvalues(lam, normalization: float = 1.0) -> AtomicMeasure:
    """Atoms at the strictly positive entries of an eigenvalue list, with
    weight = multiplicity * normalization.  Values above 1 within 1e-9 are
    clamped to 1; beyond that the input is rejected."""
    lam = np.asarray(lam, dtype=np.float64)
    if lam.size and float(np.max(lam)) > 1.0 + 1e-9:
        raise NotAContraction(f"maximum eigenvalue {float(np.max(lam)):.12g} > 1 + 1e-9")
    pairs = [(min(float(x), 1.0), normalization) for x in lam if x > 0.0]
    return AtomicMeasure.from_pairs(pairs)


def measure_from_spectrum(a, trace: TraceSpec | None = None) -> AtomicMeasure:
    """Spectral measure of a positive contraction under a matrix-type trace."""
    trace = trace or TraceSpec()
    lam, _ = _positive_eigenvalues(entries_of(a))
    return measure_from_eigenvalues(lam, trace.normalization)


def dimension_function(a, trace: TraceSpec | None = None) -> float:
    """Trace of the support projection: total mass of the spectral measure."""
    return measure_from_spectrum(a, trace).mass


def _within(dist: float, r: float) -> bool:
    """Strict enlargement membership; equal locations always count."""
    return dist == 0.0 or dist < r - STRICT_EPS


def _scaled(w: float) -> int:
    return int(round(w * CAP_SCALE))


def lp_one_sided(mu: AtomicMeasure, nu: AtomicMeasure, r: float) -> bool:
    """True iff mu(U_r) >= nu(U) for every open U in (0, 1].

    Decided as a max-flow feasibility problem: nu's mass must admit a
    fractional matching into mu across edges |x - y| < r (strict).
    """
    if not nu.atoms:
        return True
    need = sum(_scaled(w) for _, w in nu.atoms)
    avail = sum(_scaled(w) for _, w in mu.atoms)
    if avail < need and not mu.atoms:
        return False
    n_nu, n_mu = len(nu.atoms), len(mu.atoms)
    g = MaxFlow(n_nu + n_mu + 2)
    src, snk = n_nu + n_mu, n_nu + n_mu + 1
    for i, (_, w) in enumerate(nu.atoms):
        g.add_edge(src, i, _scaled(w))
    for j, (_, w) in enumerate(mu.atoms):
        g.add_edge(n_nu + j, snk, _scaled(w))
    inf = need + 1
    for i, (y, _) in enumerate(nu.atoms):
        for j, (x, _) in enumerate(mu.atoms):
            if _within(abs(x - y), r):
                g.add_edge(i, n_nu + j, inf)
    return g.max_flow(src, snk) >= need


def lp_one_sided_subsets(mu: AtomicMeasure, nu: AtomicMeasure, r: float) -> bool:
    """Exhaustive Hall-condition check over all subsets of nu's atoms.

    Brute-force oracle for <= 10 atoms; must agree with the flow decision.
    """
    if len(nu.atoms) > SUBSET_ORACLE_MAX_ATOMS:
        raise ValueError("subset oracle limited to 10 atoms")
    mu_scaled = [(x, _scaled(w)) for x, w in mu.atoms]
    nu_scaled = [(y, _scaled(w)) for y, w in nu.atoms]
    idx = range(len(nu_scaled))
    for size in range(1, len(nu_scaled) + 1):
        for subset in combinations(idx, size):
            demand = sum(nu_scaled[i][1] for i in subset)
            supply = sum(w for x, w in mu_scaled
                         if any(_within(abs(x - nu_scaled[i][0]), r) for i in subset))
            if supply < demand:
                return False
    return True


def lp_distance(mu: AtomicMeasure, nu: AtomicMeasure) -> float:
    """Smallest enlargement radius making both one-sided comparisons hold.

    Feasibility is monotone in r and the infimum is attained at one of the
    pairwise atom distances, so a binary search over that candidate set
    (tested just above each candidate, matching the strict semantics)
    returns the exact infimum.
    """
    if abs(mu.mass - nu.mass) > MASS_TOL:
        raise MassMismatch(
            f"total masses differ: {mu.mass!r} vs {nu.mass!r}")
    if not mu.atoms and not nu.atoms:
        return 0.0
    cands = {0.0}
    for x, _ in mu.atoms:
        for y, _ in nu.atoms:
            cands.add(abs(x - y))
    if mu.atoms:
        cands.add(max(mu.locations))
    if nu.atoms:
        cands.add(max(nu.locations))
    ordered = sorted(cands)

    def feasible(c: float) -> bool:
        r = c + 2.0 * STRICT_EPS
        return lp_one_sided(mu, nu, r) and lp_one_sided(nu, mu, r)

    lo, hi = 0, len(ordered) - 1
    if not feasible(ordered[hi]):
        raise MassMismatch("no candidate radius is feasible")
    while lo < hi:
        mid = (lo + hi) // 2
        if feasible(ordered[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(ordered[lo])
