"""Spectral pseudometrics between positive matrices.

Four quantities: the optimal matching (bottleneck) distance between spectra,
the unitary-orbit distance for Hermitian pairs with an explicit conjugating
witness, the cutdown-comparison distance computed in closed form from sorted
eigenvalues, and the atomic Levy-Prokhorov distance of the induced spectral
measures.  A counting-function scan is kept alongside the closed form as an
independent route for cross-checks, and the direct-sum combinator implements
the componentwise max rule.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatch, LengthMismatch, MassMismatch
from .linalg import (NEGATIVE_CLAMP, UnitaryMatrix, _positive_eigenvalues,
                     _sorted_spectrum, entries_of, matrix_to_json, op_norm)
from .matching import bottleneck_value
from .measures import TraceSpec, lp_distance, measure_from_eigenvalues

CHAIN_TOL = 1e-9


@dataclass
class DistanceReport:
    """Bundle of the computed distances for one pair, with a witness unitary
    when available.  ``d_p`` is None exactly when ``mass_mismatch`` is set."""

    delta: float
    d_w: float
    d_p: float | None
    d_u_lower: float
    d_u_upper: float | None = None
    witness: np.ndarray | None = None
    mass_mismatch: bool = False

    def check_invariants(self) -> None:
        if self.d_u_upper is not None:
            if self.d_u_lower > self.d_u_upper + CHAIN_TOL:
                raise ValueError("d_u_lower exceeds d_u_upper")
            if self.d_p is not None and self.d_p > self.d_u_upper + CHAIN_TOL:
                raise ValueError("d_p exceeds d_u_upper")
        if self.d_p is not None and self.d_w > self.d_p + CHAIN_TOL:
            raise ValueError("d_w exceeds d_p")

    def to_json(self) -> dict:
        return {
            "delta": self.delta,
            "d_w": self.d_w,
            "d_p": self.d_p,
            "d_u_upper": self.d_u_upper,
            "d_u_lower": self.d_u_lower,
            "witness": matrix_to_json(self.witness) if self.witness is not None else None,
            "mass_mismatch": self.mass_mismatch,
        }


def delta_matching(alpha, beta) -> float:
    """Optimal matching distance between two complex spectra: the bottleneck
    assignment value min over pairings of the largest pairwise distance."""
    a = np.asarray(alpha, dtype=np.complex128).ravel()
    b = np.asarray(beta, dtype=np.complex128).ravel()
    if a.size != b.size or a.size == 0:
        raise LengthMismatch(f"spectra lengths {a.size} and {b.size}")
    cost = np.abs(a[:, None] - b[None, :])
    return bottleneck_value(cost)


def _sorted_eigs(a) -> np.ndarray:
    arr = entries_of(a)
    lam, _ = _sorted_spectrum((arr + arr.conj().T) / 2.0)
    return lam


def d_u_hermitian(a, b) -> tuple[float, UnitaryMatrix]:
    """Unitary-orbit distance between Hermitian matrices, with witness.

    Value = max over ascending eigenvalue lists of the paired differences;
    the witness conjugates a's eigenbasis onto b's and achieves the value.
    """
    arr_a, arr_b = entries_of(a), entries_of(b)
    if arr_a.shape != arr_b.shape:
        raise DimensionMismatch(f"shapes {arr_a.shape} and {arr_b.shape}")
    lam_a, vec_a = _sorted_spectrum((arr_a + arr_a.conj().T) / 2.0)
    lam_b, vec_b = _sorted_spectrum((arr_b + arr_b.conj().T) / 2.0)
    value = float(np.max(np.abs(lam_a - lam_b)))
    witness = UnitaryMatrix(vec_b @ vec_a.conj().T)
    return value, witness


def d_w_matrix(a, b) -> float:
    """Cutdown-comparison distance for equal-dimension positive matrices:
    in closed form, the max ascending-eigenvalue difference."""
    arr_a, arr_b = entries_of(a), entries_of(b)
    if arr_a.shape != arr_b.shape:
        raise DimensionMismatch(f"shapes {arr_a.shape} and {arr_b.shape}")
    lam_a, _ = _positive_eigenvalues(arr_a)
    lam_b, _ = _positive_eigenvalues(arr_b)
    return float(np.max(np.abs(lam_a - lam_b)))


def _counting_ok(lam_a: np.ndarray, lam_b: np.ndarray, r: float) -> bool:
    """Two-sided counting-function comparison at radius r on a jittered grid
    of all relevant eigenvalue positions."""
    grid = []
    for lam in (lam_a, lam_b):
        for x in lam:
            grid.extend((x - 1e-7, x + 1e-7, x - r - 1e-7, x - r + 1e-7))
    for t in grid:
        if t <= 1e-12:
            continue
        if int(np.sum(lam_a > t + r)) > int(np.sum(lam_b > t)):
            return False
        if int(np.sum(lam_b > t + r)) > int(np.sum(lam_a > t)):
            return False
    return True


def d_w_matrix_scan(a, b) -> float:
    """Counting-function route to the cutdown-comparison distance: smallest
    candidate radius passing the two-sided comparison on a scan grid.
    Kept independent of the closed form for cross-checking."""
    arr_a, arr_b = entries_of(a), entries_of(b)
    if arr_a.shape != arr_b.shape:
        raise DimensionMismatch(f"shapes {arr_a.shape} and {arr_b.shape}")
    lam_a, _ = _positive_eigenvalues(arr_a)
    lam_b, _ = _positive_eigenvalues(arr_b)
    cands = {0.0}
    cands.update(float(x) for x in lam_a)
    cands.update(float(x) for x in lam_b)
    cands.update(float(abs(x - y)) for x in lam_a for y in lam_b)
    ordered = sorted(cands)
    lo, hi = 0, len(ordered) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if _counting_ok(lam_a, lam_b, ordered[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(ordered[lo])


def d_p_matrix(a, b) -> float:
    """Levy-Prokhorov distance between the spectral measures of two positive
    contractions under the matrix trace.  Raises MassMismatch when the ranks
    differ: the zero eigenvalue is excluded on both sides, so unequal ranks
    mean no finite enlargement radius works."""
    arr_a, arr_b = entries_of(a), entries_of(b)
    if arr_a.shape != arr_b.shape:
        raise DimensionMismatch(f"shapes {arr_a.shape} and {arr_b.shape}")
    lam_a, _ = _positive_eigenvalues(arr_a)
    lam_b, _ = _positive_eigenvalues(arr_b)
    mu = measure_from_eigenvalues(lam_a)
    nu = measure_from_eigenvalues(lam_b)
    return lp_distance(mu, nu)


def full_report(a, b, d_u_upper: float | None = None) -> DistanceReport:
    """All distances for one positive-contraction pair, with witness.

    d_u_upper defaults to min(witness error, ||a - b||); both are certified
    upper bounds on the orbit distance.
    """
    lam_a = _sorted_eigs(a)
    lam_b = _sorted_eigs(b)
    delta = delta_matching(lam_a, lam_b)
    d_w = d_w_matrix(a, b)
    value, witness = d_u_hermitian(a, b)
    norm_bound = op_norm(entries_of(a) - entries_of(b))
    upper = min(value, norm_bound)
    if d_u_upper is not None:
        upper = min(upper, d_u_upper)
    try:
        d_p = d_p_matrix(a, b)
        mismatch = False
    except MassMismatch:
        d_p = None
        mismatch = True
    report = DistanceReport(delta=delta, d_w=d_w, d_p=d_p, d_u_lower=d_w,
                            d_u_upper=upper, witness=witness.entries,
                            mass_mismatch=mismatch)
    report.check_invariants()
    return report


def direct_sum(r1: DistanceReport, r2: DistanceReport) -> DistanceReport:
    """Combine component reports into the report for the block-diagonal pair
    inside the direct-sum algebra: unitaries decompose blockwise and both the
    cutdown comparison and the trace conditions act componentwise, so every
    distance is the max of the component values."""
    witness = None
    if r1.witness is not None and r2.witness is not None:
        n1, n2 = r1.witness.shape[0], r2.witness.shape[0]
        witness = np.zeros((n1 + n2, n1 + n2), dtype=np.complex128)
        witness[:n1, :n1] = r1.witness
        witness[n1:, n1:] = r2.witness
    mismatch = r1.mass_mismatch or r2.mass_mismatch
    d_p = None if mismatch else max(r1.d_p, r2.d_p)
    uppers = [u for u in (r1.d_u_upper, r2.d_u_upper)]
    upper = None if any(u is None for u in uppers) else max(uppers)
    report = DistanceReport(
        delta=max(r1.delta, r2.delta),
        d_w=max(r1.d_w, r2.d_w),
        d_p=d_p,
        d_u_lower=max(r1.d_u_lower, r2.d_u_lower),
        d_u_upper=upper,
        witness=witness,
        mass_mismatch=mismatch,
    )
    report.check_invariants()
    return report


def d_w_direct_sum_scan(a1, b1, a2, b2) -> float:
    """Direct computation of the cutdown-comparison distance for a
    block-diagonal pair, from the assembled block matrices: the comparison
    in the direct-sum algebra is componentwise, so the infimum radius is the
    smallest candidate passing the counting check on each extracted block."""
    arr_a1, arr_b1 = entries_of(a1), entries_of(b1)
    arr_a2, arr_b2 = entries_of(a2), entries_of(b2)
    n1 = arr_a1.shape[0]
    n = n1 + arr_a2.shape[0]
    big_a = np.zeros((n, n), dtype=np.complex128)
    big_b = np.zeros((n, n), dtype=np.complex128)
    big_a[:n1, :n1], big_a[n1:, n1:] = arr_a1, arr_a2
    big_b[:n1, :n1], big_b[n1:, n1:] = arr_b1, arr_b2
    lam_a1, _ = _positive_eigenvalues(big_a[:n1, :n1])
    lam_b1, _ = _positive_eigenvalues(big_b[:n1, :n1])
    lam_a2, _ = _positive_eigenvalues(big_a[n1:, n1:])
    lam_b2, _ = _positive_eigenvalues(big_b[n1:, n1:])
    cands = {0.0}
    for la, lb in ((lam_a1, lam_b1), (lam_a2, lam_b2)):
        cands.update(float(x) for x in la)
        cands.update(float(x) for x in lb)
        cands.update(float(abs(x - y)) for x in la for y in lb)
    ordered = sorted(cands)

    def ok(r: float) -> bool:
        return (_counting_ok(lam_a1, lam_b1, r)
                and _counting_ok(lam_a2, lam_b2, r))

    lo, hi = 0, len(ordered) - 1
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(ordered[mid]):
            hi = mid
        else:
            lo = mid + 1
    return float(ordered[lo])
