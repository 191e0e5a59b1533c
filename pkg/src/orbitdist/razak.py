"""Boundary-fused matrix paths on a uniform grid.

An element is a sampled path of positive contractions in M_{kn} whose value
at 0 is blockdiag(c, ..., c, 0_k) (n-1 copies of a core c in M_k) and whose
value at 1 is blockdiag(c, ..., c) (n copies of the same core), constant near
both endpoints.  All sup-norm statements are grid statements; the recorded
Lipschitz constant (measured in Frobenius norm, an upper bound on the
operator-norm rate) quantifies the slack between grid points.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .errors import (InvalidParams, MassMismatch, MembershipViolation,
                     ParamsMismatch)
from .linalg import (_expm_i_raw, _sorted_spectrum, matrix_from_json,
                     matrix_to_json, op_norm)
from .measures import lp_distance, measure_from_eigenvalues

BOUNDARY_TOL = 1e-10
FLAT_TOL = 1e-12
MEMBERSHIP_TOL = 1e-8
POSITIVITY_TOL = 1e-10
CONTRACTION_TOL = 1e-9

_GEN_BUMP = 0.015        # relative size of the interior wiggle
_GEN_ATTEMPTS = 40


@dataclass(frozen=True)
class RazakParams:
    """Block sizes and grid for a sampled path: fibers in M_{k*n}, grid points
    j/N for j = 0..N, flat on [0, gamma] and [1 - gamma, 1]."""

    k: int
    n: int
    grid: int
    gamma: float

    def __post_init__(self):
        if self.k < 1:
            raise InvalidParams("k must be a positive integer")
        if self.n < 2:
            raise InvalidParams("n must be at least 2")
        if self.grid < 8:
            raise InvalidParams("grid size must be at least 8")
        if not (0.0 < self.gamma < 0.5):
            raise InvalidParams("gamma must lie in (0, 1/2)")
        if self.gamma * self.grid < 2.0 - 1e-9:
            raise InvalidParams("gamma * grid must be at least 2")

    @property
    def fiber_dim(self) -> int:
        return self.k * self.n

    @property
    def flat_lo(self) -> int:
        """Last grid index inside the left flat region."""
        return int(np.floor(self.gamma * self.grid + 1e-9))

    @property
    def flat_hi(self) -> int:
        """First grid index inside the right flat region."""
        return self.grid - self.flat_lo

    def xs(self) -> np.ndarray:
        return np.arange(self.grid + 1) / self.grid

    def refined(self) -> "RazakParams":
        return RazakParams(self.k, self.n, 2 * self.grid, self.gamma)

    def to_json(self) -> dict:
        return {"k": self.k, "n": self.n, "N": self.grid, "gamma": self.gamma}

    @classmethod
    def from_json(cls, obj: dict) -> "RazakParams":
        return cls(int(obj["k"]), int(obj["n"]), int(obj["N"]), float(obj["gamma"]))


def boundary_start(core: np.ndarray, n: int) -> np.ndarray:
    """blockdiag(c, ..., c, 0_k) with n - 1 copies of the core."""
    mask = np.diag([1.0] * (n - 1) + [0.0])
    return np.kron(mask, core)


def boundary_end(core: np.ndarray, n: int) -> np.ndarray:
    """blockdiag(c, ..., c) with n copies of the core."""
    return np.kron(np.eye(n), core)


@dataclass
class RazakElement:
    """A sampled positive path with the boundary fusion; treat as immutable.

    ``lipschitz`` records max_j ||samples[j+1] - samples[j]||_F * N.
    """

    params: RazakParams
    core: np.ndarray
    samples: list[np.ndarray]
    lipschitz: float
    _spectra: list[tuple[np.ndarray, np.ndarray] | None] = field(
        default=None, init=False, repr=False, compare=False)

    def fiber_spectrum(self, j: int) -> tuple[np.ndarray, np.ndarray]:
        """Ascending eigendecomposition of the fiber at grid index j, cached."""
        if self._spectra is None:
            self._spectra = [None] * (self.params.grid + 1)
        if self._spectra[j] is None:
            s = self.samples[j]
            # flat regions repeat the boundary fiber exactly; reuse its result
            anchor = None
            if j != 0 and j <= self.params.flat_lo:
                anchor = 0
            elif j != self.params.grid and j >= self.params.flat_hi:
                anchor = self.params.grid
            if anchor is not None and np.array_equal(s, self.samples[anchor]):
                self._spectra[j] = self.fiber_spectrum(anchor)
            else:
                self._spectra[j] = _sorted_spectrum((s + s.conj().T) / 2.0)
        return self._spectra[j]

    def spectra(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """Per-fiber ascending eigendecompositions, computed once and cached."""
        return [self.fiber_spectrum(j) for j in range(self.params.grid + 1)]

    def eigenvalues(self) -> np.ndarray:
        """(N+1, kn) array of ascending fiber eigenvalues."""
        return np.array([lam for lam, _ in self.spectra()])

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "c": matrix_to_json(self.core),
            "samples": [matrix_to_json(s) for s in self.samples],
            "lipschitz": self.lipschitz,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "RazakElement":
        params = RazakParams.from_json(obj["params"])
        core = matrix_from_json(obj["c"])
        samples = [matrix_from_json(s) for s in obj["samples"]]
        return cls(params, core, samples, float(obj["lipschitz"]))


@dataclass
class UnitizedUnitaryPath:
    """Sampled unitary path w with w - 1 taking the boundary-fused block form
    at both endpoints (same core block d)."""

    params: RazakParams
    samples: list[np.ndarray]
    lipschitz: float

    def to_json(self) -> dict:
        return {
            "params": self.params.to_json(),
            "samples": [matrix_to_json(s) for s in self.samples],
            "lipschitz": self.lipschitz,
        }

    @classmethod
    def from_json(cls, obj: dict) -> "UnitizedUnitaryPath":
        params = RazakParams.from_json(obj["params"])
        samples = [matrix_from_json(s) for s in obj["samples"]]
        return cls(params, samples, float(obj["lipschitz"]))


@dataclass(frozen=True)
class CheckResult:
    name: str
    defect: float
    tol: float

    @property
    def passed(self) -> bool:
        return self.defect <= self.tol


@dataclass(frozen=True)
class ValidationReport:
    checks: tuple[CheckResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failures(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]


def _max_abs(m: np.ndarray) -> float:
    return float(np.max(np.abs(m))) if m.size else 0.0


def validate(e: RazakElement) -> ValidationReport:
    """Report-style check of every element invariant."""
    p = e.params
    checks: list[CheckResult] = []
    kn = p.fiber_dim
    shape_ok = (len(e.samples) == p.grid + 1
                and all(s.shape == (kn, kn) for s in e.samples)
                and e.core.shape == (p.k, p.k))
    checks.append(CheckResult("shape", 0.0 if shape_ok else 1.0, 0.0))
    if not shape_ok:
        return ValidationReport(tuple(checks))
    herm = max(_max_abs(s - s.conj().T) for s in e.samples)
    herm = max(herm, _max_abs(e.core - e.core.conj().T))
    checks.append(CheckResult("hermitian", herm, 1e-12))
    checks.append(CheckResult(
        "boundary-start", op_norm(e.samples[0] - boundary_start(e.core, p.n)),
        BOUNDARY_TOL))
    checks.append(CheckResult(
        "boundary-end", op_norm(e.samples[-1] - boundary_end(e.core, p.n)),
        BOUNDARY_TOL))
    flat = 0.0
    for j in range(p.flat_lo + 1):
        flat = max(flat, _max_abs(e.samples[j] - e.samples[0]))
    for j in range(p.flat_hi, p.grid + 1):
        flat = max(flat, _max_abs(e.samples[j] - e.samples[-1]))
    checks.append(CheckResult("flat-regions", flat, FLAT_TOL))
    step = max(float(np.linalg.norm(e.samples[j + 1] - e.samples[j]))
               for j in range(p.grid))
    checks.append(CheckResult(
        "lipschitz", max(0.0, step * p.grid - e.lipschitz), 1e-9))
    evs = e.eigenvalues()
    checks.append(CheckResult("positive", max(0.0, -float(evs.min())),
                              POSITIVITY_TOL))
    checks.append(CheckResult("contraction", max(0.0, float(evs.max()) - 1.0),
                              CONTRACTION_TOL))
    return ValidationReport(tuple(checks))


def _measured_lipschitz(samples: list[np.ndarray], grid: int) -> float:
    step = max(float(np.linalg.norm(samples[j + 1] - samples[j]))
               for j in range(grid))
    return step * grid


def _random_hermitian(rng: np.random.Generator, dim: int) -> np.ndarray:
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return (g + g.conj().T) / 2.0


def gen_random(params: RazakParams, seed, full_spectrum: bool = False) -> RazakElement:
    """Deterministic random element: a random core with spread spectrum, a
    smooth trigonometric interior wiggle vanishing on the flat regions, and a
    cosine ramp between the two boundary values.  With ``full_spectrum`` the
    element is rescaled so the sampled spectra sweep up to 1 - 1/N and their
    union is dense at the resolution the Lipschitz bound supports."""
    entropy = seed if isinstance(seed, (list, tuple)) else [seed]
    rng = np.random.default_rng(np.random.SeedSequence(list(entropy)))
    p = params
    kn = p.fiber_dim
    lo, hi = p.flat_lo, p.flat_hi
    for _ in range(_GEN_ATTEMPTS):
        vals = np.sort(rng.uniform(0.2, 0.9, p.k))
        _, vec = _sorted_spectrum(_random_hermitian(rng, p.k))
        core = (vec * vals) @ vec.conj().T
        core = (core + core.conj().T) / 2.0
        a0 = boundary_start(core, p.n)
        a1 = boundary_end(core, p.n)
        coeffs = [(_random_hermitian(rng, kn), _random_hermitian(rng, kn))
                  for _ in range(4)]
        raw = []
        for j in range(p.grid + 1):
            x = j / p.grid
            h = np.zeros((kn, kn), dtype=np.complex128)
            for m, (am, bm) in enumerate(coeffs, start=1):
                h += am * np.cos(2 * np.pi * m * x) / m
                h += bm * np.sin(2 * np.pi * m * x) / m
            raw.append(h)
        peak = max(float(np.linalg.norm(h)) for h in raw)
        scale_bump = _GEN_BUMP / peak if peak > 0 else 0.0
        samples = []
        for j in range(p.grid + 1):
            if j <= lo:
                samples.append(a0.copy())
            elif j >= hi:
                samples.append(a1.copy())
            else:
                theta = np.pi * (j - lo) / (hi - lo)
                beta = 0.5 * (1.0 - np.cos(theta))
                env = np.sin(theta) ** 2
                s = (1.0 - beta) * a0 + beta * a1 + env * scale_bump * raw[j]
                samples.append((s + s.conj().T) / 2.0)
        element = RazakElement(p, core, samples,
                               _measured_lipschitz(samples, p.grid))
        evs = element.eigenvalues()
        if full_spectrum:
            top = float(evs.max())
            factor = (1.0 - 1.0 / p.grid) / top
            samples = [s * factor for s in samples]
            element = RazakElement(p, core * factor, samples,
                                   element.lipschitz * factor)
            evs = evs * factor
        interior = evs[lo + 1:hi]
        if interior.size and float(interior.min()) <= 1e-9:
            continue
        if float(evs.min()) < -POSITIVITY_TOL or float(evs.max()) > 1.0 + CONTRACTION_TOL:
            continue
        if full_spectrum:
            resolution = 2.0 * max(1.0, element.lipschitz) / p.grid
            union = np.sort(evs.ravel())
            gaps = np.diff(union)
            if float(evs.max()) < 1.0 - 2.0 / p.grid:
                continue
            if union[0] > resolution or (gaps.size and float(gaps.max()) > resolution):
                continue
        return element
    raise RuntimeError("random element generation failed after 40 attempts")


def refine(e: RazakElement) -> RazakElement:
    """Double the grid by linear interpolation (midpoints of positive
    contractions are positive contractions; flat regions stay flat)."""
    p = e.params
    samples: list[np.ndarray] = []
    for j in range(p.grid):
        samples.append(e.samples[j].copy())
        mid = (e.samples[j] + e.samples[j + 1]) / 2.0
        samples.append((mid + mid.conj().T) / 2.0)
    samples.append(e.samples[-1].copy())
    out = RazakElement(p.refined(), e.core.copy(), samples, e.lipschitz)
    if e._spectra is not None:
        # even-index fibers are the parent's fibers: share their spectra
        out._spectra = [None] * (2 * p.grid + 1)
        out._spectra[::2] = e._spectra
    return out


def _require_same_params(a, b) -> None:
    if a.params != b.params:
        raise ParamsMismatch(f"{a.params} vs {b.params}")


def sup_norm(e: RazakElement) -> float:
    """Max over the grid of the fiber operator norms."""
    return max(float(np.max(np.abs(lam))) if lam.size else 0.0
               for lam, _ in e.spectra())


def dist_norm(a: RazakElement, b: RazakElement) -> float:
    """Max over the grid of ||a_j - b_j||_op."""
    _require_same_params(a, b)
    return max(op_norm(sa - sb) for sa, sb in zip(a.samples, b.samples))


def d_w_path(a: RazakElement, b: RazakElement) -> float:
    """Cutdown-comparison distance of two paths: the pointwise sorted
    eigenvalue bottleneck, maximized over the grid."""
    _require_same_params(a, b)
    evs_a = a.eigenvalues()
    evs_b = b.eigenvalues()
    return float(np.max(np.abs(evs_a - evs_b)))


def fiber_measure(e: RazakElement, j: int):
    """Spectral measure of the fiber at grid index j under the unnormalized
    matrix trace."""
    lam = e.fiber_spectrum(j)[0]
    lam = np.where(np.abs(lam) <= POSITIVITY_TOL, 0.0, lam)
    return measure_from_eigenvalues(lam)


def d_p_path(a: RazakElement, b: RazakElement, stride: int = 1) -> float:
    """Levy-Prokhorov distance maximized over the point-evaluation trace grid
    (every ``stride``-th grid point, always including both endpoints)."""
    _require_same_params(a, b)
    if stride < 1:
        raise ValueError("stride must be >= 1")
    indices = sorted(set(range(0, a.params.grid + 1, stride)) | {0, a.params.grid})
    worst = 0.0
    for j in indices:
        try:
            worst = max(worst, lp_distance(fiber_measure(a, j), fiber_measure(b, j)))
        except MassMismatch as exc:
            raise MassMismatch(
                f"fiber ranks differ at x = {j / a.params.grid:g}: {exc}") from exc
    return worst


def membership_defect(w: UnitizedUnitaryPath, allow_scalar: bool = False) -> float:
    """Distance of the endpoint values from the required fused block form:
    w(0) = s(1 + blockdiag(d,...,d,0)) and w(1) = s(1 + blockdiag(d,...,d))
    with the same k-block d, where the scalar s is 1 unless ``allow_scalar``
    (unitaries of the unitization may carry a scalar part)."""
    p = w.params
    k, n = p.k, p.n
    w0, w1 = w.samples[0], w.samples[-1]
    lam = 1.0 + 0.0j
    if allow_scalar:
        corner = np.trace(w0[(n - 1) * k:, (n - 1) * k:]) / k
        if abs(corner) > 0.5:
            lam = corner / abs(corner)
    d0 = w0[:k, :k] / lam - np.eye(k)
    d1 = w1[:k, :k] / lam - np.eye(k)
    expected0 = lam * (np.eye(p.fiber_dim) + boundary_start(d0, n))
    expected1 = lam * (np.eye(p.fiber_dim) + boundary_end(d1, n))
    return max(op_norm(w0 - expected0), op_norm(w1 - expected1),
               op_norm(d0 - d1))


def conjugate(a: RazakElement, w: UnitizedUnitaryPath) -> RazakElement:
    """Pointwise w_j a_j w_j*; the boundary fusion is preserved exactly when
    w satisfies the membership form."""
    _require_same_params(a, w)
    if membership_defect(w, allow_scalar=True) > MEMBERSHIP_TOL:
        raise MembershipViolation("unitary path lacks the fused boundary form")
    samples = []
    for sa, sw in zip(a.samples, w.samples):
        s = sw @ sa @ sw.conj().T
        samples.append((s + s.conj().T) / 2.0)
    k = a.params.k
    w_core = w.samples[0][:k, :k]
    core = w_core @ a.core @ w_core.conj().T
    core = (core + core.conj().T) / 2.0
    return RazakElement(a.params, core, samples,
                        _measured_lipschitz(samples, a.params.grid))


def unitary_error(a: RazakElement, b: RazakElement, w: UnitizedUnitaryPath) -> float:
    """Max over the grid of ||w_j a_j w_j* - b_j||_op."""
    _require_same_params(a, b)
    _require_same_params(a, w)
    worst = 0.0
    for sa, sb, sw in zip(a.samples, b.samples, w.samples):
        diff = sw @ sa @ sw.conj().T - sb
        worst = max(worst, op_norm((diff + diff.conj().T) / 2.0))
    return worst


def exp_path(e: RazakElement, scale: float = 1.0) -> UnitizedUnitaryPath:
    """The unitary path exp(i * scale * e_j).  Because e has the fused
    boundary form, so does the result; handy for generating valid test
    conjugators."""
    samples = [_expm_i_raw((s + s.conj().T) / 2.0, scale) for s in e.samples]
    return UnitizedUnitaryPath(e.params, samples,
                               _measured_lipschitz(samples, e.params.grid))


def export_eigenvalues_csv(e: RazakElement, path) -> None:
    """Per-grid-point ascending eigenvalue lists, one row per grid point."""
    evs = e.eigenvalues()
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["x"] + [f"lambda_{i + 1}" for i in range(evs.shape[1])])
        for j, row in enumerate(evs):
            writer.writerow([repr(j / e.params.grid)] + [repr(float(v)) for v in row])
