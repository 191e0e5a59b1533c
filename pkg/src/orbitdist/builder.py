"""Constructive near-optimal conjugating unitary for boundary-fused paths.

Given two valid path elements a, b and a radius r exceeding their pointwise
sorted-eigenvalue distance, this module assembles a unitary path w with
sup_j ||w_j a_j w_j* - b_j|| < r + epsilon and the fused boundary form, and
certifies every claimed bound by direct evaluation:

  * on the middle range both elements are diagonalized by eigenvector
    continuation (cluster-wise maximal-overlap alignment with phase gauge
    fixing, budgeted rotation through near-degenerate windows, grid doubling
    when a step gate fails), and w = v* u;
  * at each flat end a core diagonalizer and a sorting permutation reduce the
    endpoint fibers to the ascending diagonal, and the mismatch with the
    adjacent middle frame - an almost-commuting unitary - is carried to the
    boundary along a spectral-cluster-compressed logarithmic path whose
    commutator with the constant fiber is measured, not assumed.

The certificate records the measured sup error, unitarity and membership
defects, the discrete continuity constant, and the number of grid doublings.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (BranchCut, ClusterGapFailure, InvalidParams,
                     NotDominating, RefinementExhausted, SingularInput)
from .linalg import (_op_norm_hermitian_raw, _sorted_spectrum,
                     _unitary_eigensystem, entries_of, op_norm)
from .razak import (RazakElement, UnitizedUnitaryPath, boundary_end,
                    boundary_start, d_w_path, membership_defect, refine,
                    unitary_error, validate)

MAX_DOUBLINGS = 6
OVERLAP_MIN = 0.5        # per-column overlap gate between consecutive frames
STEP_GATE = 1.2          # Frobenius gate on a single continuation step
ROTATION_BUDGET = 0.5    # per-step gauge rotation through degenerate windows
BLOCK_SV_MIN = 0.5       # singular-value floor for compressed unitary blocks
DEFECT_TOL = 1e-8


@dataclass(frozen=True)
class BuildRequest:
    """Inputs for the construction; ``delta`` defaults to
    min(epsilon/4, g_min/8) with g_min the smallest retained cluster gap of
    the endpoint fibers."""

    a: RazakElement
    b: RazakElement
    r: float
    epsilon: float
    delta: float | None = None

    def __post_init__(self):
        if self.epsilon <= 0:
            raise InvalidParams("epsilon must be positive")
        if self.delta is not None and not (0.0 < self.delta < self.epsilon / 2):
            raise InvalidParams("delta must lie in (0, epsilon/2)")


@dataclass(frozen=True)
class BuildCertificate:
    """Measured bounds for a constructed path; ``passed`` is determined by
    sup_error < r + epsilon and both defects <= 1e-8."""

    sup_error: float
    r: float
    epsilon: float
    delta: float
    unitarity_defect: float
    membership_defect: float
    continuity_constant: float
    refinement_count: int

    @property
    def passed(self) -> bool:
        return (self.sup_error < self.r + self.epsilon
                and self.unitarity_defect <= DEFECT_TOL
                and self.membership_defect <= DEFECT_TOL)

    def to_json(self) -> dict:
        return {
            "sup_error": self.sup_error,
            "r": self.r,
            "epsilon": self.epsilon,
            "unitarity_defect": self.unitarity_defect,
            "membership_defect": self.membership_defect,
            "continuity_constant": self.continuity_constant,
            "refinement_count": self.refinement_count,
            "pass": self.passed,
        }


@dataclass
class Continuation:
    """Aligned diagonalizing frames over the middle grid range."""

    lo: int
    hi: int
    eigen: list[np.ndarray]
    frames: list[np.ndarray]
    residual: float
    step_max: float


class _Retry(Exception):
    """Internal: current grid cannot meet the continuation gates."""

    def __init__(self, reason: str, halve_delta: bool = False):
        super().__init__(reason)
        self.halve_delta = halve_delta


def _split_clusters(values: np.ndarray, cap: float) -> list[tuple[int, int]]:
    """Partition ascending values into contiguous clusters of diameter <= cap
    by recursively splitting at the largest internal gap."""
    n = len(values)
    out: list[tuple[int, int]] = []
    spans = [(0, n)]
    while spans:
        a, b = spans.pop()
        if b - a <= 1 or values[b - 1] - values[a] <= cap:
            out.append((a, b))
            continue
        gaps = np.diff(values[a:b])
        cut = a + 1 + int(np.argmax(gaps))
        spans.append((cut, b))
        spans.append((a, cut))
    out.sort()
    return out


def _min_cluster_gap(values: np.ndarray, clusters: list[tuple[int, int]]) -> float:
    if len(clusters) < 2:
        return float("inf")
    return min(float(values[clusters[i + 1][0]] - values[clusters[i][1] - 1])
               for i in range(len(clusters) - 1))


def _polar_unitary(m: np.ndarray, floor: float) -> np.ndarray | None:
    """Polar factor of a small square matrix, or None when a singular value
    falls below ``floor``."""
    g = m.conj().T @ m
    lam, vec = _sorted_spectrum((g + g.conj().T) / 2.0)
    if float(np.sqrt(max(float(lam[0]), 0.0))) < floor:
        return None
    u = m @ ((vec * (1.0 / np.sqrt(lam))) @ vec.conj().T)
    for _ in range(2):
        u = u @ (3.0 * np.eye(u.shape[0]) - u.conj().T @ u) / 2.0
    return u


def _unitary_power(g: np.ndarray, alpha: float) -> np.ndarray:
    """g**alpha for a small unitary via its eigensystem (principal angles)."""
    phases, basis = _unitary_eigensystem(g)
    angles = np.arctan2(phases.imag, phases.real)
    return (basis * np.exp(1j * alpha * angles)) @ basis.conj().T


def _try_continuation(element: RazakElement, delta: float,
                      init_frame: np.ndarray | None) -> Continuation | None:
    """One pass of eigenvector continuation over the middle range; None when
    an alignment or step gate fails and the grid should be doubled."""
    p = element.params
    lo, hi = p.flat_lo, p.flat_hi
    cap = 0.75 * delta
    frames: list[np.ndarray] = []
    eigen: list[np.ndarray] = []
    prev: np.ndarray | None = init_frame
    residual = 0.0
    step_max = 0.0
    for j in range(lo, hi + 1):
        lam, vec = element.fiber_spectrum(j)
        clusters = _split_clusters(lam, cap)
        if prev is None:
            v_new = vec.copy()
        else:
            v_new = vec.copy()
            for a, b in clusters:
                block = vec[:, a:b]
                overlap = block.conj().T @ prev[:, a:b]
                gauge = _polar_unitary(overlap, 1e-8)
                if gauge is None:
                    return None
                if b - a > 1 and j > lo:
                    # budgeted rotation back toward the current eigenbasis so
                    # the frame completes crossings instead of sticking
                    phases, _ = _unitary_eigensystem(gauge)
                    theta = float(np.max(np.abs(np.arctan2(phases.imag, phases.real))))
                    if theta > 1e-12:
                        gauge = _unitary_power(gauge, max(0.0, 1.0 - ROTATION_BUDGET / theta))
                v_new[:, a:b] = block @ gauge
            diag_overlap = np.abs(np.diagonal(v_new.conj().T @ prev))
            if float(np.min(diag_overlap)) < OVERLAP_MIN:
                return None
            step = float(np.linalg.norm(v_new - prev))
            if step > STEP_GATE:
                return None
            step_max = max(step_max, step)
        for a, b in clusters:
            if b - a > 1:
                gauge = vec[:, a:b].conj().T @ v_new[:, a:b]
                block_res = gauge.conj().T @ np.diag(lam[a:b]) @ gauge - np.diag(lam[a:b])
                residual = max(residual, _op_norm_hermitian_raw(
                    (block_res + block_res.conj().T) / 2.0))
        frames.append(v_new.conj().T)
        eigen.append(lam)
        prev = v_new
    return Continuation(lo, hi, eigen, frames, residual, step_max)


def continuous_diagonalization(element: RazakElement, delta: float,
                               init_frame: np.ndarray | None = None,
                               max_doublings: int = MAX_DOUBLINGS,
                               force_doublings: int = 0,
                               ) -> tuple[RazakElement, Continuation, int]:
    """Diagonal path and continued diagonalizing frames over the middle range.

    Returns (element actually used, continuation, doublings performed); the
    element is grid-doubled until the alignment gates hold, up to the cap.
    """
    el = element
    for _ in range(force_doublings):
        el = refine(el)
    for d in range(force_doublings, max_doublings + 1):
        cont = _try_continuation(el, delta, init_frame)
        if cont is not None:
            return el, cont, d
        if d < max_doublings:
            el = refine(el)
    raise RefinementExhausted(
        f"continuation gates unmet after {max_doublings} grid doublings")


def endpoint_diagonalization(element: RazakElement, end: int) -> np.ndarray:
    """Core diagonalizer U with U c U* ascending diagonal.  The same core
    appears at both ends, so the result does not depend on ``end``; the
    argument is kept for call-site clarity."""
    if end not in (0, 1):
        raise ValueError("end must be 0 or 1")
    _, vec = _sorted_spectrum((element.core + element.core.conj().T) / 2.0)
    return vec.conj().T


def sort_permutation(diag, companion=None) -> np.ndarray:
    """Permutation matrix x with x diag(d) x* ascending.

    Ties are broken by the companion diagonal when given (so one permutation
    can serve two simultaneously sorted diagonals), then by original index.
    """
    d = np.asarray(diag, dtype=np.float64)
    n = d.size
    comp = np.zeros(n) if companion is None else np.asarray(companion, dtype=np.float64)
    perm = np.lexsort((np.arange(n), comp, d))
    return np.eye(n)[perm]


def _block_embed(blocks: list[np.ndarray], clusters: list[tuple[int, int]],
                 n: int) -> np.ndarray:
    out = np.zeros((n, n), dtype=np.complex128)
    for (a, b), blk in zip(clusters, blocks):
        out[a:b, a:b] = blk
    return out


def _principal_log_angles(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    phases, basis = _unitary_eigensystem(u)
    angles = np.arctan2(phases.imag, phases.real)
    if np.any(np.pi - np.abs(angles) < 1e-6):
        raise BranchCut("unitary eigenvalue within 1e-6 of -1")
    return angles, basis


def almost_commuting_path(u, a0, eps: float, delta: float,
                          n_steps: int) -> tuple[list[np.ndarray], float]:
    """Unitary path from 1 to u whose commutator with a0 stays below eps/2.

    Requires ||[u, a0]|| small relative to the spectral cluster gaps of a0.
    Construction: cluster the spectrum of a0 into groups of diameter <= eps/4;
    compress u block-diagonally over the cluster projections and polar-correct
    each block (singular values must stay >= 1/2); follow the logarithmic
    geodesic of the block-diagonal part (which commutes with the clustered a0)
    and finish with the short geodesic closing the gap to u.  The returned
    bound is the measured max commutator along the samples.
    """
    u_arr = entries_of(u)
    a_arr = entries_of(a0)
    if n_steps < 2:
        raise ValueError("need at least two path steps")
    lam, vec = _sorted_spectrum((a_arr + a_arr.conj().T) / 2.0)
    kn = lam.size
    clusters = _split_clusters(lam, eps / 4.0)
    q = vec.conj().T @ u_arr @ vec
    blocks: list[np.ndarray] = []
    for a, b in clusters:
        blk = _polar_unitary(q[a:b, a:b], BLOCK_SV_MIN)
        if blk is None:
            raise ClusterGapFailure(
                "compressed block singular value below 1/2; commutator too "
                "large for the spectral gaps of the constant fiber")
        blocks.append(blk)
    angle_data = []
    l1 = 0.0
    for blk in blocks:
        angles, basis = _principal_log_angles(blk)
        angle_data.append((angles, basis))
        if angles.size:
            l1 = max(l1, float(np.max(np.abs(angles))))
    q_bd = _block_embed(blocks, clusters, kn)
    angles_s, basis_s = _principal_log_angles(q_bd.conj().T @ q)
    l2 = float(np.max(np.abs(angles_s))) if angles_s.size else 0.0

    frames: list[np.ndarray] = []
    if l1 + l2 == 0.0:
        frames = [np.eye(kn, dtype=np.complex128) for _ in range(n_steps + 1)]
    else:
        m1 = int(round(n_steps * l1 / (l1 + l2)))
        m1 = min(max(m1, 1), n_steps - 1)
        m2 = n_steps - m1
        for j in range(n_steps + 1):
            if j <= m1:
                s = j / m1
                segs = [(bs * np.exp(1j * s * an)) @ bs.conj().T
                        for (an, bs) in angle_data]
                f_eig = _block_embed(segs, clusters, kn)
            else:
                s = (j - m1) / m2
                f_eig = q_bd @ ((basis_s * np.exp(1j * s * angles_s)) @ basis_s.conj().T)
            frames.append(vec @ f_eig @ vec.conj().T)
        drift = max(op_norm(frames[0] - np.eye(kn)), op_norm(frames[-1] - u_arr))
        if drift > 1e-8:
            raise ClusterGapFailure(f"path endpoint drift {drift:.3e}")
        # the endpoints are the exact targets; the geodesic formulas are only
        # needed strictly inside, so pin them and absorb the log/exp dust
        frames[0] = np.eye(kn, dtype=np.complex128)
        frames[-1] = u_arr.copy()
    max_comm = 0.0
    for f in frames:
        max_comm = max(max_comm, op_norm(f @ a_arr - a_arr @ f))
    if max_comm >= eps / 2.0:
        raise ClusterGapFailure(
            f"measured commutator {max_comm:.3e} not below eps/2")
    return frames, max_comm


def _default_delta(a: RazakElement, b: RazakElement, eps: float) -> float:
    g_min = float("inf")
    for el in (a, b):
        for fiber in (0, el.params.grid):
            lam = el.fiber_spectrum(fiber)[0]
            clusters = _split_clusters(lam, eps / 4.0)
            g_min = min(g_min, _min_cluster_gap(lam, clusters))
    if not np.isfinite(g_min):
        g_min = eps
    return max(min(eps / 4.0, g_min / 8.0), 1e-9)


def _endpoint_frame(core_diag: np.ndarray, k: int, n: int, end: int) -> np.ndarray:
    """Embed the core diagonalizer: blockdiag(U,...,U,1_k) at the left end,
    blockdiag(U,...,U) at the right end."""
    if end == 0:
        return boundary_start(core_diag, n) + np.kron(
            np.diag([0.0] * (n - 1) + [1.0]), np.eye(k))
    return boundary_end(core_diag, n)


def _assemble(el_a: RazakElement, el_b: RazakElement, eps: float,
              mid_tol: float, lin_delta: float) -> list[np.ndarray]:
    p = el_a.params
    k, n = p.k, p.n
    lo, hi = p.flat_lo, p.flat_hi
    u_core = endpoint_diagonalization(el_a, 0)
    v_core = endpoint_diagonalization(el_b, 0)

    def ends(end: int) -> tuple[np.ndarray, np.ndarray]:
        u_e = _endpoint_frame(u_core, k, n, end)
        v_e = _endpoint_frame(v_core, k, n, end)
        fa = el_a.samples[0 if end == 0 else -1]
        fb = el_b.samples[0 if end == 0 else -1]
        da = np.real(np.diagonal(u_e @ fa @ u_e.conj().T))
        db = np.real(np.diagonal(v_e @ fb @ v_e.conj().T))
        x = sort_permutation(da, companion=db)
        return x @ u_e, x @ v_e

    a_l, b_l = ends(0)
    a_r, b_r = ends(1)

    cont_a = _try_continuation(el_a, mid_tol, a_l.conj().T)
    if cont_a is None:
        raise _Retry("continuation gate failed for the first element")
    cont_b = _try_continuation(el_b, mid_tol, b_l.conj().T)
    if cont_b is None:
        raise _Retry("continuation gate failed for the second element")

    # redistribute endpoint phases along the middle so the right-end mismatch
    # has spectrum away from -1 (diagonal phases never change the residual)
    span = hi - lo
    for cont, right in ((cont_a, a_r), (cont_b, b_r)):
        w_end = cont.frames[-1] @ right.conj().T
        diag = np.diagonal(w_end)
        theta = np.where(np.abs(diag) > 0.5,
                         np.arctan2(diag.imag, diag.real), 0.0)
        if float(np.max(np.abs(theta))) > 1e-12:
            for idx in range(len(cont.frames)):
                s = idx / span
                cont.frames[idx] = (np.exp(-1j * s * theta)[:, None]
                                    * cont.frames[idx])

    q_ul = a_l.conj().T @ cont_a.frames[0]
    q_vl = b_l.conj().T @ cont_b.frames[0]
    q_ur = a_r.conj().T @ cont_a.frames[-1]
    q_vr = b_r.conj().T @ cont_b.frames[-1]

    f_l, _ = almost_commuting_path(q_ul, el_a.samples[0], eps, lin_delta, lo)
    g_l, _ = almost_commuting_path(q_vl, el_b.samples[0], eps, lin_delta, lo)
    f_r, _ = almost_commuting_path(q_ur, el_a.samples[-1], eps, lin_delta, p.grid - hi)
    g_r, _ = almost_commuting_path(q_vr, el_b.samples[-1], eps, lin_delta, p.grid - hi)

    left_fixed = b_l.conj().T @ a_l
    right_fixed = b_r.conj().T @ a_r
    w: list[np.ndarray] = []
    for j in range(p.grid + 1):
        if j < lo:
            w.append(g_l[j].conj().T @ left_fixed @ f_l[j])
        elif j <= hi:
            w.append(cont_b.frames[j - lo].conj().T @ cont_a.frames[j - lo])
        else:
            m = p.grid - j
            w.append(g_r[m].conj().T @ right_fixed @ f_r[m])
    return w


def build_weyl_unitary(req: BuildRequest) -> tuple[UnitizedUnitaryPath, BuildCertificate]:
    """Construct and certify a conjugating unitary path for a valid pair.

    Raises NotDominating when r <= the pointwise sorted-eigenvalue distance,
    and RefinementExhausted / ClusterGapFailure / BranchCut when the grid or
    spectral geometry defeats the construction within the refinement cap.
    """
    a, b = req.a, req.b
    if a.params != b.params:
        raise InvalidParams("elements must share parameters")
    for name, el in (("a", a), ("b", b)):
        report = validate(el)
        if not report.passed:
            raise InvalidParams(
                f"element {name} invalid: "
                + ", ".join(c.name for c in report.failures()))
    dw = d_w_path(a, b)
    if req.r <= dw:
        raise NotDominating(f"r = {req.r!r} does not exceed d_w = {dw!r}")
    # the middle-range tolerance only has to fit the epsilon budget; the
    # commutator knob for the flat ends follows the conservative default
    mid_tol = req.delta if req.delta is not None else req.epsilon / 4.0
    lin_delta = req.delta if req.delta is not None else _default_delta(a, b, req.epsilon)
    el_a, el_b = a, b
    last_error: Exception | None = None
    for doublings in range(MAX_DOUBLINGS + 1):
        try:
            samples = _assemble(el_a, el_b, req.epsilon, mid_tol, lin_delta)
        except _Retry as exc:
            last_error = exc
        except (ClusterGapFailure, BranchCut, SingularInput) as exc:
            last_error = exc
            lin_delta = max(lin_delta / 2.0, 1e-12)
        else:
            step = max(float(np.linalg.norm(samples[j + 1] - samples[j]))
                       for j in range(len(samples) - 1))
            path = UnitizedUnitaryPath(el_a.params, samples,
                                       step * el_a.params.grid)
            unit_defect = max(
                _op_norm_hermitian_raw(
                    (s.conj().T @ s - np.eye(s.shape[0])
                     + (s.conj().T @ s - np.eye(s.shape[0])).conj().T) / 2.0)
                for s in samples)
            cert = BuildCertificate(
                sup_error=unitary_error(el_a, el_b, path),
                r=req.r,
                epsilon=req.epsilon,
                delta=lin_delta,
                unitarity_defect=unit_defect,
                membership_defect=membership_defect(path),
                continuity_constant=path.lipschitz,
                refinement_count=doublings,
            )
            return path, cert
        if doublings < MAX_DOUBLINGS:
            el_a, el_b = refine(el_a), refine(el_b)
    if isinstance(last_error, (ClusterGapFailure, BranchCut)):
        raise last_error
    raise RefinementExhausted(
        f"construction failed after {MAX_DOUBLINGS} grid doublings: {last_error}")
