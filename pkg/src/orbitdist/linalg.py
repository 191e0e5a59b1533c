"""Dense complex Hermitian linear algebra with a deterministic eigensolver.

All operations are pure functions of immutable values.  The eigensolver is a
cyclic Jacobi sweep over the off-diagonal entries: it is simple, converges
quadratically at these sizes, keeps the eigenvector matrix unitary to machine
precision by construction, and is bit-reproducible for a fixed input (fixed
sweep order, degenerate bases fixed by Gram-Schmidt against the canonical
basis, phases fixed by the first significant component).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BranchCut, NegativeInput, NonHermitianInput, SingularInput

HERMITIAN_TOL = 1e-12       # per-entry |a_ij - conj(a_ji)|
UNITARY_TOL = 1e-10         # operator norm of U*U - I
RECONSTRUCTION_TOL = 1e-10  # relative defect of V diag(lam) V*
NEGATIVE_CLAMP = 1e-10      # eigenvalues in [-clamp, 0) are treated as 0
NEGATIVE_ERROR = 1e-8       # below -error a "positive" input is rejected
RANK_ETA = 1e-9             # numerical-rank threshold scale
BRANCH_MARGIN = 1e-6        # required angular distance from +/- pi

_JACOBI_REL_TOL = 1e-13     # off-diagonal Frobenius mass, relative to ||a||_F
_JACOBI_MAX_SWEEPS = 60
_DEGENERACY_TOL = 1e-12     # relative gap below which eigenvalues are one cluster


def entries_of(m) -> np.ndarray:
    """Accept a matrix wrapper or a bare array-like; return complex entries."""
    if isinstance(m, (HermitianMatrix, UnitaryMatrix)):
        return m.entries
    return np.asarray(m, dtype=np.complex128)


def matrix_to_json(arr: np.ndarray) -> dict:
    """Serialize as {"dim": n, "entries": [[[re, im], ...], ...]} row-major."""
    a = np.asarray(arr, dtype=np.complex128)
    return {
        "dim": int(a.shape[0]),
        "entries": [[[float(z.real), float(z.imag)] for z in row] for row in a],
    }


def matrix_from_json(obj: dict) -> np.ndarray:
    dim = int(obj["dim"])
    rows = obj["entries"]
    if len(rows) != dim or any(len(r) != dim for r in rows):
        raise ValueError("matrix JSON entries do not match dim")
    return np.array([[complex(re, im) for re, im in row] for row in rows],
                    dtype=np.complex128)


@dataclass(frozen=True)
class HermitianMatrix:
    """A dense complex Hermitian matrix; validated at construction."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise NonHermitianInput(f"expected a square matrix, got shape {arr.shape}")
        if float(np.max(np.abs(arr - arr.conj().T))) > HERMITIAN_TOL:
            raise NonHermitianInput("matrix is not Hermitian within 1e-12 per entry")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def to_json(self) -> dict:
        return matrix_to_json(self.entries)

    @classmethod
    def from_json(cls, obj: dict) -> "HermitianMatrix":
        return cls(matrix_from_json(obj))


@dataclass(frozen=True)
class UnitaryMatrix:
    """A dense unitary matrix; ||U*U - I||_op <= 1e-10 enforced."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.asarray(self.entries, dtype=np.complex128)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] < 1:
            raise NonHermitianInput(f"expected a square matrix, got shape {arr.shape}")
        defect = arr.conj().T @ arr - np.eye(arr.shape[0])
        if _op_norm_hermitian_raw((defect + defect.conj().T) / 2.0) > UNITARY_TOL:
            raise SingularInput("matrix is not unitary within 1e-10")
        arr = arr.copy()
        arr.setflags(write=False)
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def to_json(self) -> dict:
        return matrix_to_json(self.entries)

    @classmethod
    def from_json(cls, obj: dict) -> "UnitaryMatrix":
        return cls(matrix_from_json(obj))


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with matching orthonormal eigenvector columns."""

    eigenvalues: np.ndarray
    eigenvectors: UnitaryMatrix

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, dtype=np.float64)
        if np.any(np.diff(lam) < 0):
            raise ValueError("eigenvalues must be nondecreasing")
        lam = lam.copy()
        lam.setflags(write=False)
        object.__setattr__(self, "eigenvalues", lam)


def _jacobi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi sweep; returns (diag, v) with a = v @ diag(d) @ v*."""
    n = a.shape[0]
    m = np.array(a, dtype=np.complex128)
    v = np.eye(n, dtype=np.complex128)
    fro = float(np.linalg.norm(m))
    if fro == 0.0 or n == 1:
        return np.real(np.diagonal(m)).copy(), v
    tol = _JACOBI_REL_TOL * fro
    skip = tol / (2.0 * n)
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = m - np.diag(np.diagonal(m))
        if float(np.linalg.norm(off)) <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = m[p, q]
                ab = abs(apq)
                if ab <= skip:
                    continue
                w = apq / ab
                theta = (m[q, q].real - m[p, p].real) / (2.0 * ab)
                if theta == 0.0:
                    t = 1.0
                else:
                    t = -np.sign(theta) / (abs(theta) + float(np.hypot(theta, 1.0)))
                c = 1.0 / float(np.sqrt(t * t + 1.0))
                s = t * c
                wbar = np.conj(w)
                # right-multiply by the rotation, then left-multiply by its adjoint
                mp = m[:, p].copy()
                mq = m[:, q].copy()
                m[:, p] = c * mp + wbar * s * mq
                m[:, q] = -s * mp + wbar * c * mq
                rp = m[p, :].copy()
                rq = m[q, :].copy()
                m[p, :] = c * rp + w * s * rq
                m[q, :] = -s * rp + w * c * rq
                m[p, q] = 0.0
                m[q, p] = 0.0
                m[p, p] = m[p, p].real
                m[q, q] = m[q, q].real
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp + wbar * s * vq
                v[:, q] = -s * vp + wbar * c * vq
    else:
        raise RuntimeError("Jacobi eigensolver failed to converge in 60 sweeps")
    return np.real(np.diagonal(m)).copy(), v


def _fix_degenerate_basis(lam: np.ndarray, vec: np.ndarray, scale: float) -> np.ndarray:
    """Replace the basis of each degenerate cluster by Gram-Schmidt of the
    projected canonical basis, in canonical order."""
    n = lam.size
    tol = _DEGENERACY_TOL * max(1.0, scale)
    out = vec.copy()
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and lam[stop] - lam[stop - 1] <= tol:
            stop += 1
        size = stop - start
        if size > 1:
            cols = out[:, start:stop]
            proj = cols @ cols.conj().T
            basis: list[np.ndarray] = []
            for j in range(n):
                w = proj @ np.eye(n, dtype=np.complex128)[:, j]
                for b in basis:
                    w = w - b * (b.conj() @ w)
                norm = float(np.linalg.norm(w))
                if norm > 1e-6:
                    basis.append(w / norm)
                if len(basis) == size:
                    break
            if len(basis) == size:
                out[:, start:stop] = np.column_stack(basis)
        start = stop
    return out


def _fix_phases(vec: np.ndarray) -> np.ndarray:
    """Rotate each column so its first significant component is positive real."""
    out = vec.copy()
    for j in range(out.shape[1]):
        col = out[:, j]
        idx = int(np.argmax(np.abs(col) > 1e-8))
        z = col[idx]
        if abs(z) > 0:
            out[:, j] = col * (np.conj(z) / abs(z))
    return out


def _sorted_spectrum(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Deterministic ascending eigendecomposition of a raw Hermitian array."""
    d, v = _jacobi(a)
    order = np.argsort(d, kind="stable")
    lam = d[order]
    vec = v[:, order]
    vec = _fix_degenerate_basis(lam, vec, float(np.linalg.norm(a)))
    vec = _fix_phases(vec)
    return lam, vec


def _op_norm_hermitian_raw(h: np.ndarray) -> float:
    lam, _ = _jacobi(h)
    return float(np.max(np.abs(lam))) if lam.size else 0.0


def op_norm(m) -> float:
    """Operator norm.  Hermitian input: max |eigenvalue|; otherwise the largest
    singular value via m*m."""
    arr = entries_of(m)
    if arr.size == 0:
        return 0.0
    if float(np.max(np.abs(arr - arr.conj().T))) <= 1e-12 * max(1.0, float(np.max(np.abs(arr)))):
        return _op_norm_hermitian_raw((arr + arr.conj().T) / 2.0)
    g = arr.conj().T @ arr
    lam, _ = _jacobi((g + g.conj().T) / 2.0)
    return float(np.sqrt(max(float(np.max(lam)), 0.0)))


def eigh(a) -> Spectrum:
    """Ascending eigendecomposition of a Hermitian matrix.

    Deterministic for a fixed input; raises NonHermitianInput on invalid input
    and verifies the reconstruction defect before returning.
    """
    if not isinstance(a, HermitianMatrix):
        a = HermitianMatrix(entries_of(a))
    lam, vec = _sorted_spectrum(a.entries)
    scale = max(1.0, float(np.max(np.abs(lam))) if lam.size else 0.0)
    defect = _op_norm_hermitian_raw(
        (vec * lam) @ vec.conj().T - a.entries)
    if defect > RECONSTRUCTION_TOL * scale:
        raise RuntimeError(f"eigendecomposition reconstruction defect {defect:.3e}")
    return Spectrum(lam, UnitaryMatrix(vec))


def _positive_eigenvalues(a, clamp_tol: float = NEGATIVE_CLAMP,
                          reject_tol: float = NEGATIVE_ERROR) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecompose and clamp tiny negatives; reject genuinely negative input."""
    arr = entries_of(a)
    lam, vec = _sorted_spectrum((arr + arr.conj().T) / 2.0)
    if lam.size and float(lam[0]) < -reject_tol:
        raise NegativeInput(f"minimum eigenvalue {lam[0]:.3e} below -{reject_tol:g}")
    lam = np.where(lam < 0.0, 0.0, lam)
    return lam, vec


def apply_spectral(a, fn) -> np.ndarray:
    """Functional calculus: V fn(lam) V* for a Hermitian array/wrapper."""
    arr = entries_of(a)
    lam, vec = _sorted_spectrum((arr + arr.conj().T) / 2.0)
    vals = np.asarray([fn(float(x)) for x in lam], dtype=np.float64)
    out = (vec * vals) @ vec.conj().T
    return (out + out.conj().T) / 2.0


def cutdown(a, s: float) -> HermitianMatrix:
    """Spectral cutdown: clip the spectrum of a positive matrix below s to zero,
    i.e. apply t -> max(0, t - s)."""
    if s < 0:
        raise ValueError("cutdown level must be nonnegative")
    lam, vec = _positive_eigenvalues(a)
    vals = np.maximum(lam - s, 0.0)
    out = (vec * vals) @ vec.conj().T
    return HermitianMatrix((out + out.conj().T) / 2.0)


def counting(a, t: float) -> int:
    """Number of eigenvalues of a positive matrix strictly greater than t."""
    arr = entries_of(a)
    lam, _ = _jacobi((arr + arr.conj().T) / 2.0)
    lam = np.where((lam < 0.0) & (lam >= -NEGATIVE_CLAMP), 0.0, lam)
    return int(np.sum(lam > t))


def numerical_rank(a, eta: float | None = None) -> int:
    """Rank with threshold eta = 1e-9 * max(1, ||a||_op) unless overridden."""
    arr = entries_of(a)
    lam, _ = _jacobi((arr + arr.conj().T) / 2.0)
    if eta is None:
        eta = RANK_ETA * max(1.0, float(np.max(np.abs(lam))) if lam.size else 0.0)
    return int(np.sum(lam > eta))


def nearest_unitary(m) -> UnitaryMatrix:
    """Polar factor of an invertible matrix: the unitary minimizing ||m - U||_F."""
    arr = entries_of(m)
    g = arr.conj().T @ arr
    lam, vec = _sorted_spectrum((g + g.conj().T) / 2.0)
    smin = float(np.sqrt(max(float(lam[0]), 0.0)))
    if smin <= 1e-8:
        raise SingularInput(f"smallest singular value {smin:.3e} <= 1e-8")
    inv_sqrt = (vec * (1.0 / np.sqrt(lam))) @ vec.conj().T
    u = arr @ inv_sqrt
    # two Newton-Schulz polishing steps: quadratic cleanup of the unitary defect
    for _ in range(2):
        u = u @ (3.0 * np.eye(u.shape[0]) - u.conj().T @ u) / 2.0
    return UnitaryMatrix(u)


def _unitary_eigensystem(u: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Eigenbasis of a unitary via its commuting Hermitian and skew parts.

    The real part is diagonalized first; within each of its eigenvalue
    clusters the compressed imaginary part separates conjugate phases.
    """
    n = u.shape[0]
    breal = (u + u.conj().T) / 2.0
    bimag = (u - u.conj().T) / 2.0j
    bimag = (bimag + bimag.conj().T) / 2.0
    lam_r, v_r = _sorted_spectrum(breal)
    basis = np.zeros((n, n), dtype=np.complex128)
    col = 0
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and lam_r[stop] - lam_r[stop - 1] <= 1e-8:
            stop += 1
        block = v_r[:, start:stop]
        if stop - start == 1:
            basis[:, col] = block[:, 0]
            col += 1
        else:
            comp = block.conj().T @ bimag @ block
            _, w = _sorted_spectrum((comp + comp.conj().T) / 2.0)
            sub = block @ w
            for j in range(sub.shape[1]):
                basis[:, col] = sub[:, j]
                col += 1
        start = stop
    phases = np.array([basis[:, j].conj() @ u @ basis[:, j] for j in range(n)])
    return phases, basis


def unitary_log(u) -> HermitianMatrix:
    """Principal logarithm: Hermitian h with exp(i h) = u and ||h||_op <= pi.

    Raises BranchCut when a unitary eigenvalue argument comes within 1e-6
    of +/- pi.
    """
    if not isinstance(u, UnitaryMatrix):
        u = UnitaryMatrix(entries_of(u))
    phases, basis = _unitary_eigensystem(u.entries)
    angles = np.arctan2(phases.imag, phases.real)
    if np.any(np.pi - np.abs(angles) < BRANCH_MARGIN):
        raise BranchCut("a unitary eigenvalue lies within 1e-6 of -1")
    h = (basis * angles) @ basis.conj().T
    h = (h + h.conj().T) / 2.0
    defect = op_norm(_expm_i_raw(h) - u.entries)
    if defect > 1e-9:
        raise RuntimeError(f"unitary logarithm residual {defect:.3e}")
    return HermitianMatrix(h)


def _expm_i_raw(h: np.ndarray, scale: float = 1.0) -> np.ndarray:
    lam, vec = _sorted_spectrum((h + h.conj().T) / 2.0)
    return (vec * np.exp(1j * scale * lam)) @ vec.conj().T


def expm_i(h, scale: float = 1.0) -> np.ndarray:
    """exp(i * scale * h) for Hermitian h, via the eigendecomposition."""
    return _expm_i_raw(entries_of(h), scale)
