import numpy as np
import pytest
import scipy.linalg

from orbitdist.errors import (BranchCut, NegativeInput, NonHermitianInput,
                              SingularInput)
from orbitdist.linalg import (HermitianMatrix, Spectrum, UnitaryMatrix,
                              counting, cutdown, eigh, expm_i,
                              matrix_from_json, matrix_to_json,
                              nearest_unitary, numerical_rank, op_norm,
                              unitary_log)
from conftest import (random_hermitian, random_positive,
                      random_positive_contraction, random_unitary)


class TestEigh:
    def test_identity(self):
        spec = eigh(np.eye(3, dtype=complex))
        assert np.allclose(spec.eigenvalues, [1.0, 1.0, 1.0])
        assert np.allclose(spec.eigenvectors.entries, np.eye(3), atol=1e-12)

    def test_off_diagonal_two_by_two(self):
        spec = eigh(np.array([[0, 1], [1, 0]], dtype=complex))
        assert np.allclose(spec.eigenvalues, [-1.0, 1.0], atol=1e-13)

    def test_reconstruction_random(self, rng):
        for _ in range(10):
            h = random_hermitian(rng, 5)
            spec = eigh(h)
            v = spec.eigenvectors.entries
            rebuilt = (v * spec.eigenvalues) @ v.conj().T
            scale = max(1.0, op_norm(h))
            assert op_norm(rebuilt - h) <= 1e-10 * scale

    def test_against_numpy(self, rng):
        for dim in (2, 3, 4, 6, 8):
            h = random_hermitian(rng, dim)
            assert np.allclose(eigh(h).eigenvalues, np.linalg.eigvalsh(h),
                               atol=1e-11)

    def test_deterministic(self, rng):
        h = random_hermitian(rng, 6)
        s1, s2 = eigh(h), eigh(h)
        assert np.array_equal(s1.eigenvalues, s2.eigenvalues)
        assert np.array_equal(s1.eigenvectors.entries, s2.eigenvectors.entries)

    def test_unitary_invariance_of_spectrum(self, rng):
        for _ in range(10):
            h = random_hermitian(rng, 5)
            u = random_unitary(rng, 5)
            lam1 = eigh(h).eigenvalues
            lam2 = eigh(u @ h @ u.conj().T).eigenvalues
            assert np.max(np.abs(lam1 - lam2)) <= 1e-10

    def test_rejects_non_hermitian(self, rng):
        with pytest.raises(NonHermitianInput):
            eigh(np.array([[0.0, 1.0], [0.0, 0.0]]))


class TestCutdown:
    def test_zero_level_is_identity_map(self, rng):
        a = random_positive(rng, 4)
        assert op_norm(cutdown(a, 0.0).entries - a) <= 1e-12

    def test_diagonal_example(self):
        out = cutdown(np.diag([0.2, 0.7]).astype(complex), 0.5)
        assert np.allclose(out.entries, np.diag([0.0, 0.2]), atol=1e-14)

    def test_vanishes_above_norm(self, rng):
        a = random_positive(rng, 4)
        assert op_norm(cutdown(a, op_norm(a)).entries) <= 1e-12
        assert op_norm(cutdown(a, op_norm(a) + 0.3).entries) <= 1e-12

    def test_monotone_in_level(self, rng):
        a = random_positive(rng, 5)
        for s, s2 in [(0.1, 0.3), (0.0, 0.05), (0.2, 1.0)]:
            lam_hi = eigh(cutdown(a, s2).entries).eigenvalues
            lam_lo = eigh(cutdown(a, s).entries).eigenvalues
            assert np.all(lam_hi <= lam_lo + 1e-12)

    def test_clamps_tiny_negative(self):
        a = np.diag([-5e-11, 0.4]).astype(complex)
        out = cutdown(a, 0.0)
        assert np.min(np.linalg.eigvalsh(out.entries)) >= 0.0

    def test_rejects_negative(self):
        with pytest.raises(NegativeInput):
            cutdown(np.diag([-1e-6, 0.4]).astype(complex), 0.1)


class TestCounting:
    def test_diagonal_example(self):
        assert counting(np.diag([0.2, 0.7]).astype(complex), 0.5) == 1

    def test_zero_above_norm(self, rng):
        a = random_positive(rng, 4)
        assert counting(a, op_norm(a)) == 0

    def test_matches_rank_of_cutdown(self, rng):
        a = random_positive_contraction(rng, 6)
        top = op_norm(a)
        for t in np.linspace(0.0, top, 100):
            assert counting(a, t) == numerical_rank(cutdown(a, t).entries)

    def test_nonincreasing_right_continuous(self, rng):
        a = random_positive_contraction(rng, 5)
        grid = np.linspace(0.0, 1.1, 57)
        vals = [counting(a, t) for t in grid]
        assert all(x >= y for x, y in zip(vals, vals[1:]))
        for t in grid:
            assert counting(a, t + 1e-15) == counting(a, t)


class TestNearestUnitary:
    def test_unitary_fixed_point(self, rng):
        u = random_unitary(rng, 4)
        assert op_norm(nearest_unitary(u).entries - u) <= 1e-12

    def test_positive_scaling(self):
        out = nearest_unitary(2.0 * np.eye(3))
        assert op_norm(out.entries - np.eye(3)) <= 1e-13

    def test_polar_factorization(self, rng):
        for _ in range(5):
            m = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
            u = nearest_unitary(m).entries
            assert op_norm(u.conj().T @ u - np.eye(4)) <= 1e-10
            p = u.conj().T @ m
            assert op_norm(p - p.conj().T) <= 1e-9
            assert np.min(np.linalg.eigvalsh((p + p.conj().T) / 2)) >= -1e-10
            u_ref, _ = scipy.linalg.polar(m)
            assert op_norm(u - u_ref) <= 1e-9

    def test_absorbs_positive_factor(self, rng):
        u = random_unitary(rng, 5)
        p = random_positive(rng, 5) + 0.5 * np.eye(5)
        assert op_norm(nearest_unitary(u @ p).entries - u) <= 1e-9

    def test_rejects_singular(self):
        m = np.diag([1.0, 1e-9]).astype(complex)
        with pytest.raises(SingularInput):
            nearest_unitary(m)


class TestUnitaryLog:
    def test_identity(self):
        assert op_norm(unitary_log(np.eye(4, dtype=complex)).entries) <= 1e-12

    def test_diagonal_phases(self):
        theta = np.array([-2.0, -0.3, 0.0, 1.1, 3.0])
        u = np.diag(np.exp(1j * theta))
        h = unitary_log(u).entries
        assert np.allclose(np.sort(np.diagonal(h).real), np.sort(theta), atol=1e-12)

    def test_exponential_round_trip(self, rng):
        for _ in range(8):
            u = random_unitary(rng, 5)
            margin = np.pi - np.max(np.abs(np.angle(np.linalg.eigvals(u))))
            if margin < 1e-3:
                continue
            h = unitary_log(u).entries
            assert op_norm(expm_i(h) - u) <= 1e-9
            assert op_norm(scipy.linalg.expm(1j * h) - u) <= 1e-9
            assert op_norm(h) <= np.pi + 1e-12

    def test_branch_cut(self):
        with pytest.raises(BranchCut):
            unitary_log(np.diag([-1.0 + 0.0j, 1.0]))

    def test_conjugate_pair_phases(self):
        # equal real parts force the two-stage eigenbasis split
        u = np.diag(np.exp(1j * np.array([0.7, -0.7, 0.1])))
        v = np.array([[1, 1, 0], [1, -1, 0], [0, 0, np.sqrt(2)]]) / np.sqrt(2)
        w = v @ u @ v.conj().T
        h = unitary_log(w).entries
        assert op_norm(expm_i(h) - w) <= 1e-9


class TestTypes:
    def test_hermitian_validation(self):
        with pytest.raises(NonHermitianInput):
            HermitianMatrix(np.array([[0.0, 1e-10], [0.0, 0.0]]))
        m = HermitianMatrix(np.diag([1.0, 2.0]))
        assert m.dim == 2

    def test_unitary_validation(self, rng):
        with pytest.raises(SingularInput):
            UnitaryMatrix(1.5 * np.eye(3))
        UnitaryMatrix(random_unitary(rng, 3))

    def test_spectrum_requires_sorted(self, rng):
        vec = UnitaryMatrix(np.eye(2))
        with pytest.raises(ValueError):
            Spectrum(np.array([1.0, 0.0]), vec)

    def test_json_round_trip(self, rng):
        h = random_hermitian(rng, 3)
        obj = matrix_to_json(h)
        assert obj["dim"] == 3
        assert np.array_equal(matrix_from_json(obj), h)
