import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from orbitdist.errors import MassMismatch, NotAContraction
from orbitdist.linalg import numerical_rank
from orbitdist.measures import (AtomicMeasure, TraceSpec, dimension_function,
                                lp_distance, lp_one_sided,
                                lp_one_sided_subsets, measure_from_spectrum)
from conftest import random_positive_contraction, random_unitary

M = AtomicMeasure.from_pairs


def random_measure(rng, max_atoms=6, weights="integer"):
    count = int(rng.integers(1, max_atoms + 1))
    locs = rng.uniform(0.02, 1.0, count)
    if weights == "integer":
        ws = rng.integers(1, 4, count).astype(float)
    else:
        ws = rng.uniform(0.25, 2.0, count)
    return M(zip(locs, ws))


class TestAtomicMeasure:
    def test_merges_equal_locations(self):
        m = M([(0.5, 1.0), (0.5, 2.0), (0.2, 1.0)])
        assert m.atoms == ((0.2, 1.0), (0.5, 3.0))
        assert m.mass == 4.0

    def test_rejects_bad_atoms(self):
        with pytest.raises(ValueError):
            M([(0.0, 1.0)])
        with pytest.raises(ValueError):
            M([(1.5, 1.0)])
        with pytest.raises(ValueError):
            M([(0.5, 0.0)])

    def test_json_round_trip(self, rng):
        m = random_measure(rng)
        assert AtomicMeasure.from_json(m.to_json()) == m


class TestMeasureFromSpectrum:
    def test_zero_matrix(self):
        assert measure_from_spectrum(np.zeros((3, 3))).atoms == ()

    def test_diagonal_multiplicity(self):
        m = measure_from_spectrum(np.diag([0.5, 0.5, 0.0]).astype(complex))
        assert m.atoms == ((0.5, 2.0),)

    def test_normalization(self):
        m = measure_from_spectrum(np.diag([0.5, 0.5, 0.0]).astype(complex),
                                  TraceSpec(normalization=0.25))
        assert m.atoms == ((0.5, 0.5),)

    def test_mass_equals_rank(self, rng):
        for _ in range(10):
            a = random_positive_contraction(rng, 5, full_rank=bool(rng.integers(0, 2)))
            assert measure_from_spectrum(a).mass == numerical_rank(a)

    def test_rejects_non_contraction(self):
        with pytest.raises(NotAContraction):
            measure_from_spectrum(np.diag([1.2, 0.1]).astype(complex))


class TestDimensionFunction:
    def test_projection(self, rng):
        u = random_unitary(rng, 5)
        p = (u[:, :3] @ u[:, :3].conj().T)
        assert dimension_function(p) == 3.0

    def test_zero(self):
        assert dimension_function(np.zeros((4, 4))) == 0.0

    def test_power_extrapolation_oracle(self, rng):
        # Richardson-extrapolated Tr(a^(1/2^m)), m = 20, on the support;
        # eigenvalues computed independently of the production eigensolver
        for _ in range(5):
            dim = 6
            lam = np.concatenate([np.zeros(2), rng.uniform(1e-3, 1.0, dim - 2)])
            u = random_unitary(rng, dim)
            a = (u * lam) @ u.conj().T
            ref = np.linalg.eigvalsh((a + a.conj().T) / 2)
            ref = ref[ref > 1e-12]
            t_m = float(np.sum(ref ** (2.0 ** -20)))
            t_m1 = float(np.sum(ref ** (2.0 ** -19)))
            extrapolated = 2.0 * t_m - t_m1
            assert abs(dimension_function(a) - extrapolated) <= 1e-6


class TestOneSided:
    def test_equal_measures_any_radius(self, rng):
        m = random_measure(rng)
        for r in (0.0, 0.1, 1.0):
            assert lp_one_sided(m, m, r)

    def test_single_atom_threshold(self):
        mu, nu = M([(0.2, 1.0)]), M([(0.5, 1.0)])
        assert not lp_one_sided(mu, nu, 0.2)
        assert lp_one_sided(mu, nu, 0.31)

    def test_two_atom_example(self):
        mu = M([(0.1, 1.0), (0.9, 1.0)])
        nu = M([(0.2, 1.0), (0.8, 1.0)])
        assert lp_one_sided(mu, nu, 0.11)

    def test_flow_equals_subset_oracle(self, rng):
        for _ in range(60):
            mu = random_measure(rng, weights="real")
            nu = random_measure(rng, weights="real")
            r = float(rng.uniform(0.0, 0.7))
            assert lp_one_sided(mu, nu, r) == lp_one_sided_subsets(mu, nu, r)

    @settings(max_examples=60, deadline=None)
    @given(st.data())
    def test_monotone_in_radius(self, data):
        locs = data.draw(st.lists(st.floats(0.01, 1.0), min_size=1, max_size=5))
        locs2 = data.draw(st.lists(st.floats(0.01, 1.0), min_size=1, max_size=5))
        r = data.draw(st.floats(0.0, 0.8))
        bump = data.draw(st.floats(0.0, 0.5))
        mu = M((x, 1.0) for x in locs)
        nu = M((x, 1.0) for x in locs2)
        if lp_one_sided(mu, nu, r):
            assert lp_one_sided(mu, nu, r + bump)


class TestLpDistance:
    def test_identical(self, rng):
        m = random_measure(rng)
        assert lp_distance(m, m) == 0.0

    def test_point_masses(self):
        assert lp_distance(M([(0.3, 2.0)]), M([(0.6, 2.0)])) == pytest.approx(0.3, abs=1e-12)

    def test_two_atom_example(self):
        mu = M([(0.1, 1.0), (0.9, 1.0)])
        nu = M([(0.2, 1.0), (0.8, 1.0)])
        assert lp_distance(mu, nu) == pytest.approx(0.1, abs=1e-12)

    def test_mass_mismatch(self):
        with pytest.raises(MassMismatch):
            lp_distance(M([(0.5, 1.0)]), M([(0.5, 2.0)]))

    def test_symmetry_and_triangle(self, rng):
        for _ in range(25):
            count = int(rng.integers(1, 6))
            mk = lambda: M((x, 1.0) for x in rng.uniform(0.02, 1.0, count))
            mu, nu, rho = mk(), mk(), mk()
            assert lp_distance(mu, nu) == lp_distance(nu, mu)
            assert (lp_distance(mu, rho)
                    <= lp_distance(mu, nu) + lp_distance(nu, rho) + 1e-12)

    def test_identity_pairing_bound(self, rng):
        for _ in range(20):
            count = int(rng.integers(1, 7))
            xs = np.sort(rng.uniform(0.02, 1.0, count))
            ys = np.sort(rng.uniform(0.02, 1.0, count))
            mu = M((x, 1.0) for x in xs)
            nu = M((y, 1.0) for y in ys)
            assert lp_distance(mu, nu) <= float(np.max(np.abs(xs - ys))) + 1e-12

    def test_brute_force_candidate_scan(self, rng):
        # independent route: smallest pairwise-distance candidate accepted by
        # the subset oracle on both sides
        for _ in range(15):
            count = int(rng.integers(1, 5))
            mu = M((x, 1.0) for x in rng.uniform(0.02, 1.0, count))
            nu = M((y, 1.0) for y in rng.uniform(0.02, 1.0, count))
            cands = sorted({0.0, *(abs(x - y) for x, _ in mu.atoms
                                   for y, _ in nu.atoms)})
            expected = next(c for c in cands
                            if lp_one_sided_subsets(mu, nu, c + 2e-12)
                            and lp_one_sided_subsets(nu, mu, c + 2e-12))
            assert lp_distance(mu, nu) == expected


class TestTraceSpec:
    def test_point_evaluation_validation(self):
        TraceSpec("point-evaluation", x=0.5)
        with pytest.raises(ValueError):
            TraceSpec("point-evaluation", x=1.5)
        with pytest.raises(ValueError):
            TraceSpec("weird")
        with pytest.raises(ValueError):
            TraceSpec(normalization=0.0)
