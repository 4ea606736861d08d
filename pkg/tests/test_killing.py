import json
import math
from itertools import combinations_with_replacement

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_chain
from todalift import eisenhart, killing, oplift, toda
from todalift.errors import DomainError, NotHomogeneousError


def monomial_polynomial(rng, rank, dim):
    """Random homogeneous polynomial with known tensor components.

    Builds f(p) = sum_alpha c_alpha p^alpha directly from monomials; the
    matching symmetric tensor has K^idx = c_idx * prod(m_j!) over the repeat
    counts m_j of the sorted index.
    """
    coeffs = {}
    for idx in combinations_with_replacement(range(1, dim + 1), rank):
        coeffs[idx] = float(rng.uniform(-2.0, 2.0))

    def poly(pos, mom):
        total = 0.0
        for idx, c in coeffs.items():
            term = c
            for mu in idx:
                term *= mom[mu - 1]
            total += term
        return total

    expected = {}
    for idx, c in coeffs.items():
        counts = {}
        for mu in idx:
            counts[mu] = counts.get(mu, 0) + 1
        mult = 1.0
        for m in counts.values():
            mult *= math.factorial(m)
        expected[idx] = c * mult
    return poly, expected


class TestExtraction:
    @settings(max_examples=25, deadline=None)
    @given(
        st.integers(min_value=1, max_value=4),
        st.integers(min_value=1, max_value=7),
        st.integers(min_value=0, max_value=2**32 - 1),
    )
    def test_polarization_recovers_known_coefficients(self, rank, dim, seed):
        rng = np.random.default_rng(seed)
        poly, expected = monomial_polynomial(rng, rank, dim)
        table = killing.extract_tensor(poly, rank, dim, np.zeros(dim))
        for idx, val in expected.items():
            assert abs(table[idx] - val) < 1e-11 * max(1.0, abs(val))

    def test_rank_one_from_total_momentum(self, rng):
        sys, st_ = random_chain(rng, 3)

        def inv(pos, mom):
            s = eisenhart.EisenhartState(q=pos[:3], y=pos[3], p=mom[:3], p_y=mom[3])
            return float(eisenhart.lifted_invariants(sys, s, 1)[0])

        table = killing.extract_tensor(inv, 1, 4, np.concatenate([st_.q, [0.0]]))
        assert np.allclose([table[(i,)] for i in range(1, 5)], [1, 1, 1, 0], atol=1e-12)

    def test_rank_two_is_inverse_metric_eisenhart(self, rng):
        sys, st_ = random_chain(rng, 3)
        field = killing.tensor_from_invariant(
            lambda pos, mom: float(
                eisenhart.lifted_invariants(
                    sys,
                    eisenhart.EisenhartState(q=pos[:3], y=pos[3], p=mom[:3], p_y=mom[3]),
                    2,
                )[1]
            ),
            2,
            4,
        )
        for _ in range(3):
            q = rng.uniform(-1, 1, 3)
            pos = np.concatenate([q, rng.uniform(-1, 1, 1)])
            minv = eisenhart.metric_eisenhart_inverse(sys, q)
            for i in range(1, 5):
                for j in range(i, 5):
                    assert abs(field.component((i, j), pos) - minv[i - 1, j - 1]) < 1e-10

    def test_rank_two_is_inverse_metric_generalized(self, rng):
        sys, st_ = random_chain(rng, 3)

        def inv(pos, mom):
            s = oplift.OPState(q=pos[:3], omega=pos[3:], p_q=mom[:3], p_omega=mom[3:], centered=False)
            return float(oplift.generalized_invariants(s, 2)[1])

        pos = np.concatenate([st_.q, rng.uniform(-1, 1, 2)])
        table = killing.extract_tensor(inv, 2, 5, pos)
        minv = oplift.metric_generalized_inverse(st_.q)
        for i in range(1, 6):
            for j in range(i, 6):
                assert abs(table[(i, j)] - minv[i - 1, j - 1]) < 1e-10

    def test_permuted_queries_match(self, rng):
        poly, _ = monomial_polynomial(rng, 3, 4)
        field = killing.tensor_from_invariant(poly, 3, 4)
        pos = np.zeros(4)
        assert field.component((3, 1, 2), pos) == field.component((1, 2, 3), pos)
        assert field.component((2, 3, 1), pos) == field.component((1, 2, 3), pos)

    def test_contraction_identity(self, rng):
        sys, _ = random_chain(rng, 3)

        def inv(pos, mom):
            s = eisenhart.EisenhartState(q=pos[:3], y=pos[3], p=mom[:3], p_y=mom[3])
            return float(eisenhart.lifted_invariants(sys, s, 3)[2])

        field = killing.tensor_from_invariant(inv, 3, 4)
        for _ in range(100):
            pos = rng.uniform(-1, 1, 4)
            mom = rng.uniform(-1, 1, 4)
            want = inv(pos, mom)
            assert abs(field.contract(pos, mom) - want) < 1e-10 * max(1.0, abs(want))

    def test_non_homogeneous_rejected(self):
        with pytest.raises(NotHomogeneousError):
            killing.extract_tensor(lambda pos, mom: float(np.sum(mom) + 1.0), 1, 3, np.zeros(3))

    def test_bad_rank(self):
        with pytest.raises(DomainError):
            killing.extract_tensor(lambda pos, mom: 0.0, 0, 3, np.zeros(3))


class TestPoissonBracket:
    def test_self_bracket_vanishes(self, rng):
        sys, _ = random_chain(rng, 3)

        def ham(pos, mom):
            s = eisenhart.EisenhartState(q=pos[:3], y=pos[3], p=mom[:3], p_y=mom[3])
            return eisenhart.hamiltonian_eisenhart(sys, s)

        val = killing.poisson_bracket_fd(ham, ham, rng.uniform(-1, 1, 4), rng.uniform(-1, 1, 4))
        assert abs(val) < 1e-12

    def test_coordinate_momentum_pair(self, rng):
        def coord(pos, mom):
            return pos[1]

        def free(pos, mom):
            return 0.5 * float(np.dot(mom, mom))

        pos, mom = rng.uniform(-1, 1, 3), rng.uniform(-1, 1, 3)
        assert abs(killing.poisson_bracket_fd(coord, free, pos, mom) - mom[1]) < 1e-8

    def test_invariant_commutes_with_energy(self, rng):
        sys, _ = random_chain(rng, 3)

        def inv(pos, mom):
            s = eisenhart.EisenhartState(q=pos[:3], y=pos[3], p=mom[:3], p_y=mom[3])
            return float(eisenhart.lifted_invariants(sys, s, 2)[1])

        def ham(pos, mom):
            s = eisenhart.EisenhartState(q=pos[:3], y=pos[3], p=mom[:3], p_y=mom[3])
            return eisenhart.hamiltonian_eisenhart(sys, s)

        for _ in range(100):
            pos, mom = rng.uniform(-1, 1, 4), rng.uniform(-1, 1, 4)
            scale = max(1.0, abs(inv(pos, mom)) * abs(ham(pos, mom)))
            assert abs(killing.poisson_bracket_fd(inv, ham, pos, mom)) / scale < 1e-5

    def test_non_finite_samples_rejected(self):
        def bad(pos, mom):
            return float("nan")

        with pytest.raises(DomainError):
            killing.poisson_bracket_fd(bad, bad, np.zeros(2), np.zeros(2))


class TestVerifyKilling:
    @pytest.mark.parametrize("lift", ["eisenhart", "generalized"])
    def test_small_chain_passes(self, lift):
        sys = toda.TodaSystem(3, [0.8, 1.1])
        for k in range(1, 4):
            report = killing.verify_killing(sys, lift, k, samples=30, seed=5, geodesics=3, t_final=10.0)
            assert report.passed, (lift, k, report)

    def test_rank_out_of_range(self):
        sys = toda.TodaSystem(3, [1.0, 1.0])
        with pytest.raises(DomainError):
            killing.verify_killing(sys, "eisenhart", 4)

    def test_unknown_lift(self):
        sys = toda.TodaSystem(2, [1.0])
        with pytest.raises(DomainError):
            killing.verify_killing(sys, "both", 1)

    def test_report_serialises(self):
        sys = toda.TodaSystem(2, [1.0])
        report = killing.verify_killing(sys, "eisenhart", 1, samples=5, geodesics=1, t_final=2.0)
        doc = json.loads(report.to_json())
        assert set(doc) == {"lift", "k", "bracket_max", "drift_max", "pass"}


class TestIsometryFlow:
    def state(self, rng, n=4):
        q = rng.uniform(-1, 1, n)
        q -= q.mean()
        return oplift.OPState(
            q=q,
            omega=rng.uniform(-1, 1, n - 1),
            p_q=rng.uniform(-1, 1, n),
            p_omega=rng.uniform(0.3, 1.5, n - 1),
        )

    def test_zero_parameter_is_identity(self, rng):
        s = self.state(rng)
        for kind, idx in (("omega-translation", 2), ("lambda", 3)):
            out = killing.isometry_flow(kind, idx, s, 0.0)
            assert np.array_equal(out.q, s.q)
            assert np.array_equal(out.omega, s.omega)
            assert np.array_equal(out.p_omega, s.p_omega)

    def test_omega_translation_preserves_energy_exactly(self, rng):
        sys = toda.TodaSystem(4, [1.0, 1.0, 1.0])
        s = self.state(rng)
        before = oplift.generalized_hamiltonian(sys, s)
        out = killing.isometry_flow("omega-translation", 1, s, 2.7)
        assert oplift.generalized_hamiltonian(sys, out) == before
        assert out.omega[0] == s.omega[0] + 2.7

    @pytest.mark.parametrize("index", [1, 2, 4])
    def test_lambda_flow_preserves_energy(self, rng, index):
        sys = toda.TodaSystem(4, [1.0, 1.0, 1.0])
        s = self.state(rng)
        before = oplift.generalized_hamiltonian(sys, s)
        out = killing.isometry_flow("lambda", index, s, 1.5)
        after = oplift.generalized_hamiltonian(sys, out)
        assert abs(after - before) < 1e-13 * max(1.0, abs(before))
        assert out.centered is False

    def test_invalid_generator(self, rng):
        s = self.state(rng)
        with pytest.raises(DomainError):
            killing.isometry_flow("boost", 1, s, 0.5)
        with pytest.raises(DomainError):
            killing.isometry_flow("omega-translation", 4, s, 0.5)
        with pytest.raises(DomainError):
            killing.isometry_flow("lambda", 5, s, 0.5)
