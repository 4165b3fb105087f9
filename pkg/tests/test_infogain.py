import numpy as np
import pytest

from weakrev import infogain as IG
from weakrev import measurement as M
from weakrev import qlin
from weakrev.errors import DegenerateOperatorError, DimensionError, DomainError
from weakrev.qlin import RandomSource


class TestOptimalGuess:
    def test_projector(self):
        np.testing.assert_allclose(IG.optimal_guess(M.example_von_neumann(2), 0), [1, 0])

    def test_weak_operator(self):
        mset = M.example_weak_eta(0.36)
        np.testing.assert_allclose(IG.optimal_guess(mset, 1), [1, 0])

    def test_scaled_identity(self):
        mset = M.saturating_measurement_set(3, 0.0)
        np.testing.assert_allclose(IG.optimal_guess(mset, 2), [1, 0, 0])

    def test_zero_operator(self):
        mset = M.new_measurement_set(2, [np.zeros((2, 2)), np.eye(2)])
        with pytest.raises(DegenerateOperatorError):
            IG.optimal_guess(mset, 0)
        # optimal strategy still exists; zero outcome is never observed
        assert len(IG.GuessStrategy.optimal(mset)) == 2


class TestClosedForm:
    def test_von_neumann(self):
        assert IG.information_gain(M.example_von_neumann(2)) == pytest.approx(2 / 3, abs=1e-15)

    @pytest.mark.parametrize("d", [1, 2, 3, 5])
    def test_unitary(self, d):
        assert IG.information_gain(M.identity_set(d)) == pytest.approx(1 / d, abs=1e-15)

    def test_weak(self):
        assert IG.information_gain(M.example_weak_eta(0.36)) == pytest.approx(0.56, abs=1e-12)

    def test_range(self):
        src = RandomSource(40)
        for d in range(2, 6):
            for _ in range(1000):
                n = int(src.generator.integers(1, 6))
                g = IG.information_gain(M.random_measurement_set(d, n, src))
                assert 1 / d - 1e-12 <= g <= 2 / (d + 1) + 1e-12

    def test_basis_invariance(self, rng):
        mset = M.random_measurement_set(3, 4, rng)
        w, v = qlin.haar_unitary(3, rng), qlin.haar_unitary(3, rng)
        rotated = M.new_measurement_set(3, [w @ a @ v for a in mset.matrices])
        assert abs(IG.information_gain(mset) - IG.information_gain(rotated)) < 1e-12

    def test_twirl_route_matches(self, rng):
        for d in (2, 3, 4):
            mset = M.random_measurement_set(d, 3, rng)
            strategy = IG.GuessStrategy.optimal(mset)
            assert IG.estimation_fidelity_twirl(mset, strategy) == pytest.approx(
                IG.information_gain(mset), abs=1e-12
            )


class TestMonteCarlo:
    def test_von_neumann(self):
        mset = M.example_von_neumann(2)
        est = IG.estimation_fidelity_mc(mset, IG.GuessStrategy.optimal(mset), 200_000, RandomSource(1))
        assert est.agrees_with(2 / 3)

    def test_constant_guess(self, rng):
        # sum_r p(r,psi) |<0|psi>|^2 = |<0|psi>|^2, whose Haar mean is 1/d
        for d in (2, 3):
            mset = M.random_measurement_set(d, 3, rng)
            strategy = IG.GuessStrategy.constant(mset, qlin.basis_state(d, 0))
            est = IG.estimation_fidelity_mc(mset, strategy, 100_000, rng)
            assert est.agrees_with(1 / d)

    def test_random_qubit_set(self, rng):
        for _ in range(10):
            mset = M.random_measurement_set(2, 3, rng)
            est = IG.estimation_fidelity_mc(mset, IG.GuessStrategy.optimal(mset), 100_000, rng)
            assert est.agrees_with(IG.information_gain(mset))

    def test_optimality(self):
        src = RandomSource(17)
        for _ in range(200):
            mset = M.random_measurement_set(2, int(src.generator.integers(2, 5)), src)
            key = src.fork()
            best = IG.estimation_fidelity_mc(mset, IG.GuessStrategy.optimal(mset), 2000, RandomSource(key))
            for _ in range(20):
                guesses = tuple(qlin.random_pure_state(2, src) for _ in range(mset.n_outcomes))
                other = IG.estimation_fidelity_mc(
                    mset, IG.GuessStrategy(guesses), 2000, RandomSource(key)
                )
                assert best.mean >= other.mean - 4 * np.hypot(best.std_error, other.std_error)
                # exact comparison via the twirl route
                assert IG.estimation_fidelity_twirl(mset, IG.GuessStrategy(guesses)) <= (
                    IG.information_gain(mset) + 1e-12
                )

    def test_seed_determinism(self):
        mset = M.example_weak_eta(0.4)
        s = IG.GuessStrategy.optimal(mset)
        a = IG.estimation_fidelity_mc(mset, s, 50_000, RandomSource(3))
        b = IG.estimation_fidelity_mc(mset, s, 50_000, RandomSource(3))
        assert a == b

    def test_small_run(self):
        mset = M.example_weak_eta(0.4)
        est = IG.estimation_fidelity_mc(mset, IG.GuessStrategy.optimal(mset), 1000, RandomSource(3))
        assert est.samples == 1000 and est.std_error > 0

    def test_sample_floor(self, rng):
        mset = M.example_von_neumann(2)
        with pytest.raises(DomainError):
            IG.estimation_fidelity_mc(mset, IG.GuessStrategy.optimal(mset), 50, rng)

    def test_strategy_length_checked(self, rng):
        mset = M.example_von_neumann(2)
        with pytest.raises(DimensionError):
            IG.estimation_fidelity_mc(mset, IG.GuessStrategy(([1, 0],)), 1000, rng)


class TestSwap:
    def test_qubit_matrix(self):
        s = IG.swap_operator(2)
        expected = np.eye(4)[[0, 2, 1, 3]]
        np.testing.assert_array_equal(s, expected)

    @pytest.mark.parametrize("d", [1, 2, 3, 4])
    def test_involution_and_trace(self, d):
        s = IG.swap_operator(d)
        np.testing.assert_array_equal(s @ s, np.eye(d * d))
        assert np.trace(s) == d

    def test_action(self, rng):
        a, b = qlin.random_pure_state(3, rng), qlin.random_pure_state(3, rng)
        np.testing.assert_allclose(IG.swap_operator(3) @ np.kron(a, b), np.kron(b, a), atol=1e-15)


class TestTwirl:
    def test_identity_coefficients(self):
        c = IG.twirl_exact(np.eye(4), 2)
        assert (c.alpha1, c.alpha2) == pytest.approx((1, 0), abs=1e-15)

    def test_swap_coefficients(self):
        c = IG.twirl_exact(IG.swap_operator(3), 3)
        assert (c.alpha1, c.alpha2) == pytest.approx((0, 1), abs=1e-15)

    def test_projector_coefficients(self):
        o = np.zeros((4, 4))
        o[0, 0] = 1
        c = IG.twirl_exact(o, 2)
        # tr(O) = tr(OS) = 1 -> (4 - 2) / 12 for both
        assert c.alpha1 == pytest.approx(1 / 6, abs=1e-15)
        assert c.alpha2 == pytest.approx(1 / 6, abs=1e-15)

    def test_dimension_checks(self):
        with pytest.raises(DimensionError):
            IG.twirl_exact(np.eye(3), 2)
        with pytest.raises(DomainError):
            IG.twirl_exact(np.diag([1j, 0, 0, 0]), 2)

    @pytest.mark.parametrize("d", [2, 3])
    def test_invariant_operators(self, d, rng):
        for op in (np.eye(d * d), IG.swap_operator(d)):
            out = IG.twirl_mc(op, d, 1000, rng)
            assert np.linalg.norm(out - op) < 1e-12

    def test_random_hermitian(self):
        src = RandomSource(5)
        o = qlin.random_hermitian(4, src)
        mean, err = IG.twirl_mc_with_error(o, 2, 200_000, src)
        dist = np.linalg.norm(mean - IG.twirl_exact(o, 2).operator(2))
        assert dist < 5 * err

    def test_exact_is_fixed_point(self, rng):
        # twirling alpha1*1 + alpha2*S returns it; exact route is a projection
        o = qlin.random_hermitian(9, rng)
        c = IG.twirl_exact(o, 3)
        c2 = IG.twirl_exact(c.operator(3), 3)
        assert (c2.alpha1, c2.alpha2) == pytest.approx((c.alpha1, c.alpha2), abs=1e-12)

    def test_convergence_rate(self):
        src = RandomSource(6)
        o = qlin.random_hermitian(4, src)
        target = IG.twirl_exact(o, 2).operator(2)
        ns = np.array([10**3, 10**4, 10**5, 10**6])
        errs = np.array([np.linalg.norm(IG.twirl_mc(o, 2, int(n), src) - target) for n in ns])
        slope = np.polyfit(np.log(ns), np.log(errs), 1)[0]
        assert -0.75 < slope < -0.25
        assert errs[-1] < errs[0]
