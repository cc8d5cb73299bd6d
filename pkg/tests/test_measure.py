import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcompat import (
    DimensionMismatchError,
    InfeasibleError,
    MeasureConfig,
    example_measure,
    fidelity,
    haar_unitary,
    is_compatible,
    measure_symmetric,
    pure_state,
    random_density,
    strength,
    validate_density,
)
from qcompat.states import child_rng

seeds = st.integers(min_value=0, max_value=2**31 - 1)

FAST = MeasureConfig(restarts=4, seed=0)


def _intersecting(d, seed):
    rng = child_rng(seed, 50)
    u = haar_unitary(d, rng)
    c = np.outer(u[:, 0], u[:, 0].conj())
    ra = random_density(d, d - 1, seed=rng)
    rb = random_density(d, d - 1, seed=rng)
    a = validate_density(0.4 * c + 0.6 * ra.matrix)
    b = validate_density(0.4 * c + 0.6 * rb.matrix)
    return a, b


class TestCompatibility:
    def test_orthogonal_pures_incompatible(self):
        a = validate_density(np.diag([1.0, 0.0]).astype(complex))
        b = validate_density(np.diag([0.0, 1.0]).astype(complex))
        assert not is_compatible(a, b)

    def test_full_rank_compatible_with_anything(self):
        a = validate_density(np.eye(3, dtype=complex) / 3)
        b = random_density(3, 1, seed=1)
        assert is_compatible(a, b)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            is_compatible(random_density(2, 1, seed=0), random_density(3, 1, seed=0))

    @given(seed=seeds, anti=st.booleans())
    @settings(max_examples=20, deadline=None)
    def test_symmetry_invariance(self, seed, anti):
        from qcompat import apply_symmetry, random_symmetry

        rng = child_rng(seed, 51)
        d = int(rng.integers(2, 5))
        a = random_density(d, int(rng.integers(1, d + 1)), seed=rng)
        b = random_density(d, int(rng.integers(1, d + 1)), seed=rng)
        s = random_symmetry(d, antiunitary=anti, seed=rng)
        assert is_compatible(a, b) == is_compatible(apply_symmetry(s, a), apply_symmetry(s, b))


class TestExampleMeasure:
    def test_identical_states_give_one(self):
        a = random_density(3, 2, seed=5)
        res = example_measure(a, a, FAST)
        assert abs(res.value - 1.0) <= 1e-9
        assert res.residual <= 1e-9

    def test_disjoint_supports_give_zero(self):
        u = haar_unitary(4, seed=2)
        a = validate_density(np.outer(u[:, 0], u[:, 0].conj()))
        b = validate_density(np.outer(u[:, 1], u[:, 1].conj()))
        res = example_measure(a, b, FAST)
        assert res.value == 0.0
        assert res.decomposition_a is None
        assert res.decomposition_b is None
        assert res.restarts_used == 0

    def test_certificate_reconstructs_inputs(self):
        a, b = _intersecting(3, seed=7)
        res = example_measure(a, b, FAST)
        assert res.value > 0.0
        np.testing.assert_allclose(res.decomposition_a.reconstruction(), a.matrix, atol=1e-9)
        np.testing.assert_allclose(res.decomposition_b.reconstruction(), b.matrix, atol=1e-9)
        assert res.residual <= 1e-10
        assert np.all(res.decomposition_a.weights >= 0.0)
        assert np.all(res.decomposition_b.weights >= 0.0)

    def test_commuting_states_reach_spectral_overlap(self):
        wa = np.array([0.7, 0.3, 0.0])
        wb = np.array([0.2, 0.5, 0.3])
        u = haar_unitary(3, seed=4)
        a = validate_density((u * wa) @ u.conj().T)
        b = validate_density((u * wb) @ u.conj().T)
        res = example_measure(a, b, FAST)
        lower = float(np.sqrt(wa * wb).sum())
        assert res.value >= lower - 1e-9

    def test_value_squared_tracks_strength_of_supported_ray(self):
        a = random_density(3, 2, seed=13)
        rng = child_rng(13, 52)
        coef = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        v = a.eigenvectors[:, :2] @ coef
        v /= np.linalg.norm(v)
        p = validate_density(np.outer(v, v.conj()))
        s = strength(a, pure_state(v)).value
        res = example_measure(a, p, MeasureConfig(restarts=8, seed=3))
        assert s - 2e-3 <= res.value**2 <= s + 1e-9

    def test_infeasible_when_tolerance_is_zero(self):
        a, b = _intersecting(3, seed=9)
        with pytest.raises(InfeasibleError):
            example_measure(a, b, MeasureConfig(restarts=2, seed=0, feas_tol=0.0))

    def test_config_validation(self):
        a = random_density(3, 3, seed=1)
        with pytest.raises(ValueError):
            example_measure(a, a, MeasureConfig(components=2))
        with pytest.raises(ValueError):
            example_measure(a, a, MeasureConfig(restarts=0))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionMismatchError):
            example_measure(random_density(2, 1, seed=0), random_density(3, 1, seed=0))

    def test_deterministic_given_seed(self):
        a, b = _intersecting(3, seed=21)
        r1 = example_measure(a, b, FAST)
        r2 = example_measure(a, b, FAST)
        assert r1.value == r2.value
        np.testing.assert_array_equal(r1.decomposition_a.weights, r2.decomposition_a.weights)

    @given(seed=st.integers(0, 200))
    @settings(max_examples=12, deadline=None)
    def test_value_in_unit_interval(self, seed):
        rng = child_rng(seed, 53)
        d = int(rng.integers(2, 4))
        a = random_density(d, int(rng.integers(1, d + 1)), seed=rng)
        b = random_density(d, int(rng.integers(1, d + 1)), seed=rng)
        if not is_compatible(a, b):
            return
        res = example_measure(a, b, MeasureConfig(restarts=3, seed=seed))
        assert 0.0 <= res.value <= 1.0
        assert res.residual <= MeasureConfig().feas_tol


class TestMeasureSymmetric:
    def test_exact_argument_symmetry(self):
        a, b = _intersecting(3, seed=17)
        cfg = MeasureConfig(restarts=5, seed=2)
        r1 = measure_symmetric(a, b, cfg)
        r2 = measure_symmetric(b, a, cfg)
        assert r1.value == r2.value
        np.testing.assert_array_equal(r1.decomposition_a.weights, r2.decomposition_b.weights)
        np.testing.assert_array_equal(r1.decomposition_b.weights, r2.decomposition_a.weights)

    def test_at_least_as_good_as_one_sided(self):
        a, b = _intersecting(2, seed=23)
        cfg = MeasureConfig(restarts=3, seed=1)
        assert measure_symmetric(a, b, cfg).value >= example_measure(a, b, cfg).value - 1e-15


class TestFidelity:
    def test_identical_states(self):
        a = random_density(3, 3, seed=2)
        assert abs(fidelity(a, a) - 1.0) < 1e-10

    def test_orthogonal_pures(self):
        a = validate_density(np.diag([1.0, 0.0]).astype(complex))
        b = validate_density(np.diag([0.0, 1.0]).astype(complex))
        assert fidelity(a, b) < 1e-10

    def test_pure_overlap(self):
        v = np.array([1.0, 0.0], dtype=complex)
        w = np.array([1.0, 1.0], dtype=complex) / np.sqrt(2)
        a = validate_density(np.outer(v, v.conj()))
        b = validate_density(np.outer(w, w.conj()))
        assert abs(fidelity(a, b) - np.sqrt(0.5)) < 1e-12
