import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcompat import (
    InvalidWeightsError,
    effects_equal_by_strength,
    haar_unitary,
    pure_state,
    random_density,
    random_pure,
    strength,
    strength_oracle,
    two_state_formula,
    validate_density,
    validate_effect,
)
from qcompat.states import child_rng

seeds = st.integers(min_value=0, max_value=2**32 - 1)


class TestStrengthClosedForm:
    def test_maximally_mixed_gives_inverse_dim(self):
        eff = validate_effect(np.eye(4, dtype=complex) / 4)
        for s in range(5):
            assert abs(strength(eff, random_pure(4, seed=s)).value - 0.25) < 1e-12

    def test_own_projection_gives_one(self):
        p = random_pure(3, seed=2)
        eff = validate_effect(p.projection)
        r = strength(eff, p)
        assert r.in_range
        assert abs(r.value - 1.0) < 1e-12

    def test_identity_gives_one(self):
        eff = validate_effect(np.eye(5, dtype=complex))
        assert strength(eff, random_pure(5, seed=1)).value == 1.0

    def test_out_of_range_gives_zero(self):
        eff = validate_effect(np.diag([1.0, 0.0]).astype(complex))
        phi = pure_state(np.array([0.0, 1.0], dtype=complex))
        r = strength(eff, phi)
        assert r.value == 0.0
        assert not r.in_range

    def test_near_boundary_flagged(self):
        # ray leaning almost entirely into the support
        eps = 1e-3
        v = np.array([np.sqrt(1 - eps**2), eps], dtype=complex)
        eff = validate_effect(np.diag([1.0, 0.0]).astype(complex))
        r = strength(eff, pure_state(v))
        assert r.value == 0.0
        assert not r.in_range
        assert r.near_boundary

    def test_plain_miss_not_flagged(self):
        eff = validate_effect(np.diag([1.0, 0.0]).astype(complex))
        r = strength(eff, pure_state(np.array([0.6, 0.8], dtype=complex)))
        assert not r.near_boundary

    def test_diagonal_weighted(self):
        eff = validate_effect(np.diag([1.0, 0.5]).astype(complex))
        phi = pure_state(np.array([1.0, 1.0], dtype=complex) / np.sqrt(2))
        # 1 / (0.5/1 + 0.5/0.5) = 2/3
        assert abs(strength(eff, phi).value - 2 / 3) < 1e-12

    @given(seed=seeds, dim=st.integers(2, 6))
    @settings(max_examples=40, deadline=None)
    def test_matches_oracle(self, seed, dim):
        rng = child_rng(seed, 99)
        rank = int(rng.integers(1, dim + 1))
        u = haar_unitary(dim, rng)
        t = np.zeros(dim)
        t[:rank] = rng.uniform(0.05, 1.0, size=rank)
        eff = validate_effect((u * t) @ u.conj().T)
        phi = random_pure(dim, seed=rng)
        assert abs(strength(eff, phi).value - strength_oracle(eff, phi)) <= 1e-7

    @given(seed=seeds)
    @settings(max_examples=25, deadline=None)
    def test_value_bounded(self, seed):
        eff = validate_effect(random_density(4, 3, seed=seed).matrix)
        v = strength(eff, random_pure(4, seed=seed)).value
        assert 0.0 <= v <= 1.0

    def test_eigenvector_rays_are_extremal(self):
        # along an eigenvector the strength equals that eigenvalue exactly
        d = random_density(4, 4, seed=11)
        for i in range(4):
            phi = pure_state(d.eigenvectors[:, i])
            assert abs(strength(d, phi).value - d.eigenvalues[i]) < 1e-10


class TestTwoStateFormula:
    def test_endpoints(self):
        assert abs(two_state_formula(0.4, 0.6, 1.0) - 0.4) < 1e-15
        assert abs(two_state_formula(0.4, 0.6, 0.0) - 0.6) < 1e-15

    def test_rejects_bad_ordering(self):
        with pytest.raises(InvalidWeightsError):
            two_state_formula(0.6, 0.4, 0.5)
        with pytest.raises(InvalidWeightsError):
            two_state_formula(0.5, 0.5, 0.5)

    def test_rejects_unnormalized(self):
        with pytest.raises(InvalidWeightsError):
            two_state_formula(0.3, 0.6, 0.5)

    def test_rejects_overlap_outside_unit(self):
        with pytest.raises(InvalidWeightsError):
            two_state_formula(0.4, 0.6, 1.5)

    @given(seed=seeds)
    @settings(max_examples=40, deadline=None)
    def test_against_strength(self, seed):
        rng = child_rng(seed, 98)
        d = int(rng.integers(2, 7))
        u = haar_unitary(d, rng)
        p, q = u[:, 0], u[:, 1]
        low = float(rng.uniform(0.05, 0.45))
        high = 1.0 - low
        theta = float(rng.uniform(0.0, np.pi / 2))
        r = np.cos(theta) * p + np.sin(theta) * q
        a = validate_density(low * np.outer(p, p.conj()) + high * np.outer(q, q.conj()))
        got = strength(a, pure_state(r, normalize=True)).value
        want = two_state_formula(low, high, float(np.cos(theta) ** 2))
        assert abs(got - want) <= 1e-10


class TestEffectsEqualByStrength:
    def test_identical_effects_equal(self):
        e = validate_effect(random_density(3, 3, seed=4).matrix)
        assert effects_equal_by_strength(e, e)

    def test_distinct_projections_differ(self):
        a = validate_effect(np.diag([1.0, 0.0]).astype(complex))
        b = validate_effect(np.diag([0.0, 1.0]).astype(complex))
        assert not effects_equal_by_strength(a, b)

    def test_scaled_effect_differs(self):
        a = validate_effect(np.eye(3, dtype=complex) * 0.5)
        b = validate_effect(np.eye(3, dtype=complex) * 0.4)
        assert not effects_equal_by_strength(a, b)

    def test_conjugated_pair_differs(self):
        u = haar_unitary(3, seed=5)
        e = validate_effect(np.diag([0.9, 0.5, 0.1]).astype(complex))
        f = validate_effect(u @ e.matrix @ u.conj().T)
        assert not effects_equal_by_strength(e, f)


@given(seed=seeds, anti=st.booleans())
@settings(max_examples=25, deadline=None)
def test_strength_symmetry_invariance(seed, anti):
    from qcompat import random_symmetry, transform_pure

    rng = child_rng(seed, 97)
    d = int(rng.integers(2, 6))
    eff = validate_effect(random_density(d, int(rng.integers(1, d + 1)), seed=rng).matrix)
    phi = random_pure(d, seed=rng)
    sym = random_symmetry(d, antiunitary=anti, seed=rng)
    m = eff.matrix.conj() if anti else eff.matrix
    eff2 = validate_effect(sym.u @ m @ sym.u.conj().T)
    s0 = strength(eff, phi).value
    s1 = strength(eff2, transform_pure(sym, phi)).value
    assert abs(s0 - s1) <= 1e-10
