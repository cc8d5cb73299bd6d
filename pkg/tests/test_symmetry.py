import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qcompat import (
    IncompleteMapError,
    NotASymmetryError,
    ValidationError,
    apply_symmetry,
    haar_unitary,
    ic_set_member,
    independent,
    probe_pure_states,
    pure_characterization_probe,
    pure_state,
    pure_state_map,
    random_density,
    random_pure,
    random_symmetry,
    rank_via_compatibility,
    symmetry_op,
    symmetry_overlap,
    symmetry_probe_map,
    transform_pure,
    transition_prob,
    validate_density,
    verify_theorem,
    wigner_reconstruct,
)
from qcompat.states import child_rng

seeds = st.integers(min_value=0, max_value=2**31 - 1)


def _basis(i, d):
    v = np.zeros(d, dtype=complex)
    v[i] = 1.0
    return pure_state(v)


class TestTransitionProb:
    def test_same_ray_is_one(self):
        p = random_pure(3, seed=1)
        q = pure_state(np.exp(0.7j) * p.vector)
        assert abs(transition_prob(p, q) - 1.0) < 1e-14

    def test_orthogonal_is_zero(self):
        assert transition_prob(_basis(0, 2), _basis(1, 2)) < 1e-14

    def test_equal_superposition(self):
        q = pure_state(np.array([1.0, 1.0], dtype=complex) / np.sqrt(2))
        assert abs(transition_prob(_basis(0, 2), q) - 0.5) < 1e-14


class TestIndependent:
    def test_basis_is_independent(self):
        assert independent([_basis(0, 2), _basis(1, 2)])

    def test_repeated_ray_is_dependent(self):
        assert not independent([_basis(0, 2), _basis(0, 2)])

    def test_three_vectors_in_a_plane(self):
        v = pure_state(np.array([1.0, 1.0, 0.0], dtype=complex) / np.sqrt(2))
        assert not independent([_basis(0, 3), _basis(1, 3), v])
        assert independent([_basis(0, 3), _basis(1, 3), _basis(2, 3)])


class TestApplySymmetry:
    def test_identity(self):
        s = symmetry_op(np.eye(3, dtype=complex))
        rho = random_density(3, 2, seed=2)
        np.testing.assert_allclose(apply_symmetry(s, rho).matrix, rho.matrix, atol=1e-14)

    def test_conjugation_transposes(self):
        s = symmetry_op(np.eye(2, dtype=complex), antiunitary=True)
        rho = random_density(2, 2, seed=3)
        np.testing.assert_allclose(apply_symmetry(s, rho).matrix, rho.matrix.conj(), atol=1e-14)

    @given(seed=seeds, anti=st.booleans())
    @settings(max_examples=20, deadline=None)
    def test_spectrum_preserved(self, seed, anti):
        rng = child_rng(seed, 60)
        d = int(rng.integers(2, 6))
        rho = random_density(d, int(rng.integers(1, d + 1)), seed=rng)
        s = random_symmetry(d, antiunitary=anti, seed=rng)
        out = apply_symmetry(s, rho)
        np.testing.assert_allclose(out.eigenvalues, rho.eigenvalues, atol=1e-12)

    def test_transform_pure_preserves_probabilities(self):
        s = random_symmetry(3, antiunitary=True, seed=5)
        p = random_pure(3, seed=6)
        q = random_pure(3, seed=7)
        before = transition_prob(p, q)
        after = transition_prob(transform_pure(s, p), transform_pure(s, q))
        assert abs(before - after) < 1e-12


class TestPureStateMapValidation:
    def test_duplicate_inputs_rejected(self):
        pairs = [(_basis(0, 2), _basis(0, 2)), (_basis(0, 2), _basis(1, 2))]
        with pytest.raises(ValidationError):
            pure_state_map(pairs)

    def test_mixed_dimensions_rejected(self):
        with pytest.raises(ValidationError):
            pure_state_map([(_basis(0, 2), _basis(0, 3))])

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            pure_state_map([])

    def test_dim_one_rejected(self):
        one = pure_state(np.array([1.0], dtype=complex))
        with pytest.raises(ValidationError):
            pure_state_map([(one, one)])
        with pytest.raises(ValidationError):
            probe_pure_states(1)


class TestWignerReconstruct:
    def test_identity_map(self):
        pairs = [(p, p) for _, p in probe_pure_states(3)]
        s = wigner_reconstruct(pure_state_map(pairs))
        assert not s.antiunitary
        ident = symmetry_op(np.eye(3, dtype=complex))
        assert symmetry_overlap(s, ident) > 1 - 1e-10

    def test_conjugation_map(self):
        conj = symmetry_op(np.eye(2, dtype=complex), antiunitary=True)
        pairs = [(p, transform_pure(conj, p)) for _, p in probe_pure_states(2)]
        s = wigner_reconstruct(pure_state_map(pairs))
        assert s.antiunitary
        assert symmetry_overlap(s, conj) > 1 - 1e-10

    @given(seed=seeds, anti=st.booleans())
    @settings(max_examples=15, deadline=None)
    def test_roundtrip(self, seed, anti):
        rng = child_rng(seed, 61)
        d = int(rng.integers(2, 6))
        s = random_symmetry(d, antiunitary=anti, seed=rng)
        rec = wigner_reconstruct(symmetry_probe_map(s))
        assert rec.antiunitary == s.antiunitary
        assert symmetry_overlap(s, rec) > 1 - 1e-9

    def test_incomplete_map_rejected(self):
        s = random_symmetry(3, antiunitary=False, seed=8)
        pairs = list(symmetry_probe_map(s).pairs)[:3]
        with pytest.raises(IncompleteMapError):
            wigner_reconstruct(pure_state_map(pairs))

    def test_probability_breaking_map_rejected(self):
        pairs = []
        for label, p in probe_pure_states(2):
            out = _basis(0, 2) if label == "pair-0-1" else p
            pairs.append((p, out))
        with pytest.raises(NotASymmetryError) as exc:
            wigner_reconstruct(pure_state_map(pairs))
        assert exc.value.probe

    def test_reconstruction_reproduces_unlisted_states(self):
        s = random_symmetry(4, antiunitary=True, seed=9)
        rec = wigner_reconstruct(symmetry_probe_map(s))
        for k in range(5):
            p = random_pure(4, seed=100 + k)
            a = transform_pure(s, p)
            b = transform_pure(rec, p)
            assert abs(transition_prob(a, b) - 1.0) < 1e-10


class TestVerifyTheorem:
    def test_unitary_transform_accepted(self):
        s = random_symmetry(3, antiunitary=False, seed=11)
        res = verify_theorem(lambda rho: apply_symmetry(s, rho), 3, n_mixed=5, seed=0)
        assert res.verdict
        assert res.max_error < 1e-8
        assert not res.failures
        assert not res.symmetry.antiunitary

    def test_antiunitary_transform_accepted(self):
        s = random_symmetry(4, antiunitary=True, seed=12)
        res = verify_theorem(lambda rho: apply_symmetry(s, rho), 4, n_mixed=5, seed=0)
        assert res.verdict
        assert res.symmetry.antiunitary

    def test_tampered_mixed_action_detected(self):
        u = symmetry_op(haar_unitary(3, seed=13))
        w = symmetry_op(haar_unitary(3, seed=14))

        def warped(rho):
            target = u if rho.numerical_rank == 1 else w
            return apply_symmetry(target, rho)

        res = verify_theorem(warped, 3, n_mixed=6, seed=0)
        assert not res.verdict
        assert res.failures

    def test_nonpure_probe_image_rejected(self):
        def depolarize(rho):
            m = 0.97 * rho.matrix + 0.03 * np.eye(3) / 3
            return validate_density(m)

        with pytest.raises(NotASymmetryError) as exc:
            verify_theorem(depolarize, 3, n_mixed=4, seed=0)
        assert exc.value.probe


class TestRankViaCompatibility:
    def test_pure_state(self):
        assert rank_via_compatibility(random_density(4, 1, seed=15)) == 1

    def test_maximally_mixed(self):
        rho = validate_density(np.eye(3, dtype=complex) / 3)
        assert rank_via_compatibility(rho) == 3

    def test_matches_spectral_rank(self):
        for k in range(8):
            d = 2 + k % 4
            r = 1 + k % d
            rho = random_density(d, r, seed=300 + k)
            assert rank_via_compatibility(rho, seed=k) == r

    def test_budget_guard(self):
        with pytest.raises(ValidationError):
            rank_via_compatibility(random_density(3, 2, seed=16), budget=4)


class TestCharacterization:
    def test_disjoint_candidate_is_vacuous_member(self):
        a = validate_density(np.diag([1.0, 0.0]).astype(complex))
        b = validate_density(np.diag([0.0, 1.0]).astype(complex))
        assert ic_set_member(a, [b])

    def test_member_state_excluded(self):
        rho = validate_density(np.eye(2, dtype=complex) / 2)
        assert not ic_set_member(rho, [rho])
        assert ic_set_member(rho, [])

    def test_pure_state_is_consistent(self):
        probe = pure_characterization_probe(random_density(3, 1, seed=17), samples=60, seed=0)
        assert probe.is_pure
        assert probe.rank == 1
        assert probe.consistent
        assert probe.witness is None

    def test_maximally_mixed_qubit_has_witness(self):
        probe = pure_characterization_probe(
            validate_density(np.eye(2, dtype=complex) / 2), samples=60, seed=0
        )
        assert not probe.is_pure
        assert not probe.consistent
        assert probe.witness is not None
        assert probe.witness.numerical_rank == 1

    def test_rank_two_state_in_dim_three(self):
        probe = pure_characterization_probe(random_density(3, 2, seed=18), samples=60, seed=1)
        assert probe.rank == 2
        assert not probe.consistent
        assert probe.witness is not None
