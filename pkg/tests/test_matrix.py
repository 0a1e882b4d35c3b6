import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import unitary_group

from clifford_hierarchy import gates
from clifford_hierarchy.exceptions import DimensionError, ValidationError
from clifford_hierarchy.matrix import (
    DenseUnitary,
    apply_on,
    compose,
    conjugate,
    dagger,
    equal_up_to_global_phase,
    fingerprint,
    fingerprint_batch,
    global_phase,
    is_diagonal,
    is_monomial,
    permutation_matrix,
    tensor,
)


def haar(dim, seed):
    return unitary_group.rvs(dim, random_state=seed)


class TestDenseUnitary:
    def test_rejects_non_unitary(self):
        with pytest.raises(ValidationError):
            DenseUnitary([[1, 1], [0, 1]])

    def test_rejects_bad_shape(self):
        with pytest.raises(DimensionError):
            DenseUnitary(np.eye(3))
        with pytest.raises(DimensionError):
            DenseUnitary(np.ones((2, 4)))

    def test_read_only(self):
        u = DenseUnitary(np.eye(2))
        with pytest.raises(ValueError):
            u.data[0, 0] = 2

    def test_matmul_and_array(self):
        a, b = DenseUnitary(haar(4, 1)), DenseUnitary(haar(4, 2))
        assert np.allclose(np.asarray(a @ b), a.data @ b.data)
        assert (a @ b).n == 2


class TestAlgebra:
    @given(st.integers(0, 10_000))
    @settings(max_examples=30, deadline=None)
    def test_dagger_is_inverse(self, seed):
        u = haar(4, seed)
        assert np.allclose(as_np(compose(u, dagger(u))), np.eye(4))

    @given(st.integers(0, 10_000))
    @settings(max_examples=30, deadline=None)
    def test_tensor_mixed_product(self, seed):
        a, b, c, d = (haar(2, seed + j) for j in range(4))
        lhs = compose(tensor(a, b), tensor(c, d))
        rhs = tensor(compose(a, c), compose(b, d))
        assert np.allclose(as_np(lhs), as_np(rhs))

    def test_conjugation_homomorphism(self):
        u = haar(4, 5)
        p, q = gates.embed(gates.x(), 0, 2), gates.embed(gates.z(), 1, 2)
        lhs = conjugate(u, compose(p, q))
        rhs = compose(conjugate(u, p), conjugate(u, q))
        assert np.allclose(as_np(lhs), as_np(rhs))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            compose(np.eye(2), np.eye(4))


def as_np(m):
    return np.asarray(m)


class TestPhase:
    @given(st.floats(-np.pi, np.pi), st.integers(0, 1000))
    @settings(max_examples=50, deadline=None)
    def test_phase_blind_equality(self, theta, seed):
        u = haar(4, seed)
        v = np.exp(1j * theta) * u
        assert equal_up_to_global_phase(u, v)
        assert abs(global_phase(v, u) - np.exp(1j * theta)) < 1e-9

    def test_distinct_gates_differ(self):
        assert not equal_up_to_global_phase(gates.s(), gates.t())


class TestFingerprint:
    @given(st.floats(-np.pi, np.pi), st.integers(0, 1000))
    @settings(max_examples=50, deadline=None)
    def test_phase_invariant(self, theta, seed):
        u = haar(4, seed)
        assert fingerprint(u) == fingerprint(np.exp(1j * theta) * u)

    def test_tied_pivot_phase_invariant(self):
        # Hadamard-like entries all share the largest modulus
        for theta in np.linspace(-3, 3, 13):
            assert fingerprint(gates.h()) == fingerprint(np.exp(1j * theta) * as_np(gates.h()))
            assert fingerprint(gates.qft(2)) == fingerprint(np.exp(1j * theta) * as_np(gates.qft(2)))

    def test_batch_matches_single(self):
        mats = np.stack([haar(4, s) for s in range(20)] + [as_np(gates.cnot())])
        assert fingerprint_batch(mats) == [fingerprint(m) for m in mats]

    def test_collision_audit(self):
        # distinct classes give distinct fingerprints; equal classes agree
        rng = np.random.default_rng(3)
        mats = [haar(4, s) for s in range(300)]
        keys = fingerprint_batch(np.stack(mats))
        assert len(set(keys)) == len(mats)
        phased = np.stack([np.exp(1j * rng.uniform(-np.pi, np.pi)) * m for m in mats])
        assert fingerprint_batch(phased) == keys

    def test_size_is_part_of_key(self):
        assert fingerprint(np.eye(2)) != fingerprint(np.eye(4))


class TestStructure:
    def test_diagonal(self):
        assert is_diagonal(gates.t())
        assert not is_diagonal(gates.h())

    def test_toffoli_monomial(self):
        perm, diag = is_monomial(gates.toffoli())
        p = as_np(perm)
        assert np.allclose(p @ as_np(gates.toffoli()), as_np(diag))
        assert is_diagonal(diag)

    def test_hadamard_not_monomial(self):
        assert is_monomial(gates.h()) is None

    def test_permutation_matrix(self):
        m = as_np(permutation_matrix([1, 0, 3, 2]))
        assert np.allclose(m, np.kron(np.eye(2), as_np(gates.x())))

    def test_apply_on_matches_kron(self):
        g = haar(2, 9)
        ident = np.eye(2)
        assert np.allclose(as_np(apply_on(g, (0,), 2)), np.kron(g, ident))
        assert np.allclose(as_np(apply_on(g, (1,), 2)), np.kron(ident, g))
        assert np.allclose(as_np(apply_on(g, (2,), 3)), np.kron(np.eye(4), g))

    def test_apply_on_reversed_cnot(self):
        rev = as_np(apply_on(gates.cnot(), (1, 0), 2))
        h2 = np.kron(as_np(gates.h()), as_np(gates.h()))
        assert np.allclose(rev, h2 @ as_np(gates.cnot()) @ h2)

    def test_apply_on_bad_targets(self):
        with pytest.raises(DimensionError):
            apply_on(gates.cnot(), (0, 0), 2)
