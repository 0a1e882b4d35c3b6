import itertools
from functools import reduce

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from clifford_hierarchy.exceptions import CapabilityError, DimensionError
from clifford_hierarchy.pauli import (
    PauliOp,
    PauliSubgroup,
    commutes,
    decompose_batch,
    enumerate_pauli_mod_phase,
    from_matrix,
    maximal_abelian_subgroups,
    pauli_mul,
    pauli_stack,
)

I2 = np.eye(2)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1, -1]).astype(complex)
SINGLE = {"I": I2, "X": X, "Y": Y, "Z": Z}


def kron_label(label):
    return reduce(np.kron, [SINGLE[c] for c in label])


def all_ops(n):
    return [PauliOp(n, x, z, ph) for x in range(1 << n) for z in range(1 << n) for ph in range(4)]


def paulis(max_n=3):
    return st.integers(1, max_n).flatmap(
        lambda n: st.tuples(st.integers(0, (1 << n) - 1), st.integers(0, (1 << n) - 1), st.integers(0, 3)).map(
            lambda t: PauliOp(n, *t)
        )
    )


class TestLabels:
    @pytest.mark.parametrize("label", ["X", "Y", "Z", "XY", "ZIX", "YYZ"])
    def test_label_matches_kron(self, label):
        assert np.allclose(PauliOp.from_label(label).to_matrix(), kron_label(label))

    def test_qubit_zero_is_leftmost(self):
        p = PauliOp.single(3, 0, "X")
        assert p.label() == "XII"
        assert p.x == 0b100

    def test_hermitian_sign(self):
        y = PauliOp.from_label("Y")
        assert y.sign() == 1
        assert PauliOp(1, 1, 1, 0).sign() is None
        assert y.hermitian(-1).sign() == -1

    def test_out_of_range(self):
        with pytest.raises(CapabilityError):
            PauliOp(7, 0, 0)
        with pytest.raises(ValueError):
            PauliOp(1, 2, 0)


class TestAlgebra:
    @pytest.mark.parametrize("n", [1, 2])
    def test_product_matches_matrices(self, n):
        ops = all_ops(n)
        for p, q in itertools.product(ops[::3], ops[::5]):
            assert np.allclose(pauli_mul(p, q).to_matrix(), p.to_matrix() @ q.to_matrix())

    @pytest.mark.parametrize("n", [1, 2])
    def test_commutation_matches_matrices(self, n):
        ops = [PauliOp(n, x, z) for x in range(1 << n) for z in range(1 << n)]
        for p, q in itertools.product(ops, ops):
            a, b = p.to_matrix(), q.to_matrix()
            assert commutes(p, q) == np.allclose(a @ b, b @ a)

    @given(paulis(), st.data())
    @settings(max_examples=200, deadline=None)
    def test_associative(self, p, data):
        q = PauliOp(p.n, data.draw(st.integers(0, (1 << p.n) - 1)), data.draw(st.integers(0, (1 << p.n) - 1)))
        r = PauliOp(p.n, data.draw(st.integers(0, (1 << p.n) - 1)), 0, data.draw(st.integers(0, 3)))
        assert (p * q) * r == p * (q * r)

    @given(paulis())
    @settings(max_examples=100, deadline=None)
    def test_hermitian_squares_to_identity(self, p):
        h = p.hermitian()
        assert h * h == PauliOp.identity(p.n)

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            pauli_mul(PauliOp.identity(1), PauliOp.identity(2))


class TestMatrices:
    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_stack_row_order(self, n):
        stack = pauli_stack(n)
        assert stack.shape == (4 ** n, 2 ** n, 2 ** n)
        for x, z in [(0, 0), (1, 0), ((1 << n) - 1, 1)]:
            assert np.allclose(stack[(x << n) | z], PauliOp(n, x, z).to_matrix())

    @pytest.mark.parametrize("n", [1, 2])
    def test_from_matrix_round_trip(self, n):
        rng = np.random.default_rng(0)
        for p in all_ops(n):
            c = np.exp(1j * rng.uniform(-np.pi, np.pi))
            q, resid = from_matrix(c * p.to_matrix())
            assert np.allclose(resid * q.to_matrix(), c * p.to_matrix())
            assert (q.x, q.z) == (p.x, p.z)

    def test_non_pauli_rejected(self):
        h = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
        assert from_matrix(h) is None
        ok, *_ = decompose_batch(np.stack([h, X]))
        assert ok.tolist() == [False, True]

    def test_enumeration_size(self):
        assert len(set(enumerate_pauli_mod_phase(3))) == 64


def brute_force_maximal_abelian(n):
    # oracle: sets of 2^n phase-free Paulis closed under matrix products and mutually commuting
    labels = ["".join(t) for t in itertools.product("IXYZ", repeat=n)]
    mats = {lab: kron_label(lab) for lab in labels}

    def label_of(m):
        for lab, a in mats.items():
            overlap = np.trace(a.conj().T @ m) / 2 ** n
            if abs(abs(overlap) - 1) < 1e-9:
                return lab
        raise AssertionError

    groups = set()
    nontrivial = labels[1:]
    for combo in itertools.combinations(nontrivial, n):
        ms = [mats[c] for c in combo]
        if not all(np.allclose(a @ b, b @ a) for a, b in itertools.combinations(ms, 2)):
            continue
        members = {"I" * n}
        for r in range(1, n + 1):
            for sub in itertools.combinations(ms, r):
                members.add(label_of(reduce(np.matmul, sub)))
        if len(members) == 2 ** n:
            groups.add(frozenset(members))
    return groups


class TestSubgroups:
    @pytest.mark.parametrize("n,count", [(1, 3), (2, 15), (3, 135)])
    def test_counts_formula(self, n, count):
        assert len(maximal_abelian_subgroups(n)) == count == np.prod([2 ** j + 1 for j in range(1, n + 1)])

    @pytest.mark.parametrize("n", [1, 2])
    def test_counts_against_brute_force(self, n):
        ours = {frozenset(p.label() for p in g.elements()) for g in maximal_abelian_subgroups(n)}
        assert ours == brute_force_maximal_abelian(n)

    def test_all_maximal_and_distinct(self):
        groups = maximal_abelian_subgroups(3)
        assert all(g.maximal for g in groups)
        assert len(set(groups)) == len(groups)

    def test_equality_by_span(self):
        a = PauliSubgroup(2, [PauliOp.from_label("ZI"), PauliOp.from_label("IZ")])
        b = PauliSubgroup(2, [PauliOp.from_label("ZZ"), PauliOp.from_label("IZ")])
        assert a == b == PauliSubgroup.z_type(2)
        assert a != PauliSubgroup.x_type(2)
        assert b.contains(PauliOp.from_label("ZI"))

    def test_dependent_generators_rejected(self):
        with pytest.raises(ValueError):
            PauliSubgroup(2, [PauliOp.from_label("ZI"), PauliOp.from_label("ZI")])

    def test_non_abelian_not_maximal(self):
        g = PauliSubgroup(1, [PauliOp.from_label("X"), PauliOp.from_label("Z")])
        assert not g.abelian and not g.maximal

    def test_capability(self):
        with pytest.raises(CapabilityError):
            maximal_abelian_subgroups(4)
