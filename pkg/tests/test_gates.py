import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.stats import unitary_group

from clifford_hierarchy import gates
from clifford_hierarchy.clifford import clifford_list
from clifford_hierarchy.exceptions import ValidationError
from clifford_hierarchy.hierarchy import hierarchy_level, is_generalized_semi_clifford, is_semi_clifford
from clifford_hierarchy.matrix import as_array, dagger, equal_up_to_global_phase, is_monomial


def arr(g):
    return as_array(g)


def bits(b):
    return [(b >> 2) & 1, (b >> 1) & 1, b & 1]


def unbits(v):
    return (v[0] << 2) | (v[1] << 1) | v[2]


def classical_toffoli(v, c1, c2, t):
    v = list(v)
    v[t] ^= v[c1] & v[c2]
    return v


class TestStandard:
    def test_s_k_family(self):
        assert np.array_equal(arr(gates.s_k(2)), arr(gates.s()))
        assert np.array_equal(arr(gates.s_k(3)), arr(gates.t()))
        assert np.array_equal(arr(gates.s_k(1)), arr(gates.z()))

    @pytest.mark.parametrize("k", range(1, 9))
    def test_v_k_is_s_k_times_x(self, k):
        assert np.allclose(arr(gates.v_k(k)) @ arr(dagger(gates.x())), arr(gates.s_k(k)), atol=1e-15)

    @pytest.mark.parametrize("k", range(1, 9))
    def test_r_k_phase(self, k):
        assert np.allclose(arr(gates.r_k(k)), np.diag([1, np.exp(2j * np.pi / 2 ** k)]), atol=1e-15)

    def test_exact_roots(self):
        assert gates.root_of_unity(1, 4) == 1j
        r = gates.root_of_unity(1, 8)
        assert r.real == r.imag and abs(r - np.exp(1j * np.pi / 4)) < 1e-15

    def test_cs_is_controlled_r2(self):
        assert np.array_equal(arr(gates.lambda_controlled(1, gates.r_k(2))), arr(gates.cs()))

    def test_toffoli_and_ccz(self):
        h = arr(gates.embed(gates.h(), 2, 3))
        assert np.allclose(h @ arr(gates.ccz()) @ h, arr(gates.toffoli()))

    def test_qft_one_is_h(self):
        assert np.allclose(arr(gates.qft(1)), arr(gates.h()))

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_qft_from_blocks(self, n):
        assert equal_up_to_global_phase(gates.qft_from_blocks(n), gates.qft(n))

    def test_qft_matches_fft(self):
        dim = 8
        f = np.fft.ifft(np.eye(dim), axis=0) * math.sqrt(dim)
        assert np.allclose(arr(gates.qft(3)), f)

    def test_invalid_k(self):
        with pytest.raises(ValidationError):
            gates.s_k(0)
        with pytest.raises(ValidationError):
            gates.w_k(1)


class TestCascades:
    def test_r_c3_permutation_action(self):
        # time order (1,2 -> 0), (0,2 -> 1), (0,1 -> 2)
        m = arr(gates.r_c3())
        for b in range(8):
            v = classical_toffoli(bits(b), 1, 2, 0)
            v = classical_toffoli(v, 0, 2, 1)
            v = classical_toffoli(v, 0, 1, 2)
            out = np.zeros(8)
            out[unbits(v)] = 1
            assert np.array_equal(m[:, b].real, out)
        assert is_monomial(gates.r_c3()) is not None

    def test_r_c2_is_suffix(self):
        rest = arr(gates.toffoli(1, 2, 0))
        assert np.allclose(arr(gates.r_c2()) @ rest, arr(gates.r_c3()))

    def test_w_k_definition(self):
        v = np.kron(np.eye(4), np.diag([1, np.exp(1j * np.pi / 4)]))
        assert np.allclose(arr(gates.w_k(3)), v @ arr(gates.toffoli()))
        assert np.allclose(arr(gates.w_k(3, order="v-first")), arr(gates.toffoli()) @ v)

    @pytest.mark.parametrize("k", [2, 3, 4])
    def test_w_k_orders_agree_on_verdicts(self, k):
        a, b = gates.w_k(k), gates.w_k(k, order="v-first")
        assert str(hierarchy_level(a)) == str(hierarchy_level(b))
        assert (is_semi_clifford(a) is None) == (is_semi_clifford(b) is None)
        assert (is_generalized_semi_clifford(a) is None) == (is_generalized_semi_clifford(b) is None)


def random_traceless_hermitian_unitary(rng):
    u = unitary_group.rvs(2, random_state=rng)
    return u @ np.diag([1, -1]) @ u.conj().T


class TestGammaForms:
    def test_gamma2_eigenvalues(self):
        ev = np.sort(np.linalg.eigvalsh(arr(gates.gamma2(np.pi / 4, 0))))
        assert np.allclose(ev, [-1, 1])

    @given(st.floats(0, 2 * np.pi))
    @settings(max_examples=50, deadline=None)
    def test_u_phi_alpha_identity(self, phi):
        lhs = arr(gates.u_phi_alpha(phi, 0)) @ arr(gates.h()) @ arr(gates.x())
        assert np.allclose(lhs, arr(gates.gamma1(phi / 2)), atol=1e-9)

    @given(st.floats(0.01, np.pi - 0.01), st.floats(-np.pi, np.pi), st.floats(-np.pi, np.pi))
    @settings(max_examples=50, deadline=None)
    def test_u_phi_xi_beta_diagonalizes_gamma2(self, phi, xi, beta):
        u = arr(gates.u_phi_xi_beta(phi, xi, beta))
        d = u.conj().T @ arr(gates.gamma2(phi, xi)) @ u
        assert np.allclose(d, np.diag([1, -1]), atol=1e-9)

    @given(st.floats(0, 2 * np.pi))
    @settings(max_examples=50, deadline=None)
    def test_u_phi_alpha_diagonalizes_gamma1(self, phi):
        u = arr(gates.u_phi_alpha(phi, 0.3))
        d = u.conj().T @ arr(gates.gamma1(phi)) @ u
        assert np.allclose(d, np.exp(1j * phi / 2) * np.diag([1, -1]), atol=1e-9)

    def test_thousand_hermitian_unitaries_match_a_form(self):
        rng = np.random.default_rng(7)
        for _ in range(1000):
            m = random_traceless_hermitian_unitary(rng)
            params = gates.gamma_parameters(m)
            assert params is not None
            rebuilt = gates.gamma1(params[1]) if params[0] == "gamma1" else gates.gamma2(*params[1:])
            assert equal_up_to_global_phase(rebuilt, m)

    def test_gamma1_branch(self):
        assert gates.gamma_parameters(gates.v_k(4))[0] == "gamma1"
        assert gates.gamma_parameters(gates.h())[0] == "gamma2"
        assert gates.gamma_parameters(gates.t()) is None


class TestClassifySingleQubit:
    def test_t(self):
        i, k, j = gates.classify_single_qubit(gates.t())
        cl = clifford_list(1)
        assert k == 3
        assert equal_up_to_global_phase(arr(cl[i]) @ arr(gates.t()) @ arr(cl[j]), gates.t())

    def test_v_k4(self):
        assert gates.classify_single_qubit(gates.gamma1(2 * np.pi / 16))[1] == 4

    def test_pauli_and_clifford(self):
        assert gates.classify_single_qubit(gates.x())[1] == 1
        assert gates.classify_single_qubit(gates.h())[1] == 2

    def test_non_dyadic_absent(self):
        assert gates.classify_single_qubit(np.diag([1, np.exp(1j * np.pi / 5)]), k_max=10) is None
