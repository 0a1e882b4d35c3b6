"""Constructors for the named gates and gate families.

Every constructor returns a :class:`DenseUnitary`. Phases that are rational
multiples of ``2*pi`` go through :func:`root_of_unity`, which snaps eighth
roots of unity to exact values so equality checks stay far from tolerance.
Qubit indices are 0-based with qubit 0 the leftmost tensor factor.
"""
from fractions import Fraction
import math

import numpy as np

from . import _config
from .exceptions import CapabilityError, DimensionError, ValidationError
from .matrix import DenseUnitary, apply_on, as_array, compose, dagger, equal_up_to_global_phase

_R = 1 / math.sqrt(2)
_EIGHTH = [1, complex(_R, _R), 1j, complex(-_R, _R), -1, complex(-_R, -_R), -1j, complex(_R, -_R)]


def root_of_unity(num, den=1):
    """``exp(2*pi*i*num/den)`` with exact values on the eighth-root grid."""
    frac = Fraction(num) / Fraction(den)
    frac -= math.floor(frac)
    eighths = frac * 8
    if eighths.denominator == 1:
        return complex(_EIGHTH[int(eighths)])
    ang = 2 * math.pi * float(frac)
    return complex(math.cos(ang), math.sin(ang))


def _phase(theta):
    """``exp(i*theta)`` for a float angle, snapping to exact eighth roots when close."""
    frac = theta / (2 * math.pi)
    eighths = frac * 8
    if abs(eighths - round(eighths)) < 1e-14:
        return complex(_EIGHTH[int(round(eighths)) % 8])
    return complex(math.cos(theta), math.sin(theta))


def _u(m):
    return DenseUnitary(m)


def _check_k(k, low=1):
    if not isinstance(k, (int, np.integer)) or k < low:
        raise ValidationError(f"k must be an integer >= {low}, got {k!r}")
    if k > 62:
        raise CapabilityError(f"k={k} is too large")


# -- single qubit --------------------------------------------------------------


def identity(n=1):
    return _u(np.eye(1 << n))


def h():
    return _u([[_R, _R], [_R, -_R]])


def x():
    return _u([[0, 1], [1, 0]])


def y():
    return _u([[0, -1j], [1j, 0]])


def z():
    return _u([[1, 0], [0, -1]])


def s_k(k):
    """``diag(1, exp(2*pi*i/2**k))``; ``s_k(1) = Z``, ``s_k(2) = S``, ``s_k(3) = T``."""
    _check_k(k)
    return _u(np.diag([1, root_of_unity(1, 2 ** k)]))


def r_k(k):
    """Controlled-rotation phase used by the Fourier transform; same matrix as :func:`s_k`."""
    return s_k(k)


def s():
    return s_k(2)


def sdg():
    return dagger(s())


def t():
    return s_k(3)


def v_k(k):
    """``Gamma_1(2*pi/2**k)``, which equals ``s_k(k) @ X``."""
    _check_k(k)
    return _u([[0, 1], [root_of_unity(1, 2 ** k), 0]])


def gamma1(phi):
    """``[[0, 1], [e^{i phi}, 0]]``."""
    return _u([[0, 1], [_phase(phi), 0]])


def gamma2(phi, xi):
    """``[[cos phi, sin phi e^{i xi}], [sin phi e^{-i xi}, -cos phi]]``."""
    c, sn = math.cos(phi), math.sin(phi)
    return _u([[c, sn * _phase(xi)], [sn * _phase(-xi), -c]])


def u_phi_alpha(phi, alpha):
    """Columns ``e^{i alpha}|+>`` and ``|->`` of the eigenbasis of ``Gamma_1(phi)``."""
    a, e = _phase(alpha), _phase(phi / 2)
    return _u(np.array([[a, 1], [a * e, -e]]) * _R)


def u_phi_xi_beta(phi, xi, beta):
    """Columns ``e^{i beta}|+>`` and ``|->`` of the eigenbasis of ``Gamma_2(phi, xi)``.

    The eigenvectors are normalized to unit length as columns of a unitary.
    """
    b = _phase(beta)
    c, sn = math.cos(phi / 2), math.sin(phi / 2)
    return _u([[b * c, sn * _phase(xi)], [b * sn * _phase(-xi), -c]])


def gamma_parameters(u, tol=None):
    """Match a traceless Hermitian unitary to ``("gamma1", phi)`` or ``("gamma2", phi, xi)``.

    The input may carry a global phase; it is removed first. Returns ``None``
    when no global phase makes the matrix Hermitian with eigenvalues +1, -1.
    """
    tol = _config.TOL if tol is None else tol
    m = as_array(u)
    if m.shape != (2, 2):
        raise DimensionError("gamma_parameters expects a single-qubit gate")
    det = np.linalg.det(m)
    # a traceless Hermitian unitary has determinant -1
    c = np.sqrt(-det)
    m = m / c
    if abs(np.trace(m)) > 10 * tol:
        return None
    if np.max(np.abs(m - m.conj().T)) > 10 * tol:
        m = -m
        if np.max(np.abs(m - m.conj().T)) > 10 * tol:
            return None
    a = m[0, 0].real
    if abs(a) < 10 * tol:
        # off-diagonal: proportional to [[0, 1], [e^{i phi}, 0]]
        return ("gamma1", float(np.angle(m[1, 0] / m[0, 1]) % (2 * math.pi)))
    phi = math.atan2(abs(m[0, 1]), a)
    xi = float(np.angle(m[0, 1])) if abs(m[0, 1]) > 10 * tol else 0.0
    return ("gamma2", phi, xi)


# -- multi qubit -----------------------------------------------------------------


def lambda_controlled(m, u):
    """``Lambda_m(U)``: ``U`` on the last qubits, controlled on all of the first ``m``."""
    if m < 0:
        raise ValidationError("number of controls must be non-negative")
    g = as_array(u)
    dim = g.shape[0]
    total = (1 << m) * dim
    if total.bit_length() - 1 > _config.MAX_QUBITS:
        raise CapabilityError("controlled gate exceeds the supported qubit count")
    out = np.eye(total, dtype=complex)
    out[total - dim:, total - dim:] = g
    return _u(out)


def embed(gate, qubits, n):
    """Place ``gate`` on ``qubits`` (an int or a sequence) of an n-qubit register."""
    if isinstance(qubits, (int, np.integer)):
        qubits = (int(qubits),)
    out = apply_on(gate, tuple(qubits), n)
    return _u(as_array(out))


def cnot(control=0, target=1, n=2):
    return embed(lambda_controlled(1, x()), (control, target), n)


def cz(a=0, b=1, n=2):
    return embed(lambda_controlled(1, z()), (a, b), n)


def cs(a=0, b=1, n=2):
    return embed(lambda_controlled(1, s()), (a, b), n)


def swap(a=0, b=1, n=2):
    m = np.eye(4)[[0, 2, 1, 3]]
    return embed(m, (a, b), n)


def ccz(n=3, qubits=(0, 1, 2)):
    return embed(lambda_controlled(2, z()), qubits, n)


def toffoli(c1=0, c2=1, target=2, n=3):
    return embed(lambda_controlled(2, x()), (c1, c2, target), n)


def w_k(k, order="toffoli-first"):
    """Toffoli on qubits (0, 1 -> 2) composed with ``diag(1, e^{i pi/2**(k-1)})`` on qubit 2.

    ``order="toffoli-first"`` applies the Toffoli first (matrix ``V @ Toffoli``);
    ``"v-first"`` reverses the composition.
    """
    _check_k(k, low=2)
    v = embed(s_k(k), 2, 3)
    tof = toffoli()
    if order == "toffoli-first":
        return compose(v, tof)
    if order == "v-first":
        return compose(tof, v)
    raise ValidationError(f"unknown order {order!r}")


def r_c3():
    """Three Toffolis in time order: (1,2 -> 0), then (0,2 -> 1), then (0,1 -> 2)."""
    return compose(toffoli(0, 1, 2), compose(toffoli(0, 2, 1), toffoli(1, 2, 0)))


def r_c2():
    """The last two Toffolis of :func:`r_c3`: (0,2 -> 1), then (0,1 -> 2)."""
    return compose(toffoli(0, 1, 2), toffoli(0, 2, 1))


def qft(n):
    """Discrete Fourier transform on ``n`` qubits, ``F[j, k] = w**(j k) / sqrt(2**n)``."""
    if n < 1:
        raise ValidationError("qft needs n >= 1")
    if n > _config.MAX_QUBITS:
        raise CapabilityError(f"qft supports n <= {_config.MAX_QUBITS}")
    dim = 1 << n
    idx = np.arange(dim)
    prod = np.outer(idx, idx) % dim
    table = np.array([root_of_unity(j, dim) for j in range(dim)])
    return _u(table[prod] / math.sqrt(dim))


def qft_block(m):
    """Hadamard on qubit 0 followed by ``Lambda_1(R_j)`` controlled by qubit ``j - 1``, j = 2..m.

    This is the per-target stage of the textbook Fourier circuit acting on
    ``m`` qubits.
    """
    if m < 1:
        raise ValidationError("qft_block needs m >= 1")
    u = embed(h(), 0, m)
    for j in range(2, m + 1):
        u = compose(embed(lambda_controlled(1, r_k(j)), (j - 1, 0), m), u)
    return u


def qft_from_blocks(n):
    """Fourier transform assembled from :func:`qft_block` stages and a final bit reversal."""
    u = identity(n)
    for j in range(n):
        block = qft_block(n - j)
        if j:
            block = embed(block, tuple(range(j, n)), n)
        u = compose(block, u)
    for a in range(n // 2):
        u = compose(swap(a, n - 1 - a, n), u)
    return u


# -- single-qubit classification -------------------------------------------------


def classify_single_qubit(u, k_max=None, tol=None):
    """Write ``U ~ L1 @ s_k(k) @ L2`` with Clifford ``L1, L2`` and minimal ``k``.

    Returns ``(l1_index, k, l2_index)`` indexing the list produced by
    :func:`clifford.enumerate_clifford_mod_phase(1)`, or ``None`` when no
    decomposition exists for ``k <= k_max``. ``k = 1`` means ``U`` is a Pauli
    (written ``L1 @ Z @ L2``); ``k = 2`` means Clifford.
    """
    from .clifford import clifford_list, is_clifford
    from .matrix import fingerprint
    from .pauli import is_pauli_proportional_batch

    k_max = _config.KMAX if k_max is None else k_max
    m = as_array(u)
    if m.shape != (2, 2):
        raise DimensionError("classify_single_qubit expects a single-qubit gate")
    cl = clifford_list(1)
    table = {fingerprint(c): i for i, c in enumerate(cl)}
    # every Clifford can be written L1 Z L2, so k = 1 and k = 2 are decided directly
    if is_pauli_proportional_batch(m[None], tol)[0]:
        start = 1
    elif is_clifford(m, tol) is not None:
        start = 2
    else:
        start = 3
    for k in range(start, k_max + 1):
        sk = as_array(s_k(k))
        for j, l2 in enumerate(cl):
            # L1 = U L2^+ S_k^+ must be Clifford
            cand = m @ as_array(l2).conj().T @ sk.conj().T
            i = table.get(fingerprint(cand))
            if i is not None and equal_up_to_global_phase(as_array(cl[i]) @ sk @ as_array(l2), m, tol):
                return i, k, j
    return None
