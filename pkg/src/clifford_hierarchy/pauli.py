"""Exact n-qubit Pauli arithmetic in binary symplectic form.

A Pauli operator is stored as ``i**phase * X**x Z**z`` where ``x`` and ``z`` are
n-bit integers. Qubit 0 is the most significant bit and the leftmost tensor
factor, so the bit of qubit ``j`` is ``1 << (n - 1 - j)``. This matches the
computational-basis index ordering used by every matrix in the package.
"""
from dataclasses import dataclass
from functools import lru_cache
import itertools

import numpy as np

from . import _config
from .exceptions import CapabilityError, DimensionError
from .matrix import as_array, check_unitary

_LABEL_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}


def _popcount(v):
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliOp:
    n: int
    x: int
    z: int
    phase: int = 0

    def __post_init__(self):
        if not 1 <= self.n <= _config.MAX_QUBITS:
            raise CapabilityError(f"n={self.n} outside 1..{_config.MAX_QUBITS}")
        limit = 1 << self.n
        if not (0 <= self.x < limit and 0 <= self.z < limit):
            raise ValueError("x and z must be n-bit vectors")
        object.__setattr__(self, "phase", self.phase % 4)

    @classmethod
    def from_label(cls, label, phase=0):
        """Build from a string such as ``"XIZ"``; ``Y`` means ``i X Z`` (Hermitian)."""
        n = len(label)
        x = z = 0
        ys = 0
        for ch in label.upper():
            bx, bz = _LABEL_BITS[ch]
            x = (x << 1) | bx
            z = (z << 1) | bz
            ys += bx & bz
        return cls(n, x, z, phase + ys)

    @classmethod
    def identity(cls, n):
        return cls(n, 0, 0, 0)

    @classmethod
    def single(cls, n, qubit, kind):
        """``kind`` in ``"XYZ"`` acting on ``qubit`` (Hermitian convention)."""
        label = ["I"] * n
        label[qubit] = kind
        return cls.from_label("".join(label))

    @property
    def x_bits(self):
        return tuple((self.x >> (self.n - 1 - j)) & 1 for j in range(self.n))

    @property
    def z_bits(self):
        return tuple((self.z >> (self.n - 1 - j)) & 1 for j in range(self.n))

    @property
    def weight(self):
        return _popcount(self.x | self.z)

    def label(self):
        out = []
        for bx, bz in zip(self.x_bits, self.z_bits):
            out.append("IXZY"[bx + 2 * bz])
        return "".join(out)

    def hermitian_phase(self):
        """Phase exponent making ``X**x Z**z`` Hermitian with sign +1."""
        return _popcount(self.x & self.z) % 4

    def sign(self):
        """+1/-1 if the operator is Hermitian, otherwise None."""
        rel = (self.phase - self.hermitian_phase()) % 4
        return {0: 1, 2: -1}.get(rel)

    def strip_phase(self):
        return PauliOp(self.n, self.x, self.z, 0)

    def hermitian(self, sign=1):
        return PauliOp(self.n, self.x, self.z, self.hermitian_phase() + (0 if sign > 0 else 2))

    def symplectic(self):
        """Concatenated ``(x | z)`` bit vector as a numpy array."""
        return np.array(self.x_bits + self.z_bits, dtype=np.uint8)

    def to_matrix(self):
        return pauli_matrix(self.n, self.x, self.z) * (1j ** self.phase)

    def __mul__(self, other):
        return pauli_mul(self, other)

    def __str__(self):
        prefix = ["+", "+i", "-", "-i"][self.phase]
        return prefix + self.label().replace("Y", "(XZ)")


def pauli_mul(p, q):
    if p.n != q.n:
        raise DimensionError(f"cannot multiply {p.n}-qubit and {q.n}-qubit Paulis")
    # Z^zp X^xq = (-1)^{zp.xq} X^xq Z^zp
    phase = p.phase + q.phase + 2 * _popcount(p.z & q.x)
    return PauliOp(p.n, p.x ^ q.x, p.z ^ q.z, phase)


def symplectic_product(p, q):
    return (_popcount(p.x & q.z) + _popcount(p.z & q.x)) & 1


def commutes(p, q):
    if p.n != q.n:
        raise DimensionError(f"cannot compare {p.n}-qubit and {q.n}-qubit Paulis")
    return symplectic_product(p, q) == 0


@lru_cache(maxsize=None)
def _pauli_matrix_cached(n, x, z):
    dim = 1 << n
    rows = np.arange(dim) ^ x
    cols = np.arange(dim)
    signs = np.array([(-1) ** _popcount(z & r) for r in cols], dtype=complex)
    m = np.zeros((dim, dim), dtype=complex)
    m[rows, cols] = signs
    m.setflags(write=False)
    return m


def pauli_matrix(n, x, z):
    """Matrix of ``X**x Z**z`` (phase 0) with entries in {0, +1, -1}."""
    return _pauli_matrix_cached(n, x, z)


@lru_cache(maxsize=None)
def pauli_stack(n):
    """All 4**n phase-free Pauli matrices, ordered by ``(x, z)``; shape (4**n, 2**n, 2**n)."""
    mats = [pauli_matrix(n, x, z) for x, z in _xz_pairs(n)]
    out = np.stack(mats)
    out.setflags(write=False)
    return out


def _xz_pairs(n):
    dim = 1 << n
    return [(x, z) for x in range(dim) for z in range(dim)]


def enumerate_pauli_mod_phase(n):
    if not 1 <= n <= _config.MAX_QUBITS:
        raise CapabilityError(f"n={n} outside 1..{_config.MAX_QUBITS}")
    for x, z in _xz_pairs(n):
        yield PauliOp(n, x, z)


@lru_cache(maxsize=None)
def _char_table(n):
    dim = 1 << n
    r = np.arange(dim)
    table = np.empty((dim, dim))
    for z in range(dim):
        table[z] = [(-1) ** _popcount(z & v) for v in r]
    return table


def decompose_batch(mats, tol=None):
    """Test a stack of unitaries for proportionality to a Pauli.

    Returns ``(ok, x, z, c)`` arrays where, for rows with ``ok`` true,
    ``M = c * X**x Z**z``. Only the support pattern is inspected, which is
    sufficient because every input is assumed unitary.
    """
    tol = _config.TOL if tol is None else tol
    mats = np.asarray(mats)
    b, dim, _ = mats.shape
    n = dim.bit_length() - 1
    x = np.argmax(np.abs(mats[:, 0, :]), axis=1)
    r = np.arange(dim)
    # M[r ^ x, r] = c (-1)^{z.r}
    vals = mats[np.arange(b)[:, None], r[None, :] ^ x[:, None], r[None, :]]
    c = vals[:, 0]
    ok = np.all(np.abs(np.abs(vals) - 1.0) < 10 * tol, axis=1)
    safe_c = np.where(np.abs(c) > 0.5, c, 1.0)
    rel = vals / safe_c[:, None]
    z = np.zeros(b, dtype=np.int64)
    for j in range(n):
        bit = 1 << (n - 1 - j)
        z |= np.where(rel[:, bit].real < 0, bit, 0)
    expected = _char_table(n)[z]
    ok &= np.all(np.abs(rel - expected) < 10 * tol, axis=1)
    return ok, x.astype(np.int64), z, c


def is_pauli_proportional_batch(mats, tol=None):
    return decompose_batch(mats, tol)[0]


def from_matrix(m, tol=None):
    """Return ``(P, c)`` with ``M = c * P.to_matrix()`` or ``None``.

    The phase exponent of ``P`` absorbs the nearest power of ``i`` so the
    residual ``c`` has argument in ``(-pi/4, pi/4]``.
    """
    tol = _config.TOL if tol is None else tol
    arr = as_array(m)
    check_unitary(arr, tol)
    if arr.shape[0] == 1:
        raise CapabilityError("zero-qubit operators are not Paulis")
    ok, x, z, c = decompose_batch(arr[None], tol)
    if not ok[0]:
        return None
    n = arr.shape[0].bit_length() - 1
    coeff = complex(c[0])
    s = int(np.floor(np.angle(coeff) / (np.pi / 2) + 0.5 - 1e-12)) % 4
    residual = coeff / (1j ** s)
    return PauliOp(n, int(x[0]), int(z[0]), s), residual


# -- subgroups ---------------------------------------------------------------


def _vec(p):
    """Pack a Pauli as a 2n-bit integer ``x << n | z``."""
    return (p.x << p.n) | p.z


def _unvec(n, v):
    return PauliOp(n, v >> n, v & ((1 << n) - 1))


def _sym(n, u, v):
    mask = (1 << n) - 1
    ux, uz, vx, vz = u >> n, u & mask, v >> n, v & mask
    return (_popcount(ux & vz) + _popcount(uz & vx)) & 1


def rref(vectors):
    """Reduced row-echelon basis (sorted tuple of ints) of a GF(2) span."""
    rows = []
    for v in vectors:
        for r in rows:
            if v & (1 << (r.bit_length() - 1)):
                v ^= r
        if v:
            pivot = 1 << (v.bit_length() - 1)
            rows = [r ^ v if r & pivot else r for r in rows]
            rows.append(v)
    return tuple(sorted(rows, reverse=True))


def span(vectors):
    out = {0}
    for v in vectors:
        out |= {u ^ v for u in out}
    return out


class PauliSubgroup:
    """Subgroup of the Pauli group modulo phases, given by independent generators.

    Two subgroups compare equal when their GF(2) row spans coincide.
    """

    def __init__(self, n, generators):
        self.n = n
        self.generators = tuple(g.strip_phase() for g in generators)
        for g in self.generators:
            if g.n != n:
                raise DimensionError("generator acts on the wrong number of qubits")
        vecs = [_vec(g) for g in self.generators]
        self._key = rref(vecs)
        if len(self._key) != len(vecs):
            raise ValueError("generators are not independent over GF(2)")

    @classmethod
    def from_vectors(cls, n, vectors):
        return cls(n, [_unvec(n, v) for v in vectors])

    @classmethod
    def z_type(cls, n):
        return cls(n, [PauliOp.single(n, j, "Z") for j in range(n)])

    @classmethod
    def x_type(cls, n):
        return cls(n, [PauliOp.single(n, j, "X") for j in range(n)])

    @property
    def rank(self):
        return len(self.generators)

    @property
    def key(self):
        return self._key

    @property
    def abelian(self):
        gens = self.generators
        return all(commutes(a, b) for a, b in itertools.combinations(gens, 2))

    @property
    def maximal(self):
        return self.abelian and self.rank == self.n

    def vectors(self):
        return span(_vec(g) for g in self.generators)

    def elements(self):
        """All ``2**rank`` elements as phase-free Paulis."""
        return [_unvec(self.n, v) for v in sorted(self.vectors())]

    def contains(self, p):
        return _vec(p) in self.vectors()

    def __eq__(self, other):
        return isinstance(other, PauliSubgroup) and self.n == other.n and self._key == other._key

    def __hash__(self):
        return hash((self.n, self._key))

    def __repr__(self):
        labels = ", ".join(g.label() for g in self.generators)
        return f"PauliSubgroup(<{labels}>)"


@lru_cache(maxsize=None)
def _maximal_abelian_keys(n):
    found = set()

    def grow(basis, members):
        if len(basis) == n:
            found.add(rref(basis))
            return
        start = basis[-1] if basis else 0
        for v in range(start + 1, 1 << (2 * n)):
            if v not in members and all(_sym(n, v, b) == 0 for b in basis):
                grow(basis + [v], span(basis + [v]))

    grow([], {0})
    return tuple(sorted(found))


def maximal_abelian_subgroups(n):
    """Every maximal abelian subgroup of the n-qubit Pauli group (mod phase)."""
    if not 1 <= n <= 3:
        raise CapabilityError("maximal abelian subgroup enumeration supports n <= 3")
    return [PauliSubgroup.from_vectors(n, key) for key in _maximal_abelian_keys(n)]
