"""Small dense unitaries and the phase-blind comparisons used everywhere else."""
import hashlib

import numpy as np

from . import _config
from .exceptions import DimensionError, ValidationError


class DenseUnitary:
    """A ``2**n x 2**n`` complex unitary.

    Arithmetic is plain floating point; the package keeps every constructor
    exact where it can (roots of unity, powers of 1/sqrt(2)) so accumulated
    error stays far below ``tol``.
    """

    __slots__ = ("data", "n", "tol")
    __array_priority__ = 100

    def __init__(self, data, tol=None, check=True):
        arr = np.array(data, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {arr.shape}")
        dim = arr.shape[0]
        n = dim.bit_length() - 1
        if dim != 1 << n:
            raise DimensionError(f"dimension {dim} is not a power of two")
        self.tol = _config.TOL if tol is None else tol
        if check:
            check_unitary(arr, self.tol)
        arr.setflags(write=False)
        self.data = arr
        self.n = n

    @property
    def dim(self):
        return self.data.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __matmul__(self, other):
        return compose(self, other)

    def __rmatmul__(self, other):
        return compose(other, self)

    def dagger(self):
        return dagger(self)

    def __repr__(self):
        return f"DenseUnitary(n={self.n})"


def as_array(m):
    if isinstance(m, DenseUnitary):
        return m.data
    return np.asarray(m, dtype=complex)


def _wrap(arr, like=None, check=False):
    tol = like.tol if isinstance(like, DenseUnitary) else None
    return DenseUnitary(arr, tol=tol, check=check)


def unitarity_error(m):
    a = as_array(m)
    return float(np.max(np.abs(a @ a.conj().T - np.eye(a.shape[0]))))


def check_unitary(m, tol=None):
    tol = _config.TOL if tol is None else tol
    a = as_array(m)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    err = unitarity_error(a)
    # tolerance scales with dimension; products of many gates drift slightly
    if err > max(tol, 1e-12) * 10 * a.shape[0]:
        raise ValidationError(f"matrix is not unitary (max |UU^+ - I| = {err:.3g})")


def _same_dim(a, b):
    if a.shape != b.shape:
        raise DimensionError(f"dimension mismatch: {a.shape} vs {b.shape}")


def compose(a, b):
    """Matrix product ``A @ B`` (``B`` acts first)."""
    x, y = as_array(a), as_array(b)
    _same_dim(x, y)
    return _wrap(x @ y, a)


def tensor(a, b):
    """Kronecker product; ``A`` occupies the leading (most significant) qubits."""
    return _wrap(np.kron(as_array(a), as_array(b)), a)


def dagger(a):
    return _wrap(as_array(a).conj().T, a)


def conjugate(u, m):
    """``U M U^+``."""
    x, y = as_array(u), as_array(m)
    _same_dim(x, y)
    return _wrap(x @ y @ x.conj().T, u)


def conjugate_batch(u, mats):
    """``U M_j U^+`` for a stack of matrices (raw arrays in, raw arrays out)."""
    x = as_array(u)
    return np.matmul(np.matmul(x, mats), x.conj().T)


def _pivot_index(flat, tie=None):
    tie = _config.TIE_BREAK if tie is None else tie
    mod = np.abs(flat)
    return int(np.flatnonzero(mod >= mod.max() - tie)[0])


def global_phase(a, b):
    """Unit ``c`` with ``A ~ c B`` read off the largest-modulus entry of ``B``."""
    x, y = as_array(a).ravel(), as_array(b).ravel()
    i = _pivot_index(y)
    c = x[i] / y[i]
    return c / abs(c) if abs(c) > 0 else 1.0


def equal_up_to_global_phase(a, b, tol=None):
    tol = _config.TOL if tol is None else tol
    x, y = as_array(a), as_array(b)
    if x.shape != y.shape:
        return False
    c = global_phase(x, y)
    return bool(np.max(np.abs(x - c * y)) < 10 * tol)


def allclose(a, b, tol=None):
    tol = _config.TOL if tol is None else tol
    x, y = as_array(a), as_array(b)
    return x.shape == y.shape and bool(np.max(np.abs(x - y)) < 10 * tol)


def is_diagonal(a, tol=None):
    tol = _config.TOL if tol is None else tol
    x = as_array(a)
    off = x - np.diag(np.diag(x))
    return bool(np.max(np.abs(off)) < 10 * tol)


def is_monomial(a, tol=None):
    """Factor ``A = P^+ V`` with ``P`` a permutation and ``V`` diagonal.

    Returns ``(perm, diag)`` where ``perm[j]`` is the row holding the single
    nonzero entry of column ``j``; the permutation matrix ``P`` satisfies
    ``P[j, perm[j]] = 1`` so that ``P @ A`` is diagonal. Returns ``None`` when
    some row or column lacks a unit-modulus entry.
    """
    tol = _config.TOL if tol is None else tol
    x = as_array(a)
    big = np.abs(x) >= 1 - 10 * tol
    if not (np.all(big.sum(axis=0) == 1) and np.all(big.sum(axis=1) == 1)):
        return None
    perm = np.argmax(big, axis=0)
    dim = x.shape[0]
    p = np.zeros((dim, dim))
    p[np.arange(dim), perm] = 1.0
    v = p @ x
    if not is_diagonal(v, tol):
        return None
    return _wrap(p, check=False), _wrap(np.diag(np.diag(v)), check=False)


def permutation_matrix(images):
    """Unitary sending basis state ``j`` to ``images[j]``."""
    dim = len(images)
    m = np.zeros((dim, dim), dtype=complex)
    m[list(images), np.arange(dim)] = 1.0
    return _wrap(m, check=True)


def _quantize(flat, grid):
    i = _pivot_index(flat)
    phase = flat[i] / abs(flat[i])
    v = flat / phase
    re = np.rint(v.real / grid).astype(np.int64)
    im = np.rint(v.imag / grid).astype(np.int64)
    return re, im


def fingerprint(a, grid=None):
    """Hashable key identifying ``A`` up to global phase.

    The matrix is divided by the phase of its largest-modulus entry (ties
    within ``TIE_BREAK`` go to the lowest row-major index), each entry is
    rounded to ``grid`` and the result hashed.
    """
    grid = _config.GRID if grid is None else grid
    flat = as_array(a).ravel()
    re, im = _quantize(flat, grid)
    h = hashlib.blake2b(digest_size=16)
    h.update(np.int64(flat.size).tobytes())
    h.update(re.tobytes())
    h.update(im.tobytes())
    return h.digest()


def fingerprint_batch(mats, grid=None):
    """Fingerprints for a stack of matrices, identical to calling :func:`fingerprint` on each."""
    grid = _config.GRID if grid is None else grid
    mats = np.asarray(mats)
    b = mats.shape[0]
    flat = mats.reshape(b, -1)
    mod = np.abs(flat)
    pivot = np.argmax(mod >= mod.max(axis=1, keepdims=True) - _config.TIE_BREAK, axis=1)
    ph = flat[np.arange(b), pivot]
    ph = ph / np.abs(ph)
    v = flat / ph[:, None]
    re = np.rint(v.real / grid).astype(np.int64)
    im = np.rint(v.imag / grid).astype(np.int64)
    size = np.int64(flat.shape[1]).tobytes()
    out = []
    for j in range(b):
        h = hashlib.blake2b(digest_size=16)
        h.update(size)
        h.update(re[j].tobytes())
        h.update(im[j].tobytes())
        out.append(h.digest())
    return out


def apply_on(gate, qubits, n):
    """Embed a ``k``-qubit gate acting on ``qubits`` (in that order) into ``n`` qubits."""
    g = as_array(gate)
    k = len(qubits)
    if g.shape != (1 << k, 1 << k):
        raise DimensionError(f"gate acts on {g.shape[0].bit_length() - 1} qubits, got {k} targets")
    if len(set(qubits)) != k or not all(0 <= q < n for q in qubits):
        raise DimensionError(f"invalid target qubits {qubits} for n={n}")
    rest = [q for q in range(n) if q not in qubits]
    order = list(qubits) + rest
    full = np.kron(g, np.eye(1 << (n - k)))
    # full acts on qubits in `order`; permute tensor axes back to 0..n-1
    t = full.reshape([2] * (2 * n))
    inv = np.argsort(order)
    axes = list(inv) + [n + i for i in inv]
    t = t.transpose(axes)
    return _wrap(t.reshape(1 << n, 1 << n), check=False)
