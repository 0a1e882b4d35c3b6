"""Clifford detection, tableaux, synthesis and enumeration.

A tableau stores the signed Hermitian images ``U X_i U^+`` and ``U Z_i U^+``.
Synthesis runs symplectic Gaussian elimination with gates from
``{H, S, Sdg, CX, CZ, X, Z}`` and keeps the emitted circuit.
"""
from functools import lru_cache

import numpy as np

from . import _config, gates
from .exceptions import CapabilityError, DimensionError, ValidationError
from .matrix import (
    DenseUnitary,
    apply_on,
    as_array,
    check_unitary,
    fingerprint,
    fingerprint_batch,
)
from .pauli import (
    PauliOp,
    commutes,
    decompose_batch,
    pauli_matrix,
    pauli_mul,
    rref,
    _sym,
    _unvec,
    _vec,
)


def _bit(n, q):
    return 1 << (n - 1 - q)


def _signed(n, x, z, sign):
    return PauliOp(n, x, z).hermitian(sign)


class CliffordTableau:
    """Images of the generators ``X_i`` and ``Z_i`` as signed Hermitian Paulis."""

    def __init__(self, n, image_x, image_z, check=True):
        self.n = n
        self.image_x = tuple(image_x)
        self.image_z = tuple(image_z)
        if check:
            self.validate()

    @classmethod
    def identity(cls, n):
        return cls(
            n,
            [PauliOp.single(n, i, "X") for i in range(n)],
            [PauliOp.single(n, i, "Z") for i in range(n)],
        )

    def validate(self):
        n = self.n
        if len(self.image_x) != n or len(self.image_z) != n:
            raise ValidationError("tableau needs n X-images and n Z-images")
        for p in self.image_x + self.image_z:
            if p.n != n:
                raise DimensionError("tableau image acts on the wrong number of qubits")
            if p.sign() is None:
                raise ValidationError("tableau images must be Hermitian (sign +1 or -1)")
        for i in range(n):
            for j in range(n):
                want = 1 if i == j else 0
                if (not commutes(self.image_x[i], self.image_z[j])) != bool(want):
                    raise ValidationError("tableau images do not form a symplectic basis")
                if i < j and not (
                    commutes(self.image_x[i], self.image_x[j]) and commutes(self.image_z[i], self.image_z[j])
                ):
                    raise ValidationError("tableau images do not form a symplectic basis")

    def conjugate(self, p):
        """Image ``U P U^+`` of an arbitrary Pauli, including its phase."""
        out = PauliOp(self.n, 0, 0, p.phase)
        for i in range(self.n):
            b = _bit(self.n, i)
            if p.x & b:
                out = pauli_mul(out, self.image_x[i])
        for i in range(self.n):
            b = _bit(self.n, i)
            if p.z & b:
                out = pauli_mul(out, self.image_z[i])
        return out

    def signs(self):
        return [p.sign() for p in self.image_x], [p.sign() for p in self.image_z]

    def to_unitary(self):
        return unitary_from_tableau(self)

    def word(self):
        return synthesize(self)

    def __eq__(self, other):
        return (
            isinstance(other, CliffordTableau)
            and self.n == other.n
            and self.image_x == other.image_x
            and self.image_z == other.image_z
        )

    def __hash__(self):
        return hash((self.n, self.image_x, self.image_z))

    def __repr__(self):
        xs = ", ".join(f"X{i}->{_fmt(p)}" for i, p in enumerate(self.image_x))
        zs = ", ".join(f"Z{i}->{_fmt(p)}" for i, p in enumerate(self.image_z))
        return f"CliffordTableau({xs}; {zs})"


def _fmt(p):
    return ("+" if p.sign() == 1 else "-") + p.label()


# -- detection ---------------------------------------------------------------------


@lru_cache(maxsize=None)
def _generator_stack(n):
    mats = []
    for i in range(n):
        mats.append(pauli_matrix(n, _bit(n, i), 0))
    for i in range(n):
        mats.append(pauli_matrix(n, 0, _bit(n, i)))
    out = np.stack(mats)
    out.setflags(write=False)
    return out


def is_clifford(u, tol=None):
    """Tableau of ``U`` if it maps every ``X_i`` and ``Z_i`` to a Pauli, else ``None``."""
    tol = _config.TOL if tol is None else tol
    m = as_array(u)
    check_unitary(m, tol)
    n = m.shape[0].bit_length() - 1
    if n == 0:
        raise CapabilityError("zero-qubit operators have no tableau")
    imgs = np.matmul(np.matmul(m, _generator_stack(n)), m.conj().T)
    ok, xs, zs, cs = decompose_batch(imgs, tol)
    if not ok.all():
        return None
    ops = []
    for x, z, c in zip(xs, zs, cs):
        p = PauliOp(n, int(x), int(z))
        # Hermitian images: c = sign * i**hermitian_phase
        rel = complex(c) / (1j ** p.hermitian_phase())
        ops.append(p.hermitian(1 if rel.real > 0 else -1))
    return CliffordTableau(n, ops[:n], ops[n:], check=False)


def is_clifford_batch(mats, tol=None):
    """Boolean mask: which unitaries in a stack are Clifford."""
    mats = np.asarray(mats)
    b, dim, _ = mats.shape
    n = dim.bit_length() - 1
    g = _generator_stack(n)
    imgs = np.einsum("bij,gjk,blk->bgil", mats, g, mats.conj(), optimize=True)
    ok = decompose_batch(imgs.reshape(b * 2 * n, dim, dim), tol)[0]
    return ok.reshape(b, 2 * n).all(axis=1)


# -- symbolic gate action on Hermitian Paulis ------------------------------------


def _conj_gate(p, name, qubits):
    """``G P G^+`` for a Hermitian signed Pauli ``p`` and a named elementary gate."""
    n = p.n
    x, z, sign = p.x, p.z, p.sign()
    if name in ("H", "S", "Sdg", "X", "Z", "Y"):
        b = _bit(n, qubits[0])
        bx, bz = bool(x & b), bool(z & b)
        if name == "H":
            if bx != bz:
                x ^= b
                z ^= b
            elif bx and bz:
                sign = -sign
        elif name in ("S", "Sdg"):
            if bx:
                # S: X -> Y, Y -> -X ; Sdg: X -> -Y, Y -> X
                if (name == "S") == bz:
                    sign = -sign
                z ^= b
        elif name == "X":
            if bz:
                sign = -sign
        elif name == "Z":
            if bx:
                sign = -sign
        elif name == "Y":
            if bx != bz:
                sign = -sign
    elif name == "CX":
        c, t = _bit(n, qubits[0]), _bit(n, qubits[1])
        xc, zc, xt, zt = bool(x & c), bool(z & c), bool(x & t), bool(z & t)
        if xc and zt and (xt == zc):
            sign = -sign
        if xc:
            x ^= t
        if zt:
            z ^= c
    elif name == "CZ":
        for g, q in (("H", (qubits[1],)), ("CX", qubits), ("H", (qubits[1],))):
            p = _conj_gate(_signed(n, x, z, sign), g, q)
            x, z, sign = p.x, p.z, p.sign()
    else:
        raise ValidationError(f"unknown elementary gate {name!r}")
    return _signed(n, x, z, sign)


_INVERSE = {"H": "H", "S": "Sdg", "Sdg": "S", "X": "X", "Y": "Y", "Z": "Z", "CX": "CX", "CZ": "CZ"}


@lru_cache(maxsize=None)
def _elementary(name):
    return {
        "H": gates.h,
        "S": gates.s,
        "Sdg": gates.sdg,
        "X": gates.x,
        "Y": gates.y,
        "Z": gates.z,
        "CX": gates.cnot,
        "CZ": gates.cz,
    }[name]()


def word_to_unitary(n, word):
    """Matrix of a circuit given as ``[(name, qubits), ...]`` in time order."""
    u = np.eye(1 << n, dtype=complex)
    for name, qubits in word:
        u = as_array(apply_on(_elementary(name), tuple(qubits), n)) @ u
    return DenseUnitary(u, check=False)


def synthesize(tableau):
    """Circuit ``[(name, qubits), ...]`` (time order) realizing the tableau exactly.

    Elimination left-multiplies elementary gates until every image is the
    bare generator; the circuit for ``U`` is the reversed list of inverses.
    """
    n = tableau.n
    ix = list(tableau.image_x)
    iz = list(tableau.image_z)
    ops = []

    def apply(name, qubits):
        ops.append((name, qubits))
        for lst in (ix, iz):
            for k in range(n):
                lst[k] = _conj_gate(lst[k], name, qubits)

    def kind(p, q):
        b = _bit(n, q)
        return "IXZY"[bool(p.x & b) + 2 * bool(p.z & b)]

    for i in range(n):
        # bring the X-image to X_i
        p = ix[i]
        if kind(p, i) == "I":
            j = next(j for j in range(i + 1, n) if kind(p, j) != "I")
            apply("CX", (i, j))
            apply("CX", (j, i))
            apply("CX", (i, j))
        k = kind(ix[i], i)
        if k == "Z":
            apply("H", (i,))
        elif k == "Y":
            apply("Sdg", (i,))
        for j in range(i + 1, n):
            k = kind(ix[i], j)
            if k == "I":
                continue
            if k == "Z":
                apply("H", (j,))
            elif k == "Y":
                apply("Sdg", (j,))
            apply("CX", (i, j))
        # bring the Z-image to Z_i without disturbing X_i
        if kind(iz[i], i) == "Y":
            apply("H", (i,))
            apply("S", (i,))
            apply("H", (i,))
        for j in range(i + 1, n):
            k = kind(iz[i], j)
            if k == "I":
                continue
            if k == "X":
                apply("H", (j,))
            elif k == "Y":
                apply("Sdg", (j,))
                apply("H", (j,))
            apply("CX", (j, i))
        if ix[i].sign() < 0:
            apply("Z", (i,))
        if iz[i].sign() < 0:
            apply("X", (i,))

    for i in range(n):
        if ix[i] != PauliOp.single(n, i, "X") or iz[i] != PauliOp.single(n, i, "Z"):
            raise ValidationError("tableau reduction failed; images are not a symplectic basis")
    return [(_INVERSE[name], q) for name, q in reversed(ops)]


def unitary_from_tableau(tableau):
    tableau.validate()
    return word_to_unitary(tableau.n, synthesize(tableau))


def tableau_from_word(n, word):
    t = CliffordTableau.identity(n)
    ix, iz = list(t.image_x), list(t.image_z)
    for name, qubits in word:
        ix = [_conj_gate(p, name, qubits) for p in ix]
        iz = [_conj_gate(p, name, qubits) for p in iz]
    return CliffordTableau(n, ix, iz, check=False)


# -- mapping between stabilizer groups -------------------------------------------


def _complete_symplectic(n, stab):
    """Destabilizers ``d_i`` with ``<d_i, s_j> = delta_ij`` and mutually commuting."""
    vs = [_vec(p) for p in stab]
    ds = []
    for i in range(n):
        for d in range(1, 1 << (2 * n)):
            if all(_sym(n, d, vs[j]) == (1 if j == i else 0) for j in range(n)) and all(
                _sym(n, d, e) == 0 for e in ds
            ):
                ds.append(d)
                break
        else:
            raise ValidationError("could not complete the stabilizer generators to a symplectic basis")
    return [_unvec(n, d).hermitian() for d in ds]


def _as_signed(p):
    if p.sign() is None:
        raise ValidationError(f"{p} is not Hermitian")
    return p


def _check_stabilizer(n, gens):
    if len(gens) != n:
        raise ValidationError(f"need {n} generators, got {len(gens)}")
    for p in gens:
        if p.n != n:
            raise DimensionError("generator acts on the wrong number of qubits")
    if len(rref([_vec(p) for p in gens])) != n:
        raise ValidationError("generators are not independent")
    for a in range(n):
        for b in range(a + 1, n):
            if not commutes(gens[a], gens[b]):
                raise ValidationError("generators do not commute")


def stabilizer_tableau(gens):
    """Tableau of a Clifford sending ``+Z_i`` to the signed generator ``gens[i]``."""
    gens = [_as_signed(p) for p in gens]
    n = gens[0].n
    _check_stabilizer(n, gens)
    return CliffordTableau(n, _complete_symplectic(n, gens), gens)


def clifford_mapping(src, dst):
    """Tableau ``T`` with ``T(src[i]) = dst[i]`` including signs.

    ``src`` and ``dst`` are sequences of ``n`` independent commuting signed
    Hermitian Paulis (or :class:`PauliSubgroup` objects, read with ``+`` signs).
    """
    src = _gens(src)
    dst = _gens(dst)
    if len(src) != len(dst):
        raise ValidationError("source and destination ranks differ")
    a = stabilizer_tableau(src)
    b = stabilizer_tableau(dst)
    ua, ub = as_array(unitary_from_tableau(a)), as_array(unitary_from_tableau(b))
    m = ub @ ua.conj().T
    t = is_clifford(m)
    for s, d in zip(src, dst):
        if t.conjugate(s) != d:
            raise ValidationError("mapping construction failed")
    return t


def _gens(obj):
    from .pauli import PauliSubgroup

    if isinstance(obj, PauliSubgroup):
        return [g.hermitian() for g in obj.generators]
    return list(obj)


# -- enumeration -----------------------------------------------------------------


def _generator_set(n):
    out = []
    for i in range(n):
        out.append(as_array(apply_on(gates.h(), (i,), n)))
        out.append(as_array(apply_on(gates.s(), (i,), n)))
    for i in range(n):
        for j in range(n):
            if i != j:
                out.append(as_array(gates.cnot(i, j, n)))
    return out


@lru_cache(maxsize=None)
def _clifford_classes(n):
    gens = np.stack(_generator_set(n))
    start = np.eye(1 << n, dtype=complex)
    seen = {fingerprint(start)}
    reps = [start]
    frontier = [start]
    while frontier:
        block = np.stack(frontier)
        prods = np.matmul(gens[None, :, :, :], block[:, None, :, :]).reshape(-1, 1 << n, 1 << n)
        nxt = []
        for key, m in zip(fingerprint_batch(prods), prods):
            if key not in seen:
                seen.add(key)
                reps.append(m)
                nxt.append(m)
        frontier = nxt
    out = np.stack(reps)
    out.setflags(write=False)
    return out


def clifford_list(n):
    """One representative per global-phase class, in breadth-first order."""
    if not 1 <= n <= 2:
        raise CapabilityError("Clifford enumeration supports n <= 2")
    return [DenseUnitary(m, check=False) for m in _clifford_classes(n)]


def enumerate_clifford_mod_phase(n):
    if not 1 <= n <= 2:
        raise CapabilityError("Clifford enumeration supports n <= 2")
    for m in _clifford_classes(n):
        yield DenseUnitary(m, check=False)


def clifford_class_count(n):
    """``|Sp(2n, 2)| * 4**n``: Clifford classes modulo global phase."""
    out = 2 ** (n * n + 2 * n)
    for j in range(1, n + 1):
        out *= 4 ** j - 1
    return out


def clifford_group_order(n, phases=8):
    """Size of the Clifford group when global phases are restricted to ``phases``-th roots."""
    return clifford_class_count(n) * phases


# -- sampling -----------------------------------------------------------------------


def random_clifford_word(n, rng, length=None):
    length = 10 * n * n + 10 if length is None else length
    word = []
    for _ in range(length):
        r = rng.integers(3 if n > 1 else 2)
        q = int(rng.integers(n))
        if r == 0:
            word.append(("H", (q,)))
        elif r == 1:
            word.append(("S", (q,)))
        else:
            t = int(rng.integers(n - 1))
            word.append(("CX", (q, t + (t >= q))))
    for q in range(n):
        for name in ("X", "Z"):
            if rng.integers(2):
                word.append((name, (q,)))
    return word


def random_clifford(n, rng):
    """Random Clifford: uniform over classes for n <= 2, a random generator word otherwise."""
    if n <= 2:
        reps = _clifford_classes(n)
        return DenseUnitary(reps[int(rng.integers(len(reps)))], check=False)
    return word_to_unitary(n, random_clifford_word(n, rng))
