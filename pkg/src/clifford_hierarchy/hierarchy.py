"""Clifford-hierarchy classification and semi-Clifford structure.

``C_1`` is the set of unitaries proportional to a Pauli, and ``U`` lies in
``C_{k+1}`` when ``U P U^+`` lies in ``C_k`` for every Pauli ``P``. Levels are
found by a memoized recursion over all ``4**n`` phase-free Paulis.
"""
from dataclasses import dataclass, field
import itertools
import threading

import numpy as np

from . import _config
from .clifford import clifford_mapping, is_clifford, is_clifford_batch, random_clifford
from .exceptions import CapabilityError, ValidationError
from .matrix import (
    DenseUnitary,
    as_array,
    check_unitary,
    conjugate_batch,
    fingerprint,
    fingerprint_batch,
    is_diagonal,
)
from .pauli import (
    PauliOp,
    PauliSubgroup,
    decompose_batch,
    maximal_abelian_subgroups,
    pauli_stack,
    rref,
)

MAX_LEVEL_QUBITS = 3
MAX_KMAX = 10


@dataclass(frozen=True)
class HierarchyLevel:
    """Smallest ``k`` with ``U`` in ``C_k``, or ``None`` when ``k > k_max``."""

    level: object
    k_max: int

    @property
    def exact(self):
        return self.level is not None

    @property
    def beyond(self):
        return self.level is None

    def contains(self, k):
        """Whether ``U`` is in ``C_k`` (``None`` if undecidable within ``k_max``)."""
        if self.level is not None:
            return self.level <= k
        return False if k <= self.k_max else None

    def __str__(self):
        return str(self.level) if self.exact else f"beyond({self.k_max})"

    def to_dict(self):
        return {"level": self.level, "k_max": self.k_max, "label": str(self)}


class _LevelMemo:
    """Fingerprint -> ``("eq", k)`` or ``("gt", c)`` (level known to exceed ``c``)."""

    def __init__(self):
        self._data = {}
        self._lock = threading.Lock()

    def lookup(self, key, cap):
        entry = self._data.get(key)
        if entry is None:
            return "miss"
        kind, value = entry
        if kind == "eq":
            return value if value <= cap else None
        return None if value >= cap else "miss"

    def store(self, key, kind, value):
        with self._lock:
            old = self._data.get(key)
            if old is not None and old[0] == "eq":
                return
            if kind == "gt" and old is not None and old[1] >= value:
                return
            self._data[key] = (kind, value)

    def clear(self):
        with self._lock:
            self._data.clear()

    def __len__(self):
        return len(self._data)


_MEMO = _LevelMemo()


def clear_memo():
    _MEMO.clear()


def _n_of(m):
    return m.shape[0].bit_length() - 1


def _level_capped(m, key, cap, tol):
    """Exact level of ``m`` if it is at most ``cap``, else ``None``."""
    hit = _MEMO.lookup(key, cap)
    if hit != "miss":
        return hit
    n = _n_of(m)
    if decompose_batch(m[None], tol)[0][0]:
        _MEMO.store(key, "eq", 1)
        return 1 if cap >= 1 else None
    if cap <= 1:
        return None
    kids = conjugate_batch(m, pauli_stack(n))
    if decompose_batch(kids, tol)[0].all():
        _MEMO.store(key, "eq", 2)
        return 2
    if cap <= 2:
        _MEMO.store(key, "gt", 2)
        return None
    keys = fingerprint_batch(kids)
    cliff = is_clifford_batch(kids, tol)
    seen = set()
    worst = 2
    for kid, kkey, ok in zip(kids, keys, cliff):
        if ok or kkey in seen:
            continue
        seen.add(kkey)
        lv = _level_capped(kid, kkey, cap - 1, tol)
        if lv is None:
            _MEMO.store(key, "gt", cap)
            return None
        worst = max(worst, lv)
    _MEMO.store(key, "eq", worst + 1)
    return worst + 1


def _validate_gate(u, tol, max_qubits=MAX_LEVEL_QUBITS):
    m = as_array(u)
    check_unitary(m, tol)
    n = _n_of(m)
    if not 1 <= n <= max_qubits:
        raise CapabilityError(f"supports 1 <= n <= {max_qubits}, got n={n}")
    return m, n


def hierarchy_level(u, k_max=None, tol=None):
    """Classify ``U`` into the hierarchy, searching levels up to ``k_max``."""
    tol = _config.TOL if tol is None else tol
    k_max = _config.KMAX if k_max is None else k_max
    if not 2 <= k_max <= MAX_KMAX:
        raise CapabilityError(f"k_max must lie in 2..{MAX_KMAX}, got {k_max}")
    m, _ = _validate_gate(u, tol)
    return HierarchyLevel(_level_capped(m, fingerprint(m), k_max, tol), k_max)


def is_in_level(u, k, tol=None):
    """Membership test for ``C_k``."""
    tol = _config.TOL if tol is None else tol
    m, _ = _validate_gate(u, tol)
    if k < 1:
        raise ValidationError("levels start at 1")
    return _level_capped(m, fingerprint(m), k, tol) is not None


# -- semi-Clifford ---------------------------------------------------------------


@dataclass
class SemiCliffordWitness:
    """A maximal abelian subgroup ``G`` whose conjugate ``U G U^+`` is again one.

    ``image_generators[i]`` is the signed Hermitian Pauli ``U g_i U^+`` for the
    ``i``-th generator of ``source``. ``diagonalization`` holds
    ``(L1, V, L2)`` tableaux and diagonal once computed.
    """

    source: PauliSubgroup
    image: PauliSubgroup
    image_generators: tuple
    diagonalization: object = None

    def to_dict(self):
        out = {
            "source": [g.label() for g in self.source.generators],
            "image": [("+" if p.sign() > 0 else "-") + p.label() for p in self.image_generators],
        }
        if self.diagonalization is not None:
            v = as_array(self.diagonalization[1])
            out["diagonal_phases"] = [round(float(a), 12) for a in np.angle(np.diag(v) / v[0, 0])]
        return out


def pauli_preserving_set(u, tol=None):
    """Vectors ``x << n | z`` of the phase-free Paulis ``P`` with ``U P U^+`` a Pauli."""
    tol = _config.TOL if tol is None else tol
    m = as_array(u)
    n = _n_of(m)
    ok = decompose_batch(conjugate_batch(m, pauli_stack(n)), tol)[0]
    # pauli_stack is ordered by (x, z), so the row index is x << n | z
    return {int(i) for i in np.flatnonzero(ok)}


def _signed_image(m, g, tol):
    img = m @ g.to_matrix() @ m.conj().T
    ok, x, z, c = decompose_batch(img[None], tol)
    if not ok[0]:
        raise ValidationError("generator image is not a Pauli")
    p = PauliOp(g.n, int(x[0]), int(z[0]))
    rel = complex(c[0]) / (1j ** p.hermitian_phase())
    return p.hermitian(1 if rel.real > 0 else -1)


def _ordered_subgroups(n):
    z = PauliSubgroup.z_type(n)
    rest = [g for g in maximal_abelian_subgroups(n) if g != z]
    return [z] + rest


def semi_clifford_witnesses(u, tol=None):
    """All maximal abelian subgroups mapped by ``U`` to maximal abelian subgroups."""
    tol = _config.TOL if tol is None else tol
    m, n = _validate_gate(u, tol)
    good = pauli_preserving_set(m, tol)
    out = []
    for g in _ordered_subgroups(n):
        if g.vectors() <= good:
            out.append(_make_witness(m, g, tol))
    return out


def _make_witness(m, g, tol):
    n = g.n
    gens = [p.hermitian() for p in g.generators]
    imgs = tuple(_signed_image(m, p, tol) for p in gens)
    image = PauliSubgroup(n, [p.strip_phase() for p in imgs])
    return SemiCliffordWitness(g, image, imgs)


def is_semi_clifford(u, tol=None, diagonalize=True):
    """Witness that ``U`` is semi-Clifford, or ``None``.

    The ``Z``-type subgroup is tried first, then the remaining maximal
    abelian subgroups in canonical order.
    """
    tol = _config.TOL if tol is None else tol
    m, n = _validate_gate(u, tol)
    good = pauli_preserving_set(m, tol)
    for g in _ordered_subgroups(n):
        if g.vectors() <= good:
            w = _make_witness(m, g, tol)
            if not w.image.abelian or w.image.rank != n:
                raise ValidationError("conjugation failed to preserve commutation")
            if diagonalize:
                semi_clifford_diagonalize(m, w, tol)
            return w
    return None


def semi_clifford_diagonalize(u, w, tol=None):
    """Return Clifford ``L1``, diagonal ``V`` and Clifford ``L2`` with ``V = L1 U L2``.

    ``L2`` maps ``+Z_i`` to the source generators and ``L1`` maps the signed
    images back to ``+Z_i``.
    """
    tol = _config.TOL if tol is None else tol
    m = as_array(u)
    n = w.source.n
    zs = [PauliOp.single(n, i, "Z") for i in range(n)]
    src = [p.hermitian() for p in w.source.generators]
    for p, img in zip(src, w.image_generators):
        if _signed_image(m, p, tol) != img:
            raise ValidationError("witness does not match the gate")
    t2 = clifford_mapping(zs, src)
    t1 = clifford_mapping(list(w.image_generators), zs)
    l2 = as_array(t2.to_unitary())
    l1 = as_array(t1.to_unitary())
    v = l1 @ m @ l2
    if not is_diagonal(v, tol):
        raise ValidationError("sandwich is not diagonal; inconsistent witness")
    vd = DenseUnitary(np.diag(np.diag(v)), check=False)
    w.diagonalization = (t1, vd, t2)
    return DenseUnitary(l1, check=False), vd, DenseUnitary(l2, check=False)


# -- generalized semi-Clifford ----------------------------------------------------


@dataclass
class GeneralizedWitness:
    """Subgroup ``G`` whose eigenbasis is carried by ``U`` onto the eigenbasis of ``image``."""

    source: PauliSubgroup
    image: PauliSubgroup

    def to_dict(self):
        return {
            "source": [g.label() for g in self.source.generators],
            "image": [g.label() for g in self.image.generators],
        }


def eigenbasis(g):
    """Common eigenbasis of a maximal abelian subgroup, columns built from projector products."""
    n = g.n
    dim = 1 << n
    gens = [p.hermitian().to_matrix() for p in g.generators]
    cols = []
    for signs in itertools.product((1, -1), repeat=n):
        proj = np.eye(dim, dtype=complex)
        for s, gm in zip(signs, gens):
            proj = proj @ (np.eye(dim) + s * gm) / 2
        j = int(np.argmax(np.linalg.norm(proj, axis=0)))
        v = proj[:, j]
        cols.append(v / np.linalg.norm(v))
    return np.stack(cols, axis=1)


def is_generalized_semi_clifford(u, tol=None):
    """Witness that ``U`` maps the span of some maximal abelian subgroup to another, or ``None``."""
    tol = _config.TOL if tol is None else tol
    m, n = _validate_gate(u, tol)
    stack = pauli_stack(n)
    dim = 1 << n
    off = ~np.eye(dim, dtype=bool)
    for g in _ordered_subgroups(n):
        w = m @ eigenbasis(g)
        rep = np.matmul(np.matmul(w.conj().T, stack), w)
        diag_ok = np.all(np.abs(rep[:, off]) < 10 * tol, axis=1)
        vecs = [int(i) for i in np.flatnonzero(diag_ok)]
        # Paulis diagonal in a common basis commute, so at most 2**n of them
        if len(vecs) == dim:
            basis = rref(vecs)
            return GeneralizedWitness(g, PauliSubgroup.from_vectors(n, basis))
    return None


# -- diagonal gates ----------------------------------------------------------------


@dataclass(frozen=True)
class DiagonalProfile:
    """Phases ``A_jj / A_00 = exp(2 pi i m_j / 2**k)`` rounded to the grid."""

    k: int
    exponents: tuple
    residuals: tuple

    @property
    def max_residual(self):
        return max(self.residuals)

    def on_grid(self, tol=None):
        tol = _config.TOL if tol is None else tol
        return self.max_residual < tol


def diagonal_phase_profile(u, k=3, tol=None):
    """Nearest exponents on the ``2**k``-th-root grid and their angular residuals."""
    tol = _config.TOL if tol is None else tol
    m = as_array(u)
    if not is_diagonal(m, tol):
        raise ValidationError("diagonal_phase_profile needs a diagonal gate")
    d = np.diag(m) / m[0, 0]
    turns = np.angle(d) / (2 * np.pi) * (1 << k)
    ex = np.rint(turns)
    res = np.abs(turns - ex) * (2 * np.pi) / (1 << k)
    return DiagonalProfile(k, tuple(int(e) % (1 << k) for e in ex), tuple(float(r) for r in res))


def _c1_mask(psi, modulus):
    """Rows of ``psi`` (phase functions mod ``modulus``) that are Pauli-proportional."""
    d = (psi - psi[..., :1]) % modulus
    half = modulus // 2
    if modulus % 2:
        return np.all(d == 0, axis=-1)
    ok = np.all((d == 0) | (d == half), axis=-1)
    bits = (d == half).astype(np.int8)
    dim = psi.shape[-1]
    n = dim.bit_length() - 1
    r = np.arange(dim)
    lin = np.zeros_like(bits)
    for j in range(n):
        b = 1 << j
        lin ^= bits[..., b : b + 1] * ((r & b) > 0).astype(np.int8)
    return ok & np.all(lin == bits, axis=-1)


def phase_function_in_level(psi, modulus, level):
    """Vectorized diagonal-gate test.

    ``psi`` has shape ``(..., 2**n)`` with integer phases modulo ``modulus``
    (the gate is ``diag(exp(2 pi i psi / modulus))``). A diagonal gate lies in
    ``C_j`` iff every discrete derivative ``psi(r ^ a) - psi(r)`` lies in
    ``C_{j-1}``.
    """
    psi = np.asarray(psi) % modulus
    if level <= 1:
        return _c1_mask(psi, modulus)
    dim = psi.shape[-1]
    r = np.arange(dim)
    ok = np.ones(psi.shape[:-1], dtype=bool)
    for a in range(1, dim):
        deriv = (psi[..., r ^ a] - psi) % modulus
        ok &= phase_function_in_level(deriv, modulus, level - 1)
        if not ok.any():
            break
    return ok


def diagonal_level(u, k, tol=None, confirm=True):
    """Whether the diagonal gate ``U`` lies in ``C_k``.

    Requires the phases to sit on the ``2**k``-th-root grid and the
    phase-function test to pass; with ``confirm`` the general recursion must
    agree.
    """
    tol = _config.TOL if tol is None else tol
    prof = diagonal_phase_profile(u, k, tol)
    if not prof.on_grid(tol):
        return False
    fast = bool(phase_function_in_level(np.array(prof.exponents), 1 << k, k))
    if confirm:
        slow = is_in_level(u, k, tol)
        if slow != fast:
            raise ValidationError("diagonal fast path disagrees with the general recursion")
    return fast


def _generator_phases_c3(n=3):
    dim = 1 << n
    r = np.arange(dim)
    bit = [((r >> (n - 1 - i)) & 1) for i in range(n)]
    gens = []
    for i in range(n):
        gens.append(("T%d" % i, bit[i] % 8))
    for i, j in itertools.combinations(range(n), 2):
        gens.append(("CS%d%d" % (i, j), (2 * bit[i] * bit[j]) % 8))
    if n >= 3:
        triple = np.ones(dim, dtype=np.int64)
        for b in bit:
            triple = triple * b
        gens.append(("CCZ", (4 * triple) % 8))
    return gens


def _closure(gens, modulus):
    start = tuple([0] * len(gens[0]))
    seen = {start}
    frontier = [start]
    while frontier:
        nxt = []
        for p in frontier:
            for g in gens:
                q = tuple((a + b) % modulus for a, b in zip(p, g))
                if q not in seen:
                    seen.add(q)
                    nxt.append(q)
        frontier = nxt
    return seen


def _diag_matrices(psis, modulus):
    roots = np.exp(2j * np.pi * np.arange(modulus) / modulus)
    if modulus == 8:
        r = 1 / np.sqrt(2)
        roots = np.array([1, r + 1j * r, 1j, -r + 1j * r, -1, -r - 1j * r, -1j, r - 1j * r])
    vals = roots[np.asarray(psis)]
    b, dim = vals.shape
    out = np.zeros((b, dim, dim), dtype=complex)
    out[:, np.arange(dim), np.arange(dim)] = vals
    return out


@dataclass
class DiagonalScanReport:
    n: int
    scanned: int
    accepted: int
    generated: int
    sets_equal: bool
    grid_ok: bool
    max_residual: float
    closed: bool
    generators: list = field(default_factory=list)

    def to_dict(self):
        return dict(self.__dict__)


def enumerate_diagonal_c3(n=3, chunk=1 << 15, check_fingerprints=True):
    """Exhaustive scan of diagonal gates with ``A_00 = 1`` and eighth-root entries.

    Accepts every phase function in ``C_3`` via the derivative test and
    compares the accepted set with the group generated by ``T_i``, ``CS_ij``
    and ``CCZ``.
    """
    if n != 3:
        raise CapabilityError("the exhaustive diagonal scan is defined for n = 3")
    dim = 1 << n
    modulus = 8
    total = modulus ** (dim - 1)
    accepted = []
    place = modulus ** np.arange(dim - 2, -1, -1)
    for start in range(0, total, chunk):
        idx = np.arange(start, min(start + chunk, total))
        psi = np.zeros((idx.size, dim), dtype=np.int64)
        psi[:, 1:] = (idx[:, None] // place[None, :]) % modulus
        ok = phase_function_in_level(psi, modulus, 3)
        accepted.append(psi[ok])
    acc = np.concatenate(accepted)
    gens = _generator_phases_c3(n)
    group = _closure([tuple(int(v) for v in g) for _, g in gens], modulus)
    acc_set = {tuple(int(v) for v in row) for row in acc}
    equal = acc_set == group
    # group check: sums of accepted elements stay accepted (sampled pairs plus generators)
    rng = np.random.default_rng(0)
    pick = acc[rng.integers(len(acc), size=(4096, 2))]
    sums = (pick[:, 0] + pick[:, 1]) % modulus
    closed = all(tuple(int(v) for v in row) in acc_set for row in sums)
    closed &= all(tuple(int((-v) % modulus) for v in row) in acc_set for row in acc[:4096])
    mats = _diag_matrices(acc, modulus)
    turns = np.angle(mats[:, np.arange(dim), np.arange(dim)]) / (2 * np.pi) * modulus
    max_res = float(np.max(np.abs(turns - np.rint(turns))) * 2 * np.pi / modulus)
    if check_fingerprints:
        fa = set(fingerprint_batch(mats))
        gmats = _diag_matrices(np.array(sorted(group)), modulus)
        equal &= fa == set(fingerprint_batch(gmats))
    return DiagonalScanReport(
        n=n,
        scanned=total,
        accepted=len(acc_set),
        generated=len(group),
        sets_equal=bool(equal),
        grid_ok=max_res < 1e-9,
        max_residual=max_res,
        closed=bool(closed),
        generators=[name for name, _ in gens],
    )


def diagonal_c3_group(n=3):
    """Phase functions (mod 8) of the group generated by ``T_i``, ``CS_ij`` and ``CCZ``."""
    gens = _generator_phases_c3(n)
    return _closure([tuple(int(v) for v in g) for _, g in gens], 8)


# -- property harnesses ------------------------------------------------------------


def check_sandwich_invariance(u, trials=100, seed=0, k_max=None, tol=None):
    """Whether ``L1 U L2`` keeps the level of ``U`` for random Cliffords ``L1, L2``."""
    k_max = _config.KMAX if k_max is None else k_max
    base = hierarchy_level(u, k_max, tol)
    if base.beyond:
        raise ValidationError("sandwich invariance needs a gate inside the hierarchy")
    m = as_array(u)
    n = _n_of(m)
    rng = np.random.default_rng(seed)
    for _ in range(trials):
        l1 = as_array(random_clifford(n, rng))
        l2 = as_array(random_clifford(n, rng))
        if hierarchy_level(l1 @ m @ l2, k_max, tol).level != base.level:
            return False
    return True


def clifford_factor(m, r, tol=None):
    """Find a Clifford ``C`` with ``M ~ C R`` (``side="left"``) or ``M ~ R C`` (``"right"``).

    Returns ``(side, tableau)`` or ``None``.
    """
    a, b = as_array(m), as_array(r)
    left = a @ b.conj().T
    t = is_clifford(left, tol)
    if t is not None:
        return "left", t
    right = b.conj().T @ a
    t = is_clifford(right, tol)
    if t is not None:
        return "right", t
    return None


@dataclass
class ConjectureReport:
    n: int
    sampled: int
    level3: int
    counterexamples: list

    @property
    def holds(self):
        return not self.counterexamples

    def to_dict(self):
        return {"n": self.n, "sampled": self.sampled, "level3": self.level3,
                "counterexamples": len(self.counterexamples)}


def random_diagonal_c3(n, rng):
    """Random element of the diagonal ``C_3`` group generated by ``T``, ``CS`` and ``CCZ``."""
    gens = _generator_phases_c3(n)
    psi = np.zeros(1 << n, dtype=np.int64)
    for _, g in gens:
        psi = psi + int(rng.integers(8)) * g
    return DenseUnitary(_diag_matrices((psi % 8)[None], 8)[0], check=False)


def falsify_conjecture_1(sample_budget=200, seed=0, n=2, tol=None):
    """Search sampled ``C_3`` gates for one that is not semi-Clifford."""
    from . import gates

    rng = np.random.default_rng(seed)
    extra = [as_array(gates.w_k(2))] if n == 3 else []
    sampled = level3 = 0
    bad = []
    while sampled < sample_budget:
        kind = sampled % 3
        d = as_array(random_diagonal_c3(n, rng))
        if kind == 1:
            d = as_array(random_clifford(n, rng)) @ d @ as_array(random_clifford(n, rng)) @ as_array(
                random_diagonal_c3(n, rng)
            )
        elif kind == 2 and extra:
            d = extra[0] @ d
        u = as_array(random_clifford(n, rng)) @ d @ as_array(random_clifford(n, rng))
        sampled += 1
        if hierarchy_level(u, 3, tol).level != 3:
            continue
        level3 += 1
        if is_semi_clifford(u, tol) is None:
            bad.append(DenseUnitary(u, check=False))
    return ConjectureReport(n, sampled, level3, bad)
