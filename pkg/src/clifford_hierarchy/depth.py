"""Teleportation-depth engine.

Teleporting a gate ``A`` leaves a random correction ``A P A^+``; if that is
not Clifford it must itself be teleported, and so on. This module evaluates
the closed-form bounds for that process, solves the induced absorbing chain
exactly, and estimates it by Monte Carlo.
"""
from collections import Counter, deque
from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
import graphlib
import math

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components

from . import _config
from .clifford import is_clifford_batch
from .exceptions import CapabilityError, ResourceCapError, SchemeInapplicableError, ValidationError
from .hierarchy import is_semi_clifford, semi_clifford_diagonalize
from .matrix import DenseUnitary, as_array, check_unitary, conjugate_batch, fingerprint, fingerprint_batch
from .pauli import pauli_stack

EXACT_LIMIT = 512


class Variant(str, Enum):
    ONE_BIT = "one"
    TWO_BIT = "two"


@dataclass(frozen=True)
class TeleportScheme:
    """Correction model. ``subgroup`` fixes the one-bit correction set explicitly."""

    variant: Variant = Variant.TWO_BIT
    subgroup: object = None

    @classmethod
    def parse(cls, text):
        return cls(Variant(text))

    @property
    def name(self):
        return self.variant.value


TWO_BIT = TeleportScheme(Variant.TWO_BIT)
ONE_BIT = TeleportScheme(Variant.ONE_BIT)


def _scheme(s):
    if isinstance(s, TeleportScheme):
        return s
    return TeleportScheme(Variant(s))


# -- closed forms --------------------------------------------------------------------


def _check_nk(n, k):
    if n < 1 or k < 2:
        raise ValidationError("closed forms need n >= 1 and k >= 2")


def t1_closed_form(n, k):
    """``2**n (1 - (1 - 2**-n)**(k - 2))`` as an exact fraction."""
    _check_nk(n, k)
    q = 1 - Fraction(1, 2 ** n)
    return 2 ** n * (1 - q ** (k - 2))


def t2_closed_form(n, k):
    """``4**n (1 - (1 - 4**-n)**(k - 2))`` as an exact fraction."""
    _check_nk(n, k)
    q = 1 - Fraction(1, 4 ** n)
    return 4 ** n * (1 - q ** (k - 2))


def depth_series(p, k):
    """Expected steps when each step terminates with probability ``p``, capped at ``k - 2`` steps."""
    p = Fraction(p)
    if k <= 2:
        return Fraction(0)
    q = 1 - p
    body = sum((s * q ** (s - 1) for s in range(1, k - 2)), Fraction(0))
    return p * body + (k - 2) * q ** (k - 3)


def qft_depth_bound(n):
    """Sum of one-bit bounds of the Fourier-transform blocks, and ``n(n-1)/2 - 1``.

    The block with target ``j`` (``j = 2..n`` blocks of size ``j``) is a
    ``j``-qubit gate at level ``j + 1``.
    """
    if n < 2:
        raise ValidationError("qft_depth_bound needs n >= 2")
    rows = [(j, t1_closed_form(j, j + 1)) for j in range(2, n + 1)]
    total = sum((v for _, v in rows), Fraction(0))
    return {"n": n, "blocks": rows, "total": total, "reference": Fraction(n * (n - 1), 2) - 1}


def ucr_depth_bound(n, k):
    """Direct one-bit bound for an n-qubit uniformly controlled rotation at level ``k``.

    Tends to ``2**n`` as ``k`` grows and is at most ``k - 2``, so it grows
    linearly when ``k`` is proportional to ``n``.
    """
    return t1_closed_form(n, k)


def ucr_cnot_count(n):
    """CNOT cost of the standard uniformly-controlled-rotation circuit."""
    return 2 ** (n + 2) - 4 * n - 4


# -- one step ------------------------------------------------------------------------


def _n_of(m):
    return m.shape[0].bit_length() - 1


def _x_type_stack(n):
    dim = 1 << n
    return np.stack([pauli_stack(n)[a * dim] for a in range(dim)])


def _one_bit_successors(m, scheme, tol):
    n = _n_of(m)
    if scheme.subgroup is not None:
        corr = np.stack([p.to_matrix() for p in scheme.subgroup.elements()])
        return conjugate_batch(m, corr)
    w = is_semi_clifford(m, tol, diagonalize=False)
    if w is None:
        raise SchemeInapplicableError("one-bit teleportation needs a semi-Clifford gate")
    _, v, _ = semi_clifford_diagonalize(m, w, tol)
    return conjugate_batch(as_array(v), _x_type_stack(n))


def _successors(m, scheme, tol):
    """Raw successor matrices, each with equal probability."""
    if scheme.variant == Variant.TWO_BIT:
        return conjugate_batch(m, pauli_stack(_n_of(m)))
    return _one_bit_successors(m, scheme, tol)


def teleport_step(a, scheme=TWO_BIT, tol=None):
    """Outcome classes of one teleportation: ``[(DenseUnitary, Fraction), ...]``."""
    tol = _config.TOL if tol is None else tol
    scheme = _scheme(scheme)
    m = as_array(a)
    check_unitary(m, tol)
    if _n_of(m) > 3:
        raise CapabilityError("teleport_step supports n <= 3")
    kids = _successors(m, scheme, tol)
    keys = fingerprint_batch(kids)
    grouped = {}
    for key, kid in zip(keys, kids):
        if key in grouped:
            grouped[key][1] += 1
        else:
            grouped[key] = [kid, 1]
    total = len(kids)
    return [(DenseUnitary(kid, check=False), Fraction(c, total)) for kid, c in grouped.values()]


# -- exact chain ----------------------------------------------------------------------


@dataclass
class ChainSolution:
    """Expected teleportation steps from the root of the reachable class graph."""

    value: object
    exact: bool
    divergent: bool
    states: int
    transient: int
    max_depth: int
    expectations: dict = field(default_factory=dict, repr=False)
    graph: dict = field(default_factory=dict, repr=False)
    depth_of: dict = field(default_factory=dict, repr=False)
    matrices: dict = field(default_factory=dict, repr=False)
    root: bytes = b""

    @property
    def as_float(self):
        return None if self.value is None else float(self.value)

    def to_dict(self):
        out = {
            "value": None if self.value is None else float(self.value),
            "exact": self.exact,
            "divergent": self.divergent,
            "states": self.states,
            "transient": self.transient,
            "max_depth": self.max_depth,
        }
        if self.exact and self.value is not None:
            out["fraction"] = f"{self.value.numerator}/{self.value.denominator}"
        return out


def build_chain(a, scheme=TWO_BIT, state_cap=20000, k_cap=None, tol=None):
    """Reachable class graph: ``(graph, matrices, depth_of, root)``.

    ``graph[key]`` is ``None`` for absorbing (Clifford) states and otherwise a
    list of ``(successor_key, Fraction)``. ``k_cap`` bounds the depth of
    expansion; a state still non-Clifford at that depth raises
    :class:`ResourceCapError`, as does exceeding ``state_cap``.
    """
    tol = _config.TOL if tol is None else tol
    scheme = _scheme(scheme)
    m = as_array(a)
    check_unitary(m, tol)
    if _n_of(m) > 3:
        raise CapabilityError("chains support n <= 3")
    root = fingerprint(m)
    matrices = {root: m}
    depth_of = {root: 0}
    graph = {}
    if is_clifford_batch(m[None], tol)[0]:
        graph[root] = None
        return graph, matrices, depth_of, root
    queue = deque([root])
    while queue:
        key = queue.popleft()
        if key in graph:
            continue
        d = depth_of[key]
        if k_cap is not None and d >= k_cap:
            raise ResourceCapError(f"chain still growing after {k_cap} steps", len(matrices))
        kids = _successors(matrices[key], scheme, tol)
        keys = fingerprint_batch(kids)
        cliff = is_clifford_batch(kids, tol)
        counts = Counter(keys)
        total = len(kids)
        edges = []
        for kid, kkey, ok in zip(kids, keys, cliff):
            if kkey not in matrices:
                if len(matrices) >= state_cap:
                    raise ResourceCapError(f"state cap {state_cap} exceeded", len(matrices))
                matrices[kkey] = kid
                depth_of[kkey] = d + 1
                if ok:
                    graph[kkey] = None
                else:
                    queue.append(kkey)
        for kkey, c in counts.items():
            edges.append((kkey, Fraction(c, total)))
        graph[key] = edges
    return graph, matrices, depth_of, root


def _solve_block(block, graph, known):
    """Exact solution of ``E[s] = 1 + sum p E[t]`` on one strongly connected block."""
    idx = {s: i for i, s in enumerate(block)}
    size = len(block)
    rhs = []
    rows = []
    for s in block:
        row = {}
        b = Fraction(1)
        for t, p in graph[s]:
            if t in idx:
                row[idx[t]] = row.get(idx[t], Fraction(0)) - p
            else:
                b += p * known[t]
        row[idx[s]] = row.get(idx[s], Fraction(0)) + 1
        rows.append(row)
        rhs.append(b)
    if size <= EXACT_LIMIT:
        return _gauss_sparse(rows, rhs), True
    return _float_then_rational(rows, rhs, size)


def _gauss_sparse(rows, rhs):
    """Fraction Gaussian elimination on dict-of-columns rows."""
    size = len(rows)
    rows = [dict(r) for r in rows]
    rhs = list(rhs)
    for col in range(size):
        piv = next((r for r in range(col, size) if rows[r].get(col, 0) != 0), None)
        if piv is None:
            raise ValidationError("singular transient system")
        rows[col], rows[piv] = rows[piv], rows[col]
        rhs[col], rhs[piv] = rhs[piv], rhs[col]
        prow = rows[col]
        inv = 1 / prow[col]
        for r in range(size):
            if r == col:
                continue
            f = rows[r].get(col)
            if not f:
                continue
            f = f * inv
            target = rows[r]
            for c, v in prow.items():
                nv = target.get(c, 0) - f * v
                if nv:
                    target[c] = nv
                else:
                    target.pop(c, None)
            rhs[r] -= f * rhs[col]
    return [rhs[i] / rows[i][i] for i in range(size)]


def _float_then_rational(rows, rhs, size):
    from scipy.sparse.linalg import spsolve

    data, ri, ci = [], [], []
    for i, row in enumerate(rows):
        for j, v in row.items():
            ri.append(i)
            ci.append(j)
            data.append(float(v))
    a = csr_matrix((data, (ri, ci)), shape=(size, size))
    sol = spsolve(a, np.array([float(b) for b in rhs]))
    # every coefficient is a dyadic rational, so the exact answer usually has
    # a modest denominator; reconstruct and verify exactly
    guess = [Fraction(float(v)).limit_denominator(1 << 40) for v in sol]
    for row, b in zip(rows, rhs):
        if sum((v * guess[j] for j, v in row.items()), Fraction(0)) != b:
            return [float(v) for v in sol], False
    return guess, True


def _absorption_reachable(graph):
    """States from which some absorbing state is reachable."""
    rev = {}
    for s, edges in graph.items():
        for t, _ in edges or ():
            rev.setdefault(t, []).append(s)
    good = {s for s, e in graph.items() if e is None}
    queue = deque(good)
    while queue:
        t = queue.popleft()
        for s in rev.get(t, ()):
            if s not in good:
                good.add(s)
                queue.append(s)
    return good


def solve_chain(graph, root):
    """Expected absorption time of every state, solved block by block."""
    if graph[root] is None:
        return {root: Fraction(0)}, True, False
    good = _absorption_reachable(graph)
    trans = [s for s, e in graph.items() if e is not None]
    if any(s not in good for s in trans):
        return {}, False, True
    index = {s: i for i, s in enumerate(trans)}
    ri, ci = [], []
    for s in trans:
        for t, _ in graph[s]:
            if t in index:
                ri.append(index[s])
                ci.append(index[t])
    adj = csr_matrix((np.ones(len(ri)), (ri, ci)), shape=(len(trans), len(trans)))
    ncomp, labels = connected_components(adj, directed=True, connection="strong")
    blocks = [[] for _ in range(ncomp)]
    for s in trans:
        blocks[labels[index[s]]].append(s)
    deps = {c: set() for c in range(ncomp)}
    for s in trans:
        for t, _ in graph[s]:
            if t in index and labels[index[t]] != labels[index[s]]:
                deps[labels[index[s]]].add(labels[index[t]])
    known = {s: Fraction(0) for s, e in graph.items() if e is None}
    exact = True
    for c in graphlib.TopologicalSorter(deps).static_order():
        vals, ok = _solve_block(blocks[c], graph, known)
        exact &= ok
        for s, v in zip(blocks[c], vals):
            known[s] = v if ok else Fraction(v)
    return known, exact, False


def exact_expected_depth(a, scheme=TWO_BIT, state_cap=20000, k_cap=None, tol=None):
    """Expected teleportation steps until a Clifford correction, from the exact chain."""
    graph, matrices, depth_of, root = build_chain(a, scheme, state_cap, k_cap, tol)
    values, exact, divergent = solve_chain(graph, root)
    trans = sum(1 for e in graph.values() if e is not None)
    value = None if divergent else values[root]
    if value is not None and not exact:
        value = float(value)
    return ChainSolution(
        value=value,
        exact=exact and not divergent,
        divergent=divergent,
        states=len(graph),
        transient=trans,
        max_depth=max(depth_of.values()),
        expectations=values,
        graph=graph,
        depth_of=depth_of,
        matrices=matrices,
        root=root,
    )


# -- Monte Carlo -------------------------------------------------------------------------


@dataclass
class MonteCarloResult:
    mean: float
    stderr: float
    trials: int
    seed: int
    histogram: dict
    censored: int
    max_length: int

    def to_dict(self):
        return {
            "mean": self.mean,
            "stderr": self.stderr,
            "trials": self.trials,
            "seed": self.seed,
            "histogram": {str(k): v for k, v in sorted(self.histogram.items())},
            "censored": self.censored,
            "max_length": self.max_length,
        }


class _LazyChain:
    """State table grown on demand; successor ids are computed once per state."""

    def __init__(self, m, scheme, tol):
        self.scheme = scheme
        self.tol = tol
        self.keys = {}
        self.mats = []
        self.absorbing = []
        self.succ = []
        self._add(fingerprint(m), m, bool(is_clifford_batch(m[None], tol)[0]))

    def _add(self, key, m, absorbing):
        self.keys[key] = len(self.mats)
        self.mats.append(m)
        self.absorbing.append(absorbing)
        self.succ.append(None)
        return self.keys[key]

    def successors(self, i):
        if self.succ[i] is None:
            kids = _successors(self.mats[i], self.scheme, self.tol)
            keys = fingerprint_batch(kids)
            cliff = is_clifford_batch(kids, self.tol)
            ids = []
            for kid, key, ok in zip(kids, keys, cliff):
                j = self.keys.get(key)
                if j is None:
                    j = self._add(key, kid, bool(ok))
                ids.append(j)
            self.succ[i] = np.array(ids)
        return self.succ[i]


def monte_carlo_depth(a, scheme=TWO_BIT, trials=10000, seed=0, step_cap=64, tol=None):
    """Simulate teleportation trajectories; every trial stops at its first Clifford."""
    tol = _config.TOL if tol is None else tol
    if trials < 1:
        raise ValidationError("trials must be positive")
    scheme = _scheme(scheme)
    m = as_array(a)
    check_unitary(m, tol)
    chain = _LazyChain(m, scheme, tol)
    rng = np.random.default_rng(seed)
    state = np.zeros(trials, dtype=np.int64)
    steps = np.zeros(trials, dtype=np.int64)
    active = np.ones(trials, dtype=bool)
    if chain.absorbing[0]:
        active[:] = False
    for _ in range(step_cap):
        if not active.any():
            break
        live = np.flatnonzero(active)
        cur = state[live]
        nxt = np.empty_like(cur)
        width = len(chain.successors(int(cur[0])))
        draws = rng.integers(width, size=live.size)
        for s in np.unique(cur):
            sel = cur == s
            nxt[sel] = chain.successors(int(s))[draws[sel]]
        state[live] = nxt
        steps[live] += 1
        done = np.array([chain.absorbing[j] for j in nxt], dtype=bool)
        active[live[done]] = False
    censored = int(active.sum())
    mean = float(steps.mean())
    stderr = float(steps.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
    hist = Counter(int(v) for v in steps)
    return MonteCarloResult(mean, stderr, trials, seed, dict(hist), censored, int(steps.max()))


# -- reports and comparisons --------------------------------------------------------------


@dataclass
class DepthReport:
    gate: str
    scheme: str
    analytic_bound: object
    exact_expectation: object
    exact: bool
    divergent: bool
    states: int
    mc_mean: object = None
    mc_stderr: object = None
    trials: int = 0
    seed: int = 0
    max_trajectory: object = None
    censored: int = 0
    level: object = None

    def to_dict(self):
        def num(v):
            if isinstance(v, Fraction):
                return float(v)
            return v

        out = {
            "gate": self.gate,
            "scheme": self.scheme,
            "level": self.level,
            "analytic_bound": num(self.analytic_bound),
            "exact_expectation": "divergent" if self.divergent else num(self.exact_expectation),
            "exact": self.exact,
            "states": self.states,
            "mc_mean": self.mc_mean,
            "mc_stderr": self.mc_stderr,
            "trials": self.trials,
            "seed": self.seed,
            "max_trajectory": self.max_trajectory,
            "censored": self.censored,
        }
        if isinstance(self.exact_expectation, Fraction):
            f = self.exact_expectation
            out["exact_fraction"] = f"{f.numerator}/{f.denominator}"
        return out


def depth_report(a, name="gate", scheme=TWO_BIT, trials=0, seed=0, state_cap=20000, k_max=None, tol=None):
    """Closed-form bound (when the level is known), exact chain value and optional Monte Carlo."""
    from .hierarchy import hierarchy_level

    scheme = _scheme(scheme)
    m = as_array(a)
    n = _n_of(m)
    lv = hierarchy_level(m, k_max or _config.KMAX, tol)
    bound = None
    if lv.exact:
        bound = t1_closed_form(n, lv.level) if scheme.variant == Variant.ONE_BIT else t2_closed_form(n, lv.level)
    sol = exact_expected_depth(m, scheme, state_cap, tol=tol)
    rep = DepthReport(
        gate=name,
        scheme=scheme.name,
        analytic_bound=bound,
        exact_expectation=sol.value,
        exact=sol.exact,
        divergent=sol.divergent,
        states=sol.states,
        level=str(lv),
    )
    if trials:
        mc = monte_carlo_depth(m, scheme, trials, seed, tol=tol)
        rep.mc_mean, rep.mc_stderr = mc.mean, mc.stderr
        rep.trials, rep.seed = trials, seed
        rep.max_trajectory, rep.censored = mc.max_length, mc.censored
    return rep


def separate_one_bit_total(k, tol=None):
    """One-bit depth of the Toffoli plus that of ``diag(1, e^{i pi/2**(k-1)})``, teleported apart."""
    from . import gates

    tof = exact_expected_depth(gates.toffoli(), ONE_BIT, tol=tol).value
    v = exact_expected_depth(gates.s_k(k), ONE_BIT, tol=tol).value
    return tof + v


def compare_schemes(family="w_k", ks=range(3, 9), state_cap=200000, tol=None):
    """Direct two-bit teleport of the family member against the separate one-bit total."""
    from . import gates
    from .matrix import dagger

    if family not in ("w_k", "w_k_dagger"):
        raise ValidationError(f"unknown family {family!r}")
    rows = []
    crossover = None
    for k in ks:
        g = gates.w_k(k)
        if family == "w_k_dagger":
            g = dagger(g)
        direct = exact_expected_depth(g, TWO_BIT, state_cap, tol=tol).value
        sep = separate_one_bit_total(k, tol)
        better = "direct" if direct < sep else "separate"
        rows.append({"k": k, "direct": direct, "separate": sep, "better": better})
        if crossover is None and better == "separate":
            crossover = k
    return {"family": family, "rows": rows, "crossover": crossover}


def limit_sequence(family="w_k", ks=(12, 14, 16, 18, 20), state_cap=400000, tol=None):
    """Exact two-bit values along ``ks`` with the last value and the Cauchy gap."""
    from . import gates
    from .matrix import dagger

    vals = []
    for k in ks:
        g = gates.w_k(k)
        if family == "w_k_dagger":
            g = dagger(g)
        vals.append(exact_expected_depth(g, TWO_BIT, state_cap, tol=tol).value)
    gaps = [abs(float(b) - float(a)) for a, b in zip(vals, vals[1:])]
    return {"family": family, "ks": list(ks), "values": vals, "limit": vals[-1], "cauchy_gap": max(gaps) if gaps else 0.0}
