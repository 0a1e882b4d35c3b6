"""Reproduction checks shared by the ``verify`` subcommand and the acceptance tests.

Each ``criterion_*`` function returns a list of :class:`Check` records with
JSON-friendly details. Sample sizes come from a suite profile so the fast
suite finishes in minutes while the full suite runs every pin at its stated
size.
"""
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import depth, gates
from .clifford import clifford_list, random_clifford
from .hierarchy import (
    check_sandwich_invariance,
    enumerate_diagonal_c3,
    hierarchy_level,
    is_generalized_semi_clifford,
    is_semi_clifford,
    random_diagonal_c3,
    semi_clifford_diagonalize,
)
from .matrix import DenseUnitary, as_array, dagger


@dataclass
class Check:
    criterion: int
    name: str
    passed: object
    details: dict = field(default_factory=dict)

    @property
    def status(self):
        if self.passed is None:
            return "skipped"
        return "pass" if self.passed else "fail"

    def to_dict(self):
        return {"criterion": self.criterion, "name": self.name, "status": self.status, "details": self.details}


FULL = {
    "n2_samples": 500,
    "n3_samples": 200,
    "sandwich_trials": 100,
    "closure_pairs": 100,
    "single_qubit_gates": 1000,
    "diagonal_scan": True,
    "large_k": True,
    "mc_trials": 100000,
}

FAST = {
    "n2_samples": 100,
    "n3_samples": 40,
    "sandwich_trials": 20,
    "closure_pairs": 30,
    "single_qubit_gates": 200,
    "diagonal_scan": False,
    "large_k": False,
    "mc_trials": 20000,
}

SUITES = {"fast": FAST, "full": FULL}


def _frac(v):
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}"
    return v


def _num(v):
    return None if v is None else float(v)


# -- 1 -------------------------------------------------------------------------------


def level_pins():
    pins = [
        ("S", gates.s(), 2),
        ("T", gates.t(), 3),
        ("Toffoli", gates.toffoli(), 3),
        ("CCZ", gates.ccz(), 3),
        ("Lambda1(R2)", gates.lambda_controlled(1, gates.r_k(2)), 3),
        ("Lambda2(R2)", gates.lambda_controlled(2, gates.r_k(2)), 4),
    ]
    pins += [(f"s_k({k})", gates.s_k(k), k) for k in range(1, 7)]
    pins += [(f"w_k({k})", gates.w_k(k), k + 1) for k in (3, 4, 5)]
    return pins


def criterion_1(profile=FULL):
    out = []
    for name, u, want in level_pins():
        got = hierarchy_level(u, 6)
        out.append(Check(1, f"level {name}", got.level == want, {"expected": want, "got": str(got)}))
    got = hierarchy_level(gates.r_c3(), 6)
    out.append(Check(1, "level r_c3", got.beyond and got.k_max == 6, {"expected": "beyond(6)", "got": str(got)}))
    return out


# -- 2 -------------------------------------------------------------------------------


def _diagonal_samples(rng, count=12):
    out = [gates.t(), gates.ccz(), gates.cs(), gates.s_k(5)]
    for i in range(count):
        n = 1 + i % 3
        phases = np.exp(1j * rng.uniform(0, 2 * np.pi, size=1 << n))
        out.append(DenseUnitary(np.diag(phases)))
    return out


def criterion_2(profile=FULL):
    out = []
    w = is_semi_clifford(gates.lambda_controlled(1, gates.h()))
    out.append(Check(2, "Lambda1(H) semi-Clifford", w is not None, {"witness": w.to_dict() if w else None}))
    for k in (3, 4, 5):
        g = gates.w_k(k)
        semi = is_semi_clifford(g)
        gen = is_generalized_semi_clifford(g)
        out.append(
            Check(2, f"w_k({k}) generalized but not semi-Clifford", semi is None and gen is not None,
                  {"semi": semi is not None, "generalized": gen is not None})
        )
    rng = np.random.default_rng(7)
    diag_ok = True
    worst = 0.0
    witnesses = 0
    for u in _diagonal_samples(rng):
        w = is_semi_clifford(u)
        if w is None:
            diag_ok = False
            continue
        witnesses += 1
        _, v, _ = semi_clifford_diagonalize(u, w)
        worst = max(worst, _offdiag(v))
    out.append(Check(2, "diagonal gates semi-Clifford", diag_ok, {"gates": witnesses}))
    # every witness found above and in the sampled suite must diagonalize
    extra = [gates.lambda_controlled(1, gates.h()), gates.toffoli(), gates.w_k(2), gates.qft_block(2)]
    for u in extra:
        w = is_semi_clifford(u)
        if w is not None:
            _, v, _ = semi_clifford_diagonalize(u, w)
            worst = max(worst, _offdiag(v))
            witnesses += 1
    out.append(Check(2, "witnesses diagonalize", worst < 1e-8, {"witnesses": witnesses, "max_offdiag": worst}))
    return out


def _offdiag(v):
    m = as_array(v)
    return float(np.max(np.abs(m - np.diag(np.diag(m)))))


# -- 3 -------------------------------------------------------------------------------


def _random_diagonal_n2(rng):
    k = int(rng.integers(2, 6))
    mod = 1 << k
    c1, c2, c3 = (int(v) for v in rng.integers(mod, size=3))
    r = np.arange(4)
    x1, x2 = (r >> 1) & 1, r & 1
    psi = (c1 * x1 + c2 * x2 + 2 * c3 * x1 * x2) % mod
    return DenseUnitary(np.diag([gates.root_of_unity(int(p), mod) for p in psi]))


def sample_n2_gates(count, seed=11, max_level=5):
    """Clifford sandwiches of dyadic diagonal gates and their products, filtered to level <= max_level."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        d = as_array(_random_diagonal_n2(rng))
        u = as_array(random_clifford(2, rng)) @ d @ as_array(random_clifford(2, rng))
        if rng.integers(4) == 0:
            e = as_array(_random_diagonal_n2(rng))
            u = u @ as_array(random_clifford(2, rng)) @ e
        lv = hierarchy_level(u, max_level)
        if lv.exact:
            out.append((u, lv.level))
    return out


def sample_n3_gates(count, seed=13):
    """Level-3 three-qubit gates from sandwiches and products of diagonal C_3 gates."""
    rng = np.random.default_rng(seed)
    out = []
    while len(out) < count:
        d = as_array(random_diagonal_c3(3, rng))
        u = as_array(random_clifford(3, rng)) @ d @ as_array(random_clifford(3, rng))
        if rng.integers(3) == 0:
            u = u @ as_array(random_clifford(3, rng)) @ as_array(random_diagonal_c3(3, rng))
        if hierarchy_level(u, 3).level == 3:
            out.append((u, 3))
    return out


def criterion_3(profile=FULL):
    out = []
    for n, sampler, count in ((2, sample_n2_gates, profile["n2_samples"]), (3, sample_n3_gates, profile["n3_samples"])):
        samples = sampler(count)
        bad = 0
        levels = {}
        for u, lv in samples:
            levels[lv] = levels.get(lv, 0) + 1
            w = is_semi_clifford(u)
            if w is None:
                bad += 1
        out.append(
            Check(3, f"sampled n={n} gates semi-Clifford", bad == 0,
                  {"samples": len(samples), "counterexamples": bad,
                   "levels": {str(k): v for k, v in sorted(levels.items())}})
        )
    return out


# -- 4 -------------------------------------------------------------------------------


def criterion_4(profile=FULL):
    out = []
    trials = profile["sandwich_trials"]
    for name, u in (("T", gates.t()), ("Toffoli", gates.toffoli()), ("w_k(3)", gates.w_k(3))):
        ok = check_sandwich_invariance(u, trials=trials, seed=5, k_max=6)
        out.append(Check(4, f"sandwich invariance {name}", ok, {"trials": trials}))
    rng = np.random.default_rng(17)
    worst = 0
    for _ in range(profile["closure_pairs"]):
        a = as_array(random_diagonal_c3(3, rng))
        b = as_array(random_diagonal_c3(3, rng))
        for g in (a @ b, a.conj().T):
            lv = hierarchy_level(g, 4)
            worst = max(worst, lv.level if lv.exact else 99)
    out.append(Check(4, "diagonal C_3 closure", worst <= 3, {"pairs": profile["closure_pairs"], "max_level": worst}))
    return out


# -- 5 -------------------------------------------------------------------------------


def sample_single_qubit(count, seed=19, k_top=6):
    rng = np.random.default_rng(seed)
    cl = clifford_list(1)
    out = []
    for _ in range(count):
        k = int(rng.integers(1, k_top + 1))
        l1 = as_array(cl[int(rng.integers(24))])
        l2 = as_array(cl[int(rng.integers(24))])
        ph = np.exp(1j * rng.uniform(0, 2 * np.pi))
        out.append(ph * l1 @ as_array(gates.s_k(k)) @ l2)
    return out


def appendix_identities():
    """Maximum entry errors of the two single-qubit identities."""
    h, x, s = as_array(gates.h()), as_array(gates.x()), as_array(gates.s())
    err1 = 0.0
    for phi in np.linspace(0, 2 * np.pi, 17):
        lhs = as_array(gates.u_phi_alpha(phi, 0)) @ h @ x
        err1 = max(err1, float(np.max(np.abs(lhs - as_array(gates.gamma1(phi / 2))))))
    err2 = 0.0
    for k in range(2, 9):
        lhs = h @ s.conj().T @ as_array(gates.gamma2(np.pi / 2 ** k, 0)) @ s @ h @ x
        sk = as_array(gates.s_k(k))
        c = lhs[0, 0] / sk[0, 0]
        err2 = max(err2, float(np.max(np.abs(lhs - c * sk))))
    return err1, err2


def criterion_5(profile=FULL):
    from .gates import classify_single_qubit

    samples = sample_single_qubit(profile["single_qubit_gates"])
    disagree = 0
    for u in samples:
        cls = classify_single_qubit(u, 6)
        lv = hierarchy_level(u, 6)
        if (cls[1] if cls else None) != lv.level:
            disagree += 1
    out = [Check(5, "classify_single_qubit agrees with hierarchy_level", disagree == 0,
                 {"gates": len(samples), "disagreements": disagree})]
    e1, e2 = appendix_identities()
    out.append(Check(5, "U(phi,0) H X = Gamma_1(phi/2)", e1 < 1e-9, {"max_error": e1}))
    out.append(Check(5, "H P Gamma_2(pi/2^k,0) P X ~ S_k", e2 < 1e-9, {"max_error": e2}))
    return out


# -- 6 -------------------------------------------------------------------------------


def criterion_6(profile=FULL):
    if not profile["diagonal_scan"]:
        return [Check(6, "exhaustive diagonal C_3 scan", None, {"reason": "full suite only"})]
    rep = enumerate_diagonal_c3()
    ok = rep.sets_equal and rep.accepted == rep.generated
    return [
        Check(6, "diagonal scan equals generated group", ok,
              {"scanned": rep.scanned, "accepted": rep.accepted, "generated": rep.generated}),
        Check(6, "accepted phases on the pi/4 grid", rep.grid_ok, {"max_residual": rep.max_residual}),
    ]


# -- 7 -------------------------------------------------------------------------------


def criterion_7(profile=FULL):
    out = []
    pins = [
        ("w_k(3) two-bit", gates.w_k(3), Fraction(15, 8)),
        ("dagger(w_k(3)) two-bit", dagger(gates.w_k(3)), Fraction(3, 2)),
        ("r_c3 two-bit", gates.r_c3(), Fraction(11, 4)),
    ]
    for name, g, want in pins:
        sol = depth.exact_expected_depth(g, depth.TWO_BIT)
        out.append(Check(7, name, sol.exact and sol.value == want,
                         {"expected": _frac(want), "got": _frac(sol.value), "states": sol.states}))
    sep3 = depth.separate_one_bit_total(3)
    out.append(Check(7, "separate one-bit total (V in C_3)", sep3 == 2, {"expected": 2, "got": _frac(sep3)}))
    sep20 = depth.separate_one_bit_total(20)
    out.append(Check(7, "separate one-bit total (large k)", abs(float(sep20) - 3) <= 0.05,
                     {"expected": 3, "k": 20, "got": float(sep20)}))
    if not profile["large_k"]:
        out.append(Check(7, "large-k two-bit limits", None, {"reason": "full suite only"}))
        return out
    for family, target in (("w_k", 5.25), ("w_k_dagger", 5.5)):
        seq = depth.limit_sequence(family)
        vals = [float(v) for v in seq["values"]]
        out.append(Check(7, f"large-k limit {family}", abs(vals[-1] - target) <= 0.05,
                         {"expected": target, "ks": seq["ks"], "values": vals}))
    return out


# -- 8 -------------------------------------------------------------------------------


def criterion_8(profile=FULL):
    out = []
    ok = all(depth.t1_closed_form(2, k) == 4 * (1 - Fraction(3, 4) ** (k - 2)) for k in range(3, 13))
    out.append(Check(8, "t1(2,k) = 4(1-(3/4)^(k-2))", ok, {"k": [3, 12]}))
    gaps = {}
    for n in range(1, 5):
        gaps[f"t1 n={n}"] = float(2 ** n - depth.t1_closed_form(n, 20000))
        gaps[f"t2 n={n}"] = float(4 ** n - depth.t2_closed_form(n, 20000))
    mono = all(
        depth.t1_closed_form(n, k) < depth.t1_closed_form(n, k + 1) < 2 ** n
        and depth.t2_closed_form(n, k) < depth.t2_closed_form(n, k + 1) < 4 ** n
        for n in range(1, 5) for k in range(2, 30)
    )
    out.append(Check(8, "limits 2^n and 4^n", mono and max(gaps.values()) < 1e-9, {"gap": gaps}))
    rows = {}
    worst = 0.0
    for n in range(4, 11):
        b = depth.qft_depth_bound(n)
        diff = abs(float(b["total"] - b["reference"]))
        rows[str(n)] = [float(b["total"]), float(b["reference"])]
        worst = max(worst, diff)
    out.append(Check(8, "qft bound near n(n-1)/2 - 1", worst <= 1.0, {"rows": rows, "max_gap": worst}))
    return out


# -- 9 -------------------------------------------------------------------------------


def criterion_9(profile=FULL):
    out = []
    trials = profile["mc_trials"]
    cases = [
        ("T", gates.t(), 3),
        ("Toffoli", gates.toffoli(), 3),
        ("w_k(3)", gates.w_k(3), 4),
        ("r_c3", gates.r_c3(), None),
    ]
    for i, (name, g, level) in enumerate(cases):
        exact = depth.exact_expected_depth(g, depth.TWO_BIT).value
        mc = depth.monte_carlo_depth(g, depth.TWO_BIT, trials=trials, seed=1000 + i)
        gap = abs(mc.mean - float(exact))
        ok = gap <= 4 * mc.stderr if mc.stderr > 0 else gap == 0
        ok = ok and mc.censored == 0
        det = {"trials": trials, "exact": float(exact), "mean": mc.mean, "stderr": mc.stderr,
               "max_length": mc.max_length}
        out.append(Check(9, f"monte carlo {name}", ok, det))
        if level is not None:
            out.append(Check(9, f"trajectory length {name}", mc.max_length <= level - 2,
                             {"level": level, "max_length": mc.max_length}))
    return out


CRITERIA = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
}


def run_suite(suite="fast", only=None):
    """Run the checks of a suite profile; yields :class:`Check` records in criterion order."""
    profile = SUITES[suite]
    for cid, fn in CRITERIA.items():
        if only and cid not in only:
            continue
        yield from fn(profile)
