"""The sixteen acceptance checks, shared by the test suite and ``verify-all``."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import divisibility, eigen, graph, oldnew, operators, spinchain, tree
from .modular import sl2_order


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    seconds: float = 0.0
    budget: float = math.inf
    detail: dict = field(default_factory=dict)

    @property
    def in_budget(self) -> bool:
        return self.seconds <= self.budget

    def line(self) -> str:
        status = "PASS" if self.passed and self.in_budget else "FAIL"
        extra = "" if self.in_budget else f" over budget {self.budget:g} s"
        return f"[{status}] C{self.number:02d} {self.title} ({self.seconds:.2f} s{extra})"


CRITERIA = {}


def criterion(number: int, title: str, budget: float):
    def wrap(fn):
        def run() -> CriterionResult:
            t0 = time.perf_counter()
            passed, detail = fn()
            return CriterionResult(number, title, bool(passed), time.perf_counter() - t0, budget, detail)

        run.__name__ = fn.__name__
        CRITERIA[number] = run
        return run

    return wrap


def warmup():
    """Compile the eigensolver kernels once so timings exclude JIT cost."""
    eigen.eigvals_raw(np.array([[1.0, 2.0, 0.0], [0.5, 1.0, 3.0], [0.0, 1.0, 2.0]]))
    eigen.schur(np.eye(3))


T3_SPECTRUM = [1, 1, (-1 + 1j * math.sqrt(7)) / 4, (-1 - 1j * math.sqrt(7)) / 4, 0.5, 0.5, 0.5, 0, 0]
T2_MATRIX = np.array([[2, 0, 0, 0], [0, 1, 0, 1], [0, 0, 1, 1], [0, 1, 1, 0]])
N3_COUNTS = [0, 0, 2, 2, 2, 10, 18, 26, 66, 138, 242, 506, 1058, 2026, 4050, 8282, 16386, 32586]
N3_DEVIATIONS = [Fraction(-1, 4), Fraction(-1, 2), 1, 0, -2, 2, 2, -6, 2, 10, -14, -6, 34, -22, -46, 90, 2, -182]


@criterion(1, "spectrum of t(3) matches the closed form within 1e-8", 1.0)
def c01():
    vals = eigen.eigvals_raw(operators.build_T(3))
    dist, _ = eigen.match_multisets(vals, T3_SPECTRUM, 1e-8)
    return dist <= 1e-8, {"max_distance": dist}


@criterion(2, "t(2) matrix and its +-1/2 eigenvectors, exact", 1.0)
def c02():
    t = operators.build_T(2)
    matrix_ok = t.den == 2 and np.array_equal(t.num, T2_MATRIX)
    pairs = {Fraction(1, 2): [0, -1, 1, 0], Fraction(-1, 2): [0, -1, -1, 2]}
    vec_ok = all(np.array_equal(t.num @ np.array(v) * lam.denominator, np.array(v) * lam.numerator * t.den) for lam, v in pairs.items())
    return matrix_ok and vec_ok, {"matrix": matrix_ok, "eigenvectors": vec_ok}


@criterion(3, "divisible-walk counts and deviations for n = 3, k <= 17", 1.0)
def c03():
    rows = divisibility.deviation_report(3, 17)
    counts = [r.count for r in rows]
    devs = [r.deviation for r in rows]
    return counts == N3_COUNTS and devs == [Fraction(d) for d in N3_DEVIATIONS], {"k17": (counts[-1], devs[-1])}


def identity_suite(n: int) -> dict:
    """Exact operator identities at modulus n; every value must be True."""
    g = {w: operators.build_generator(n, w) for w in ("L", "R", "Linv", "Rinv", "J", "I")}
    one = g["I"].identity_like()
    T = operators.build_T(n)
    Yp, Ym = operators.build_Y_plus(n), operators.build_Y_minus(n)
    A, B = operators.build_A(n), operators.build_B(n)
    e = operators.even_operators(n)
    Tp, Ta, Jp, Bp, o = e["T+"], e["Tadj+"], e["J+"], e["B+"], e["T+"].identity_like()
    Tinv = 2 * Ta - Jp
    return {
        "8T*T = 1 + I + 6Y+": 8 * (T.adjoint() @ T) == one + g["I"] + 6 * Yp,
        "Y+^2 = Y+": Yp @ Yp == Yp,
        "Y-^2 = Y-": Ym @ Ym == Ym,
        "A^2 + B^2 = 1": A @ A + B @ B == one,
        "AB + BA = 0": (A @ B + B @ A).is_zero(),
        "J = L R^-1 L": g["J"] == g["L"] @ g["Rinv"] @ g["L"],
        "J = R^-1 L R^-1": g["J"] == g["Rinv"] @ g["L"] @ g["Rinv"],
        "J = I L^-1 R L^-1": g["J"] == g["I"] @ g["Linv"] @ g["R"] @ g["Linv"],
        "(R^-1 L)^3 = I": (g["Rinv"] @ g["L"]).power(3) == g["I"],
        "(L^-1 R)^3 = I": (g["Linv"] @ g["R"]).power(3) == g["I"],
        "T+ (2 T+* - J+) = 1": Tp @ Tinv == o,
        "2T+ + (T+)^-1 = -3 J+B+": 2 * Tp + Tinv == -3 * (Jp @ Bp),
        "J+B+ = B+J+": Jp @ Bp == Bp @ Jp,
        "(T-)* T- = 3/4 Y+-": e["Tadj-"] @ e["T-"] == Fraction(3, 4) * e["Yp-"],
        "T+ = 1/2 J+ (3Y+ - 1)": Tp == Fraction(1, 2) * (Jp @ (3 * e["Yp+"] - o)),
        "T+ = 1/2 (3Y- - 1) J+": Tp == Fraction(1, 2) * ((3 * e["Ym+"] - o) @ Jp),
    }


@criterion(4, "exact identity suite for n <= 12", 30.0)
def c04():
    failures = [(n, k) for n in range(1, 13) for k, ok in identity_suite(n).items() if not ok]
    return not failures, {"failures": failures}


@criterion(5, "t(6) is defective at 0", 5.0)
def c05():
    rep = eigen.jordan_defect(operators.build_T(6), 0.0)
    ok = rep.defective and rep.rank_shift_sq < rep.rank_shift
    return ok, {"algebraic": rep.algebraic, "geometric": rep.geometric, "rank": (rep.rank_shift, rep.rank_shift_sq)}


@criterion(6, "t~+(34) has real eigenvalues 0.819427 and 0.610182 with product 1/2", 120.0)
def c06():
    plus, _ = operators.parity_split(operators.build_t_tilde(34))
    spec = eigen.classify(eigen.eigenvalues(plus))
    gap = eigen.gap_real_values(spec)
    big = min(gap, key=lambda x: abs(x - 0.819427))
    small = min(gap, key=lambda x: abs(x - 0.610182))
    pairs, _ = eigen.circle_inversion_pairs(spec)
    ok = abs(big - 0.819427) <= 1e-5 and abs(small - 0.610182) <= 1e-5 and abs(big * small - 0.5) <= 1e-6
    return ok, {"values": (big, small), "product": big * small, "pairs": pairs}


@criterion(7, "nonreal spectrum of t+(n) on the circle, no Other tags, 2 <= n <= 40", 300.0)
def c07():
    worst, others = 0.0, {}
    for n in range(2, 41):
        plus, _ = operators.parity_split(operators.build_T(n))
        spec = eigen.classify(eigen.eigenvalues(plus))
        nonreal = spec.values[np.abs(spec.values.imag) > 1e-6]
        worst = max(worst, float(np.abs(np.abs(nonreal) - eigen.INV_SQRT2).max(initial=0.0)))
        if spec.tag_counts()["Other"]:
            others[n] = spec.tag_counts()["Other"]
    return worst <= 1e-6 and not others, {"max_circle_deviation": worst, "other": others}


@criterion(8, "gcd strata block-diagonalise t(n) exactly, n <= 30", 30.0)
def c08():
    sums_ok = all(oldnew.j2_divisor_sum(n) == n * n for n in range(1, 31))
    for n in range(1, 31):
        oldnew.stratify(n)  # raises on any mismatch
    return sums_ok, {"j2_sums": sums_ok}


@criterion(9, "spectral radius of frak t-(50) in (0.8, sqrt(3)/2]", 300.0)
def c09():
    rho = oldnew.assemble_frak_t(50, "-").spectrum().radius()
    return 0.8 < rho <= math.sqrt(3) / 2 + 1e-8, {"radius": rho}


@criterion(10, "congruence graph suite", 60.0)
def c10():
    g5 = graph.build_graph(5)
    spec = graph.graph_spectra(g5)
    checks = {
        "edges": g5.n_edges == 120,
        "vertices": g5.n_vertices == 80,
        "girth": graph.girth(g5) == 10,
        "connected": graph.components(g5)[0] == 1,
        "ramanujan": spec.ramanujan,
        "components": [graph.components(graph.build_graph(n))[0] for n in (9, 6, 8)] == [1, 2, 4],
        "edge_counts": all(graph.build_graph(n).n_edges == sl2_order(n) == _brute_sl2_count(n) for n in range(3, 25)),
    }
    return all(checks.values()), checks


def _brute_sl2_count(n: int) -> int:
    a = np.arange(n)
    ad = np.outer(a, a) % n  # ad[a, d]
    counts = np.bincount(ad.ravel(), minlength=n)  # pairs (a, d) by product
    # ad - bc = 1  <=>  bc = ad - 1
    return int(sum(counts[(p + 1) % n] * counts[p] for p in range(n)))


@criterion(11, "edge Laplacian equals the operator formula on even functions, n = 3, 4, 5", 60.0)
def c11():
    reports = [graph.edge_laplacian_identity(n) for n in (3, 4, 5)]
    return all(r["equal"] for r in reports), {r["n"]: r["equal"] for r in reports}


@criterion(12, "tree suite: spectrum, partial sums, resolvent, harmonic v_g", 120.0)
def c12():
    ev = tree.reduced_spectrum(12)
    lo, hi = tree.extreme_eigenvalues(tree.build_tree(12))
    spectrum_ok = np.abs(ev).max() <= tree.SQRT8 + 1e-9 and abs(hi - ev.max()) < 1e-8 and abs(lo - ev.min()) < 1e-8
    partial = [tree.partial_sum_norm(0.8, K)["error"] for K in range(0, 6)]
    res = tree.resolvent_check(3.0, range(1, 61))
    k_below = res.first_below(1e-6)
    crosscheck = tree.resolvent_check(3.0, range(1, 11), model="tree")
    cross_ok = all(abs(crosscheck.residuals[k] - res.residuals[k]) < 1e-12 for k in range(1, 11))
    decay_ok = all(r <= res.ratio_bound for r in res.ratios)
    hv = tree.harmonic_vg(10)
    checks = {
        "spectrum": bool(spectrum_ok),
        "partial_sums": max(partial) <= 1e-9,
        "resolvent_below_1e-6": k_below is not None,
        "resolvent_decay": decay_ok and cross_ok,
        "harmonic": hv["interior_dstar_zero"] and hv["norm2"] == 3 - Fraction(2, 2**10),
    }
    return all(checks.values()), {**checks, "resolvent_K": k_below, "residual_K12": res.residuals[12]}


@criterion(13, "Lemma F brute force, H = 40, all eight M", 60.0)
def c13():
    bad = tree.lemma_f_bruteforce(40)
    return not bad, {"violations": bad[:5], "matrices": len(tree.sl2z_ball(40))}


@criterion(14, "Dirichlet suite", 180.0)
def c14():
    ref = spinchain.zeta(2) / spinchain.zeta(3)
    z20, z10 = spinchain.Z_k(20, 3).real, spinchain.Z_k(10, 3).real
    stern_ok = all(spinchain.enumerate_h(k).as_dict() == spinchain.h_multiset_from_table(k).as_dict() for k in range(15))
    twisted = [abs(spinchain.Z_tilde_k(k, 2)) for k in (10, 14, 18)]
    checks = {
        "Z20(3)": abs(z20 - ref) < 0.01,
        "monotone": abs(z20 - ref) < abs(z10 - ref),
        "stern": stern_ok,
        "twisted_decreasing": twisted[0] > twisted[1] > twisted[2],
    }
    return all(checks.values()), {**checks, "Z20": z20, "target": ref, "Zt2": twisted}


@criterion(15, "ABT prediction matches the spectrum of T+ on N+, n = 3..6", 30.0)
def c15():
    reps = [eigen.abt_prediction(n) for n in (3, 4, 5, 6)]
    return all(r.ok for r in reps), {r.n: r.max_distance for r in reps}


@criterion(16, "QR eigenvalues of 200 random 6x6 integer matrices match exact charpoly roots", 30.0)
def c16():
    rng = np.random.default_rng(20240601)
    worst = 0.0
    for _ in range(200):
        a = rng.integers(-9, 10, size=(6, 6))
        d, _ = eigen.match_multisets(eigen.eigvals_raw(a), eigen.charpoly_roots(a), 1e-7)
        worst = max(worst, d)
    return worst <= 1e-7, {"max_distance": worst}


def run_all(numbers=None, echo=print) -> list[CriterionResult]:
    warmup()
    out = []
    for k in sorted(numbers or CRITERIA):
        res = CRITERIA[k]()
        if echo:
            echo(res.line())
        out.append(res)
    return out
