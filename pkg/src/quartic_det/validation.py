"""Acceptance suite: ten numerical checks with fixed tolerances and time budgets.

Each criterion returns a :class:`CriterionResult`; ``run_suite`` runs any
subset. Tolerances can be loosened or tightened through ``overrides`` for
fault-injection runs, and the integrator settings and matrix orientation
are passed through, so a bad configuration shows up as a named failure.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .determinant import det_halfline, det_line, laurent_at_zero, leading_prediction, minors, classify_zero_structure, _resolve
from .ode import DEFAULT_CONFIG, IntegratorConfig, J, transfer_matrix
from .parallel import pmap
from .potentials import CoefficientPair, free_pair, make_schrodinger_square, random_bump_pair
from .schrodinger import check_square_halfline, check_square_line
from .spectral import discretize_aux, discretize_full, localization, schrodinger_bound_state, smallest_eigenvalues
from .determinant import w_line_direct
from .zeros import SearchRegion, count_zeros, entire_target, locate_zeros

DEFAULT_TOLERANCES = {
    "free": 1e-8,
    "det": 1e-9,
    "symplectic": 1e-8,
    "Y_lambda": 1e-8,
    "D_lambda": 1e-7,
    "routes": 1e-6,
    "square": 1e-6,
    "laurent_match": 1e-4,
    "grid_factor": 10.0,
    "eigen_match": 1e-3,
    "wronskian": 1e-8,
}

BUDGETS = {1: 10.0, 2: 30.0, 3: 60.0, 4: 60.0, 5: 30.0, 6: 60.0, 7: 120.0, 8: 60.0, 9: 120.0, 10: 30.0}

# A generic smooth pair used for the pole-order and H1 checks.
GENERIC_PAIR = {
    "gamma": 1.0,
    "p": {"family": "poly_bump", "params": {"amplitude": 1.0, "start": 0.1, "stop": 0.8}},
    "q": {"family": "truncated_gaussian", "params": {"amplitude": 1.0, "center": 0.6, "width": 0.15}},
}
WELL_P = {"family": "poly_bump", "params": {"amplitude": 20.0}}


@dataclass
class CriterionResult:
    number: int
    name: str
    passed: bool
    detail: str
    elapsed: float = 0.0
    budget: float = 0.0
    data: dict = field(default_factory=dict, repr=False)

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.number:2d} {self.name}: {self.detail} ({self.elapsed:.1f}s / {self.budget:.0f}s)"

    def to_dict(self) -> dict:
        return {"number": self.number, "name": self.name, "passed": self.passed, "detail": self.detail}


@dataclass
class Context:
    cfg: IntegratorConfig = DEFAULT_CONFIG
    convention: str | None = None
    seed: int = 20240611
    tol: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    def random_pairs(self, n: int) -> list[CoefficientPair]:
        rng = np.random.default_rng(self.seed)
        return [random_bump_pair(rng) for _ in range(n)]

    def k_values(self) -> list[complex]:
        rng = np.random.default_rng(self.seed + 1)
        mags = np.linspace(0.4, 2.5, 8)
        args = rng.uniform(0.0, 2 * np.pi, 8)
        return [complex(m * np.exp(1j * a)) for m, a in zip(mags, args)]


def _rel(a, b):
    return abs(a - b) / max(abs(a), abs(b), 1e-300)


# ------------------------------------------------------------ criteria


def c1_free_identity(ctx: Context) -> CriterionResult:
    free = free_pair(1.0)
    ks = [m * np.exp(2j * np.pi * j / 8) for m in np.linspace(0.2, 3.0, 8) for j in range(8)]
    worst = {}
    for case, fn in (("halfline", det_halfline), ("line", det_line)):
        for route in ("direct", "minor"):
            errs = pmap(lambda k: abs(fn(free, k, route, ctx.cfg, ctx.convention).D - 1.0), ks)
            worst[f"{case}/{route}"] = max(errs)
    bad = {key: v for key, v in worst.items() if not v <= ctx.tol["free"]}
    detail = "max |D-1| " + ", ".join(f"{key}={v:.1e}" for key, v in worst.items())
    return CriterionResult(1, "free-case identity", not bad, detail, data=worst)


def c2_invariants(ctx: Context) -> CriterionResult:
    pairs, ks = ctx.random_pairs(20), ctx.k_values()

    def one(cp):
        out = []
        for k in ks:
            tm = transfer_matrix(cp, k, ctx.cfg)
            out.append((tm.det_defect(), tm.symplectic_defect()))
        return out

    vals = np.array([v for chunk in pmap(one, pairs) for v in chunk])
    d, s = vals[:, 0].max(), vals[:, 1].max()
    ok = d <= ctx.tol["det"] and s <= ctx.tol["symplectic"]
    return CriterionResult(2, "Liouville and symplectic invariants", ok, f"max |det Y - 1| = {d:.1e}, max ||Y^T J Y - J|| = {s:.1e}")


def c3_lambda(ctx: Context) -> CriterionResult:
    """Both halves are evaluated as stated; the D half is expected to fail.

    ``Y`` depends on ``k`` only through ``k^4``, but ``D`` carries the
    factor ``exp((i-1) k gamma) / k`` (half-line) that is not a function of
    ``k^4``, so ``D(ik) = D(k)`` fails for any nonzero coefficient pair.
    """
    pairs, ks = ctx.random_pairs(20), ctx.k_values()

    def one(cp):
        y_err, d_err = 0.0, 0.0
        for k in ks:
            y_err = max(y_err, float(np.linalg.norm(transfer_matrix(cp, 1j * k, ctx.cfg).Y - transfer_matrix(cp, k, ctx.cfg).Y)))
            for fn in (det_halfline, det_line):
                d_err = max(d_err, abs(fn(cp, 1j * k, "direct", ctx.cfg).D - fn(cp, k, "direct", ctx.cfg).D))
        return y_err, d_err

    res = np.array(pmap(one, pairs))
    y, d = res[:, 0].max(), res[:, 1].max()
    y_ok, d_ok = y <= ctx.tol["Y_lambda"], d <= ctx.tol["D_lambda"]
    detail = f"max ||Y(ik)-Y(k)|| = {y:.1e} ({'ok' if y_ok else 'FAIL'}), max |D(ik)-D(k)| = {d:.2e} ({'ok' if d_ok else 'FAIL'})"
    return CriterionResult(3, "lambda-analyticity", bool(y_ok and d_ok), detail, data={"Y": y, "D": d})


def c4_routes(ctx: Context) -> CriterionResult:
    pairs, ks = ctx.random_pairs(20), ctx.k_values()
    conv = _resolve(ctx.convention)

    def one(cp):
        worst = 0.0
        for k in ks:
            for fn in (det_halfline, det_line):
                a = fn(cp, k, "direct", ctx.cfg).D
                b = fn(cp, k, "minor", ctx.cfg, conv).D
                worst = max(worst, _rel(a, b))
        return worst

    worst = max(pmap(one, pairs))
    return CriterionResult(4, "route agreement", worst <= ctx.tol["routes"], f"max relative difference {worst:.1e} (convention {conv})")


def c5_square(ctx: Context) -> CriterionResult:
    p = {"family": "poly_bump", "params": {"amplitude": 3.0, "start": 0.1, "stop": 0.9, "power": 3}}
    cp = make_schrodinger_square(p, 1.0)
    ks = [m * np.exp(1j * a) for m, a in zip(np.linspace(0.3, 2.5, 16), np.linspace(0.05, 2 * np.pi - 0.3, 16))]
    half = max(pmap(lambda k: check_square_halfline(cp, k, ctx.cfg), ks))
    line = max(pmap(lambda k: check_square_line(cp, k, ctx.cfg), ks))
    ok = half <= ctx.tol["square"] and line <= ctx.tol["square"]
    return CriterionResult(5, "Schrodinger-square identities", ok, f"max residual halfline {half:.1e}, line {line:.1e}")


def c6_pole_order(ctx: Context) -> CriterionResult:
    cp = CoefficientPair.from_dict(GENERIC_PAIR)
    rt = ctx.tol["laurent_match"]
    reps = pmap(lambda case: laurent_at_zero(cp, case, cfg=ctx.cfg, convention=ctx.convention, match_rtol=rt), ("halfline", "line"))
    half, line = reps
    higher_h = max(abs(half.coefficients[-m]) for m in range(2, 7))
    higher_l = max(abs(line.coefficients[-m]) for m in (5, 6))
    ok = (
        half.pole_order == 1 and half.match and higher_h <= half.zero_threshold
        and line.pole_order == 4 and line.match and higher_l <= line.zero_threshold
    )
    detail = (
        f"halfline order {half.pole_order}, a-1 rel err {_rel(half.leading_coefficient, half.predicted_leading):.1e}, "
        f"max|a-m|(m>=2) {higher_h:.1e}; line order {line.pole_order}, a-4 rel err "
        f"{_rel(line.leading_coefficient, line.predicted_leading):.1e}, max|a-m|(m>=5) {higher_l:.1e}"
    )
    return CriterionResult(6, "pole order at zero", ok, detail)


def c7_h1(ctx: Context) -> CriterionResult:
    base = CoefficientPair.from_dict(GENERIC_PAIR)
    conv = _resolve(ctx.convention)

    def d34(c):
        return minors(transfer_matrix(base.scaled(c), 0.0, ctx.cfg), conv).halfline(3, 4).real

    # c = 0 is a trivial root (the free H1 has the zero mode y = x); bracket the next one
    cs = np.linspace(5.0, 80.0, 16)
    vals = [d34(c) for c in cs]
    j = next((i for i in range(len(cs) - 1) if vals[i] * vals[i + 1] < 0), None)
    if j is None:
        return CriterionResult(7, "H1 correspondence", False, "no sign change of the H1 minor on [5, 80]")
    cstar = brentq(d34, cs[j], cs[j + 1], xtol=1e-13)
    cp = base.scaled(cstar)
    rep = smallest_eigenvalues(discretize_aux(cp, "H1", 1024), 1, grid_error=True)
    lam, err = float(rep.eigenvalues[0]), float(rep.grid_error[0])
    off = smallest_eigenvalues(discretize_aux(base.scaled(0.98 * cstar), "H1", 1024), 1)
    lr = laurent_at_zero(cp, "halfline", cfg=ctx.cfg, convention=ctx.convention)
    a1 = abs(lr.coefficients[-1])
    ok = abs(lam) <= ctx.tol["grid_factor"] * err and a1 <= lr.zero_threshold and abs(off.eigenvalues[0]) > ctx.tol["grid_factor"] * err
    detail = (
        f"c* = {cstar:.8f}, |lambda_min| = {abs(lam):.1e} vs grid error {err:.1e}, "
        f"at 0.98 c*: {abs(off.eigenvalues[0]):.2e}; |a-1| = {a1:.1e} <= {lr.zero_threshold:.1e}"
    )
    return CriterionResult(7, "H1 correspondence", bool(ok), detail, data={"cstar": cstar})


def c8_nonvanishing(ctx: Context) -> CriterionResult:
    pairs = ctx.random_pairs(50)
    structs = pmap(lambda cp: classify_zero_structure(cp, "halfline", ctx.cfg, ctx.convention), pairs)
    worst = min(max(abs(v) for v in s.leading.values()) / s.threshold for s in structs)
    ok = all(s.nonvanishing_ok and max(abs(v) for v in s.leading.values()) > s.threshold for s in structs)
    return CriterionResult(8, "leading minors nonvanishing", ok, f"smallest max-minor / epsilon over 50 pairs = {worst:.2e}")


def c9_zero_eigenvalue(ctx: Context) -> CriterionResult:
    cp = make_schrodinger_square(WELL_P, 1.0)
    kappa = float(np.sqrt(-schrodinger_bound_state(cp, 6.0, 4000)))
    region = SearchRegion(1.0, 4.5, -0.5, 0.5)
    f = entire_target(cp, "line", ctx.cfg, ctx.convention)
    count = count_zeros(region, f)
    zeros = locate_zeros(region, f)
    located = sum(z.multiplicity for z in zeros)
    eig = [z for z in zeros if z.classification == "eigenvalue"]
    if not eig:
        return CriterionResult(9, "zero / eigenvalue correspondence", False, f"no eigenvalue-classified zero (count {count})")
    lam0 = eig[0].lam.real
    op = discretize_full(cp, "line", 6.0, 4096)
    rep = smallest_eigenvalues(op, 4, shift=kappa**4)
    loc = [localization(op, rep.vectors[:, j], -1.0, cp.gamma + 1.0) for j in range(rep.vectors.shape[1])]
    lam_fd = float(np.real(rep.eigenvalues[int(np.argmax(loc))]))
    rel = abs(lam_fd - lam0) / abs(lam0)
    ok = rel <= ctx.tol["eigen_match"] and count == located
    detail = (
        f"zero k0 = {eig[0].k.real:.8f}{eig[0].k.imag:+.1e}i, lambda0 = {lam0:.5f}, "
        f"localized discrete eigenvalue {lam_fd:.5f} (rel {rel:.1e}); count {count}, located {located}"
    )
    return CriterionResult(9, "zero / eigenvalue correspondence", bool(ok), detail)


def c10_wronskian(ctx: Context) -> CriterionResult:
    pairs, ks = ctx.random_pairs(5), ctx.k_values()

    def one(cp):
        return max(_rel(w_line_direct(cp, k, ctx.cfg, 0.0), w_line_direct(cp, k, ctx.cfg, 0.63 * cp.gamma)) for k in ks)

    worst = max(pmap(one, pairs))
    return CriterionResult(10, "Wronskian constancy", worst <= ctx.tol["wronskian"], f"max relative change between x = 0 and x = 0.63 gamma: {worst:.1e}")


CRITERIA = {
    1: c1_free_identity,
    2: c2_invariants,
    3: c3_lambda,
    4: c4_routes,
    5: c5_square,
    6: c6_pole_order,
    7: c7_h1,
    8: c8_nonvanishing,
    9: c9_zero_eigenvalue,
    10: c10_wronskian,
}


def run_criterion(number: int, ctx: Context | None = None) -> CriterionResult:
    ctx = ctx or Context()
    t0 = time.perf_counter()
    try:
        res = CRITERIA[number](ctx)
    except Exception as exc:  # a crash is a failure of that criterion, not of the suite
        res = CriterionResult(number, CRITERIA[number].__name__, False, f"error: {type(exc).__name__}: {exc}")
    res.elapsed = time.perf_counter() - t0
    res.budget = BUDGETS[number]
    if res.elapsed > res.budget:
        res.passed = False
        res.detail += f"; over time budget {res.budget:.0f}s"
    return res


def run_suite(ctx: Context | None = None, only=None) -> list[CriterionResult]:
    ctx = ctx or Context()
    numbers = sorted(CRITERIA) if only is None else sorted(only)
    return [run_criterion(n, ctx) for n in numbers]
