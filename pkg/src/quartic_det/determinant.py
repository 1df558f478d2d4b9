"""Jost Wronskians, the Fredholm determinant D(k), and its Laurent data at 0.

Two independent routes evaluate D:

* ``direct``: Jost solutions integrated through the support and combined in
  a Wronskian, ``D = -w / (2 k^2)`` (half-line) or ``D = -w / (16 i k^6)``
  (line).
* ``minor``: closed forms in the 2 x 2 minors of the transfer matrix.

Minor formulas are applied to the *propagator* ``Y`` (solutions in
columns). Applying the same formulas to ``Y.T`` fails already for the free
operator; both orientations stay available through ``convention``.
"""
from __future__ import annotations

import functools
import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .exceptions import DomainError, RadiusError
from .ode import DEFAULT_CONFIG, IntegratorConfig, TransferMatrix, jost_at, transfer_matrix
from .potentials import CoefficientPair, free_pair

CASES = ("halfline", "line")
ROUTES = ("direct", "minor")
CONVENTIONS = ("propagator", "printed")

PAIRS = tuple(itertools.combinations(range(1, 5), 2))
_PAIR_INDEX = {pair: n for n, pair in enumerate(PAIRS)}

# Laplace expansion of det[a, b, c, d] along the exponential columns
# a = (1, -k, k^2, -k^3), b = (1, ik, -k^2, -ik^3) gives, for the minor of
# rows (r, s) in the remaining columns, coefficient ROW_WEIGHT[r, s] * k^(8-r-s).
ROW_WEIGHT = {(3, 4): 1 + 1j, (2, 4): 2, (2, 3): 1 - 1j, (1, 4): 1 - 1j, (1, 3): -2j, (1, 2): -(1 + 1j)}
# 2x2 Wronskians of exp(-ikx), exp(kx) data at 0: coefficient * k^(l+m-2).
COL_WEIGHT = {(1, 2): 1 + 1j, (1, 3): 2, (1, 4): 1 - 1j, (2, 3): 1 - 1j, (2, 4): -2j, (3, 4): -(1 + 1j)}


def _derived_a_table():
    table = [[] for _ in range(9)]
    for rows, cols in itertools.product(PAIRS, PAIRS):
        n = sum(cols) - sum(rows) + 4
        table[n].append((rows, cols, ROW_WEIGHT[rows] * COL_WEIGHT[cols] / 2j))
    return table


A_TABLE = _derived_a_table()


def _printed_a_table():
    i = 1j
    spec = [
        {(34, 12): 1},
        {(34, 13): 1 - i, (24, 12): -(1 - i)},
        {(24, 13): 2 * i, (23, 12): -i, (14, 12): -i, (34, 14): -i, (34, 23): -i},
        {(13, 12): 1 + i, (23, 13): -(1 + i), (14, 13): -(1 + i), (24, 14): 1 + i, (24, 23): 1 + i, (34, 24): -(1 + i)},
        {(24, 24): 2, (12, 12): -1, (13, 13): 2, (23, 14): -1, (14, 14): -1, (23, 23): -1, (14, 23): -1, (34, 34): -1},
        {(24, 34): 1 - i, (12, 13): -(1 - i), (13, 14): 1 - i, (13, 23): 1 - i, (23, 24): -(1 - i), (14, 24): -(1 - i)},
        {(12, 14): i, (12, 23): i, (23, 34): i, (14, 34): i, (13, 24): -2 * i},
        {(12, 24): 1 + i, (13, 34): -(1 + i)},
        {(12, 34): 1},
    ]
    split = lambda ab: (ab // 10, ab % 10)  # noqa: E731
    return [[(split(r), split(c), w) for (r, c), w in terms.items()] for terms in spec]


# The coefficient table exactly as typeset for the line expansion. Its
# (2,4)- and (1,3)-row terms carry flipped signs; kept for regression only.
PRINTED_A_TABLE = _printed_a_table()


@dataclass(frozen=True)
class MinorSet:
    """All 36 2x2 minors of the chosen orientation of the transfer matrix.

    ``delta2((j, n), (l, m))`` is the determinant of rows ``{j, n}`` and
    columns ``{l, m}`` (1-based). The half-line family is
    ``halfline(j, l) = delta2((j, l), (2, 4))`` and ``phi = delta2((3, 4), (1, 2))``.
    """

    k: complex
    convention: str
    matrix: np.ndarray
    table: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        M = self.matrix
        table = np.empty((6, 6), dtype=complex)
        for (a, rows), (b, cols) in itertools.product(enumerate(PAIRS), enumerate(PAIRS)):
            (j, n), (l, m) = rows, cols
            table[a, b] = M[j - 1, l - 1] * M[n - 1, m - 1] - M[j - 1, m - 1] * M[n - 1, l - 1]
        object.__setattr__(self, "table", table)

    def delta2(self, rows, cols) -> complex:
        return self.table[_PAIR_INDEX[tuple(rows)], _PAIR_INDEX[tuple(cols)]]

    def halfline(self, j: int, l: int) -> complex:
        return self.delta2((j, l), (2, 4))

    @property
    def phi(self) -> complex:
        return self.delta2((3, 4), (1, 2))

    def a_coefficients(self, table=A_TABLE) -> np.ndarray:
        return np.array([sum(w * self.delta2(r, c) for r, c, w in terms) for terms in table])

    @property
    def A(self) -> np.ndarray:
        return self.a_coefficients()

    def halfline_bracket(self, k: complex) -> complex:
        """``(1+i)D34 + 2k D24 + (1-i)k^2 (D14 + D23) - 2i k^3 D13 - (1+i) k^4 D12``."""
        d = self.halfline
        return (
            (1 + 1j) * d(3, 4)
            + 2 * k * d(2, 4)
            + (1 - 1j) * k**2 * (d(1, 4) + d(2, 3))
            - 2j * k**3 * d(1, 3)
            - (1 + 1j) * k**4 * d(1, 2)
        )

    def plucker_defect(self) -> float:
        """Largest |p12 p34 - p13 p24 + p14 p23| over the column pairs."""
        worst = 0.0
        for cols in PAIRS:
            p = {rows: self.delta2(rows, cols) for rows in PAIRS}
            val = p[(1, 2)] * p[(3, 4)] - p[(1, 3)] * p[(2, 4)] + p[(1, 4)] * p[(2, 3)]
            worst = max(worst, abs(val))
        return worst


def minors(tm: TransferMatrix, convention: str = "propagator") -> MinorSet:
    if convention not in CONVENTIONS:
        raise ValueError(f"convention must be one of {CONVENTIONS}")
    M = tm.Y if convention == "propagator" else tm.Y.T
    return MinorSet(tm.k, convention, M)


@functools.lru_cache(maxsize=None)
def select_convention(gamma: float = 1.0) -> str:
    """Pick the orientation whose minor formulas reproduce the free operator.

    Requires ``w = -2 k^2`` (half-line) and ``D = 1`` (line) at a few
    generic ``k``. Raises if neither orientation passes.
    """
    free = free_pair(gamma)
    ks = [0.7 + 0.3j, 1.3 * np.exp(2.1j) / gamma, 0.45 / gamma]
    for convention in CONVENTIONS:
        ok = True
        for k in ks:
            tm = transfer_matrix(free, k)
            ms = minors(tm, convention)
            w = -k * np.exp((1j - 1) * k * gamma) * ms.halfline_bracket(k)
            d_line = _line_from_a(ms.A, k, gamma)
            ok &= abs(w + 2 * k**2) <= 1e-8 * abs(k) ** 2 and abs(d_line - 1) <= 1e-8
        if ok:
            return convention
    raise RuntimeError("no matrix orientation reproduces the free determinant")


def _resolve(convention):
    return select_convention() if convention is None else convention


@dataclass(frozen=True)
class DeterminantValue:
    k: complex
    D: complex
    route: str
    case: str


def w_halfline_direct(cp: CoefficientPair, k: complex, cfg: IntegratorConfig = DEFAULT_CONFIG) -> complex:
    """``psi_1 psi_2'' - psi_1'' psi_2`` at 0 (the quasi-data slot 2 is y'')."""
    P = jost_at(cp, k, (1, 2), 0.0, cfg)
    return complex(P[0, 0] * P[2, 1] - P[2, 0] * P[0, 1])


def w_halfline_minor(cp: CoefficientPair, k: complex, cfg: IntegratorConfig = DEFAULT_CONFIG, convention=None) -> complex:
    ms = minors(transfer_matrix(cp, k, cfg), _resolve(convention))
    return complex(-k * np.exp((1j - 1) * k * cp.gamma) * ms.halfline_bracket(k))


def w_line_direct(cp: CoefficientPair, k: complex, cfg: IntegratorConfig = DEFAULT_CONFIG, x: float = 0.0) -> complex:
    """4x4 Wronskian of psi_1..psi_4 evaluated at ``x`` in ``[0, gamma]``."""
    return complex(np.linalg.det(jost_at(cp, k, (1, 2, 3, 4), x, cfg)))


def _line_from_a(A, k, gamma):
    return -np.exp((1j - 1) * k * gamma) / (8 * k**4) * np.polyval(A[::-1], k)


def _check_k(k):
    if k == 0:
        raise DomainError("D has a pole at k = 0; use laurent_at_zero for the behaviour there")


def det_halfline(cp, k, route="direct", cfg: IntegratorConfig = DEFAULT_CONFIG, convention=None) -> DeterminantValue:
    k = complex(k)
    _check_k(k)
    if route == "direct":
        D = -w_halfline_direct(cp, k, cfg) / (2 * k**2)
    elif route == "minor":
        ms = minors(transfer_matrix(cp, k, cfg), _resolve(convention))
        D = np.exp((1j - 1) * k * cp.gamma) / (2 * k) * ms.halfline_bracket(k)
    else:
        raise ValueError(f"route must be one of {ROUTES}")
    return DeterminantValue(k, complex(D), route, "halfline")


def det_line(cp, k, route="direct", cfg: IntegratorConfig = DEFAULT_CONFIG, convention=None) -> DeterminantValue:
    k = complex(k)
    _check_k(k)
    if route == "direct":
        D = -w_line_direct(cp, k, cfg) / (16j * k**6)
    elif route == "minor":
        ms = minors(transfer_matrix(cp, k, cfg), _resolve(convention))
        D = _line_from_a(ms.A, k, cp.gamma)
    else:
        raise ValueError(f"route must be one of {ROUTES}")
    return DeterminantValue(k, complex(D), route, "line")


def determinant(cp, k, case="halfline", route="direct", cfg: IntegratorConfig = DEFAULT_CONFIG, convention=None) -> complex:
    """Plain complex value of D(k); dispatches on ``case``."""
    if case == "halfline":
        return det_halfline(cp, k, route, cfg, convention).D
    if case == "line":
        return det_line(cp, k, route, cfg, convention).D
    raise ValueError(f"case must be one of {CASES}")


POLE_BOUND = {"halfline": 1, "line": 4}
LAURENT_ORDERS = tuple(range(-6, 3))


@dataclass
class LaurentReport:
    case: str
    radius: float
    coefficients: dict
    pole_order: int
    zero_threshold: float
    n_nodes: int
    drift: float
    predicted_leading: complex
    leading_coefficient: complex
    match: bool
    zeros_inside: int

    def to_dict(self) -> dict:
        cplx = lambda z: [float(z.real), float(z.imag)]  # noqa: E731
        return {
            "case": self.case,
            "radius": self.radius,
            "coefficients": {str(m): cplx(a) for m, a in self.coefficients.items()},
            "pole_order": self.pole_order,
            "zero_threshold": self.zero_threshold,
            "n_nodes": self.n_nodes,
            "drift": self.drift,
            "predicted_leading": cplx(self.predicted_leading),
            "leading_coefficient": cplx(self.leading_coefficient),
            "match": self.match,
            "zeros_inside": self.zeros_inside,
        }


def leading_prediction(cp, case, cfg=DEFAULT_CONFIG, convention=None) -> complex:
    """Coefficient of k^-1 (half-line) or k^-4 (line) predicted from minors at 0."""
    ms = minors(transfer_matrix(cp, 0.0, cfg), _resolve(convention))
    if case == "halfline":
        return complex((1 + 1j) * ms.halfline(3, 4) / 2)
    return complex(-ms.phi / 8)


def laurent_at_zero(
    cp: CoefficientPair,
    case: str = "halfline",
    r: float | None = None,
    cfg: IntegratorConfig = DEFAULT_CONFIG,
    *,
    route: str = "direct",
    convention=None,
    n_nodes: int = 256,
    max_nodes: int = 4096,
    drift_tol: float = 1e-10,
    rel_eps: float = 1e-7,
    match_rtol: float = 1e-4,
) -> LaurentReport:
    """Laurent coefficients of D at 0 by the trapezoid rule on ``|k| = r``.

    ``a_m = mean(D(k_n) k_n^-m)`` over equispaced nodes. The node count
    doubles (reusing old nodes) until the scaled coefficients stop moving.
    """
    if case not in CASES:
        raise ValueError(f"case must be one of {CASES}")
    r = 0.3 / cp.gamma if r is None else float(r)
    if not r > 0:
        raise ValueError("radius must be positive")
    power = POLE_BOUND[case]

    def values(n, offset):
        theta = 2 * np.pi * (np.arange(n) + offset) / n
        ks = r * np.exp(1j * theta)
        return ks, np.array([determinant(cp, k, case, route, cfg, convention) for k in ks])

    ks, Ds = values(n_nodes, 0.0)
    orders = np.array(LAURENT_ORDERS)

    def coeffs(ks, Ds):
        return np.array([np.mean(Ds * ks ** (-m)) for m in orders])

    a = coeffs(ks, Ds)
    drift = math.inf
    n = n_nodes
    while True:
        scale_D = np.max(np.abs(Ds))
        if n * 2 > max_nodes:
            break
        new_ks, new_Ds = values(n, 0.5)
        ks = np.concatenate((ks, new_ks))
        Ds = np.concatenate((Ds, new_Ds))
        n *= 2
        a_new = coeffs(ks, Ds)
        drift = float(np.max(np.abs(a_new - a) * r**orders) / scale_D)
        a = a_new
        if drift < drift_tol:
            break
    if drift >= drift_tol:
        raise RadiusError(f"Laurent coefficients drift {drift:.2e} at {n} nodes on radius {r:g}")

    target = ks**power * Ds
    eps = rel_eps * float(np.max(np.abs(target)))
    coefficients = {int(m): complex(v) for m, v in zip(orders, a)}
    pole_order = max((m for m in range(1, 7) if abs(coefficients[-m]) > eps), default=0)

    order_ix = np.argsort(np.angle(ks))
    zeros_inside = _winding(target[order_ix])

    predicted = leading_prediction(cp, case, cfg, convention)
    leading = coefficients[-power]
    if abs(predicted) > eps:
        match = abs(leading - predicted) <= match_rtol * abs(predicted)
    else:
        match = abs(leading) <= eps
    return LaurentReport(case, r, coefficients, pole_order, eps, n, drift, predicted, leading, bool(match), zeros_inside)


def _winding(values) -> int:
    phase = np.unwrap(np.angle(np.append(values, values[0])))
    return int(round((phase[-1] - phase[0]) / (2 * np.pi)))


@dataclass
class ZeroStructure:
    case: str
    leading: dict
    vanishing: dict
    zero_eigenvalue: dict
    pole_order: int
    entire_class: str
    nonvanishing_sum: float
    nonvanishing_ok: bool
    threshold: float


def classify_zero_structure(cp: CoefficientPair, case: str = "halfline", cfg: IntegratorConfig = DEFAULT_CONFIG, convention=None, rel_eps: float = 1e-7) -> ZeroStructure:
    """Leading minors at k = 0 and the pole order of D they predict.

    Half-line: D ~ ((1+i) D34(0) + 2k D24(0) + (1-i) k^2 (D14(0) + D23(0))) / 2k.
    D34(0) = 0 iff 0 is an eigenvalue of H1, D24(0) = 0 iff of H2.
    Line: D ~ -Phi(0) / 8k^4, Phi(0) = 0 iff 0 is an eigenvalue of H3;
    when Phi(0) vanishes the first nonzero A_n(0) sets the order 4 - n.
    """
    tm = transfer_matrix(cp, 0.0, cfg)
    ms = minors(tm, _resolve(convention))
    eps = rel_eps * max(1.0, float(np.max(np.abs(tm.Y))) ** 2)
    if case == "halfline":
        leading = {
            "D34": ms.halfline(3, 4),
            "D24": ms.halfline(2, 4),
            "D14+D23": ms.halfline(1, 4) + ms.halfline(2, 3),
        }
        vanish = {name: abs(v) <= eps for name, v in leading.items()}
        zero_eig = {"H1": vanish["D34"], "H2": vanish["D24"]}
        if not vanish["D34"]:
            pole, cls = 1, "kD entire, D not entire"
        elif not vanish["D24"]:
            pole, cls = 0, "D entire, k^-1 D not entire"
        else:
            pole, cls = -1, "k^-1 D entire"
        total = sum(abs(v) for v in leading.values())
    elif case == "line":
        # the A_n are functions of k^4, so A_n(0) k^n are the Taylor terms of
        # the bracket up to k^3 and the first nonvanishing one fixes the order
        A = ms.A
        leading = {"Phi": ms.phi, **{f"A{n}": A[n] for n in range(1, len(A))}}
        vanish = {name: abs(v) <= eps for name, v in leading.items()}
        zero_eig = {"H3": vanish["Phi"]}
        first = next((n for n in range(len(A)) if abs(A[n]) > eps), len(A))
        pole = 4 - first
        cls = "k^4 D entire, k^3 D not entire" if pole == 4 else f"k^{pole} D entire"
        # the half-line triple is also recorded for the line operator
        total = abs(ms.halfline(3, 4)) + abs(ms.halfline(2, 4)) + abs(ms.halfline(1, 4) + ms.halfline(2, 3))
    else:
        raise ValueError(f"case must be one of {CASES}")
    return ZeroStructure(case, leading, vanish, zero_eig, pole, cls, float(total), total > eps, eps)
