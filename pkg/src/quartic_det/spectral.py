"""Finite-difference eigenvalue oracle for the fourth-order problems.

Second-order central differences for ``y''''``, flux form for
``2 (p y')'``, and ghost-point closures for the boundary conditions.
Boundary sets on ``[0, gamma]``:

    H1: y(0) = y''(0) = 0,  y''(gamma) = y[3](gamma) = 0
    H2: y(0) = y''(0) = 0,  y'(gamma) = y[3](gamma) = 0
    H3: y''(0) = y[3](0) = 0,  y''(gamma) = y[3](gamma) = 0

with ``y[3] = y''' + 2 p y'``. The whole-operator discretisations truncate
the half-line / line to a finite interval with clamped (y = y' = 0) far ends.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .exceptions import ConfigurationError, IterationError
from .potentials import CoefficientPair

MIN_GRID = 64
AUX_OPERATORS = ("H1", "H2", "H3")

# Each boundary rule maps (expr, n_last, h, p_end) -> None by filling ghost
# or eliminated node expressions. Expressions are {unknown index: coeff}.


def _lin(*terms):
    out = {}
    for coef, expr in terms:
        for j, c in expr.items():
            out[j] = out.get(j, 0.0) + coef * c
    return out


def _left_simply_supported(expr, h, p0):
    # y(0) = 0 eliminates node 0; y''(0) = 0 reflects oddly
    expr[0] = {}
    expr[-1] = _lin((2.0, expr[0]), (-1.0, expr[1]))
    expr[-2] = _lin((2.0, expr[0]), (-1.0, expr[2]))


def _left_free(expr, h, p0):
    # y''(0) = 0, y'''(0) + 2 p y'(0) = 0 with central differences
    expr[-1] = _lin((2.0, expr[0]), (-1.0, expr[1]))
    c = 2.0 * h * h * p0
    expr[-2] = _lin((1.0, expr[2]), (-2.0, expr[1]), (2.0, expr[-1]), (c, expr[1]), (-c, expr[-1]))


def _left_clamped(expr, h, p0):
    expr[0] = {}
    expr[-1] = dict(expr[1])
    expr[-2] = dict(expr[2])


def _mirror(rule):
    """Right-end version of a left rule (x -> gamma - x flips odd derivatives)."""

    def right(expr, n, h, pn):
        local = _Reflected(expr, n)
        rule(local, h, pn)

    return right


class _Reflected:
    """View of node expressions indexed from the right end."""

    def __init__(self, expr, n):
        self.expr, self.n = expr, n

    def __getitem__(self, j):
        return self.expr[self.n - j]

    def __setitem__(self, j, value):
        self.expr[self.n - j] = value


def _right_clamped_sign_safe(expr, n, h, pn):
    _left_clamped(_Reflected(expr, n), h, pn)


def _right_h2(expr, n, h, pn):
    # y'(gamma) = 0 reflects evenly; y[3] = y''' + 2 p y' = 0 then reduces to
    # the even reflection of the second ghost as well
    view = _Reflected(expr, n)
    view[-1] = dict(view[1])
    view[-2] = dict(view[2])


# Reflection x -> gamma - x changes the sign of y' and y''' together, so
# y''' + 2 p y' = 0 keeps its form and the free/simply-supported rules mirror.
_RIGHT = {
    "free": _mirror(_left_free),
    "simply_supported": _mirror(_left_simply_supported),
    "clamped": _right_clamped_sign_safe,
    "h2": _right_h2,
}
_LEFT = {"free": _left_free, "simply_supported": _left_simply_supported, "clamped": _left_clamped}

BOUNDARY_SETS = {
    "H1": ("simply_supported", "free"),
    "H2": ("simply_supported", "h2"),
    "H3": ("free", "free"),
    "H_halfline": ("simply_supported", "clamped"),
    "H_line": ("clamped", "clamped"),
    "clamped_beam": ("clamped", "clamped"),
}


@dataclass
class GridOperator:
    a: float
    b: float
    n: int
    h: float
    matrix: sp.csr_matrix
    x: np.ndarray
    bc_tag: str
    rebuild: Callable[[int], "GridOperator"] | None = field(default=None, repr=False)

    def asymmetry(self) -> float:
        """``||A - A^T||_1 / ||A||_1``; nonzero only through the boundary closures."""
        A = self.matrix
        return float(sp.linalg.norm(A - A.T, 1) / sp.linalg.norm(A, 1))


def _assemble(a, b, n, p, q, bcs, tag, rebuild=None) -> GridOperator:
    """Operator ``y'''' + 2 (p y')' + q y`` on ``n`` intervals of ``[a, b]``."""
    if n < MIN_GRID:
        raise ConfigurationError(f"grid needs n >= {MIN_GRID} intervals, got {n}")
    left, right = bcs
    h = (b - a) / n
    nodes = a + h * np.arange(n + 1)
    expr = {j: {j: 1.0} for j in range(n + 1)}
    _LEFT[left](expr, h, float(p(a)))
    _RIGHT[right](expr, n, h, float(p(b)))

    unknowns = [j for j in range(n + 1) if expr[j] == {j: 1.0}]
    col = {j: c for c, j in enumerate(unknowns)}
    mids = a + h * (np.arange(-1, n + 1) + 0.5)
    pm = np.asarray(p(mids), dtype=float)
    # one-sided extension of p past the interval ends (the ghost region)
    if left == "free":
        pm[0] = 2.0 * float(p(a)) - pm[1]
    if right in ("free", "h2"):
        pm[-1] = 2.0 * float(p(b)) - pm[-2]
    pmid = lambda i: pm[i + 1]  # noqa: E731  p at x_i + h/2, i from -1
    qn = np.asarray(q(nodes), dtype=float)

    A = sp.lil_matrix((len(unknowns), len(unknowns)))
    h4, h2 = h**4, h**2
    for i in unknowns:
        stencil = {i - 2: 1.0 / h4, i - 1: -4.0 / h4, i: 6.0 / h4, i + 1: -4.0 / h4, i + 2: 1.0 / h4}
        pl, pr = pmid(i - 1), pmid(i)
        stencil[i - 1] += 2.0 * pl / h2
        stencil[i] += -2.0 * (pl + pr) / h2 + qn[i]
        stencil[i + 1] += 2.0 * pr / h2
        row = col[i]
        for j, c in stencil.items():
            for u, w in expr[j].items():
                A[row, col[u]] += c * w
    x = nodes[unknowns]
    return GridOperator(a, b, n, h, A.tocsr(), x, tag, rebuild)


def discretize_aux(cp: CoefficientPair, which: str, n: int) -> GridOperator:
    """``H1``, ``H2`` or ``H3`` on ``[0, gamma]`` with ``n`` intervals."""
    if which not in AUX_OPERATORS:
        raise ConfigurationError(f"which must be one of {AUX_OPERATORS}")
    return _assemble(0.0, cp.gamma, n, cp.p, cp.q, BOUNDARY_SETS[which], which, lambda m: discretize_aux(cp, which, m))


def discretize_full(cp: CoefficientPair, case: str, L: float, n: int) -> GridOperator:
    """``H`` truncated to ``[0, gamma + L]`` (half-line) or ``[-L, gamma + L]`` (line).

    The far ends are clamped; bound states decay exponentially, so their
    eigenvalues are insensitive to ``L`` once ``L`` is a few decay lengths.
    """
    if L < 3 * cp.gamma:
        raise ConfigurationError("truncation length L must be at least 3 * gamma")
    if case == "halfline":
        a, tag = 0.0, "H_halfline"
    elif case == "line":
        a, tag = -L, "H_line"
    else:
        raise ConfigurationError("case must be 'halfline' or 'line'")
    return _assemble(a, cp.gamma + L, n, cp.p, cp.q, BOUNDARY_SETS[tag], tag, lambda m: discretize_full(cp, case, L, m))


def clamped_beam(length: float, n: int) -> GridOperator:
    """``y'''' = lambda y`` with ``y = y' = 0`` at both ends (validation problem)."""
    zero = lambda x: np.zeros_like(np.asarray(x, dtype=float))  # noqa: E731
    return _assemble(0.0, length, n, zero, zero, BOUNDARY_SETS["clamped_beam"], "clamped_beam", lambda m: clamped_beam(length, m))


def schrodinger_operator(cp: CoefficientPair, a: float, b: float, n: int):
    """Dirichlet discretisation of ``-y'' - p y`` on ``[a, b]`` (interior nodes)."""
    h = (b - a) / n
    x = a + h * np.arange(1, n)
    main = 2.0 / h**2 - np.asarray(cp.p(x), dtype=float)
    off = -np.ones(n - 2) / h**2
    return sp.diags([off, main, off], [-1, 0, 1], format="csr"), x


@dataclass
class EigenReport:
    requested: int
    eigenvalues: np.ndarray
    residuals: np.ndarray
    vectors: np.ndarray = field(repr=False)
    iterations: int
    grid_error: np.ndarray | None = None


def smallest_eigenvalues(
    op,
    m: int = 1,
    shift: float = 0.0,
    tol: float = 1e-8,
    max_iter: int = 2000,
    grid_error: bool = False,
    seed: int = 0,
) -> EigenReport:
    """The ``m`` eigenvalues nearest ``shift`` by block inverse iteration.

    ``(A - shift I)`` is LU-factored once (sparse, banded); the block is
    re-orthonormalised every sweep and Ritz values come from the small
    projected matrix, which also deflates converged pairs. ``op`` is a
    :class:`GridOperator` or a sparse matrix. With ``grid_error`` the
    problem is re-solved on half the grid and ``|lam_n - lam_{n/2}| / 3``
    reported (second-order scheme).
    """
    if not 1 <= m <= 6:
        raise ConfigurationError("m must be between 1 and 6")
    A = op.matrix if isinstance(op, GridOperator) else sp.csr_matrix(op)
    size = A.shape[0]
    block = min(size, m + 3)
    norm_a = float(sp.linalg.norm(A, 1))
    lu = None
    # Factor slightly off the requested shift: structural eigenvalues (e.g. 0
    # for a free H1) sitting on the shift make the solve too ill-conditioned
    # for the rest of the block to converge.
    for attempt in range(4):
        sigma = shift - 1e-3 * (10.0**attempt) * max(1.0, abs(shift))
        try:
            lu = splu((A - sigma * sp.identity(size, format="csr")).tocsc())
            break
        except RuntimeError:
            continue
    if lu is None:
        raise IterationError("could not factor the shifted operator")

    rng = np.random.default_rng(seed)
    V, _ = np.linalg.qr(rng.standard_normal((size, block)))
    theta = np.zeros(m)
    resid = np.full(m, np.inf)
    previous = None
    for it in range(1, max_iter + 1):
        W = lu.solve(V)
        # Ritz values of the inverse are accurate relative to lambda - sigma,
        # unlike V^T A V whose rounding error scales with ||A||
        mu, vecs = np.linalg.eig(V.T @ W)
        order = np.argsort(-np.abs(mu))
        mu, vecs = mu[order], vecs[:, order]
        vals = sigma + 1.0 / mu
        X = V @ (vecs.real if np.allclose(vecs.imag, 0.0) else vecs)
        theta = vals[:m]
        Xm = X[:, :m]
        R = A @ Xm - Xm * theta
        resid = np.linalg.norm(R, axis=0) / np.linalg.norm(Xm, axis=0)
        # backward error of the LU solve limits them to about eps * ||A||
        floor = max(1e-12 * float(np.max(np.abs(theta))), 10 * np.finfo(float).eps * norm_a)
        settled = previous is not None and np.all(np.abs(theta - previous) <= floor)
        previous = theta
        if settled and np.all(resid <= tol * norm_a):
            break
        V, _ = np.linalg.qr(W)
    else:
        raise IterationError(f"inverse iteration did not converge; residuals {resid}, Ritz values {theta}")

    if np.all(np.abs(np.imag(theta)) <= 1e-8 * np.maximum(1.0, np.abs(theta))):
        theta = np.real(theta)
    report = EigenReport(m, np.asarray(theta), resid, np.asarray(Xm), it)
    if grid_error:
        if not (isinstance(op, GridOperator) and op.rebuild is not None):
            raise ConfigurationError("grid error estimate needs a GridOperator with a rebuild hook")
        coarse = smallest_eigenvalues(op.rebuild(op.n // 2), m, shift, tol, max_iter, False, seed)
        err = np.array([np.min(np.abs(coarse.eigenvalues - lam)) for lam in report.eigenvalues]) / 3.0
        report.grid_error = err
    return report


def localization(op: GridOperator, vector: np.ndarray, lo: float, hi: float) -> float:
    """Fraction of ``|v|^2`` on nodes inside ``[lo, hi]``."""
    w = np.abs(vector) ** 2
    inside = (op.x >= lo) & (op.x <= hi)
    return float(w[inside].sum() / w.sum())


def schrodinger_bound_state(cp: CoefficientPair, L: float, n: int) -> float:
    """Lowest eigenvalue of the Dirichlet-truncated ``-d^2 - p`` on ``[-L, gamma + L]``."""
    A, _ = schrodinger_operator(cp, -L, cp.gamma + L, n)
    shift = -float(np.max(np.abs(cp.p(np.linspace(0.0, cp.gamma, 513))))) - 1.0
    return float(smallest_eigenvalues(A, 1, shift=shift).eigenvalues[0])
