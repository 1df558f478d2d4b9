"""Quasi-derivative first-order system on [0, gamma].

The state is ``(y, y', y'', y''' + 2 p y')`` and satisfies ``Y' = Q(x, k) Y``
with

    Q = [[0,       1,  0, 0],
         [0,       0,  1, 0],
         [0,     -2p,  0, 1],
         [k^4 - q, 0,  0, 0]]

Only ``k**4`` enters, so every quantity built from the propagator is a
function of ``lambda = k**4``. ``trace Q = 0`` gives ``det Y = 1``.

Index convention: the propagator ``Y`` keeps solutions in *columns*,
``Y(0) = I`` and ``data(gamma) = Y @ data(0)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

from .exceptions import ConfigurationError, IntegrationRangeError, StiffnessError
from .potentials import CoefficientPair

# J_{14} = 1, J_{23} = -1, J_{32} = 1, J_{41} = -1
J = np.array(
    [[0, 0, 0, 1],
     [0, 0, -1, 0],
     [0, 1, 0, 0],
     [-1, 0, 0, 0]],
    dtype=float,
)


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-11
    abs_tol: float = 1e-13
    max_step: float = math.inf
    min_step: float = 1e-12
    max_k_gamma: float = 30.0
    method: str = "DOP853"

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol", "max_step", "min_step", "max_k_gamma"):
            value = getattr(self, name)
            if not value > 0.0:
                raise ConfigurationError(f"{name} must be positive, got {value!r}")
        if self.rel_tol < 100 * np.finfo(float).eps:
            raise ConfigurationError("rel_tol must be at least 100 * machine epsilon")
        if not self.min_step < self.max_step:
            raise ConfigurationError("min_step must be smaller than max_step")
        if self.method not in ("DOP853", "RK45"):
            raise ConfigurationError(f"unsupported method {self.method!r}")

    @classmethod
    def from_dict(cls, data) -> "IntegratorConfig":
        known = {"rel_tol", "abs_tol", "max_step", "min_step", "max_k_gamma", "method"}
        unknown = set(data) - known
        if unknown:
            raise ConfigurationError(f"unknown integrator keys: {sorted(unknown)}")
        kwargs = {}
        for key, value in data.items():
            kwargs[key] = value if key == "method" else float(value)
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {
            "rel_tol": self.rel_tol,
            "abs_tol": self.abs_tol,
            "max_step": self.max_step if math.isfinite(self.max_step) else "inf",
            "min_step": self.min_step,
            "max_k_gamma": self.max_k_gamma,
            "method": self.method,
        }


DEFAULT_CONFIG = IntegratorConfig()


@dataclass(frozen=True)
class SpectralPoint:
    k: complex

    @property
    def lam(self) -> complex:
        return self.k**4


def system_matrix(x: float, k: complex, cp: CoefficientPair) -> np.ndarray:
    p, q = float(cp.p(x)), float(cp.q(x))
    Q = np.zeros((4, 4), dtype=complex)
    Q[0, 1] = Q[1, 2] = Q[2, 3] = 1.0
    Q[2, 1] = -2.0 * p
    Q[3, 0] = k**4 - q
    return Q


def exponential_data(mu: complex, x: float) -> np.ndarray:
    """Quasi-data of ``exp(mu x)`` where the coefficients vanish."""
    return mu ** np.arange(4) * np.exp(mu * x)


def _check_guard(cp, k, cfg):
    if abs(k) * cp.gamma > cfg.max_k_gamma:
        raise IntegrationRangeError(
            f"|k| * gamma = {abs(k) * cp.gamma:.3g} exceeds max_k_gamma = {cfg.max_k_gamma:g}; "
            "rescale the problem (smaller gamma or |k|) or raise the guard"
        )


def integrate_linear(rhs, x_from, x_to, y0, cfg: IntegratorConfig, breakpoints=(), max_step=math.inf, label=""):
    """Adaptive embedded RK solve of ``y' = rhs(x, y)``, split at ``breakpoints``.

    Shared by the fourth-order system and the second-order Jost problems.
    Raises :class:`StiffnessError` when the step size underflows.
    """
    lo, hi = sorted((x_from, x_to))
    pts = [lo, *[b for b in breakpoints if lo < b < hi], hi]
    if x_from > x_to:
        pts = pts[::-1]
    max_step = min(cfg.max_step, max_step)
    state = np.asarray(y0, dtype=complex)
    for a, b in zip(pts[:-1], pts[1:]):
        sol = solve_ivp(rhs, (a, b), state, method=cfg.method, rtol=cfg.rel_tol, atol=cfg.abs_tol, max_step=max_step)
        if sol.status != 0:
            raise StiffnessError(f"integration failed on [{a:g}, {b:g}] {label}: {sol.message}")
        steps = np.abs(np.diff(sol.t))
        if steps.size > 1 and steps[:-1].min() < cfg.min_step:
            raise StiffnessError(f"step size fell below min_step={cfg.min_step:g} on [{a:g}, {b:g}] {label}")
        state = sol.y[:, -1]
    return state


def propagate(cp: CoefficientPair, k: complex, x_from: float, x_to: float, initial, cfg: IntegratorConfig = DEFAULT_CONFIG):
    """Solve ``y' = Q y`` from ``x_from`` to ``x_to`` (either direction).

    ``initial`` is a length-4 vector or a 4 x m matrix of column solutions.
    The interval is split at coefficient breakpoints so the adaptive pair
    never steps across a jump.
    """
    k = complex(k)
    tol = 1e-12 * cp.gamma
    if min(x_from, x_to) < -tol or max(x_from, x_to) > cp.gamma + tol:
        raise ConfigurationError("propagation interval must lie inside [0, gamma]")
    _check_guard(cp, k, cfg)

    y0 = np.array(initial, dtype=complex)
    shape = y0.shape
    if shape[0] != 4 or y0.ndim > 2:
        raise ConfigurationError("initial data must have leading dimension 4")
    if x_from == x_to or not np.any(y0):
        return y0.copy()

    lam = k**4
    p, q = cp.p, cp.q
    ncol = 1 if y0.ndim == 1 else shape[1]

    def rhs(x, y):
        y = y.reshape(4, ncol)
        px, qx = p(x), q(x)
        return np.concatenate((y[1], y[2], y[3] - 2.0 * px * y[1], (lam - qx) * y[0]))

    state = integrate_linear(rhs, x_from, x_to, y0.reshape(-1), cfg, cp.breakpoints, cp.max_step, label=f"k={k}")
    return state.reshape(shape)


@dataclass(frozen=True)
class TransferMatrix:
    """Propagator over ``[0, gamma]``: column j is the data of phi_j at gamma.

    The matrix with the fundamental solutions in rows is ``Y.T``.
    """

    k: complex
    gamma: float
    Y: np.ndarray

    @property
    def lam(self) -> complex:
        return self.k**4

    @property
    def printed(self) -> np.ndarray:
        """Rows indexed by solution, columns by quasi-derivative order."""
        return self.Y.T

    def det_defect(self) -> float:
        return abs(np.linalg.det(self.Y) - 1.0)

    def symplectic_defect(self) -> float:
        return float(np.linalg.norm(self.Y.T @ J @ self.Y - J))


def transfer_matrix(cp: CoefficientPair, k: complex, cfg: IntegratorConfig = DEFAULT_CONFIG) -> TransferMatrix:
    Y = propagate(cp, k, 0.0, cp.gamma, np.eye(4, dtype=complex), cfg)
    return TransferMatrix(complex(k), cp.gamma, Y)


def free_transfer_matrix(k: complex, gamma: float) -> np.ndarray:
    """Closed form of the propagator for ``y'''' = k^4 y``."""
    k = complex(k)
    if k == 0:
        Y = np.zeros((4, 4))
        for row in range(4):
            for col in range(row, 4):
                Y[row, col] = gamma ** (col - row) / math.factorial(col - row)
        return Y.astype(complex)
    # Y[l, j] depends on j - l only:
    # g_0 = (ch + c)/2, g_1 = (sh + s)/2k, g_2 = (ch - c)/2k^2, g_3 = (sh - s)/2k^3,
    # g_{-m} = k^4 g_{4-m}; loses accuracy for |k| gamma << 1 (cancellation).
    z = k * gamma
    cp_, cm = (np.cosh(z) + np.cos(z)) / 2, (np.cosh(z) - np.cos(z)) / 2
    sp, sm = (np.sinh(z) + np.sin(z)) / 2, (np.sinh(z) - np.sin(z)) / 2
    g = {0: cp_, 1: sp / k, 2: cm / k**2, 3: sm / k**3, -1: k * sm, -2: k**2 * cm, -3: k**3 * sp}
    return np.array([[g[col - row] for col in range(4)] for row in range(4)], dtype=complex)


def jost_boundary_data(k: complex, gamma: float, which: int) -> np.ndarray:
    """Exact quasi-data of psi_1, psi_2 at gamma or psi_3, psi_4 at 0."""
    if which == 1:
        return exponential_data(-k, gamma)
    if which == 2:
        return exponential_data(1j * k, gamma)
    if which == 3:
        return exponential_data(-1j * k, 0.0)
    if which == 4:
        return exponential_data(k, 0.0)
    raise ValueError("which must be 1, 2, 3 or 4")


def jost_at(cp: CoefficientPair, k: complex, which, x: float, cfg: IntegratorConfig = DEFAULT_CONFIG) -> np.ndarray:
    """Quasi-data of Jost solutions at ``x`` in ``[0, gamma]``.

    psi_1 = exp(-k x), psi_2 = exp(i k x) to the right of the support;
    psi_3 = exp(-i k x), psi_4 = exp(k x) to the left. ``which`` may be an
    int or a sequence; a sequence gives a 4 x len(which) matrix.
    """
    k = complex(k)
    single = np.isscalar(which)
    idx = [which] if single else list(which)
    right = [j for j in idx if j in (1, 2)]
    left = [j for j in idx if j in (3, 4)]
    cols = {}
    if right:
        data = np.column_stack([jost_boundary_data(k, cp.gamma, j) for j in right])
        out = propagate(cp, k, cp.gamma, x, data, cfg)
        cols.update({j: out[:, n] for n, j in enumerate(right)})
    if left:
        data = np.column_stack([jost_boundary_data(k, cp.gamma, j) for j in left])
        out = propagate(cp, k, 0.0, x, data, cfg)
        cols.update({j: out[:, n] for n, j in enumerate(left)})
    result = np.column_stack([cols[j] for j in idx])
    return result[:, 0] if single else result


def jost_at_zero(cp: CoefficientPair, k: complex, which: int, cfg: IntegratorConfig = DEFAULT_CONFIG) -> np.ndarray:
    if which not in (1, 2):
        raise ValueError("which must be 1 or 2")
    return jost_at(cp, k, which, 0.0, cfg)
