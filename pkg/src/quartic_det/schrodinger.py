"""Second-order Jost solutions for ``h = -d^2/dx^2 - p``.

When the fourth-order operator is ``h^2`` (``q = p**2 + p''``) its
determinant factorises through these:

    half-line:  D(k) = psi(0, ik) psi(0, k)
    line:       D(k) = i / (4 k^2) {psi_+, psi_-}(k) {psi_+, psi_-}(ik)

with ``{f, g} = f g' - f' g``. Both sides are computed by independent
integrations, which makes the identities a check on the determinant code.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .determinant import det_halfline, det_line
from .exceptions import ConfigurationError
from .ode import DEFAULT_CONFIG, IntegratorConfig, _check_guard, integrate_linear
from .potentials import SQUARE, CoefficientPair


@dataclass(frozen=True)
class SchrodingerJost:
    k: complex
    value_at_0: complex
    derivative_at_0: complex
    side: str


def _propagate2(cp: CoefficientPair, k: complex, x_from: float, x_to: float, data, cfg):
    k = complex(k)
    _check_guard(cp, k, cfg)
    z = k * k
    p = cp.p

    def rhs(x, y):
        return np.array([y[1], -(z + p(x)) * y[0]])

    return integrate_linear(rhs, x_from, x_to, np.asarray(data, dtype=complex), cfg, cp.p.breakpoints, cp.p.max_step)


def jost_plus_at(cp: CoefficientPair, k: complex, x: float, cfg: IntegratorConfig = DEFAULT_CONFIG) -> np.ndarray:
    """``(psi_+, psi_+')`` at ``x``; ``psi_+ = exp(ikx)`` right of the support."""
    k = complex(k)
    e = np.exp(1j * k * cp.gamma)
    return _propagate2(cp, k, cp.gamma, x, (e, 1j * k * e), cfg)


def jost_minus_at(cp: CoefficientPair, k: complex, x: float, cfg: IntegratorConfig = DEFAULT_CONFIG) -> np.ndarray:
    """``(psi_-, psi_-')`` at ``x``; ``psi_- = exp(-ikx)`` left of the support."""
    k = complex(k)
    return _propagate2(cp, k, 0.0, x, (1.0, -1j * k), cfg)


def jost_halfline(cp: CoefficientPair, k: complex, cfg: IntegratorConfig = DEFAULT_CONFIG) -> SchrodingerJost:
    """Jost solution of ``-y'' - p y = k^2 y`` at 0, integrated back from gamma."""
    v, d = jost_plus_at(cp, k, 0.0, cfg)
    return SchrodingerJost(complex(k), complex(v), complex(d), "halfline")


def bracket(f, g) -> complex:
    """``{f, g} = f g' - f' g`` for value/derivative pairs."""
    return complex(f[0] * g[1] - f[1] * g[0])


def jost_line_wronskian(cp: CoefficientPair, k: complex, cfg: IntegratorConfig = DEFAULT_CONFIG, x: float = 0.0) -> complex:
    """``{psi_+, psi_-}(k)`` evaluated at ``x`` in ``[0, gamma]``; free value is ``-2ik``."""
    return bracket(jost_plus_at(cp, k, x, cfg), jost_minus_at(cp, k, x, cfg))


def _require_square(cp):
    if cp.q_spec != SQUARE:
        raise ConfigurationError("identity holds only for q = p**2 + p'' (use make_schrodinger_square)")


def _residual(lhs, rhs):
    return abs(lhs - rhs) / max(1.0, abs(lhs))


def square_halfline_sides(cp, k, cfg: IntegratorConfig = DEFAULT_CONFIG) -> tuple[complex, complex]:
    """``(D(k), psi(0, ik) psi(0, k))``."""
    _require_square(cp)
    k = complex(k)
    D = det_halfline(cp, k, "direct", cfg).D
    prod = jost_halfline(cp, 1j * k, cfg).value_at_0 * jost_halfline(cp, k, cfg).value_at_0
    return D, prod


def check_square_halfline(cp, k, cfg: IntegratorConfig = DEFAULT_CONFIG) -> float:
    return _residual(*square_halfline_sides(cp, k, cfg))


def square_line_sides(cp, k, cfg: IntegratorConfig = DEFAULT_CONFIG) -> tuple[complex, complex]:
    """``(D(k), i/(4k^2) {psi_+,psi_-}(k) {psi_+,psi_-}(ik))``."""
    _require_square(cp)
    k = complex(k)
    D = det_line(cp, k, "direct", cfg).D
    prod = 1j / (4 * k**2) * jost_line_wronskian(cp, k, cfg) * jost_line_wronskian(cp, 1j * k, cfg)
    return D, prod


def check_square_line(cp, k, cfg: IntegratorConfig = DEFAULT_CONFIG) -> float:
    return _residual(*square_line_sides(cp, k, cfg))
