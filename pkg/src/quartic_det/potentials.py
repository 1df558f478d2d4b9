"""Compactly supported coefficient pairs (p, q) on [0, gamma].

A coefficient is described either by a closed-form family from
:data:`FAMILIES` or by samples on a uniform grid. Every evaluator returns
exactly zero outside the support interval.

The perturbation enters the operator as ``y'''' + 2 (p y')' + q y``.
For the square of ``h = -d^2/dx^2 - p`` the matching lower-order
coefficient is ``q = p**2 + p''``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np
from scipy.interpolate import CubicSpline

from .exceptions import ConfigurationError, PrecisionError

# Smallest sample count for which second differences are trusted.
MIN_SAMPLES_FOR_CURVATURE = 64


class _Coefficient:
    """Evaluator bound to a support length; subclasses fill in ``_inside``."""

    smooth = True

    def __init__(self, gamma: float):
        self.gamma = float(gamma)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        inside = (x >= 0.0) & (x <= self.gamma)
        out = np.where(inside, self._inside(np.clip(x, 0.0, self.gamma)), 0.0)
        return out if out.ndim else float(out)

    def derivative(self, x, order: int):
        if order not in (1, 2):
            raise ValueError("only first and second derivatives are provided")
        if not self.smooth:
            raise PrecisionError(f"{type(self).__name__} has no pointwise derivative of order {order}")
        x = np.asarray(x, dtype=float)
        inside = (x >= 0.0) & (x <= self.gamma)
        out = np.where(inside, self._deriv(np.clip(x, 0.0, self.gamma), order), 0.0)
        return out if out.ndim else float(out)

    @property
    def breakpoints(self) -> tuple[float, ...]:
        """Interior points where the coefficient jumps; integrators split there."""
        return ()

    @property
    def max_step(self) -> float:
        return math.inf

    def _inside(self, x):
        raise NotImplementedError

    def _deriv(self, x, order):
        raise NotImplementedError


class Zero(_Coefficient):
    def _inside(self, x):
        return np.zeros_like(x)

    def _deriv(self, x, order):
        return np.zeros_like(x)


class Box(_Coefficient):
    """``amplitude`` on ``[start, stop]``, zero elsewhere."""

    smooth = False

    def __init__(self, gamma, amplitude, start=0.0, stop=None):
        super().__init__(gamma)
        self.amplitude = float(amplitude)
        self.start = float(start)
        self.stop = self.gamma if stop is None else float(stop)
        if not 0.0 <= self.start < self.stop <= self.gamma:
            raise ConfigurationError("box needs 0 <= start < stop <= gamma")

    def _inside(self, x):
        return np.where((x >= self.start) & (x <= self.stop), self.amplitude, 0.0)

    @property
    def breakpoints(self):
        return tuple(b for b in (self.start, self.stop) if 0.0 < b < self.gamma)


class PolyBump(_Coefficient):
    """``amplitude * (4 (x-a)(b-x) / (b-a)^2)^power`` on ``[a, b]``; max equals amplitude.

    With the default ``power = 2`` the bump is C^1 across its edges with
    vanishing value and slope there, so the Schrodinger-square construction
    stays supported in ``[a, b]``; ``power = 3`` makes it C^2.
    """

    def __init__(self, gamma, amplitude, start=0.0, stop=None, power=2):
        super().__init__(gamma)
        self.amplitude = float(amplitude)
        self.start = float(start)
        self.stop = self.gamma if stop is None else float(stop)
        if not 0.0 <= self.start < self.stop <= self.gamma:
            raise ConfigurationError("poly_bump needs 0 <= start < stop <= gamma")
        if power not in (2, 3, 4):
            raise ConfigurationError("poly_bump power must be 2, 3 or 4")
        self.power = int(power)
        self._scale = self.amplitude * (4.0 / (self.stop - self.start) ** 2) ** self.power

    def _parts(self, x):
        inside = (x >= self.start) & (x <= self.stop)
        u = (x - self.start) * (self.stop - x)
        du = self.start + self.stop - 2.0 * x
        return inside, u, du

    def _inside(self, x):
        inside, u, _ = self._parts(x)
        return np.where(inside, self._scale * u**self.power, 0.0)

    def _deriv(self, x, order):
        inside, u, du = self._parts(x)
        n = self.power
        if order == 1:
            val = n * u ** (n - 1) * du
        else:
            val = n * (n - 1) * u ** (n - 2) * du * du - 2.0 * n * u ** (n - 1)
        return np.where(inside, self._scale * val, 0.0)

    @property
    def breakpoints(self):
        # a derivative of p jumps at the bump edges
        return tuple(b for b in (self.start, self.stop) if 0.0 < b < self.gamma)


class TruncatedGaussian(_Coefficient):
    def __init__(self, gamma, amplitude, center=None, width=None):
        super().__init__(gamma)
        self.amplitude = float(amplitude)
        self.center = 0.5 * self.gamma if center is None else float(center)
        self.width = 0.15 * self.gamma if width is None else float(width)
        if self.width <= 0.0:
            raise ConfigurationError("truncated_gaussian width must be positive")

    def _inside(self, x):
        z = (x - self.center) / self.width
        return self.amplitude * np.exp(-0.5 * z * z)

    def _deriv(self, x, order):
        z = (x - self.center) / self.width
        g = self.amplitude * np.exp(-0.5 * z * z)
        if order == 1:
            return -z * g / self.width
        return (z * z - 1.0) * g / self.width**2


class SineBump(_Coefficient):
    """``amplitude * sin(pi x / gamma)^2``."""

    def __init__(self, gamma, amplitude):
        super().__init__(gamma)
        self.amplitude = float(amplitude)
        self._w = math.pi / self.gamma

    def _inside(self, x):
        return self.amplitude * np.sin(self._w * x) ** 2

    def _deriv(self, x, order):
        if order == 1:
            return self.amplitude * self._w * np.sin(2.0 * self._w * x)
        return 2.0 * self.amplitude * self._w**2 * np.cos(2.0 * self._w * x)


FAMILIES = {
    "zero": Zero,
    "box": Box,
    "poly_bump": PolyBump,
    "truncated_gaussian": TruncatedGaussian,
    "sine_bump": SineBump,
}


class Sampled(_Coefficient):
    """Uniform samples on ``[0, gamma]`` with linear or cubic interpolation."""

    def __init__(self, gamma, grid, values, interp="linear"):
        super().__init__(gamma)
        grid = np.asarray(grid, dtype=float)
        values = np.asarray(values, dtype=float)
        if grid.ndim != 1 or grid.shape != values.shape or grid.size < 2:
            raise ConfigurationError("sampled coefficient needs matching 1-d grid and values")
        steps = np.diff(grid)
        if np.any(steps <= 0.0):
            raise ConfigurationError("sample grid must be strictly increasing")
        if not np.allclose(steps, steps[0], rtol=1e-8, atol=0.0):
            raise ConfigurationError("sample grid must be uniform")
        tol = 1e-12 * self.gamma
        if abs(grid[0]) > tol or abs(grid[-1] - self.gamma) > tol:
            raise ConfigurationError("sample grid must span exactly [0, gamma]")
        if not np.all(np.isfinite(values)):
            raise ConfigurationError("sampled values must be finite")
        if interp not in ("linear", "cubic"):
            raise ConfigurationError(f"unknown interpolation {interp!r}")
        self.grid = grid
        self.values = values
        self.interp = interp
        self.h = float(steps[0])
        self._spline = CubicSpline(grid, values) if interp == "cubic" else None

    def _inside(self, x):
        if self._spline is not None:
            return self._spline(x)
        return np.interp(x, self.grid, self.values)

    def _deriv(self, x, order):
        if self.grid.size < MIN_SAMPLES_FOR_CURVATURE:
            raise PrecisionError(
                f"grid of {self.grid.size} samples too coarse for derivatives "
                f"(need >= {MIN_SAMPLES_FOR_CURVATURE})"
            )
        # second-order accurate differences, including one-sided ends
        d = np.gradient(self.values, self.h, edge_order=2)
        if order == 2:
            d = np.gradient(d, self.h, edge_order=2)
        return np.interp(x, self.grid, d)

    @property
    def max_step(self):
        return self.h if self.interp == "linear" else math.inf


class _SquareQ(_Coefficient):
    """``p**2 + p''`` for a smooth coefficient ``p``."""

    def __init__(self, p: _Coefficient):
        super().__init__(p.gamma)
        self.p = p
        # fail early if p'' is unavailable
        p.derivative(0.5 * p.gamma, 2)

    def _inside(self, x):
        return self.p(x) ** 2 + self.p.derivative(x, 2)

    @property
    def breakpoints(self):
        return self.p.breakpoints

    @property
    def max_step(self):
        return self.p.max_step


def _build(spec: Mapping[str, Any], gamma: float) -> _Coefficient:
    if not isinstance(spec, Mapping):
        raise ConfigurationError(f"coefficient spec must be an object, got {spec!r}")
    if "family" in spec:
        unknown = set(spec) - {"family", "params"}
        if unknown:
            raise ConfigurationError(f"unknown keys in coefficient spec: {sorted(unknown)}")
        name = spec["family"]
        if name not in FAMILIES:
            raise ConfigurationError(f"unknown family {name!r}; known: {sorted(FAMILIES)}")
        try:
            return FAMILIES[name](gamma, **dict(spec.get("params", {})))
        except TypeError as exc:
            raise ConfigurationError(f"bad parameters for {name}: {exc}") from None
    if "grid" in spec:
        unknown = set(spec) - {"grid", "values", "interp"}
        if unknown:
            raise ConfigurationError(f"unknown keys in coefficient spec: {sorted(unknown)}")
        return Sampled(gamma, spec["grid"], spec.get("values", ()), spec.get("interp", "linear"))
    raise ConfigurationError("coefficient spec needs 'family' or 'grid'")


SQUARE = "schrodinger_square"


@dataclass(frozen=True)
class CoefficientPair:
    """The perturbation ``(p, q)``, supported in ``[0, gamma]``.

    ``p_spec`` and ``q_spec`` are the JSON-style descriptions; ``q_spec``
    may be the string ``"schrodinger_square"``. Instances are immutable
    and hashable through :meth:`to_dict`.
    """

    gamma: float
    p_spec: Mapping[str, Any]
    q_spec: Any
    p: _Coefficient = field(init=False, repr=False, compare=False)
    q: _Coefficient = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if not (math.isfinite(self.gamma) and self.gamma > 0.0):
            raise ConfigurationError("gamma must be a positive finite number")
        p = _build(self.p_spec, self.gamma)
        q = _SquareQ(p) if self.q_spec == SQUARE else _build(self.q_spec, self.gamma)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "q", q)

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "CoefficientPair":
        unknown = set(data) - {"gamma", "p", "q"}
        if unknown:
            raise ConfigurationError(f"unknown keys in potential: {sorted(unknown)}")
        try:
            gamma = float(data["gamma"])
            p_spec = data["p"]
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"potential needs numeric 'gamma' and 'p': {exc}") from None
        return cls(gamma, p_spec, data.get("q", {"family": "zero"}))

    def to_dict(self) -> dict:
        return {"gamma": self.gamma, "p": _plain(self.p_spec), "q": _plain(self.q_spec)}

    @property
    def breakpoints(self) -> tuple[float, ...]:
        return tuple(sorted(set(self.p.breakpoints) | set(self.q.breakpoints)))

    @property
    def max_step(self) -> float:
        return min(self.p.max_step, self.q.max_step)

    @property
    def is_free(self) -> bool:
        return isinstance(self.p, Zero) and isinstance(self.q, Zero)

    def scaled(self, c: float) -> "CoefficientPair":
        """The pair ``(c p, c q)``; closed-form families only."""
        return CoefficientPair(self.gamma, _scale_spec(self.p_spec, c), _scale_spec(self.q_spec, c))


def _plain(spec):
    if isinstance(spec, Mapping):
        return {k: _plain(v) for k, v in spec.items()}
    if isinstance(spec, (list, tuple, np.ndarray)):
        return [_plain(v) for v in spec]
    if isinstance(spec, np.generic):
        return spec.item()
    return spec


def _scale_spec(spec, c):
    if spec == SQUARE:
        raise ConfigurationError("scaling a Schrodinger-square pair does not scale its q linearly")
    if "grid" in spec:
        return {**spec, "values": [c * v for v in spec["values"]]}
    params = dict(spec.get("params", {}))
    if "amplitude" in params:
        params["amplitude"] = c * params["amplitude"]
    return {"family": spec["family"], "params": params}


def free_pair(gamma: float = 1.0) -> CoefficientPair:
    return CoefficientPair(gamma, {"family": "zero"}, {"family": "zero"})


def eval_coeffs(cp: CoefficientPair, x: float) -> tuple[float, float]:
    """Return ``(p(x), q(x))``; exactly ``(0, 0)`` outside ``[0, gamma]``."""
    if not math.isfinite(x):
        raise ValueError("x must be finite")
    return float(cp.p(x)), float(cp.q(x))


def make_schrodinger_square(p_spec: Mapping[str, Any], gamma: float) -> CoefficientPair:
    """Pair ``(p, p**2 + p'')`` so that the operator equals ``(-d^2 - p)^2``.

    ``p`` must vanish together with its slope at both ends of ``[0, gamma]``;
    otherwise ``p''`` would carry boundary delta functions.
    """
    cp = CoefficientPair(gamma, p_spec, SQUARE)
    scale = max(1.0, float(np.max(np.abs(cp.p(np.linspace(0.0, gamma, 257))))))
    for x in (0.0, gamma):
        if abs(cp.p(x)) > 1e-8 * scale or abs(cp.p.derivative(x, 1)) > 1e-6 * scale / gamma:
            raise ConfigurationError(
                "Schrodinger-square coefficient must satisfy p = p' = 0 at both ends of [0, gamma]"
            )
    return cp


def random_bump_pair(rng: np.random.Generator, gamma: float = 1.0, scale: float = 4.0) -> CoefficientPair:
    """A generic smooth pair: asymmetric polynomial bump p, Gaussian q."""
    a, b = np.sort(rng.uniform(0.0, gamma, size=2))
    if b - a < 0.3 * gamma:
        a, b = 0.0, gamma
    p_spec = {
        "family": "poly_bump",
        "params": {"amplitude": float(rng.uniform(-1, 1) * scale), "start": float(a), "stop": float(b)},
    }
    q_spec = {
        "family": "truncated_gaussian",
        "params": {
            "amplitude": float(rng.uniform(-1, 1) * 4 * scale),
            "center": float(rng.uniform(0.2, 0.8) * gamma),
            "width": float(rng.uniform(0.08, 0.3) * gamma),
        },
    }
    return CoefficientPair(gamma, p_spec, q_spec)
