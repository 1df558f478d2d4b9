"""Zeros of the entire targets ``k D(k)`` (half-line) and ``k^4 D(k)`` (line).

Counting uses the argument principle along rectangle edges with adaptive
refinement of the phase. Cells with zeros are quadrisected; once a cell
holds a single zero (or a tight cluster) its location comes from the
contour moments on a circle and, for simple zeros, a Newton polish.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .determinant import CASES, _resolve, minors
from .exceptions import IterationError, RegionError
from .ode import DEFAULT_CONFIG, IntegratorConfig, transfer_matrix
from .potentials import CoefficientPair

SECTOR = (0.0, math.pi / 2)  # closed physical sector for arg k
THRESHOLD_RADIUS = 1e-10
_SPLIT = 0.4781  # off-centre split keeps symmetric zeros off cell edges


class Target:
    """Evaluator ``k -> k D(k)`` or ``k -> k^4 D(k)``, memoised.

    Built from the transfer-matrix minors, which need no division by k,
    so the removable singularity at 0 costs nothing.
    """

    def __init__(self, cp: CoefficientPair, case: str = "halfline", cfg: IntegratorConfig = DEFAULT_CONFIG, convention=None):
        if case not in CASES:
            raise ValueError(f"case must be one of {CASES}")
        self.cp, self.case, self.cfg = cp, case, cfg
        self.convention = _resolve(convention)
        self.power = 1 if case == "halfline" else 4
        self._cache: dict[complex, complex] = {}
        self.evaluations = 0

    def __call__(self, k) -> complex:
        k = complex(k)
        hit = self._cache.get(k)
        if hit is not None:
            return hit
        ms = minors(transfer_matrix(self.cp, k, self.cfg), self.convention)
        e = cmath.exp((1j - 1) * k * self.cp.gamma)
        if self.case == "halfline":
            val = e / 2 * ms.halfline_bracket(k)
        else:
            val = -e / 8 * complex(np.polyval(ms.A[::-1], k))
        self.evaluations += 1
        self._cache[k] = val
        return val


def entire_target(cp: CoefficientPair, case: str = "halfline", cfg: IntegratorConfig = DEFAULT_CONFIG, convention=None) -> Target:
    return Target(cp, case, cfg, convention)


@dataclass(frozen=True)
class SearchRegion:
    """Axis-aligned rectangle ``[re0, re1] x [im0, im1]`` in the k-plane."""

    re0: float
    re1: float
    im0: float
    im1: float
    max_depth: int = 8
    nodes_per_edge: int = 16

    def __post_init__(self):
        vals = (self.re0, self.re1, self.im0, self.im1)
        if not all(math.isfinite(v) for v in vals):
            raise RegionError("region corners must be finite")
        if not (self.re1 > self.re0 and self.im1 > self.im0):
            raise RegionError("region must have positive area")
        if self.max_depth < 0 or self.nodes_per_edge < 2:
            raise RegionError("max_depth >= 0 and nodes_per_edge >= 2 required")

    @classmethod
    def from_dict(cls, data) -> "SearchRegion":
        known = {"re", "im", "max_depth", "nodes_per_edge"}
        unknown = set(data) - known
        if unknown:
            raise RegionError(f"unknown region keys: {sorted(unknown)}")
        try:
            (re0, re1), (im0, im1) = data["re"], data["im"]
        except (KeyError, TypeError, ValueError):
            raise RegionError("region needs 're': [lo, hi] and 'im': [lo, hi]") from None
        return cls(float(re0), float(re1), float(im0), float(im1), int(data.get("max_depth", 8)), int(data.get("nodes_per_edge", 16)))

    @property
    def corners(self):
        return (complex(self.re0, self.im0), complex(self.re1, self.im0), complex(self.re1, self.im1), complex(self.re0, self.im1))

    @property
    def diagonal(self) -> float:
        return math.hypot(self.re1 - self.re0, self.im1 - self.im0)

    @property
    def center(self) -> complex:
        return complex(self.re0 + self.re1, self.im0 + self.im1) / 2

    def contains(self, k: complex) -> bool:
        return self.re0 <= k.real <= self.re1 and self.im0 <= k.imag <= self.im1

    def split(self, fx: float = _SPLIT, fy: float = _SPLIT):
        xm = self.re0 + fx * (self.re1 - self.re0)
        ym = self.im0 + fy * (self.im1 - self.im0)
        kw = {"max_depth": self.max_depth, "nodes_per_edge": self.nodes_per_edge}
        return [
            SearchRegion(self.re0, xm, self.im0, ym, **kw),
            SearchRegion(xm, self.re1, self.im0, ym, **kw),
            SearchRegion(xm, self.re1, ym, self.im1, **kw),
            SearchRegion(self.re0, xm, ym, self.im1, **kw),
        ]

    def perturbed(self, delta: float) -> "SearchRegion":
        return SearchRegion(self.re0 - delta, self.re1 + delta, self.im0 - delta, self.im1 + delta, self.max_depth, self.nodes_per_edge)


@dataclass
class ZeroRecord:
    k: complex
    multiplicity: int
    classification: str
    residual: float
    scale: float
    newton_iterations: int
    on_sector_boundary: bool = False
    converged: bool = True
    cell: SearchRegion | None = field(default=None, repr=False)

    @property
    def lam(self) -> complex:
        return self.k**4

    def to_dict(self) -> dict:
        return {
            "k": [self.k.real, self.k.imag],
            "lambda": [self.lam.real, self.lam.imag],
            "multiplicity": self.multiplicity,
            "classification": self.classification,
            "residual": self.residual,
            "scale": self.scale,
            "newton_iterations": self.newton_iterations,
            "on_sector_boundary": self.on_sector_boundary,
            "converged": self.converged,
        }


def classify(k0: complex, rel_tol: float = 1e-6, arg_tol: float = 1e-8) -> tuple[str, bool]:
    """``('eigenvalue' | 'resonance', on_sector_boundary)``.

    Eigenvalue iff ``lambda = k0^4`` is real to ``rel_tol`` and ``arg k0``
    lies in the closed sector ``[0, pi/2]``. Points on the sector edges
    (``arg k0`` equal to 0 or pi/2 within ``arg_tol``) are flagged.
    """
    k0 = complex(k0)
    if k0 == 0:
        raise ValueError("classification needs k0 != 0")
    lam = k0**4
    arg = cmath.phase(k0)
    in_sector = -arg_tol <= arg <= SECTOR[1] + arg_tol
    boundary = in_sector and (abs(arg) <= arg_tol or abs(arg - SECTOR[1]) <= arg_tol)
    real = abs(lam.imag) <= rel_tol * abs(lam)
    return ("eigenvalue" if (real and in_sector) else "resonance"), boundary


# ---------------------------------------------------------------- counting


def _edge_phase(f, a: complex, b: complex, n: int, min_len: float) -> float:
    """Phase change of ``f`` from ``a`` to ``b``, bisecting large steps."""
    ts = np.linspace(0.0, 1.0, n + 1)
    pts = [a + t * (b - a) for t in ts]
    vals = [f(z) for z in pts]
    total = 0.0
    stack = list(zip(pts[:-1], pts[1:], vals[:-1], vals[1:]))[::-1]
    while stack:
        z0, z1, f0, f1 = stack.pop()
        if f0 == 0 or f1 == 0:
            raise RegionError(f"target vanishes on the contour near {z0 if f0 == 0 else z1}")
        step = cmath.phase(f1 / f0)
        if abs(step) > math.pi / 2:
            if abs(z1 - z0) < min_len:
                raise RegionError(f"suspected zero on the contour near {(z0 + z1) / 2}")
            zm = (z0 + z1) / 2
            fm = f(zm)
            stack.append((zm, z1, fm, f1))
            stack.append((z0, zm, f0, fm))
            continue
        total += step
    return total


def _winding_rect(region: SearchRegion, f) -> int:
    c = region.corners
    min_len = 1e-9 * max(1.0, region.diagonal)
    total = sum(_edge_phase(f, c[j], c[(j + 1) % 4], region.nodes_per_edge, min_len) for j in range(4))
    wind = total / (2 * math.pi)
    count = int(round(wind))
    if abs(wind - count) > 1e-3 or count < 0:
        raise RegionError(f"non-integer or negative winding {wind:.6f}")
    return count


def count_zeros(region: SearchRegion, evaluator, retries: int = 3) -> int:
    """Zeros of ``evaluator`` inside ``region`` counted with multiplicity."""
    last = None
    for attempt in range(retries + 1):
        reg = region if attempt == 0 else region.perturbed(1e-4 * attempt * region.diagonal)
        try:
            return _winding_rect(reg, evaluator)
        except RegionError as exc:
            last = exc
    raise RegionError(f"argument principle failed after {retries} perturbations: {last}")


# ---------------------------------------------------------------- locating


def _circle_moments(f, c: complex, rho: float, n0: int = 64, n_max: int = 1024):
    """Winding ``m`` and power sums ``sum w``, ``sum w^2`` of zeros ``c + w``.

    Uses the Fourier modes of the periodic part of ``log f`` on the circle:
    the ``e^{-i j theta}`` coefficient equals ``-sum (w / rho)^j / j``.
    """
    prev = None
    n = n0
    while True:
        theta = 2 * np.pi * np.arange(n) / n
        vals = np.array([f(c + rho * np.exp(1j * t)) for t in theta])
        if np.any(vals == 0):
            raise RegionError("target vanishes on the moment circle")
        steps = np.angle(np.roll(vals, -1) / vals)
        if np.max(np.abs(steps)) > math.pi / 4 and n < n_max:
            n *= 2
            continue
        phase = np.concatenate(([0.0], np.cumsum(steps[:-1])))
        m = int(round(np.sum(steps) / (2 * np.pi)))
        logf = np.log(np.abs(vals)) + 1j * (np.angle(vals[0]) + phase)
        g = logf - 1j * m * theta
        g1 = np.mean(g * np.exp(1j * theta))
        g2 = np.mean(g * np.exp(2j * theta))
        s1, s2 = -rho * g1, -2 * rho**2 * g2
        scale = float(np.max(np.abs(vals)))
        if prev is not None and abs(s1 - prev) <= 1e-12 * max(1.0, abs(c)) * max(m, 1):
            return m, s1, s2, scale
        if n >= n_max:
            return m, s1, s2, scale
        prev = s1
        n *= 2


def _newton(f, k0: complex, tol: float = 1e-13, max_iter: int = 30):
    k = complex(k0)
    for it in range(1, max_iter + 1):
        h = 1e-6 * max(1.0, abs(k))
        d = (f(k + h) - f(k - h)) / (2 * h)
        if d == 0:
            raise IterationError(f"zero derivative at {k}")
        step = f(k) / d
        k -= step
        if abs(step) <= tol * max(1.0, abs(k)):
            return k, it
    raise IterationError(f"Newton did not settle from {k0}; last iterate {k}")


def _record(f, k: complex, m: int, its: int, scale: float, converged: bool, cell) -> ZeroRecord:
    residual = abs(f(k))
    # k = 0 is neither an eigenvalue nor a resonance (lambda = 0 is the threshold)
    if abs(k) <= THRESHOLD_RADIUS:
        cls, boundary = "threshold", True
    else:
        cls, boundary = classify(k)
    return ZeroRecord(complex(k), m, cls, float(residual), scale, its, boundary, converged, cell)


def _resolve_cell(cell: SearchRegion, f, m: int, cluster_tol: float):
    """Records for a cell holding ``m`` zeros, or None to keep subdividing."""
    c = cell.center
    rho = cell.diagonal / 2
    mc, s1, s2, scale = _circle_moments(f, c, rho)
    if mc != m:
        return None  # circle picks up zeros outside the rectangle
    centroid = c + s1 / m
    spread = cmath.sqrt(s2 / m - (s1 / m) ** 2)
    if m > 1 and abs(spread) > cluster_tol * max(1.0, abs(centroid)):
        return None
    if m > 1:
        # a tight cluster: the centroid is far better conditioned than the
        # individual members of a multiple zero
        return [_record(f, centroid, m, 0, scale, True, cell)]
    try:
        k, its = _newton(f, centroid)
        if not cell.contains(k) and abs(k - centroid) > 1e-6 * max(1.0, abs(centroid)):
            k, its = centroid, 0
        return [_record(f, k, 1, its, scale, True, cell)]
    except IterationError:
        return [_record(f, centroid, 1, 0, scale, False, cell)]


def locate_zeros(region: SearchRegion, evaluator, cluster_tol: float = 1e-2, min_size: float = 1e-6) -> list[ZeroRecord]:
    """All zeros in ``region``, by quadrisection and contour moments.

    Cells with winding 0 are dropped; a cell with winding 1, or a cluster
    whose spread is below ``cluster_tol`` (relative), is resolved. Stalled
    Newton runs are reported with ``converged=False`` and the cell kept.
    """
    total = count_zeros(region, evaluator)
    out: list[ZeroRecord] = []
    stack = [(region, total, 0)]
    while stack:
        cell, m, depth = stack.pop()
        if m == 0:
            continue
        recs = _resolve_cell(cell, evaluator, m, cluster_tol)
        if recs is not None:
            out.extend(recs)
            continue
        if depth >= cell.max_depth or cell.diagonal < min_size:
            c = cell.center
            _, s1, _, scale = _circle_moments(evaluator, c, cell.diagonal / 2)
            out.append(_record(evaluator, c + s1 / m, m, 0, scale, False, cell))
            continue
        for frac in (_SPLIT, 0.5371, 0.4417):
            subs = cell.split(frac, frac)
            try:
                counts = [_winding_rect(s, evaluator) for s in subs]
            except RegionError:
                continue
            if sum(counts) == m:
                break
        else:
            raise RegionError(f"could not subdivide cell {cell} consistently")
        stack.extend((s, n, depth + 1) for s, n in zip(subs, counts))
    out.sort(key=lambda r: (r.k.real, r.k.imag))
    return out
