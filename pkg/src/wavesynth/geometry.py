"""Domains and target Helmholtz solutions used by the experiments."""

from __future__ import annotations

import math

import numpy as np

from .exceptions import ConfigError
from .modal import DiskContext
from .special import hankel1_0

__all__ = [
    "TRIANGLE_VERTICES",
    "CircularMode",
    "FundamentalSolution",
    "RandomSurrogate",
    "Triangle",
    "UnitDisk",
    "make_geometry",
    "trace_eval",
]

TRIANGLE_VERTICES = np.array(
    [[1.0, 0.0], [-1.0, 0.0], [math.cos(5 * math.pi / 8), math.sin(5 * math.pi / 8)]]
)


class UnitDisk:
    """Unit disk with equispaced boundary angles ``2 pi s / S``, ``s = 1..S``."""

    kind = "disk"

    def boundary_points(self, S: int) -> np.ndarray:
        theta = 2.0 * math.pi * np.arange(1, S + 1) / S
        return np.column_stack([np.cos(theta), np.sin(theta)])

    def contains(self, x, closed: bool = True) -> np.ndarray:
        r = np.hypot(*np.moveaxis(np.asarray(x, float), -1, 0))
        return r <= 1.0 if closed else r < 1.0

    def distance_to_boundary(self, x) -> np.ndarray:
        return np.abs(np.hypot(*np.moveaxis(np.asarray(x, float), -1, 0)) - 1.0)

    def bulk_grid(self, n_radial: int = 100, n_angular: int = 256) -> np.ndarray:
        """Tensor polar grid, radii ``linspace(0, 1)``, shape ``(n_r * n_t, 2)``."""
        r = np.linspace(0.0, 1.0, n_radial)
        t = 2.0 * math.pi * np.arange(n_angular) / n_angular
        rr, tt = np.meshgrid(r, t, indexing="ij")
        return np.column_stack([(rr * np.cos(tt)).ravel(), (rr * np.sin(tt)).ravel()])


class Triangle:
    """Triangle inscribed in the unit circle with one edge on a diameter.

    Boundary points are equispaced in arc length, starting at the first
    vertex and running through the second and third.
    """

    kind = "triangle"

    def __init__(self):
        self.vertices = TRIANGLE_VERTICES.copy()
        v = self.vertices
        self.edges = [(v[0], v[1]), (v[1], v[2]), (v[2], v[0])]
        self.lengths = np.array([np.linalg.norm(b - a) for a, b in self.edges])
        self.perimeter = float(self.lengths.sum())
        e1, e2 = v[1] - v[0], v[2] - v[0]
        # +1 for counterclockwise vertex order; the fixed vertices are clockwise
        self._orientation = float(np.sign(e1[0] * e2[1] - e1[1] * e2[0]))

    def _inward_normal(self, a, b):
        t = b - a
        return self._orientation * np.array([-t[1], t[0]]) / np.linalg.norm(t)

    def boundary_points(self, S: int) -> np.ndarray:
        s = self.perimeter * np.arange(S) / S
        cum = np.concatenate(([0.0], np.cumsum(self.lengths)))
        edge = np.clip(np.searchsorted(cum, s, side="right") - 1, 0, 2)
        starts = self.vertices[edge]
        ends = self.vertices[(edge + 1) % 3]
        frac = ((s - cum[edge]) / self.lengths[edge])[:, None]
        return starts + frac * (ends - starts)

    def _signed_distances(self, x):
        # positive inside, one column per edge
        x = np.asarray(x, float)
        out = []
        for a, b in self.edges:
            out.append((x - a) @ self._inward_normal(a, b))
        return np.stack(out, axis=-1)

    def contains(self, x, closed: bool = True) -> np.ndarray:
        d = self._signed_distances(x)
        return np.all(d >= 0, axis=-1) if closed else np.all(d > 0, axis=-1)

    def distance_to_boundary(self, x) -> np.ndarray:
        x = np.asarray(x, float)
        best = np.full(x.shape[:-1], np.inf)
        for a, b in self.edges:
            t = b - a
            u = np.clip(((x - a) @ t) / (t @ t), 0.0, 1.0)
            proj = a + u[..., None] * t
            best = np.minimum(best, np.linalg.norm(x - proj, axis=-1))
        return best

    def bulk_grid(self, n: int = 140) -> np.ndarray:
        """Uniform barycentric lattice with ``(n+1)(n+2)/2`` points."""
        i, j = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
        mask = i + j <= n
        l1, l2 = i[mask] / n, j[mask] / n
        l3 = 1.0 - l1 - l2
        v = self.vertices
        return l1[:, None] * v[0] + l2[:, None] * v[1] + l3[:, None] * v[2]

    def source_near_edge(self, distance: float) -> np.ndarray:
        """Point at ``distance`` along the outward normal from the midpoint of the first edge."""
        a, b = self.edges[0]
        return 0.5 * (a + b) - distance * self._inward_normal(a, b)

    def source_near_vertex(self, distance: float) -> np.ndarray:
        """Point at ``distance`` along the outward angle bisector at the third vertex."""
        v = self.vertices
        u1 = (v[0] - v[2]) / np.linalg.norm(v[0] - v[2])
        u2 = (v[1] - v[2]) / np.linalg.norm(v[1] - v[2])
        bis = -(u1 + u2)
        return v[2] + distance * bis / np.linalg.norm(bis)


def make_geometry(kind: str):
    if kind == "disk":
        return UnitDisk()
    if kind == "triangle":
        return Triangle()
    raise ConfigError(f"geometry: expected 'disk' or 'triangle', got {kind!r}")


def _polar(x):
    x = np.asarray(x, float)
    r = np.hypot(x[..., 0], x[..., 1])
    if np.any(r > 1.0 + 1e-12):
        raise ConfigError("x: circular waves are evaluated on the closed unit disk only")
    return np.minimum(r, 1.0), np.arctan2(x[..., 1], x[..., 0])


class CircularMode:
    """Single normalized circular wave ``b_p``."""

    kind = "circular_mode"

    def __init__(self, ctx: DiskContext, p: int):
        if abs(p) > ctx.p_max:
            raise ConfigError(f"p: |p| must not exceed p_max={ctx.p_max}")
        self.ctx = ctx
        self.p = int(p)

    def evaluate(self, x) -> np.ndarray:
        r, t = _polar(x)
        return self.ctx.circular_wave(self.p, r, t)

    trace = evaluate

    def config(self) -> dict:
        return {"kind": self.kind, "p": self.p}


class RandomSurrogate:
    """Random combination ``sum_{|p| <= P} c_p b_p`` of circular waves.

    Coefficients are ``g_p / sqrt(max(1, |p| - kappa))`` with ``g_p``
    circularly-symmetric complex standard normal (``E|g_p|^2 = 1``), drawn
    from PCG64 with the given seed in order ``p = -P..P``.
    """

    kind = "random_surrogate"

    def __init__(self, ctx: DiskContext, P: int, seed: int):
        if P > ctx.p_max:
            raise ConfigError(f"P: must not exceed p_max={ctx.p_max}")
        self.ctx = ctx
        self.P = int(P)
        self.seed = int(seed)
        rng = np.random.Generator(np.random.PCG64(self.seed))
        g = (rng.standard_normal(2 * P + 1) + 1j * rng.standard_normal(2 * P + 1)) / math.sqrt(2.0)
        p = np.arange(-P, P + 1)
        self.coefficients = g / np.sqrt(np.maximum(1.0, np.abs(p) - ctx.kappa))

    @property
    def norm(self) -> float:
        """Norm of the surrogate, equal to the coefficient 2-norm."""
        return float(np.linalg.norm(self.coefficients))

    def evaluate(self, x) -> np.ndarray:
        r, t = _polar(x)
        shape = r.shape
        r, t = r.ravel(), t.ravel()
        out = np.empty(r.size, dtype=complex)
        step = max(1, 2_000_000 // (2 * self.P + 1))
        for i in range(0, r.size, step):
            out[i : i + step] = self.ctx.circular_waves(self.P, r[i : i + step], t[i : i + step]) @ self.coefficients
        return out.reshape(shape)

    trace = evaluate

    def config(self) -> dict:
        return {"kind": self.kind, "P": self.P, "seed": self.seed}


class FundamentalSolution:
    """Point source ``(i/4) H_0^(1)(kappa |x - s|)`` located outside the domain."""

    kind = "fundamental_solution"

    def __init__(self, kappa: float, source, geometry=None):
        self.kappa = float(kappa)
        self.source = np.asarray(source, dtype=float)
        if self.source.shape != (2,):
            raise ConfigError("source: expected a 2D point")
        if geometry is not None and bool(geometry.contains(self.source, closed=True)):
            raise ConfigError("source: must lie strictly outside the closed domain")

    def evaluate(self, x) -> np.ndarray:
        d = np.linalg.norm(np.asarray(x, float) - self.source, axis=-1)
        return 0.25j * hankel1_0(self.kappa * d)

    trace = evaluate

    def config(self) -> dict:
        return {"kind": self.kind, "source": [float(v) for v in self.source]}


def trace_eval(target, geometry, points) -> np.ndarray:
    """Dirichlet trace of a target at boundary points of a geometry."""
    pts = np.asarray(points, float)
    if not np.all(geometry.distance_to_boundary(pts) < 1e-9):
        raise ConfigError("points: trace evaluation needs points on the boundary")
    return target.trace(pts)
