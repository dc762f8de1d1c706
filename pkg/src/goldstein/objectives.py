"""Test objectives: value oracle plus one Clarke subgradient per point.

All objectives are immutable once built. ``raw_subgradient`` returns a
single element of the Clarke subdifferential, which is all the descent
machinery ever asks of an objective.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, asdict

import numpy as np


def as_point(x, dim: int) -> np.ndarray:
    x = np.asarray(x, dtype=float).reshape(-1)
    if x.shape[0] != dim:
        raise ValueError(f"expected a point of dimension {dim}, got {x.shape[0]}")
    return x


class Objective:
    """Base class for a Lipschitz objective on R^d.

    Subclasses implement ``_value`` and ``_subgradient`` on validated points.
    ``lipschitz`` is a valid Lipschitz constant over the closed unit ball.
    """

    name = "objective"

    def __init__(self, dim: int, lipschitz: float, minimizer=None, min_value=None):
        if dim < 1:
            raise ValueError("dimension must be >= 1")
        if not lipschitz > 0:
            raise ValueError("lipschitz bound must be positive")
        self.dim = int(dim)
        self.lipschitz = float(lipschitz)
        self.minimizer = None if minimizer is None else as_point(minimizer, dim)
        self.min_value = None if min_value is None else float(min_value)

    def __call__(self, x) -> float:
        return self.evaluate(x)

    def evaluate(self, x) -> float:
        return float(self._value(as_point(x, self.dim)))

    def raw_subgradient(self, x) -> np.ndarray:
        return self._subgradient(as_point(x, self.dim))

    def raw_subgradients(self, points) -> np.ndarray:
        """Row-wise ``raw_subgradient`` for a (n, d) array of points."""
        points = np.asarray(points, dtype=float).reshape(-1, self.dim)
        return np.array([self._subgradient(p) for p in points]).reshape(-1, self.dim)

    def gap(self, x) -> float:
        if self.min_value is None:
            return float("nan")
        return self.evaluate(x) - self.min_value

    def dist(self, x) -> float:
        if self.minimizer is None:
            return float("nan")
        return float(np.linalg.norm(as_point(x, self.dim) - self.minimizer))

    def _value(self, x):
        raise NotImplementedError

    def _subgradient(self, x):
        raise NotImplementedError

    def __repr__(self):
        return f"{type(self).__name__}(dim={self.dim}, L={self.lipschitz:g})"


class RadialObjective(Objective):
    """f(x) = phi(|x|) with phi increasing; minimizer at the origin."""

    def __init__(self, alpha: float, dim: int):
        if not alpha > 0:
            raise ValueError("alpha must be positive")
        self.alpha = float(alpha)
        # slope bound over the unit ball is alpha for all three radial builtins
        super().__init__(dim, self.alpha, minimizer=np.zeros(dim), min_value=0.0)

    def _subgradient(self, x):
        r = np.linalg.norm(x)
        if r == 0.0:
            return np.zeros(self.dim)
        return self.radial_slope(r) * x / r

    def raw_subgradients(self, points):
        points = np.asarray(points, dtype=float).reshape(-1, self.dim)
        r = np.linalg.norm(points, axis=1)
        out = np.zeros_like(points)
        nz = r > 0
        out[nz] = (self.radial_slope(r[nz]) / r[nz])[:, None] * points[nz]
        return out

    def radial_slope(self, r):
        raise NotImplementedError


class HalfSquaredNorm(RadialObjective):
    """f(x) = alpha/2 |x|^2."""

    name = "half_sq_norm"

    def _value(self, x):
        return 0.5 * self.alpha * float(x @ x)

    def radial_slope(self, r):
        return self.alpha * r


class ScaledNorm(RadialObjective):
    """f(x) = alpha |x|."""

    name = "scaled_norm"

    def _value(self, x):
        return self.alpha * float(np.linalg.norm(x))

    def radial_slope(self, r):
        return self.alpha * np.ones_like(r)


class Quartic(RadialObjective):
    """f(x) = alpha/4 |x|^4."""

    name = "quartic"

    def _value(self, x):
        r2 = float(x @ x)
        return 0.25 * self.alpha * r2 * r2

    def radial_slope(self, r):
        return self.alpha * r**3


class MaxAffine(Objective):
    """f(x) = max_i <a_i, x> + b_i.

    The subgradient is the slope of the lowest-index piece attaining the max.
    """

    name = "max_affine"

    def __init__(self, slopes, intercepts=None):
        slopes = np.atleast_2d(np.asarray(slopes, dtype=float))
        if slopes.ndim != 2 or slopes.shape[0] < 1:
            raise ValueError("slopes must be a nonempty (pieces, dim) array")
        if intercepts is None:
            intercepts = np.zeros(slopes.shape[0])
        intercepts = np.asarray(intercepts, dtype=float).reshape(-1)
        if intercepts.shape[0] != slopes.shape[0]:
            raise ValueError("need one intercept per piece")
        if not (np.all(np.isfinite(slopes)) and np.all(np.isfinite(intercepts))):
            raise ValueError("coefficients must be finite")
        self.slopes = slopes
        self.intercepts = intercepts
        self.slopes.setflags(write=False)
        self.intercepts.setflags(write=False)
        lip = float(np.max(np.linalg.norm(slopes, axis=1)))
        minimizer, min_value = _max_affine_minimum(slopes, intercepts)
        super().__init__(slopes.shape[1], max(lip, np.finfo(float).tiny),
                         minimizer=minimizer, min_value=min_value)

    def pieces(self, x) -> np.ndarray:
        return self.slopes @ as_point(x, self.dim) + self.intercepts

    def _value(self, x):
        return np.max(self.slopes @ x + self.intercepts)

    def _subgradient(self, x):
        # argmax returns the first maximizer: lowest index wins ties
        return self.slopes[int(np.argmax(self.slopes @ x + self.intercepts))].copy()

    def raw_subgradients(self, points):
        points = np.asarray(points, dtype=float).reshape(-1, self.dim)
        return self.slopes[np.argmax(points @ self.slopes.T + self.intercepts, axis=1)]


def _max_affine_minimum(slopes, intercepts):
    """Minimizer and minimum of a max-affine function via an epigraph LP.

    Returns ``(None, None)`` when the function is unbounded below.
    """
    from scipy.optimize import linprog

    m, d = slopes.shape
    # variables (x, t): minimize t s.t. a_i.x + b_i <= t
    c = np.zeros(d + 1)
    c[-1] = 1.0
    a_ub = np.hstack([slopes, -np.ones((m, 1))])
    res = linprog(c, A_ub=a_ub, b_ub=-intercepts, bounds=[(None, None)] * (d + 1),
                  method="highs")
    if res.status != 0:
        return None, None
    x = res.x[:d]
    return x, float(np.max(slopes @ x + intercepts))


class MaxQuadratics(Objective):
    """f(x) = max_i <g_i, x> + x^T H_i x.

    With sum g_i = 0 and sum H_i = I the average of the pieces is |x|^2/m,
    so f >= 0 = f(0) and the origin is the unique global minimizer.
    """

    name = "max_quadratics"

    def __init__(self, linear, quadratic, spec: InstanceSpec | None = None):
        linear = np.asarray(linear, dtype=float)
        quadratic = np.asarray(quadratic, dtype=float)
        m, d = linear.shape
        if quadratic.shape != (m, d, d):
            raise ValueError("quadratic terms must have shape (pieces, dim, dim)")
        self.linear = linear
        self.quadratic = quadratic
        self.linear.setflags(write=False)
        self.quadratic.setflags(write=False)
        self.spec = spec
        # on the unit ball |g_i + 2 H_i x| <= |g_i| + 2 ||H_i||_2
        lip = max(np.linalg.norm(linear[i]) + 2.0 * np.linalg.norm(quadratic[i], 2)
                  for i in range(m))
        super().__init__(d, float(lip), minimizer=np.zeros(d), min_value=0.0)

    def pieces(self, x) -> np.ndarray:
        x = as_point(x, self.dim)
        return self.linear @ x + np.einsum("j,ijk,k->i", x, self.quadratic, x)

    def piece_gradients(self, x) -> np.ndarray:
        x = as_point(x, self.dim)
        return self.linear + 2.0 * self.quadratic @ x

    def _value(self, x):
        return np.max(self.pieces(x))

    def _subgradient(self, x):
        i = int(np.argmax(self.pieces(x)))
        return self.linear[i] + 2.0 * self.quadratic[i] @ x

    def raw_subgradients(self, points):
        points = np.asarray(points, dtype=float).reshape(-1, self.dim)
        vals = points @ self.linear.T + np.einsum("nj,ijk,nk->ni", points, self.quadratic, points)
        idx = np.argmax(vals, axis=1)
        return self.linear[idx] + 2.0 * np.einsum("njk,nk->nj", self.quadratic[idx], points)


@dataclass(frozen=True)
class InstanceSpec:
    """Seed and shape of a random max-of-quadratics instance."""

    seed: int
    dimension: int = 10
    pieces: int = 5

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str | dict) -> "InstanceSpec":
        data = json.loads(text) if isinstance(text, str) else dict(text)
        extra = set(data) - {"seed", "dimension", "pieces"}
        if extra:
            raise ValueError(f"unknown InstanceSpec fields: {sorted(extra)}")
        return cls(seed=int(data["seed"]), dimension=int(data["dimension"]),
                   pieces=int(data["pieces"]))


def make_max_quadratics(spec: InstanceSpec) -> MaxQuadratics:
    """Build the seeded random max-of-quadratics instance.

    Stream order on a PCG64 generator seeded with ``spec.seed``: the vectors
    g_1..g_{m-1} (m-1 draws of d entries each), then for each of
    H_1..H_{m-1} the upper triangle in row-major order, d(d+1)/2 entries.
    Every draw is uniform on [-1, 1]. The last piece is completed so that
    the g_i sum to zero and the H_i sum to the identity.
    """
    m, d = int(spec.pieces), int(spec.dimension)
    if m < 2:
        raise ValueError("need at least two pieces")
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if not 0 <= spec.seed < 2**64:
        raise ValueError("seed must be an unsigned 64-bit integer")
    rng = np.random.Generator(np.random.PCG64(spec.seed))
    linear = np.empty((m, d))
    linear[: m - 1] = rng.uniform(-1.0, 1.0, size=(m - 1, d))
    linear[m - 1] = -linear[: m - 1].sum(axis=0)

    quadratic = np.empty((m, d, d))
    iu = np.triu_indices(d)
    for i in range(m - 1):
        h = np.zeros((d, d))
        h[iu] = rng.uniform(-1.0, 1.0, size=iu[0].size)
        quadratic[i] = h + np.triu(h, 1).T
    quadratic[m - 1] = np.eye(d) - quadratic[: m - 1].sum(axis=0)
    return MaxQuadratics(linear, quadratic, spec=spec)


_RADIAL = {
    "half_sq_norm": HalfSquaredNorm,
    "scaled_norm": ScaledNorm,
    "quartic": Quartic,
}


def builtin(name: str, alpha: float = 1.0, dim: int = 1, slopes=None, intercepts=None) -> Objective:
    """Construct a named builtin objective.

    ``max_affine`` takes its pieces from ``slopes``/``intercepts`` and
    ignores ``alpha`` and ``dim``.
    """
    if name in _RADIAL:
        return _RADIAL[name](alpha, dim)
    if name == "max_affine":
        if slopes is None:
            raise ValueError("max_affine needs slopes")
        return MaxAffine(slopes, intercepts)
    raise ValueError(f"unknown builtin {name!r}")


def abs_value() -> MaxAffine:
    """|x| on R as the max of the pieces x and -x."""
    return MaxAffine([[1.0], [-1.0]])
