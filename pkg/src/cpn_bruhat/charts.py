"""Coordinate charts on the big cell ``Z_0 != 0`` of CP^n.

The tower is homogeneous ``Z`` -> affine ``z = Z[1:]/Z[0]`` -> polar
``(r, phi)`` -> momentum-angle ``(x, phi)`` with
``x_i = delta_{1i} - r_i^2 / (1 + |z|^2)``, plus Lu coordinates ``y``, the
logarithmic coordinates ``q_i = log(1 + |y_i|^2)`` and the prefix sums
``c_k = x_1 + ... + x_k``. On the open cell ``1 > c_1 > ... > c_n > 0``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .errors import InvalidSimplexPoint, OutsideBigCell

DEFAULT_MARGIN = 0.05
DEFAULT_EPS = 1e-12
TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class HomogeneousPoint:
    Z: np.ndarray

    def __post_init__(self):
        Z = np.asarray(self.Z, dtype=complex)
        if Z.ndim != 1 or Z.size < 2:
            raise ValueError("need a complex vector of length n + 1 >= 2")
        if not np.any(Z != 0):
            raise ValueError("all homogeneous coordinates vanish")
        object.__setattr__(self, "Z", Z)

    @property
    def n(self) -> int:
        return self.Z.size - 1

    def same_point(self, other: "HomogeneousPoint", tol: float = 1e-10) -> bool:
        """Equality up to a nonzero complex scale."""
        a, b = self.Z, other.Z
        if a.size != b.size:
            return False
        a = a / np.linalg.norm(a)
        b = b / np.linalg.norm(b)
        return abs(abs(np.vdot(a, b)) - 1.0) < tol


@dataclass(frozen=True)
class AffinePoint:
    z: np.ndarray

    def __post_init__(self):
        z = np.atleast_1d(np.asarray(self.z, dtype=complex))
        if not np.all(np.isfinite(z)):
            raise ValueError("affine coordinates must be finite")
        object.__setattr__(self, "z", z)

    @property
    def n(self) -> int:
        return self.z.size


@dataclass(frozen=True)
class LuPoint:
    y: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "y", np.atleast_1d(np.asarray(self.y, dtype=complex)))

    @property
    def n(self) -> int:
        return self.y.size


@dataclass(frozen=True)
class QPoint:
    q: np.ndarray

    def __post_init__(self):
        q = np.atleast_1d(np.asarray(self.q, dtype=float))
        if np.any(q < 0):
            raise ValueError("q coordinates are non-negative")
        object.__setattr__(self, "q", q)


@dataclass(frozen=True)
class MomentumAnglePoint:
    """Action-angle point: momenta ``x`` and unreduced angles ``phi``.

    Construction does not validate, so closure points such as the vertex
    ``x = (1, 0, ..., 0)`` can be represented; call :meth:`validate` for the
    simplex invariants.
    """

    x: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        x = np.atleast_1d(np.asarray(self.x, dtype=float))
        phi = np.atleast_1d(np.asarray(self.phi, dtype=float))
        if x.shape != phi.shape or x.ndim != 1:
            raise ValueError(f"x and phi shapes differ: {x.shape} vs {phi.shape}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "phi", phi)

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def c(self) -> np.ndarray:
        return c_from_x(self.x)

    @classmethod
    def from_c(cls, c, phi=None):
        c = np.atleast_1d(np.asarray(c, dtype=float))
        return cls(x_from_c(c), np.zeros_like(c) if phi is None else phi)

    @classmethod
    def from_state(cls, state):
        s = np.asarray(state, dtype=float)
        return cls(s[0::2], s[1::2])

    def state(self) -> np.ndarray:
        """Interleaved vector ``(x_1, phi_1, ..., x_n, phi_n)``."""
        s = np.empty(2 * self.n)
        s[0::2] = self.x
        s[1::2] = self.phi
        return s

    def validate(self, strict: bool = True) -> "MomentumAnglePoint":
        check_simplex(self.c, strict=strict)
        return self

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "x": self.x.tolist(), "phi": self.phi.tolist()})

    @classmethod
    def from_json(cls, text: str, strict: bool = True):
        try:
            obj = json.loads(text)
            n, x, phi = int(obj["n"]), obj["x"], obj["phi"]
        except (ValueError, KeyError, TypeError) as exc:
            raise ValueError(f"invalid point JSON: {exc}") from exc
        if len(x) != n or len(phi) != n:
            raise ValueError(f"point JSON lengths do not match n={n}")
        return cls(x, phi).validate(strict=strict)


def check_simplex(c, strict: bool = True) -> None:
    """Raise :class:`InvalidSimplexPoint` unless ``1 > c_1 > ... > c_n > 0``.

    With ``strict=False`` ties and ``c_1 = 1`` are accepted; ``c_n > 0`` is
    always required (the big cell).
    """
    c = np.asarray(c, dtype=float)
    if not np.all(np.isfinite(c)):
        raise InvalidSimplexPoint("non-finite momentum coordinates")
    chain = np.concatenate([[1.0], c, [0.0]])
    steps = chain[:-1] - chain[1:]
    ok = np.all(steps > 0) if strict else (np.all(steps[:-1] >= 0) and steps[-1] > 0)
    if not ok:
        raise InvalidSimplexPoint(f"c = {c.tolist()} violates 1 > c_1 >= ... >= c_n > 0")


def angles_close(a, b, tol: float = 1e-10) -> bool:
    d = np.mod(np.asarray(a) - np.asarray(b) + np.pi, TWO_PI) - np.pi
    return bool(np.all(np.abs(d) <= tol))


def c_from_x(x) -> np.ndarray:
    return np.cumsum(np.asarray(x, dtype=float))


def x_from_c(c) -> np.ndarray:
    c = np.asarray(c, dtype=float)
    return np.diff(c, prepend=0.0)


def affine_from_homogeneous(p: HomogeneousPoint, eps: float = DEFAULT_EPS) -> AffinePoint:
    if abs(p.Z[0]) <= eps:
        raise OutsideBigCell(f"|Z_0| = {abs(p.Z[0])!r} <= {eps}")
    return AffinePoint(p.Z[1:] / p.Z[0])


def momentum_from_affine(p: AffinePoint) -> MomentumAnglePoint:
    r2 = np.abs(p.z) ** 2
    phi = np.where(r2 > 0, np.angle(p.z), 0.0)
    x = -r2 / (1.0 + r2.sum())
    x[0] += 1.0
    return MomentumAnglePoint(x, phi)


def affine_from_momentum(p: MomentumAnglePoint) -> AffinePoint:
    c = p.c
    check_simplex(c, strict=False)
    prev = np.concatenate([[1.0], c[:-1]])
    r = np.sqrt((prev - c) / c[-1])
    return AffinePoint(r * np.exp(1j * p.phi))


def c_from_homogeneous(p: HomogeneousPoint) -> np.ndarray:
    """Momentum prefix sums ``c_k = (|Z_0|^2 + sum_{i>k} |Z_i|^2) / |Z|^2``.

    Agrees with ``momentum_from_affine`` on the big cell and extends
    continuously to the points with ``Z_0 = 0``.
    """
    w = np.abs(p.Z) ** 2
    w = w / w.sum()
    tail = np.cumsum(w[::-1])[::-1]  # tail[i] = sum_{j >= i} w_j
    return w[0] + np.append(tail[2:], 0.0)


def lu_from_affine(p: AffinePoint) -> LuPoint:
    r2 = np.abs(p.z) ** 2
    tail = np.append(np.cumsum(r2[::-1])[::-1][1:], 0.0)  # sum_{j > i} |z_j|^2
    return LuPoint(p.z / np.sqrt(1.0 + tail))


def affine_from_lu(p: LuPoint) -> AffinePoint:
    y = p.y
    z = np.empty_like(y)
    tail = 0.0
    for i in range(y.size - 1, -1, -1):
        z[i] = y[i] * np.sqrt(1.0 + tail)
        tail += abs(z[i]) ** 2
    return AffinePoint(z)


def q_from_lu(p: LuPoint) -> QPoint:
    return QPoint(np.log1p(np.abs(p.y) ** 2))


def x_from_q(q: QPoint) -> np.ndarray:
    """``x_1 = exp(-q_1)``, ``x_j = exp(-(q_1+..+q_j)) - exp(-(q_1+..+q_{j-1}))``."""
    # exp(-(q_1+..+q_k)) is the prefix sum c_k
    return x_from_c(np.exp(-np.cumsum(q.q)))


def dx_dq(q: QPoint) -> np.ndarray:
    """Jacobian ``d x_a / d q_i`` of :func:`x_from_q`."""
    s = np.exp(-np.cumsum(q.q))  # s_j = c_j
    n = s.size
    J = np.zeros((n, n))
    for a in range(n):
        for i in range(a + 1):
            # d s_a / d q_i = -s_a for i <= a
            J[a, i] = -s[a] + (s[a - 1] if (a > 0 and i <= a - 1) else 0.0)
    return J


class PointSampler:
    """Seeded sampler of interior momentum-angle points.

    Owns its generator, so one sampler per thread of execution.
    """

    def __init__(self, seed: int | None = 0, margin: float = DEFAULT_MARGIN):
        self.rng = np.random.default_rng(seed)
        self.margin = margin

    def sample(self, n: int, margin: float | None = None) -> MomentumAnglePoint:
        margin = self.margin if margin is None else margin
        if not 0 < margin < 0.5:
            raise ValueError(f"margin must lie in (0, 0.5), got {margin}")
        while True:
            c = np.sort(self.rng.uniform(margin, 1.0 - margin, size=n))[::-1]
            if n == 1 or np.all(np.diff(c) < 0):
                break
        phi = self.rng.uniform(0.0, TWO_PI, size=n)
        return MomentumAnglePoint(x_from_c(c), phi)

    def sample_many(self, n: int, count: int, margin: float | None = None) -> list[MomentumAnglePoint]:
        return [self.sample(n, margin) for _ in range(count)]


def random_point(n: int, seed: int | None = 0, margin: float = DEFAULT_MARGIN) -> MomentumAnglePoint:
    return PointSampler(seed).sample(n, margin)


def centroid(n: int) -> MomentumAnglePoint:
    """Centroid of the open simplex ``1 > c_1 > ... > c_n > 0``."""
    return MomentumAnglePoint.from_c(1.0 - np.arange(1, n + 1) / (n + 1.0))
