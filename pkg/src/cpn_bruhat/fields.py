"""Scalar fields on the momentum-angle chart and the named registry.

Fields act on the interleaved state ``(x_1, phi_1, ..., x_n, phi_n)``.
Torus-invariant fields ignore the angles and may carry an analytic
x-gradient.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .charts import MomentumAnglePoint

FD_STEP = 1e-5


def as_state(point) -> np.ndarray:
    if isinstance(point, MomentumAnglePoint):
        return point.state()
    return np.asarray(point, dtype=float)


def central_gradient(func: Callable[[np.ndarray], float], s: np.ndarray, h: float = FD_STEP) -> np.ndarray:
    s = np.asarray(s, dtype=float)
    g = np.empty_like(s)
    e = np.zeros_like(s)
    for i in range(s.size):
        e[i] = h
        g[i] = (func(s + e) - func(s - e)) / (2 * h)
        e[i] = 0.0
    return g


@dataclass(frozen=True)
class ScalarField:
    """Real function on the chart.

    ``value`` takes a state vector. ``grad_x`` (torus-invariant fields only)
    takes the momentum vector and returns ``d/dx``; ``grad`` takes a state
    and returns the full interleaved gradient.
    """

    n: int
    value: Callable[[np.ndarray], float]
    grad: Optional[Callable[[np.ndarray], np.ndarray]] = None
    grad_x: Optional[Callable[[np.ndarray], np.ndarray]] = None
    torus_invariant: bool = False
    name: str = "field"

    @classmethod
    def from_x(cls, n: int, f: Callable[[np.ndarray], float],
               grad_x: Optional[Callable[[np.ndarray], np.ndarray]] = None, name: str = "field"):
        """Torus-invariant field given as a function of the momenta only."""
        return cls(n, lambda s: f(s[0::2]), grad_x=grad_x, torus_invariant=True, name=name)

    def __call__(self, point) -> float:
        return float(self.value(as_state(point)))

    def at_x(self, x) -> float:
        s = np.zeros(2 * self.n)
        s[0::2] = x
        return float(self.value(s))

    def gradient(self, point, h: float = FD_STEP) -> np.ndarray:
        s = as_state(point)
        if self.grad is not None:
            return np.asarray(self.grad(s), dtype=float)
        if self.grad_x is not None:
            g = np.zeros(2 * self.n)
            g[0::2] = self.grad_x(s[0::2])
            return g
        return central_gradient(self.value, s, h)

    def gradient_x(self, x, h: float = FD_STEP) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.grad_x is not None:
            return np.asarray(self.grad_x(x), dtype=float)
        s = np.zeros(2 * self.n)
        s[0::2] = x
        return self.gradient(s, h)[0::2]


def elementary_values(c) -> np.ndarray:
    """``e_0 .. e_n`` of ``c`` along the last axis, adding one variable at a time."""
    c = np.asarray(c, dtype=float)
    n = c.shape[-1]
    if c.ndim == 1:
        # plain floats beat array slicing at these sizes
        out = [1.0] + [0.0] * n
        for m, v in enumerate(c.tolist(), start=1):
            for k in range(m, 0, -1):
                out[k] += v * out[k - 1]
        return np.array(out)
    e = np.zeros(c.shape[:-1] + (n + 1,))
    e[..., 0] = 1.0
    for m in range(1, n + 1):
        e[..., 1:m + 1] = e[..., 1:m + 1] + c[..., m - 1:m] * e[..., 0:m]
    return e


def _suffix_sum_matrix(n: int) -> np.ndarray:
    # d/dx_a = sum_{m >= a} d/dc_m, so grad_x = U @ grad_c with U upper triangular ones
    return np.triu(np.ones((n, n)))


def elementary_field(n: int, k: int) -> ScalarField:
    """``e_k(c_1, ..., c_n)`` with its analytic x-gradient."""
    if not 0 <= k <= n:
        raise ValueError(f"k={k} outside 0..{n}")
    U = _suffix_sum_matrix(n)

    def f(x):
        return elementary_values(np.cumsum(x))[k]

    def g(x):
        if k == 0:
            return np.zeros(n)
        c = np.cumsum(x)
        e = elementary_values(c)
        # d e_k / d c_m = e_{k-1}(c without c_m) = sum_i (-c_m)^i e_{k-1-i}(c)
        powers = (-c[:, None]) ** np.arange(k)
        return U @ (powers @ e[k - 1::-1])

    return ScalarField.from_x(n, f, g, name=f"e_{k}")


def power_sum_field(n: int, k: int) -> ScalarField:
    """``p_k = c_1^k + ... + c_n^k``."""
    U = _suffix_sum_matrix(n)

    def f(x):
        return float(np.sum(np.cumsum(x) ** k))

    def g(x):
        return U @ (k * np.cumsum(x) ** (k - 1)) if k else np.zeros(n)

    return ScalarField.from_x(n, f, g, name=f"p_{k}")


def linear_field(a, name: str = "linear") -> ScalarField:
    """``a_1 x_1 + ... + a_n x_n``."""
    a = np.asarray(a, dtype=float)
    return ScalarField.from_x(a.size, lambda x: float(a @ x), lambda x: a.copy(), name=name)


def weighted_momentum(n: int) -> ScalarField:
    """``n x_1 + (n-1) x_2 + ... + x_n``, which equals ``c_1 + ... + c_n``."""
    return linear_field(np.arange(n, 0, -1, dtype=float), name="f1")


def x_sum(n: int) -> ScalarField:
    return linear_field(np.ones(n), name="x-sum")


def coordinate_field(n: int, index: int) -> ScalarField:
    """The state coordinate with interleaved position ``index``."""
    e = np.zeros(2 * n)
    e[index] = 1.0
    return ScalarField(n, lambda s: float(s[index]), grad=lambda s: e.copy(),
                       torus_invariant=index % 2 == 0, name=f"s[{index}]")


def registry_field(key: str, n: int) -> ScalarField:
    """Resolve a short id: ``f1``, ``e-sum``, ``x-sum``, ``e_k:<k>``, ``p_k:<k>``."""
    if key == "f1":
        return weighted_momentum(n)
    if key == "e-sum":
        weights = np.arange(n, 0, -1, dtype=float)
        return ScalarField.from_x(n, lambda x: float(np.sum(np.cumsum(x))),
                                  lambda x: weights.copy(), name="e-sum")
    if key == "x-sum":
        return x_sum(n)
    for prefix, build in (("e_k:", elementary_field), ("p_k:", power_sum_field)):
        if key.startswith(prefix):
            try:
                k = int(key[len(prefix):])
            except ValueError:
                break
            if not 1 <= k <= (n if prefix == "e_k:" else 64):
                raise KeyError(f"degree out of range in {key!r}")
            return build(n, k)
    raise KeyError(f"unknown field id {key!r}")


REGISTRY_IDS = ("f1", "e-sum", "x-sum", "e_k:<k>", "p_k:<k>")
