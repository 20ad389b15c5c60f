"""Hamiltonian flows in the momentum-angle chart.

Fixed-step classical Runge-Kutta on ``s' = hamiltonian_vf(h, P, s)`` with
angles left unwrapped. Also the torus fixed points of CP^n with the values of
``c_1 + ... + c_n`` there.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .charts import TWO_PI, HomogeneousPoint, MomentumAnglePoint, c_from_homogeneous, x_from_c
from .errors import LeftDomain
from .fields import ScalarField, as_state, elementary_values
from .poisson import BivectorField

SIMPLEX_SLACK = 1e-9


@dataclass
class Trajectory:
    times: np.ndarray
    states: np.ndarray  # shape (steps + 1, 2n), interleaved
    hamiltonian: str
    structure: str

    @property
    def n(self) -> int:
        return self.states.shape[1] // 2

    def x(self) -> np.ndarray:
        return self.states[:, 0::2]

    def phi(self) -> np.ndarray:
        return self.states[:, 1::2]

    def point(self, i: int) -> MomentumAnglePoint:
        return MomentumAnglePoint.from_state(self.states[i])

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        n = self.n
        w.writerow(["t"] + [f"x_{i}" for i in range(1, n + 1)] + [f"phi_{i}" for i in range(1, n + 1)])
        for t, s in zip(self.times, self.states):
            w.writerow([repr(float(t))] + [repr(float(v)) for v in s[0::2]] + [repr(float(v)) for v in s[1::2]])
        return buf.getvalue()


def _in_simplex(x: np.ndarray, margin: float) -> bool:
    c = np.cumsum(x)
    chain = np.concatenate([[1.0], c, [0.0]])
    return bool(np.all(chain[:-1] - chain[1:] >= margin - SIMPLEX_SLACK))


def integrate(h: ScalarField, P: BivectorField, start, T: float, dt: float,
              margin: float = 0.0) -> Trajectory:
    """Classical fourth-order Runge-Kutta with fixed step ``dt`` up to time ``T``.

    The step count is ``ceil(T / dt)``; the final step is shortened so the
    trajectory ends exactly at ``T``. Raises :class:`LeftDomain` when the
    momenta leave the simplex shrunk by ``margin``.
    """
    if dt <= 0:
        raise ValueError("dt must be positive")
    if T < 0:
        raise ValueError("T must be non-negative")
    s = as_state(start).astype(float)
    steps = int(np.ceil(T / dt - 1e-9)) if T > 0 else 0
    times = np.empty(steps + 1)
    states = np.empty((steps + 1, s.size))
    times[0], states[0] = 0.0, s

    def f(y):
        return h.gradient(y) @ P.coeff(y)

    t = 0.0
    for i in range(1, steps + 1):
        step = min(dt, T - t)
        k1 = f(s)
        k2 = f(s + 0.5 * step * k1)
        k3 = f(s + 0.5 * step * k2)
        k4 = f(s + step * k3)
        s = s + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        t = i * dt if i < steps else T
        if not _in_simplex(s[0::2], margin):
            raise LeftDomain(f"state left the simplex at t={t:.6g}: x={s[0::2].tolist()}")
        times[i], states[i] = t, s
    return Trajectory(times, states, h.name, P.name)


def conservation_report(traj: Trajectory, family: Sequence[ScalarField]) -> float:
    """``max |f_k(state) - f_k(start)|`` over time and the family."""
    worst = 0.0
    for f in family:
        v0 = f.value(traj.states[0])
        for s in traj.states[1:]:
            worst = max(worst, abs(f.value(s) - v0))
    return worst


def elementary_drift(traj: Trajectory) -> float:
    """:func:`conservation_report` for the family ``e_1(c) .. e_n(c)``, evaluated in one pass."""
    e = elementary_values(np.cumsum(traj.x(), axis=1))[:, 1:]
    return float(np.max(np.abs(e - e[0]), initial=0.0))


@dataclass
class PeriodReport:
    n: int
    expected: list[float]
    measured: list[float]
    return_error: list[float]
    x_drift: float

    @property
    def max_period_error(self) -> float:
        return max(abs(a - b) for a, b in zip(self.expected, self.measured))

    def to_dict(self) -> dict:
        return {"n": self.n, "expected": self.expected, "measured": self.measured,
                "return_error": self.return_error, "x_drift": self.x_drift,
                "max_period_error": self.max_period_error}


def torus_period_check(traj: Trajectory) -> PeriodReport:
    """Angular periods of a flow of ``n x_1 + ... + x_n`` under the symplectic structure.

    Each period is measured from the mean angular velocity over the run and
    the return error is the angle at ``t = 2 pi / (n + 1 - i)`` (linear
    interpolation between samples) minus the start, reduced mod ``2 pi``.
    """
    n = traj.n
    phi = traj.phi()
    T = traj.times[-1]
    expected = [TWO_PI / (n + 1 - i) for i in range(1, n + 1)]
    measured, returns = [], []
    for i in range(n):
        omega = (phi[-1, i] - phi[0, i]) / T
        measured.append(float(TWO_PI / omega))
        tp = expected[i]
        if tp <= T:
            val = np.interp(tp, traj.times, phi[:, i])
            d = np.mod(val - phi[0, i] + np.pi, TWO_PI) - np.pi
            returns.append(float(abs(d)))
        else:
            returns.append(float("nan"))
    x_drift = float(np.max(np.abs(traj.x() - traj.x()[0])))
    return PeriodReport(n, expected, measured, returns, x_drift)


def commutation_defect(fi: ScalarField, fj: ScalarField, P: BivectorField, start,
                       t: float, s: float, dt: float) -> float:
    """Distance between ``flow_j(s) o flow_i(t)`` and ``flow_i(t) o flow_j(s)`` applied to ``start``."""
    a = integrate(fi, P, start, t, dt).states[-1]
    a = integrate(fj, P, a, s, dt).states[-1]
    b = integrate(fj, P, start, s, dt).states[-1]
    b = integrate(fi, P, b, t, dt).states[-1]
    return float(np.max(np.abs(a - b)))


@dataclass
class Vertex:
    index: int
    homogeneous: list[int]
    c: list[float]
    x: list[float]
    c_sum: float
    f1_ratio: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def fixed_point_table(n: int) -> list[Vertex]:
    """Torus-fixed points ``e_0 .. e_n`` with their ``c`` and the values of ``c_1 + ... + c_n``.

    ``c_sum`` is the value of ``n x_1 + ... + x_n``; ``f1_ratio = c_sum / n``
    is the same function normalized as the top-degree ratio.
    """
    out = []
    for j in range(n + 1):
        Z = np.zeros(n + 1)
        Z[j] = 1.0
        c = c_from_homogeneous(HomogeneousPoint(Z))
        e1 = float(elementary_values(c)[1])
        out.append(Vertex(j, Z.astype(int).tolist(), c.tolist(), x_from_c(c).tolist(), e1, e1 / n))
    return out


def fixed_point_values(n: int) -> list[float]:
    return [v.c_sum for v in fixed_point_table(n)]
