"""Bivector fields in the momentum-angle chart.

Coefficient matrices are antisymmetric ``2n x 2n`` arrays in the basis
``(x_1, phi_1, ..., x_n, phi_n)``. Brackets are ``{f, g} = P^{ij} d_i f d_j g``
and the hamiltonian vector field of ``f`` is ``X_f = {f, .}``, which makes
``X_{x_1} = +d/dphi_1`` under the symplectic structure.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from . import charts
from .exterior import MultiVector
from .fields import FD_STEP, ScalarField, as_state, central_gradient

ANTISYMMETRY_TOL = 1e-14


def xi(i: int) -> int:
    """Basis index of ``x_{i+1}``."""
    return 2 * i


def phii(i: int) -> int:
    """Basis index of ``phi_{i+1}``."""
    return 2 * i + 1


@dataclass(frozen=True)
class BivectorField:
    """Antisymmetric coefficient field; ``coeff_jac`` returns ``dP[l, i, j] = d_l P^{ij}``."""

    n: int
    coeff: Callable[[np.ndarray], np.ndarray]
    coeff_jac: Optional[Callable[[np.ndarray], np.ndarray]] = None
    name: str = "P"
    constant: bool = False

    def matrix(self, point) -> np.ndarray:
        return self.coeff(as_state(point))

    def jacobian(self, point, analytic: bool = True, h: float = FD_STEP) -> np.ndarray:
        s = as_state(point)
        if analytic and self.coeff_jac is not None:
            return self.coeff_jac(s)
        d = 2 * self.n
        J = np.empty((d, d, d))
        e = np.zeros(d)
        for l in range(d):
            e[l] = h
            J[l] = (self.coeff(s + e) - self.coeff(s - e)) / (2 * h)
            e[l] = 0.0
        return J

    def bivector(self, point) -> MultiVector:
        return MultiVector.from_matrix(self.matrix(point))

    def is_antisymmetric(self, point, tol: float = ANTISYMMETRY_TOL) -> bool:
        P = self.matrix(point)
        return bool(np.max(np.abs(P + P.T), initial=0.0) <= tol)

    def __add__(self, other: "BivectorField") -> "BivectorField":
        return combine(1.0, self, 1.0, other)


def combine(alpha: float, P: BivectorField, beta: float, Q: BivectorField) -> BivectorField:
    if P.n != Q.n:
        raise ValueError(f"n mismatch: {P.n} vs {Q.n}")
    jac = None
    if P.coeff_jac is not None and Q.coeff_jac is not None:
        def jac(s):
            return alpha * P.coeff_jac(s) + beta * Q.coeff_jac(s)
    return BivectorField(P.n, lambda s: alpha * P.coeff(s) + beta * Q.coeff(s), jac,
                         name=f"{alpha:g}*{P.name}+{beta:g}*{Q.name}",
                         constant=P.constant and Q.constant)


def make_pi_s(n: int) -> BivectorField:
    """Inverse of ``omega = sum dx_i ^ dphi_i``: unit coefficient on each ``(x_i, phi_i)``."""
    if n < 1:
        raise ValueError("n must be at least 1")
    d = 2 * n
    P = np.zeros((d, d))
    for i in range(n):
        P[xi(i), phii(i)] = 1.0
        P[phii(i), xi(i)] = -1.0
    P.setflags(write=False)
    J = np.zeros((d, d, d))
    return BivectorField(n, lambda s: P.copy(), lambda s: J.copy(), name="pi_s", constant=True)


def make_pi_inf(n: int) -> BivectorField:
    """Bruhat bivector ``sum_i Theta_i ^ d/dphi_i``.

    ``Theta_i = c_i d/dx_i + sum_{j>i} x_j d/dx_j``, so slot ``(x_a, phi_i)``
    holds ``c_i`` when ``a == i``, ``x_a`` when ``a > i`` and 0 otherwise.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    d = 2 * n
    J = np.zeros((d, d, d))
    for i in range(n):
        for m in range(i + 1):
            J[xi(m), xi(i), phii(i)] = 1.0
        for a in range(i + 1, n):
            J[xi(a), xi(a), phii(i)] = 1.0
    J = J - J.transpose(0, 2, 1)
    J.setflags(write=False)
    rows = np.repeat(np.arange(n), n).reshape(n, n)  # rows[a, i] = a
    cols = rows.T
    lower = rows > cols

    def coeff(s):
        x = s[0::2]
        T = np.where(lower, x[rows], 0.0)
        T[np.diag_indices(n)] = np.cumsum(x)
        P = np.zeros((d, d))
        P[0::2, 1::2] = T
        P[1::2, 0::2] = -T.T
        return P

    return BivectorField(n, coeff, lambda s: J.copy(), name="pi_inf")


@dataclass(frozen=True)
class PoissonPencil:
    """``alpha * first + beta * second``; by default ``first`` is Bruhat, ``second`` symplectic."""

    alpha: float
    beta: float
    first: BivectorField
    second: BivectorField

    def __post_init__(self):
        if self.alpha == 0 and self.beta == 0:
            raise ValueError("(alpha, beta) must not both vanish")

    @classmethod
    def standard(cls, n: int, alpha: float, beta: float):
        return cls(alpha, beta, make_pi_inf(n), make_pi_s(n))

    def field(self) -> BivectorField:
        return combine(self.alpha, self.first, self.beta, self.second)


def pencil_field(p: PoissonPencil, point) -> np.ndarray:
    s = as_state(point)
    return p.alpha * p.first.coeff(s) + p.beta * p.second.coeff(s)


def bracket(f: ScalarField, g: ScalarField, P: BivectorField, point) -> float:
    s = as_state(point)
    return float(f.gradient(s) @ P.coeff(s) @ g.gradient(s))


def hamiltonian_vf(f: ScalarField, P: BivectorField, point) -> np.ndarray:
    """``X_f^i = sum_j d_j f P^{ji}``, the derivation ``g -> {f, g}``."""
    s = as_state(point)
    return f.gradient(s) @ P.coeff(s)


def schouten_tensor(P: BivectorField, Q: BivectorField, point, analytic: bool = True,
                    h: float = FD_STEP) -> np.ndarray:
    """Full ``2n x 2n x 2n`` array of ``[P, Q]^{ijk}``."""
    if P.n != Q.n:
        raise ValueError(f"n mismatch: {P.n} vs {Q.n}")
    s = as_state(point)
    Pm, Qm = P.coeff(s), Q.coeff(s)
    dP, dQ = P.jacobian(s, analytic, h), Q.jacobian(s, analytic, h)

    def cyc(A, dB):
        t = np.einsum("li,ljk->ijk", A, dB)
        # t[i,j,k] + t[j,k,i] + t[k,i,j]
        return t + t.transpose(2, 0, 1) + t.transpose(1, 2, 0)

    return cyc(Pm, dQ) + cyc(Qm, dP)


@dataclass(frozen=True)
class TrivectorValue:
    """Schouten bracket at a point; empty when ``2n < 3``."""

    tensor: np.ndarray

    @property
    def dim(self) -> int:
        return self.tensor.shape[0]

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.tensor), initial=0.0))

    def multivector(self) -> MultiVector | None:
        return MultiVector.from_tensor(self.tensor) if self.dim >= 3 else None


def schouten(P: BivectorField, Q: BivectorField, point, analytic: bool = True,
             h: float = FD_STEP) -> TrivectorValue:
    return TrivectorValue(schouten_tensor(P, Q, point, analytic, h))


def _bracket_field(g: ScalarField, h: ScalarField, P: BivectorField) -> ScalarField:
    return ScalarField(P.n, lambda s: float(g.gradient(s) @ P.coeff(s) @ h.gradient(s)),
                       name=f"{{{g.name},{h.name}}}")


def jacobiator(P: BivectorField, f: ScalarField, g: ScalarField, h: ScalarField, point) -> float:
    """``{f,{g,h}} + {g,{h,f}} + {h,{f,g}}``, inner brackets differentiated numerically."""
    s = as_state(point)
    total = 0.0
    for a, b, c in ((f, g, h), (g, h, f), (h, f, g)):
        inner = _bracket_field(b, c, P)
        grad_inner = central_gradient(inner.value, s)
        total += float(a.gradient(s) @ P.coeff(s) @ grad_inner)
    return total


def recursion_operator(point, n: int | None = None) -> np.ndarray:
    """``N = pi_inf o pi_s^{-1}`` on the tangent space; ``N = I`` when ``pi_inf`` is replaced by ``pi_s``."""
    s = as_state(point)
    n = s.size // 2 if n is None else n
    Pinf = make_pi_inf(n).coeff(s)
    Ps = make_pi_s(n).coeff(s)
    # pi_s^{-1} = -pi_s for the canonical structure
    return Pinf @ (-Ps)


# Bruhat bivector rebuilt from Lu coordinates through the logarithmic chart.

def lu_form_matrix(y: np.ndarray) -> np.ndarray:
    """``sqrt(-1) sum (1+|y_i|^2) d/dy_i ^ d/dybar_i`` in real coordinates ``(u_1, v_1, ...)``.

    With ``y = u + i v``, ``d/dy ^ d/dybar = (i/2) d/du ^ d/dv``, so each block
    is ``-(1+|y_i|^2)/2`` on slot ``(u_i, v_i)``.
    """
    y = np.asarray(y, dtype=complex)
    n = y.size
    P = np.zeros((2 * n, 2 * n))
    for i in range(n):
        w = -(1.0 + abs(y[i]) ** 2) / 2.0
        P[2 * i, 2 * i + 1] = w
        P[2 * i + 1, 2 * i] = -w
    return P


def jac_lu_to_qphi(y: np.ndarray) -> np.ndarray:
    """Jacobian of ``(u_i, v_i) -> (q_i, phi_i)`` with ``q = log(1+u^2+v^2)``, ``phi = atan2(v, u)``."""
    y = np.asarray(y, dtype=complex)
    n = y.size
    J = np.zeros((2 * n, 2 * n))
    for i in range(n):
        u, v = y[i].real, y[i].imag
        rho2 = u * u + v * v
        J[2 * i, 2 * i] = 2 * u / (1 + rho2)
        J[2 * i, 2 * i + 1] = 2 * v / (1 + rho2)
        J[2 * i + 1, 2 * i] = -v / rho2
        J[2 * i + 1, 2 * i + 1] = u / rho2
    return J


def jac_qphi_to_xphi(q: charts.QPoint) -> np.ndarray:
    n = q.q.size
    J = np.zeros((2 * n, 2 * n))
    J[0::2, 0::2] = charts.dx_dq(q)
    J[1::2, 1::2] = np.eye(n)
    return J


def action_angle_matrix(n: int, sign: float = 1.0) -> np.ndarray:
    """``sign * sum d/dq_i ^ d/dphi_i`` in the basis ``(q_1, phi_1, ...)``."""
    return sign * make_pi_s(n).coeff(np.zeros(2 * n))


def bruhat_in_qphi(point) -> np.ndarray:
    """Lu-form bivector pushed to ``(q, phi)``."""
    y = _lu_of(point)
    J = jac_lu_to_qphi(y)
    return J @ lu_form_matrix(y) @ J.T


def bruhat_via_q_route(point) -> np.ndarray:
    """Bruhat bivector at ``point`` via Lu -> (q, phi) -> (x, phi) pushforwards."""
    y = _lu_of(point)
    q = charts.q_from_lu(charts.LuPoint(y))
    J = jac_qphi_to_xphi(q) @ jac_lu_to_qphi(y)
    return J @ lu_form_matrix(y) @ J.T


def push_action_angle(point, sign: float = 1.0) -> np.ndarray:
    """``sign * sum d/dq ^ d/dphi`` pushed to the momentum chart."""
    y = _lu_of(point)
    q = charts.q_from_lu(charts.LuPoint(y))
    J = jac_qphi_to_xphi(q)
    return J @ action_angle_matrix(y.size, sign) @ J.T


def _lu_of(point) -> np.ndarray:
    s = as_state(point)
    p = charts.MomentumAnglePoint.from_state(s)
    return charts.lu_from_affine(charts.affine_from_momentum(p)).y
