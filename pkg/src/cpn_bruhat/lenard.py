"""Lenard recursion for the pencil (pi_inf, pi_s) on torus-invariant functions.

A step takes ``g`` to the function ``h`` with
``hamiltonian_vf(h, pi_s) == hamiltonian_vf(g, pi_inf)``. For functions of
the momenta alone both fields point along the angles, so the step asks for
``grad_x h = alpha`` with ``alpha_i = Theta_i g``; ``h`` exists when
``alpha`` is closed and is recovered by a line integral from a base point.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from numpy.polynomial.legendre import leggauss

from .charts import MomentumAnglePoint, centroid
from .errors import NotClosed, NotTorusInvariant
from .fields import FD_STEP, ScalarField, as_state, power_sum_field
from .poisson import hamiltonian_vf, make_pi_inf, make_pi_s

OneForm = Callable[[np.ndarray], np.ndarray]

CLOSED_TOL = 1e-6
QUAD_NODES = 32
QUAD_RTOL = 1e-10
MAX_PANELS = 64
RANK_RTOL = 1e-8


def _x_of(point) -> np.ndarray:
    if isinstance(point, MomentumAnglePoint):
        return point.x
    return np.asarray(point, dtype=float)


def _theta_matrix(x: np.ndarray) -> np.ndarray:
    """Matrix ``T`` with ``(Theta_i g) = (T @ grad_x g)_i``."""
    n = x.size
    T = np.triu(np.broadcast_to(x, (n, n)), 1)  # T[i, a] = x_a for a > i
    T[np.diag_indices(n)] = np.cumsum(x)
    return T


def oneform_of(g: ScalarField) -> OneForm:
    """``x -> (Theta_1 g, ..., Theta_n g)`` as a callable."""
    if not g.torus_invariant:
        raise NotTorusInvariant(f"{g.name} depends on the angles")

    def alpha(x):
        x = np.asarray(x, dtype=float)
        return _theta_matrix(x) @ g.gradient_x(x)

    return alpha


def lenard_oneform(g: ScalarField, point) -> np.ndarray:
    """Angle components of ``hamiltonian_vf(g, pi_inf)`` at ``point``."""
    if not g.torus_invariant:
        raise NotTorusInvariant(f"{g.name} depends on the angles")
    s = as_state(point)
    if s.size == g.n:
        s = np.column_stack([s, np.zeros(g.n)]).ravel()
    return hamiltonian_vf(g, make_pi_inf(g.n), s)[1::2]


def closedness_residual(alpha: OneForm, samples: Sequence, h: float = FD_STEP) -> float:
    """``max |d alpha_i / dx_j - d alpha_j / dx_i|`` over samples, by central differences."""
    worst = 0.0
    for p in samples:
        x = _x_of(p)
        n = x.size
        D = np.empty((n, n))  # D[j, i] = d alpha_i / d x_j
        e = np.zeros(n)
        for j in range(n):
            e[j] = h
            D[j] = (alpha(x + e) - alpha(x - e)) / (2 * h)
            e[j] = 0.0
        worst = max(worst, float(np.max(np.abs(D - D.T), initial=0.0)))
    return worst


def line_integral(alpha: OneForm, base: np.ndarray, x: np.ndarray,
                  nodes: int = QUAD_NODES, rtol: float = QUAD_RTOL) -> float:
    """``int_0^1 alpha(base + t (x - base)) . (x - base) dt`` by composite Gauss-Legendre.

    Panels are halved until the relative change drops below ``rtol``.
    """
    d = x - base
    if not np.any(d):
        return 0.0
    t0, w0 = leggauss(nodes)

    def composite(panels):
        edges = np.linspace(0.0, 1.0, panels + 1)
        total = 0.0
        for a, b in zip(edges[:-1], edges[1:]):
            ts = 0.5 * (b - a) * t0 + 0.5 * (a + b)
            total += 0.5 * (b - a) * sum(w * float(alpha(base + t * d) @ d) for t, w in zip(ts, w0))
        return total

    panels = 1
    prev = composite(panels)
    while panels < MAX_PANELS:
        panels *= 2
        cur = composite(panels)
        if abs(cur - prev) <= rtol * max(abs(cur), 1e-300) or abs(cur - prev) < 1e-15:
            return cur
        prev = cur
    return prev


def integrate_potential(alpha: OneForm, base_point, n: int | None = None,
                        check_points: Sequence = (), tol: float = CLOSED_TOL,
                        name: str = "potential") -> ScalarField:
    """Potential of a closed one-form, normalized to vanish at ``base_point``.

    ``check_points`` are the samples on which closedness is certified first.
    """
    base = _x_of(base_point).copy()
    n = base.size if n is None else n
    if check_points:
        res = closedness_residual(alpha, check_points)
        if res > tol:
            raise NotClosed(f"closedness residual {res:.3e} exceeds {tol:.1e}")
    return ScalarField.from_x(n, lambda x: line_integral(alpha, base, np.asarray(x, dtype=float)),
                              lambda x: np.asarray(alpha(np.asarray(x, dtype=float)), dtype=float),
                              name=name)


@dataclass
class LenardChain:
    members: list[ScalarField]
    closedness_residuals: list[float]
    base_point: MomentumAnglePoint
    tol: float = CLOSED_TOL

    def __len__(self):
        return len(self.members)


def lenard_chain(seed: ScalarField, K: int, base_point: Optional[MomentumAnglePoint] = None,
                 check_points: Sequence = (), tol: float = CLOSED_TOL) -> LenardChain:
    """``members[0] = seed`` and ``members[j+1]`` the potential of ``Theta(members[j])``.

    Returns ``K`` members. Each step's one-form is certified closed on
    ``check_points`` (default: the base point) before integrating.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    if not seed.torus_invariant:
        raise NotTorusInvariant(f"{seed.name} depends on the angles")
    base = centroid(seed.n) if base_point is None else base_point
    pts = list(check_points) or [base]
    members = [seed]
    residuals = []
    for j in range(1, K):
        alpha = oneform_of(members[-1])
        res = closedness_residual(alpha, pts)
        residuals.append(res)
        if res > tol:
            raise NotClosed(f"step {j}: closedness residual {res:.3e} exceeds {tol:.1e}")
        members.append(integrate_potential(alpha, base, seed.n, name=f"g_{j + 1}"))
    return LenardChain(members, residuals, base, tol)


def _rank(M: np.ndarray, rtol: float) -> int:
    sv = np.linalg.svd(M, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0
    return int(np.sum(sv > rtol * sv[0]))


def independence_rank(fields: Sequence[ScalarField], points: Sequence, rtol: float = RANK_RTOL) -> int:
    """Generic rank of the x-differentials: the largest pointwise rank over ``points``."""
    best = 0
    for p in points:
        x = _x_of(p)
        M = np.array([f.gradient_x(x) for f in fields])
        best = max(best, _rank(M, rtol))
    return best


def pointwise_ranks(fields: Sequence[ScalarField], points: Sequence, rtol: float = RANK_RTOL) -> list[int]:
    return [_rank(np.array([f.gradient_x(_x_of(p)) for f in fields]), rtol) for p in points]


def gradient_alignment(f: ScalarField, ref: ScalarField, points: Sequence) -> tuple[float, list[float]]:
    """Smallest cosine between ``grad f`` and ``grad ref`` and the ratios ``<df, dref>/|dref|^2``."""
    worst = 1.0
    ratios = []
    for p in points:
        x = _x_of(p)
        a, b = f.gradient_x(x), ref.gradient_x(x)
        worst = min(worst, float(a @ b / (np.linalg.norm(a) * np.linalg.norm(b))))
        ratios.append(float(a @ b / (b @ b)))
    return worst, ratios


def vector_field_ratios(chain: LenardChain, points: Sequence) -> list[list[float]]:
    """Per step, ``X^{pi_inf}_{g_j}`` against ``X^{pi_s}_{g_{j+1}}`` at each point.

    Entries are the scalar ``r`` with ``X_inf = r X_s`` (least squares); the
    residual of that fit is checked by :func:`vector_field_parallelism`.
    """
    n = chain.members[0].n
    pinf, ps = make_pi_inf(n), make_pi_s(n)
    out = []
    for g, h in zip(chain.members, chain.members[1:]):
        row = []
        for p in points:
            a = hamiltonian_vf(g, pinf, p)
            b = hamiltonian_vf(h, ps, p)
            row.append(float(a @ b / (b @ b)))
        out.append(row)
    return out


def vector_field_parallelism(chain: LenardChain, points: Sequence) -> float:
    """Largest ``|X_inf - r X_s| / |X_inf|`` over steps and points."""
    n = chain.members[0].n
    pinf, ps = make_pi_inf(n), make_pi_s(n)
    worst = 0.0
    for g, h in zip(chain.members, chain.members[1:]):
        for p in points:
            a = hamiltonian_vf(g, pinf, p)
            b = hamiltonian_vf(h, ps, p)
            r = a @ b / (b @ b)
            worst = max(worst, float(np.linalg.norm(a - r * b) / np.linalg.norm(a)))
    return worst


def chain_involution_max(chain: LenardChain, points: Sequence) -> float:
    n = chain.members[0].n
    structures = (make_pi_s(n), make_pi_inf(n))
    worst = 0.0
    for p in points:
        s = as_state(p)
        grads = [m.gradient(s) for m in chain.members]
        for P in structures:
            M = P.coeff(s)
            for i in range(len(grads)):
                for j in range(i + 1, len(grads)):
                    worst = max(worst, abs(float(grads[i] @ M @ grads[j])))
    return worst


def reference_family(seed_id: str, n: int, K: int) -> Optional[list[ScalarField]]:
    """Closed forms the chain should be parallel to, or ``None`` when not known.

    Seed ``e-sum`` (``c_1 + ... + c_n``) is compared with the power sums
    ``p_k``; seed ``x-sum`` with the powers ``(x_1 + ... + x_n)^k``.
    """
    if seed_id in ("e-sum", "f1"):
        return [power_sum_field(n, k) for k in range(1, K + 1)]
    if seed_id == "x-sum":
        ones = np.ones(n)

        def power(k):
            return ScalarField.from_x(n, lambda x: float(np.sum(x)) ** k,
                                      lambda x: k * float(np.sum(x)) ** (k - 1) * ones,
                                      name=f"xsum^{k}")

        return [power(k) for k in range(1, K + 1)]
    return None


@dataclass
class ChainReport:
    seed: str
    K: int
    residuals: list[float]
    ratios: list[float]
    rank: int
    involution_max: float
    min_cosine: Optional[float] = None
    ratio_spread: list[float] = field(default_factory=list)
    vf_parallelism: float = 0.0

    def to_json(self) -> str:
        return json.dumps({
            "seed": self.seed, "K": self.K, "residuals": self.residuals, "ratios": self.ratios,
            "rank": self.rank, "involution_max": self.involution_max,
        }, sort_keys=True)


def run_chain(seed_id: str, seed: ScalarField, K: int, points: Sequence,
              base_point: Optional[MomentumAnglePoint] = None) -> ChainReport:
    """Build the chain and collect residuals, ratios against the reference family, rank and brackets."""
    chain = lenard_chain(seed, K, base_point, check_points=points)
    ref = reference_family(seed_id, seed.n, K)
    ratios, spreads, cos = [], [], None
    if ref is not None:
        cos = 1.0
        for member, target in zip(chain.members, ref):
            c, r = gradient_alignment(member, target, points)
            cos = min(cos, c)
            ratios.append(float(np.mean(r)))
            spreads.append(float(np.max(r) - np.min(r)))
    return ChainReport(
        seed=seed_id, K=K, residuals=chain.closedness_residuals, ratios=ratios,
        rank=independence_rank(chain.members, points), involution_max=chain_involution_max(chain, points),
        min_cosine=cos, ratio_spread=spreads, vf_parallelism=vector_field_parallelism(chain, points),
    )
