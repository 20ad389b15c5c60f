"""The invariant family of the pencil (pi_inf, pi_s) and its checks.

``f_k`` is defined two ways at a point: as the top-degree ratio
``pi_inf^k ^ pi_s^(n-k) / pi_s^n`` and as the pairing
``<pi_inf^k, omega^k>``. Both are compared against the elementary symmetric
polynomials ``e_k`` of the prefix sums ``c``; the proportionality constants
are measured rather than assumed.
"""
from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from math import comb
from typing import Sequence

import numpy as np

from .charts import MomentumAnglePoint
from .errors import NonconstantRatio
from .exterior import MultiForm, MultiVector, pair, top_ratio, wedge, wedge_power
from .fields import elementary_field, elementary_values
from .poisson import PoissonPencil, make_pi_inf, make_pi_s, recursion_operator


@lru_cache(maxsize=None)
def _pi_s_powers(n: int) -> tuple[MultiVector, ...]:
    ps = make_pi_s(n).bivector(np.zeros(2 * n))
    return tuple(wedge_power(ps, k) for k in range(n + 1))


@lru_cache(maxsize=None)
def _omega_powers(n: int) -> tuple[MultiForm, ...]:
    ps = make_pi_s(n).bivector(np.zeros(2 * n))
    omega = MultiForm(ps.dim, 2, ps.coeffs)  # same slots: dx_i ^ dphi_i
    return tuple(wedge_power(omega, k) for k in range(n + 1))


def _pi_inf_powers(point, n: int) -> list[MultiVector]:
    pinf = make_pi_inf(n).bivector(point)
    out = [MultiVector.scalar(2 * n)]
    for _ in range(n):
        out.append(wedge(out[-1], pinf))
    return out


def _n_of(point) -> int:
    return point.n if isinstance(point, MomentumAnglePoint) else len(point) // 2


def f_family_ratio(point) -> np.ndarray:
    """``f_j = pi_inf^j ^ pi_s^(n-j) / pi_s^n`` for ``j = 1..n``."""
    n = _n_of(point)
    ps = _pi_s_powers(n)
    pinf = _pi_inf_powers(point, n)
    return np.array([top_ratio(wedge(pinf[j], ps[n - j]), ps[n]) for j in range(1, n + 1)])


def f_pairing(point, k: int) -> float:
    """``<pi_inf^k, omega^k>``; equal to 1 for ``k = 0``."""
    n = _n_of(point)
    pk = wedge_power(make_pi_inf(n).bivector(point), k)
    wk = _omega_powers(n)[k]
    return pair(MultiForm(pk.dim, pk.grade, pk.coeffs), wk)


def f_family_pairing(point) -> np.ndarray:
    n = _n_of(point)
    pinf = _pi_inf_powers(point, n)
    om = _omega_powers(n)
    return np.array([pair(MultiForm(pinf[k].dim, pinf[k].grade, pinf[k].coeffs), om[k])
                     for k in range(1, n + 1)])


def elementary_sym(c) -> np.ndarray:
    """``(e_1, ..., e_n)`` of ``c``."""
    return elementary_values(c)[1:]


@dataclass
class ElementaryReport:
    n: int
    constants: list[float]
    spread: list[float]
    pairing_constants: list[float]
    pairing_spread: list[float]
    binomial_hypothesis: bool
    samples: int

    def to_dict(self) -> dict:
        return asdict(self)


def _ratio_stats(num: np.ndarray, den: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    r = num / den
    mean = r.mean(axis=0)
    spread = (r.max(axis=0) - r.min(axis=0)) / np.abs(mean)
    return mean, spread


def verify_elementary_theorem(points: Sequence[MomentumAnglePoint], tol: float = 1e-9,
                              raise_on_fail: bool = True) -> ElementaryReport:
    """Check that ``e_k(c) / f_k`` is the same at every point, per ``k``."""
    if len(points) < 2:
        raise ValueError("need at least two sample points")
    n = points[0].n
    e = np.array([elementary_sym(p.c) for p in points])
    fr = np.array([f_family_ratio(p) for p in points])
    fp = np.array([f_family_pairing(p) for p in points])
    const, spread = _ratio_stats(e, fr)
    pconst, pspread = _ratio_stats(fp, fr)
    binom = np.array([comb(n, k) for k in range(1, n + 1)], dtype=float)
    report = ElementaryReport(
        n=n,
        constants=const.tolist(),
        spread=spread.tolist(),
        pairing_constants=pconst.tolist(),
        pairing_spread=pspread.tolist(),
        binomial_hypothesis=bool(np.allclose(const, binom, rtol=1e-9, atol=0)),
        samples=len(points),
    )
    worst = max(spread.max(), pspread.max())
    if raise_on_fail and worst > tol:
        raise NonconstantRatio(f"relative spread {worst:.3e} exceeds {tol:.1e}")
    return report


@dataclass
class InvolutionReport:
    n: int
    max_bracket_s: float
    max_bracket_b: float
    max_bracket_pencil: float = 0.0
    pencils: list[tuple[float, float]] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def involution_suite(points: Sequence[MomentumAnglePoint],
                     pencils: Sequence[tuple[float, float]] = ()) -> InvolutionReport:
    """Largest ``|{f_i, f_j}|`` under pi_s, pi_inf and the given pencil members."""
    n = points[0].n
    fam = [elementary_field(n, k) for k in range(1, n + 1)]
    structures = {"s": make_pi_s(n), "b": make_pi_inf(n)}
    for a, b in pencils:
        structures[(a, b)] = PoissonPencil.standard(n, a, b).field()
    worst = {key: 0.0 for key in structures}
    for p in points:
        s = p.state()
        grads = [f.gradient(s) for f in fam]
        for key, P in structures.items():
            M = P.coeff(s)
            for i in range(n):
                for j in range(i + 1, n):
                    worst[key] = max(worst[key], abs(float(grads[i] @ M @ grads[j])))
    pencil_max = max((v for k, v in worst.items() if isinstance(k, tuple)), default=0.0)
    return InvolutionReport(n, worst["s"], worst["b"], pencil_max, [tuple(pc) for pc in pencils])


def invariants_json(elem: ElementaryReport, inv: InvolutionReport) -> str:
    """``{n, constants, max_bracket_s, max_bracket_b, spread}``."""
    return json.dumps({
        "n": elem.n,
        "constants": elem.constants,
        "max_bracket_s": inv.max_bracket_s,
        "max_bracket_b": inv.max_bracket_b,
        "spread": elem.spread,
    }, sort_keys=True)


def recursion_traces(point, kmax: int) -> np.ndarray:
    """``tr(N^k)`` for ``k = 0..kmax``."""
    N = recursion_operator(point)
    out = np.empty(kmax + 1)
    Nk = np.eye(N.shape[0])
    for k in range(kmax + 1):
        out[k] = np.trace(Nk)
        Nk = Nk @ N
    return out


def f_from_traces(point) -> np.ndarray:
    """``e_k(c)`` recovered from traces of powers of the recursion operator.

    Each eigenvalue of ``N`` is doubled, so ``p_k = tr(N^k)/2`` and Newton's
    identities give the elementary polynomials.
    """
    n = _n_of(point)
    p = recursion_traces(point, n)[1:] / 2.0
    e = np.zeros(n + 1)
    e[0] = 1.0
    for k in range(1, n + 1):
        e[k] = sum((-1) ** (i - 1) * e[k - i] * p[i - 1] for i in range(1, k + 1)) / k
    return e[1:]
