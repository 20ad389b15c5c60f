"""Pointwise dense exterior algebra.

A grade-k element over a ``dim``-dimensional space is stored as a dense
vector over all ``C(dim, k)`` strictly increasing index tuples, in
lexicographic order. Indices are 0-based here; the basis of the
momentum-angle chart is ``(x_1, phi_1, ..., x_n, phi_n)`` mapped to
``0 .. 2n-1``.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import comb

import numpy as np

from .errors import DegenerateDenominator, DimensionMismatch, GradeOverflow

DEFAULT_EPS = 1e-12


@lru_cache(maxsize=None)
def basis_slots(dim: int, grade: int) -> tuple[tuple[int, ...], ...]:
    """All increasing index tuples of length ``grade`` in lexicographic order."""
    return tuple(combinations(range(dim), grade))


@lru_cache(maxsize=None)
def _masks(dim: int, grade: int) -> tuple[np.ndarray, dict[int, int]]:
    slots = basis_slots(dim, grade)
    masks = np.array([sum(1 << i for i in s) for s in slots], dtype=np.int64)
    return masks, {int(m): pos for pos, m in enumerate(masks)}


def _merge_sign(ma: int, mb: int) -> int:
    # parity of pairs (i in A, j in B) with i > j
    swaps = 0
    while mb:
        low = mb & -mb
        j = low.bit_length() - 1
        swaps += bin(ma >> (j + 1)).count("1")
        mb ^= low
    return -1 if swaps & 1 else 1


@dataclass(frozen=True)
class MultiVector:
    """Dense alternating tensor of a fixed grade at a single point."""

    dim: int
    grade: int
    coeffs: np.ndarray

    def __post_init__(self):
        if not 0 <= self.grade <= self.dim:
            raise GradeOverflow(f"grade {self.grade} outside 0..{self.dim}")
        c = np.asarray(self.coeffs, dtype=float)
        if c.shape != (comb(self.dim, self.grade),):
            raise DimensionMismatch(
                f"expected {comb(self.dim, self.grade)} coefficients, got {c.shape}")
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zero(cls, dim: int, grade: int):
        return cls(dim, grade, np.zeros(comb(dim, grade)))

    @classmethod
    def scalar(cls, dim: int, value: float = 1.0):
        return cls(dim, 0, np.array([float(value)]))

    @classmethod
    def basis(cls, dim: int, indices, value: float = 1.0):
        """``value * e_{i1} ^ e_{i2} ^ ...``; unsorted indices pick up the permutation sign."""
        idx = list(indices)
        if len(set(idx)) != len(idx):
            return cls.zero(dim, len(idx))
        if any(not 0 <= i < dim for i in idx):
            raise DimensionMismatch(f"index out of range for dim {dim}: {idx}")
        sign = 1
        for a in range(len(idx)):
            for b in range(a + 1, len(idx)):
                if idx[a] > idx[b]:
                    sign = -sign
        out = np.zeros(comb(dim, len(idx)))
        _, lookup = _masks(dim, len(idx))
        out[lookup[sum(1 << i for i in idx)]] = sign * value
        return cls(dim, len(idx), out)

    @classmethod
    def top(cls, dim: int, value: float = 1.0):
        return cls(dim, dim, np.array([float(value)]))

    @classmethod
    def from_matrix(cls, P: np.ndarray):
        """Grade-2 element with coefficient ``P[i, j]`` on slot ``(i, j)``, ``i < j``."""
        P = np.asarray(P, dtype=float)
        d = P.shape[0]
        iu = np.triu_indices(d, 1)
        # triu_indices enumerates (i, j) row-major, which is the lexicographic slot order
        return cls(d, 2, P[iu])

    @classmethod
    def from_tensor(cls, T: np.ndarray):
        """Canonical components ``T[i, j, ...]`` of a totally antisymmetric array."""
        T = np.asarray(T, dtype=float)
        d, k = T.shape[0], T.ndim
        return cls(d, k, np.array([T[s] for s in basis_slots(d, k)]))

    def to_matrix(self) -> np.ndarray:
        if self.grade != 2:
            raise GradeOverflow("to_matrix needs a grade-2 element")
        P = np.zeros((self.dim, self.dim))
        iu = np.triu_indices(self.dim, 1)
        P[iu] = self.coeffs
        return P - P.T

    def __getitem__(self, indices) -> float:
        idx = tuple(indices)
        return float(self.basis(self.dim, idx).coeffs @ self.coeffs) if idx else float(self.coeffs[0])

    def _like(self, coeffs):
        return type(self)(self.dim, self.grade, coeffs)

    def __add__(self, other):
        _check_same(self, other)
        return self._like(self.coeffs + other.coeffs)

    def __sub__(self, other):
        _check_same(self, other)
        return self._like(self.coeffs - other.coeffs)

    def __mul__(self, s: float):
        return self._like(self.coeffs * s)

    __rmul__ = __mul__

    def __neg__(self):
        return self._like(-self.coeffs)

    def __xor__(self, other):
        return wedge(self, other)

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.coeffs))) if self.coeffs.size else 0.0

    def top_coefficient(self) -> float:
        if self.grade != self.dim:
            raise GradeOverflow(f"grade {self.grade} is not top degree {self.dim}")
        return float(self.coeffs[0])


class MultiForm(MultiVector):
    """Covariant counterpart of :class:`MultiVector`, same storage."""


def _check_same(a: MultiVector, b: MultiVector):
    if a.dim != b.dim or a.grade != b.grade:
        raise DimensionMismatch(
            f"shape mismatch: (dim {a.dim}, grade {a.grade}) vs (dim {b.dim}, grade {b.grade})")


def wedge(a: MultiVector, b: MultiVector) -> MultiVector:
    if a.dim != b.dim:
        raise DimensionMismatch(f"dim {a.dim} != {b.dim}")
    if type(a) is not type(b):
        raise DimensionMismatch("cannot wedge a multivector with a multiform")
    grade = a.grade + b.grade
    if grade > a.dim:
        raise GradeOverflow(f"grade {a.grade} + {b.grade} exceeds dim {a.dim}")
    ma, _ = _masks(a.dim, a.grade)
    mb, _ = _masks(a.dim, b.grade)
    _, lookup = _masks(a.dim, grade)
    out = np.zeros(comb(a.dim, grade))
    ia = np.flatnonzero(a.coeffs)
    ib = np.flatnonzero(b.coeffs)
    for i in ia:
        mi = int(ma[i])
        ci = a.coeffs[i]
        for j in ib:
            mj = int(mb[j])
            if mi & mj:
                continue
            out[lookup[mi | mj]] += _merge_sign(mi, mj) * ci * b.coeffs[j]
    return type(a)(a.dim, grade, out)


def wedge_power(a: MultiVector, k: int) -> MultiVector:
    if k < 0:
        raise ValueError("k must be non-negative")
    if k * a.grade > a.dim:
        raise GradeOverflow(f"{k} * grade {a.grade} exceeds dim {a.dim}")
    out = type(a).scalar(a.dim)
    for _ in range(k):
        out = wedge(out, a)
    return out


def pair(v: MultiVector, a: MultiVector) -> float:
    """Duality pairing with ``<e_I, e^J> = delta_IJ`` on canonical slots."""
    _check_same(v, a)
    return float(v.coeffs @ a.coeffs)


def top_ratio(v: MultiVector, w: MultiVector, eps: float = DEFAULT_EPS) -> float:
    num, den = v.top_coefficient(), w.top_coefficient()
    if v.dim != w.dim:
        raise DimensionMismatch(f"dim {v.dim} != {w.dim}")
    if abs(den) <= eps:
        raise DegenerateDenominator(f"top coefficient {den!r} below {eps}")
    return num / den
