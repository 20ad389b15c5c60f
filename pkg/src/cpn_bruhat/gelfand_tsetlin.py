"""Rank-one coadjoint orbits in u(n+1)* and their Gelfand-Tsetlin patterns.

A unitary frame ``A`` gives the orbit point ``M = A B A^{-1}`` with
``B = i*lam*E_11``, i.e. ``M = i*lam*v v^*`` for the first column ``v``, and
the projective point ``[a_11 : ... : a_{n+1,1}]``. Row ``k`` of the pattern
holds the eigenvalues of an ``(n+1-k)``-dimensional principal submatrix of
``-iM``; which nested chain of submatrices is meant is a convention, so the
identity ``mu_1^k = lam * c_sigma(k)`` is tested under several of them.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import charts
from .errors import EigenNoConvergence, MultipleConventionsMatch, NoConventionMatches

INTERLACING_SLACK = 1e-9
JACOBI_TOL = 1e-12
MAX_SWEEPS = 100


def jacobi_eigenvalues(H: np.ndarray, tol: float = JACOBI_TOL, max_sweeps: int = MAX_SWEEPS) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix by cyclic Jacobi, descending.

    The complex ``m x m`` matrix is embedded as the real symmetric
    ``[[Re, -Im], [Im, Re]]``, whose spectrum is that of ``H`` with every
    eigenvalue doubled.
    """
    H = np.asarray(H)
    m = H.shape[0]
    if m == 0:
        return np.zeros(0)
    A = np.block([[H.real, -H.imag], [H.imag, H.real]]).astype(float)
    A = 0.5 * (A + A.T)
    d = 2 * m
    scale = max(np.max(np.abs(A)), 1.0)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.triu(A, 1) ** 2))
        if off <= tol * scale:
            ev = np.sort(np.diag(A))[::-1]
            return ev[0::2].copy()
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = A[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (A[q, q] - A[p, p]) / (2.0 * apq)
                t = np.sign(theta) / (abs(theta) + np.sqrt(theta * theta + 1.0)) if theta != 0 else 1.0
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                # A <- R^T A R, R the rotation in the (p, q) plane
                ap, aq = A[:, p].copy(), A[:, q].copy()
                A[:, p] = c * ap - s * aq
                A[:, q] = s * ap + c * aq
                ap, aq = A[p, :].copy(), A[q, :].copy()
                A[p, :] = c * ap - s * aq
                A[q, :] = s * ap + c * aq
                A[p, q] = A[q, p] = 0.0
    raise EigenNoConvergence(f"cyclic Jacobi did not converge in {max_sweeps} sweeps (size {m})")


@dataclass(frozen=True)
class UnitaryFrame:
    A: np.ndarray

    def __post_init__(self):
        A = np.asarray(self.A, dtype=complex)
        if A.ndim != 2 or A.shape[0] != A.shape[1]:
            raise ValueError("frame must be square")
        if np.linalg.norm(A.conj().T @ A - np.eye(A.shape[0])) > 1e-10:
            raise ValueError("frame columns are not orthonormal")
        object.__setattr__(self, "A", A)

    @property
    def size(self) -> int:
        return self.A.shape[0]

    @classmethod
    def identity(cls, size: int):
        return cls(np.eye(size, dtype=complex))


def random_unitary(size: int, seed: int | None = 0, rng: np.random.Generator | None = None) -> UnitaryFrame:
    """Haar-distributed frame from the QR factorization of a complex Gaussian."""
    rng = np.random.default_rng(seed) if rng is None else rng
    G = rng.normal(size=(size, size)) + 1j * rng.normal(size=(size, size))
    Q, R = np.linalg.qr(G)
    d = np.diag(R)
    return UnitaryFrame(Q * (d / np.abs(d)))


@dataclass(frozen=True)
class OrbitMatrix:
    M: np.ndarray
    lam: float

    @property
    def n(self) -> int:
        return self.M.shape[0] - 1

    def hermitian(self) -> np.ndarray:
        """``-iM``, a rank-one Hermitian matrix with eigenvalues ``{lam, 0, ...}``."""
        return -1j * self.M

    def check(self, tol: float = 1e-10) -> None:
        M = self.M
        if np.max(np.abs(M + M.conj().T)) > tol:
            raise ValueError("orbit matrix is not skew-Hermitian")
        ev = np.linalg.eigvalsh(self.hermitian())
        expected = np.zeros(M.shape[0])
        expected[-1] = self.lam
        if np.max(np.abs(np.sort(ev) - expected)) > tol:
            raise ValueError(f"spectrum {ev} is not {{lam, 0, ...}}")


def orbit_point(frame: UnitaryFrame, lam: float = 1.0) -> OrbitMatrix:
    if lam <= 0:
        raise ValueError("lam must be positive")
    v = frame.A[:, 0]
    return OrbitMatrix(1j * lam * np.outer(v, v.conj()), lam)


def orbit_point_conjugation(frame: UnitaryFrame, lam: float = 1.0) -> OrbitMatrix:
    """``A B A^{-1}`` by explicit matrix products."""
    B = np.zeros((frame.size, frame.size), dtype=complex)
    B[0, 0] = 1j * lam
    return OrbitMatrix(frame.A @ B @ np.linalg.inv(frame.A), lam)


def project_to_cpn(frame: UnitaryFrame) -> charts.HomogeneousPoint:
    return charts.HomogeneousPoint(frame.A[:, 0].copy())


# Nested chains: for row k (k = 1..n) the index set of the principal submatrix.
#   UL        leading block {0, ..., n-k}
#   LR        trailing block {k, ..., n}
#   ANCHORED  {0} together with the trailing block {k+1, ..., n}
CHAINS = ("UL", "LR", "ANCHORED")
ORDERS = ("identity", "reversed")
LITERAL_CONVENTIONS = tuple((ch, o) for ch in ("UL", "LR") for o in ORDERS)
ALL_CONVENTIONS = tuple((ch, o) for ch in CHAINS for o in ORDERS)


def chain_indices(chain: str, n: int, k: int) -> tuple[int, ...]:
    m = n + 1 - k
    if chain == "UL":
        return tuple(range(m))
    if chain == "LR":
        return tuple(range(k, n + 1))
    if chain == "ANCHORED":
        return (0,) + tuple(range(k + 1, n + 1))
    raise ValueError(f"unknown chain {chain!r}; expected one of {CHAINS}")


def c_index(order: str, n: int, k: int) -> int:
    """1-based index ``sigma(k)``: ``n-k+1`` for the literal formula, ``k`` reversed."""
    if order == "identity":
        return n - k + 1
    if order == "reversed":
        return k
    raise ValueError(f"unknown order {order!r}; expected one of {ORDERS}")


@dataclass
class GTPattern:
    """Rows ``1..n`` (row ``k`` has ``n+1-k`` entries, descending) plus the top spectrum."""

    top: np.ndarray
    rows: list[np.ndarray]
    chain: str = "UL"

    def interlaces(self, slack: float = INTERLACING_SLACK) -> bool:
        seq = [self.top] + list(self.rows)
        for upper, lower in zip(seq, seq[1:]):
            for i in range(lower.size):
                if not (upper[i] + slack >= lower[i] >= upper[i + 1] - slack):
                    return False
        return True

    def to_json(self) -> str:
        return json.dumps({"chain": self.chain, "top": self.top.tolist(),
                           "rows": [r.tolist() for r in self.rows]})

    def triangle(self, fmt: str = "{:.6g}", include_top: bool = False) -> str:
        """Centered text rendering of the rows, optionally under the top spectrum."""
        seq = ([self.top] if include_top else []) + list(self.rows)
        cells = [[fmt.format(v + 0.0) for v in row] for row in seq]
        width = max(len(c) for row in cells for c in row)
        lines = []
        for depth, row in enumerate(cells):
            pad = " " * (depth * (width + 1) // 2)
            lines.append(pad + " ".join(c.rjust(width) for c in row))
        return "\n".join(lines)


def gt_pattern(M: OrbitMatrix, convention: str = "UL") -> GTPattern:
    H = M.hermitian()
    n = M.n
    top = jacobi_eigenvalues(H)
    rows = []
    for k in range(1, n + 1):
        idx = chain_indices(convention, n, k)
        rows.append(jacobi_eigenvalues(H[np.ix_(idx, idx)]))
    return GTPattern(top, rows, convention)


def rank_one_rows(frame: UnitaryFrame, lam: float, convention: str) -> list[np.ndarray]:
    """Closed form for rank-one orbits: row ``k`` is ``(lam * |v_I|^2, 0, ..., 0)``."""
    v = frame.A[:, 0]
    n = frame.size - 1
    out = []
    for k in range(1, n + 1):
        idx = list(chain_indices(convention, n, k))
        row = np.zeros(len(idx))
        row[0] = lam * float(np.sum(np.abs(v[idx]) ** 2))
        out.append(row)
    return out


def momentum_c(frame: UnitaryFrame) -> np.ndarray:
    """Prefix sums ``c`` of the projected point through the affine chart."""
    p = charts.momentum_from_affine(charts.affine_from_homogeneous(project_to_cpn(frame)))
    return p.c


def _convention_key(conv: tuple[str, str], n: int):
    chain, order = conv
    return tuple((chain_indices(chain, n, k), c_index(order, n, k)) for k in range(1, n + 1))


@dataclass
class MuReport:
    n: int
    lam: float
    residuals: dict[str, float]
    matched: list[str]
    classes: list[list[str]]
    samples_used: int
    samples_skipped: int
    max_subleading: float
    interlacing: bool
    tol: float = 1e-8
    notes: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def _label(conv) -> str:
    return f"{conv[0]}/{conv[1]}"


def verify_mu_formula(frames: Sequence[UnitaryFrame], lam: float = 1.0, tol: float = 1e-8,
                      conventions: Iterable[tuple[str, str]] = LITERAL_CONVENTIONS,
                      degenerate_gap: float = 1e-6, raise_on_fail: bool = True) -> MuReport:
    """Find the index convention under which ``mu_1^k = lam * c_sigma(k)``.

    Conventions that coincide for this ``n`` (the same submatrices and the
    same ``sigma``) are merged into one class before counting matches.
    Frames whose ``c`` values are not separated by ``degenerate_gap`` cannot
    tell conventions apart and are skipped.
    """
    conventions = list(conventions)
    n = frames[0].size - 1
    classes: dict = {}
    for conv in conventions:
        classes.setdefault(_convention_key(conv, n), []).append(conv)
    residual = {key: 0.0 for key in classes}
    used = skipped = 0
    subleading = 0.0
    interlacing = True
    for frame in frames:
        M = orbit_point(frame, lam)
        c = momentum_c(frame)
        chains = {conv[0] for conv in conventions}
        patterns = {ch: gt_pattern(M, ch) for ch in chains}
        for pat in patterns.values():
            interlacing &= pat.interlaces()
            for row in pat.rows:
                if row.size > 1:
                    subleading = max(subleading, float(np.max(np.abs(row[1:]))))
        gaps = np.abs(np.diff(np.concatenate([[1.0], c, [0.0]])))
        if np.min(gaps) < degenerate_gap:
            skipped += 1
            continue
        used += 1
        for key, members in classes.items():
            chain = members[0][0]
            pat = patterns[chain]
            r = max(abs(pat.rows[k - 1][0] - lam * c[sigma - 1]) for k, (_, sigma) in enumerate(key, start=1))
            residual[key] = max(residual[key], r)
    matched_keys = [key for key in classes if residual[key] < tol] if used else []
    report = MuReport(
        n=n, lam=lam,
        residuals={_label(conv): residual[key] for key, members in classes.items() for conv in members},
        matched=sorted(_label(conv) for key in matched_keys for conv in classes[key]),
        classes=[[_label(conv) for conv in members] for members in classes.values()],
        samples_used=used, samples_skipped=skipped,
        max_subleading=subleading, interlacing=bool(interlacing), tol=tol,
    )
    if raise_on_fail:
        if not used:
            raise NoConventionMatches("every sample frame was degenerate")
        if not matched_keys:
            best = min(report.residuals.items(), key=lambda kv: kv[1])
            raise NoConventionMatches(
                f"n={n}: no convention among {[_label(c) for c in conventions]} has residual < {tol:g} "
                f"(smallest: {best[0]} at {best[1]:.3e})")
        if len(matched_keys) > 1:
            raise MultipleConventionsMatch(f"n={n}: {report.matched} all match")
    return report
