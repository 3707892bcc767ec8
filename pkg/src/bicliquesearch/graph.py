"""Complete bipartite graphs with marked vertices and their invariant subspace.

Vertices ``0..m-1`` form the first part and ``m..m+n-1`` the second part.
Marked vertices always live in the second part; marks in the first part are
searched on ``K_{n,m}`` with the parts exchanged.

The reduced (invariant-subspace) coordinates are ordered ``(s, w, wbar)``:

* ``s``    -- uniform superposition over the first part,
* ``w``    -- uniform superposition over the marked vertices,
* ``wbar`` -- uniform superposition over the unmarked second-part vertices.

When every second-part vertex is marked (``k == n``) ``wbar`` does not exist
and the reduced space is two-dimensional.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import DomainError
from .linalg import as_state


@dataclass(frozen=True)
class BicliqueInstance:
    """``K_{m,n}`` together with a set of marked second-part vertices."""

    m: int
    n: int
    marked: tuple[int, ...]

    def __post_init__(self):
        for name in ("m", "n"):
            v = getattr(self, name)
            if isinstance(v, bool) or not isinstance(v, (int, np.integer)) or v < 1:
                raise DomainError(f"{name} must be a positive integer, got {v!r}")
        marked = tuple(sorted(int(i) for i in self.marked))
        if len(marked) == 0:
            raise DomainError("at least one marked vertex is required (k >= 1)")
        if len(set(marked)) != len(marked):
            raise DomainError(f"marked vertices must be distinct, got {list(self.marked)}")
        lo, hi = self.m, self.m + self.n - 1
        bad = [i for i in marked if not lo <= i <= hi]
        if bad:
            raise DomainError(
                f"marked vertices must lie in the second part [{lo}, {hi}], got {bad}")
        object.__setattr__(self, "m", int(self.m))
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "marked", marked)

    @classmethod
    def from_counts(cls, m: int, n: int, k: int) -> "BicliqueInstance":
        """Instance whose marked set is the first ``k`` second-part vertices."""
        if isinstance(k, bool) or not isinstance(k, (int, np.integer)) or not 1 <= k <= n:
            raise DomainError(f"k must satisfy 1 <= k <= n = {n}, got {k!r}")
        return cls(m, n, tuple(range(m, m + k)))

    @classmethod
    def from_dict(cls, data: dict) -> "BicliqueInstance":
        try:
            return cls(data["m"], data["n"], tuple(data["marked"]))
        except (KeyError, TypeError) as exc:
            raise DomainError(f"malformed instance: {exc}") from exc

    @classmethod
    def from_json(cls, text: str) -> "BicliqueInstance":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise DomainError(f"instance is not valid JSON: {exc}") from exc
        if not isinstance(data, dict):
            raise DomainError("instance JSON must be an object")
        return cls.from_dict(data)

    def to_dict(self) -> dict:
        return {"m": self.m, "n": self.n, "marked": list(self.marked)}

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @property
    def k(self) -> int:
        return len(self.marked)

    @property
    def dim(self) -> int:
        return self.m + self.n

    @property
    def reduced_dim(self) -> int:
        return 2 if self.k == self.n else 3

    @property
    def unmarked(self) -> tuple[int, ...]:
        marked = set(self.marked)
        return tuple(i for i in range(self.m, self.m + self.n) if i not in marked)


@dataclass(frozen=True)
class InvariantBasis:
    s: np.ndarray
    w: np.ndarray
    wbar: Optional[np.ndarray]

    @property
    def matrix(self) -> np.ndarray:
        """Basis vectors as columns, shape ``(m + n, reduced_dim)``."""
        cols = [self.s, self.w] + ([self.wbar] if self.wbar is not None else [])
        return np.column_stack(cols)


def invariant_basis(inst: BicliqueInstance) -> InvariantBasis:
    s = np.zeros(inst.dim, dtype=complex)
    s[: inst.m] = 1.0 / np.sqrt(inst.m)
    w = np.zeros(inst.dim, dtype=complex)
    w[list(inst.marked)] = 1.0 / np.sqrt(inst.k)
    wbar = None
    if inst.k < inst.n:
        wbar = np.zeros(inst.dim, dtype=complex)
        wbar[list(inst.unmarked)] = 1.0 / np.sqrt(inst.n - inst.k)
    return InvariantBasis(s, w, wbar)


def adjacency_full(inst: BicliqueInstance) -> np.ndarray:
    """``(m+n) x (m+n)`` adjacency matrix with all-ones off-diagonal blocks."""
    m, n = inst.m, inst.n
    A = np.zeros((m + n, m + n), dtype=complex)
    A[:m, m:] = 1.0
    A[m:, :m] = 1.0
    return A


def adjacency_reduced(inst: BicliqueInstance) -> np.ndarray:
    """Adjacency restricted to ``span{s, w, wbar}`` (or ``span{s, w}`` if k == n)."""
    m, n, k = inst.m, inst.n, inst.k
    if k == n:
        a = np.sqrt(m * n)
        return np.array([[0, a], [a, 0]], dtype=complex)
    a = np.sqrt(m * k)
    b = np.sqrt(m * (n - k))
    return np.array([[0, a, b], [a, 0, 0], [b, 0, 0]], dtype=complex)


def _coeff_vector(inst: BicliqueInstance, coeffs) -> np.ndarray:
    c = np.asarray(coeffs, dtype=complex).ravel()
    if c.size == 3 and inst.reduced_dim == 2:
        if abs(c[2]) > 0:
            raise DomainError("wbar is absent when k == n; its coefficient must be zero")
        c = c[:2]
    if c.size != inst.reduced_dim:
        raise DomainError(
            f"expected {inst.reduced_dim} reduced coefficients, got {c.size}")
    return c


def lift(inst: BicliqueInstance, coeffs) -> np.ndarray:
    """Embed reduced coordinates ``(c_s, c_w, c_wbar)`` into the full vertex space."""
    c = as_state(_coeff_vector(inst, coeffs))
    return invariant_basis(inst).matrix @ c


def project(inst: BicliqueInstance, state) -> tuple[np.ndarray, float]:
    """Reduced coordinates of ``state`` and the norm of its out-of-subspace part."""
    x = np.asarray(state, dtype=complex)
    if x.shape != (inst.dim,):
        raise DomainError(f"state must have shape ({inst.dim},), got {x.shape}")
    B = invariant_basis(inst).matrix
    coeffs = B.conj().T @ x
    residual = float(np.linalg.norm(x - B @ coeffs))
    return coeffs, residual


def project_operator(inst: BicliqueInstance, U) -> np.ndarray:
    """``B^dagger U B`` for the invariant basis ``B``."""
    B = invariant_basis(inst).matrix
    return B.conj().T @ np.asarray(U, dtype=complex) @ B
