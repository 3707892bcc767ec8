"""Oracle, walk operator ``exp(-iAt)`` and search operator ``U(t) = exp(-iAt) O``.

Every operator is available in the reduced ``(s, w, wbar)`` coordinates and
in the full ``(m+n)``-dimensional vertex space. The reduced forms are closed
expressions; the full walk uses the rank-2 identity

    exp(-iAt) = I + (cos(g t) - 1) A^2 / g^2 - i sin(g t) A / g,   g = sqrt(mn),

which holds because the spectrum of ``A`` is ``{0, +g, -g}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .graph import BicliqueInstance, adjacency_full
from .linalg import fix_phases

REDUCED = "reduced"
FULL = "full"
SPACES = (REDUCED, FULL)


def _check_space(space: str) -> str:
    if space not in SPACES:
        raise DomainError(f"space must be one of {SPACES}, got {space!r}")
    return space


def oracle_reduced(inst: BicliqueInstance) -> np.ndarray:
    """``diag(1, 1, -1)``: fixes ``s`` and ``w``, negates ``wbar``."""
    if inst.reduced_dim == 2:
        return np.eye(2, dtype=complex)
    return np.diag([1.0, 1.0, -1.0]).astype(complex)


def oracle_full(inst: BicliqueInstance, reflection: str = "marked") -> np.ndarray:
    """Local oracle on the full vertex space.

    Identity on the first part. On the second part it is a reflection that
    keeps ``w`` and negates ``wbar``:

    * ``reflection="marked"`` (default) -- ``+1`` on marked vertices and
      ``-1`` on unmarked ones, i.e. ``2 P_marked - I``. This is what a
      standard phase-flip query implements.
    * ``reflection="w"`` -- ``2|w><w| - I``, the rank-one reflection.

    The two agree on ``span{s, w, wbar}`` for every ``k`` and coincide
    exactly when ``k == 1``.
    """
    m, n = inst.m, inst.n
    O = np.eye(m + n, dtype=complex)
    if reflection == "marked":
        diag = -np.ones(n)
        diag[[i - m for i in inst.marked]] = 1.0
        O[m:, m:] = np.diag(diag)
    elif reflection == "w":
        w = np.zeros(n)
        w[[i - m for i in inst.marked]] = 1.0 / np.sqrt(inst.k)
        O[m:, m:] = 2.0 * np.outer(w, w) - np.eye(n)
    else:
        raise DomainError(f"reflection must be 'marked' or 'w', got {reflection!r}")
    return O


def walk_operator_reduced(inst: BicliqueInstance, t: float) -> np.ndarray:
    m, n, k = inst.m, inst.n, inst.k
    phi = np.sqrt(m * n) * t
    c, s = np.cos(phi), np.sin(phi)
    if k == n:
        return np.array([[c, -1j * s], [-1j * s, c]], dtype=complex)
    r = np.sqrt(k / n)
    q = np.sqrt((n - k) / n)
    off = -r * q * (1.0 - c)
    return np.array([
        [c, -1j * r * s, -1j * q * s],
        [-1j * r * s, q * q + r * r * c, off],
        [-1j * q * s, off, r * r + q * q * c],
    ], dtype=complex)


def walk_operator_full(inst: BicliqueInstance, t: float) -> np.ndarray:
    g = np.sqrt(inst.m * inst.n)
    A = adjacency_full(inst)
    A2 = A @ A
    return (np.eye(inst.dim, dtype=complex)
            + (np.cos(g * t) - 1.0) * A2 / (g * g)
            - 1j * np.sin(g * t) * A / g)


def walk_operator(inst: BicliqueInstance, t: float, space: str = REDUCED) -> np.ndarray:
    if _check_space(space) == REDUCED:
        return walk_operator_reduced(inst, t)
    return walk_operator_full(inst, t)


def oracle(inst: BicliqueInstance, space: str = REDUCED) -> np.ndarray:
    if _check_space(space) == REDUCED:
        return oracle_reduced(inst)
    return oracle_full(inst)


def search_operator(inst: BicliqueInstance, t: float, space: str = REDUCED) -> np.ndarray:
    """``U(t) = exp(-iAt) O`` in the requested space."""
    return walk_operator(inst, t, space) @ oracle(inst, space)


@dataclass(frozen=True)
class ReducedSpectrum:
    """Eigen-decomposition of the reduced search operator ``U(t)``.

    ``U(t) = V diag(-1, e^{i theta_plus}, e^{i theta_minus}) V^dagger`` with
    ``V = [v_minus1, v_plus, v_minus]``.
    """

    theta_plus: float
    theta_minus: float
    v_minus1: np.ndarray
    v_plus: np.ndarray
    v_minus: np.ndarray
    normalization: float
    eigenphase_pi: float = np.pi

    @property
    def eigenphases(self) -> np.ndarray:
        return np.array([self.eigenphase_pi, self.theta_plus, self.theta_minus])

    @property
    def eigenvalues(self) -> np.ndarray:
        return np.exp(1j * self.eigenphases)

    @property
    def vectors(self) -> np.ndarray:
        return np.column_stack([self.v_minus1, self.v_plus, self.v_minus])

    def reconstruct(self, power: int = 1) -> np.ndarray:
        V = self.vectors
        return (V * self.eigenvalues ** power) @ V.conj().T


def eigenphase(inst: BicliqueInstance, t: float) -> float:
    """``theta_plus = 2 arcsin(sqrt(k/n) sin(sqrt(mn) t / 2))``."""
    half = np.sqrt(inst.m * inst.n) * t / 2.0
    return float(2.0 * np.arcsin(np.sqrt(inst.k / inst.n) * np.sin(half)))


def search_spectrum(inst: BicliqueInstance, t: float) -> ReducedSpectrum:
    """Closed-form spectrum of the reduced ``U(t)``; requires ``k < n``."""
    m, n, k = inst.m, inst.n, inst.k
    if k >= n:
        raise DomainError("search_spectrum needs k < n; the k == n operator is 2-dimensional")
    half = np.sqrt(m * n) * t / 2.0
    ch, sh = np.cos(half), np.sin(half)
    q = np.sqrt((n - k) / n)
    g = np.sqrt(1.0 - (k / n) * sh * sh)  # >= sqrt(1 - k/n) > 0
    N = 1.0 / g
    theta = eigenphase(inst, t)
    r2 = 1.0 / np.sqrt(2.0)
    v_minus1 = N * np.array([-1j * q * sh, 0.0, ch])
    v_plus = N * np.array([r2 * ch, -r2 * g, -1j * r2 * q * sh])
    v_minus = N * np.array([r2 * ch, r2 * g, -1j * r2 * q * sh])
    V = fix_phases(np.column_stack([v_minus1, v_plus, v_minus]))
    return ReducedSpectrum(
        theta_plus=theta,
        theta_minus=-theta,
        v_minus1=V[:, 0],
        v_plus=V[:, 1],
        v_minus=V[:, 2],
        normalization=float(N),
    )


def characteristic_polynomial(inst: BicliqueInstance, t: float) -> np.ndarray:
    """Coefficients (highest degree first) of ``det(lambda I - U(t))``, k < n."""
    phi = np.sqrt(inst.m * inst.n) * t
    kn = inst.k / inst.n
    trace_pair = 2.0 - 2.0 * kn * (1.0 - np.cos(phi))
    return np.polymul([1.0, 1.0], [1.0, -trace_pair, 1.0])
