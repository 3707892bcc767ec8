"""Quantum counting of marked vertices through phase estimation on ``U(t0)``.

At ``t0 = pi / sqrt(mn)`` the reduced search operator has eigenphases
``pi`` and ``+-theta`` with ``sin^2(theta/2) = k/n``, so a phase estimate of
either conjugate eigenphase yields ``k = n sin^2(theta/2)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Union

import numpy as np

from .errors import DomainError, ResourceError
from .graph import BicliqueInstance
from .linalg import as_matrix, as_state
from .walk import REDUCED, search_operator

MAX_PHASE_QUBITS = 20
# Lower bound on landing on one of the two nearest grid points.
BEST_ESTIMATE_PROBABILITY = 8.0 / math.pi ** 2

RngLike = Union[int, np.random.Generator, None]


@dataclass(frozen=True)
class PhaseRegister:
    p: int

    def __post_init__(self):
        if isinstance(self.p, bool) or not isinstance(self.p, (int, np.integer)) or self.p < 1:
            raise DomainError(f"p must be a positive integer, got {self.p!r}")
        if self.p > MAX_PHASE_QUBITS:
            raise ResourceError(f"p = {self.p} exceeds the cap of {MAX_PHASE_QUBITS} qubits")

    @property
    def M(self) -> int:
        return 1 << self.p


def _rng(rng: RngLike) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


def counting_time(inst: BicliqueInstance) -> float:
    return math.pi / math.sqrt(inst.m * inst.n)


def uniform_state_reduced(inst: BicliqueInstance) -> np.ndarray:
    """Uniform superposition over all ``m + n`` vertices in ``(s, w, wbar)`` coordinates."""
    amps = [math.sqrt(inst.m), math.sqrt(inst.k)]
    if inst.k < inst.n:
        amps.append(math.sqrt(inst.n - inst.k))
    return np.array(amps, dtype=complex) / math.sqrt(inst.dim)


def uniform_superposition_decomposition(inst: BicliqueInstance) -> tuple[float, float, float]:
    """Weights of the uniform state on ``(v_-1, v_+, v_-)`` at ``t0``."""
    if inst.k >= inst.n:
        raise DomainError(
            "k == n: U(t0) has no conjugate eigenphase pair, so the uniform state "
            "has no (v_-1, v_+, v_-) decomposition")
    total = inst.m + inst.n
    half = inst.n / (2.0 * total)
    return inst.m / total, half, half


def qpe_distribution(unitary, initial, p: int) -> np.ndarray:
    """Exact outcome distribution of textbook phase estimation.

    The joint state after the controlled powers is ``sum_y |y> U^y |phi> / sqrt(M)``;
    each register bit of weight ``2^j`` controls ``U^(2^j)``. The inverse
    Fourier transform maps ``|S_M(l/M)>`` to ``|l>``.
    """
    U = as_matrix(unitary)
    if U.shape[0] != U.shape[1]:
        raise DomainError(f"unitary must be square, got shape {U.shape}")
    phi = as_state(initial)
    if phi.shape[0] != U.shape[0]:
        raise DomainError(
            f"initial state has dimension {phi.shape[0]}, unitary has {U.shape[0]}")
    M = PhaseRegister(p).M
    reg = np.tile(phi / math.sqrt(M), (M, 1))
    power = U
    ys = np.arange(M)
    for j in range(p):
        rows = ((ys >> j) & 1).astype(bool)
        reg[rows] = reg[rows] @ power.T
        power = power @ power
    # numpy's forward FFT carries exp(-2 pi i l y / M): the inverse QFT up to 1/sqrt(M).
    amps = np.fft.fft(reg, axis=0) / math.sqrt(M)
    probs = np.sum(np.abs(amps) ** 2, axis=1)
    return probs


def best_outcomes(theta: float, M: int) -> tuple[int, int]:
    """Register values just below and above ``theta M / 2pi`` (mod ``M``)."""
    a = (theta % (2 * math.pi)) * M / (2 * math.pi)
    return math.floor(a) % M, math.ceil(a) % M


def _fejer(delta: float, M: int) -> float:
    # sin^2(M pi delta) / (M^2 sin^2(pi delta)), continuous at delta -> 0
    den = M * math.sin(math.pi * delta)
    if den == 0.0:
        return 1.0
    return (math.sin(M * math.pi * delta) / den) ** 2


def best_estimate_probabilities(theta: float, M: int) -> tuple[float, float]:
    """Closed-form probabilities of the floor and ceil outcomes for an eigenphase.

    ``theta`` is reduced mod ``2 pi``. When ``theta M / 2pi`` is an integer the
    result is ``(1.0, 0.0)``.
    """
    a = (theta % (2 * math.pi)) * M / (2 * math.pi)
    lo, hi = math.floor(a), math.ceil(a)
    if lo == hi:
        return 1.0, 0.0
    d1 = (a - lo) / M
    d2 = (hi - a) / M
    return _fejer(d1, M), _fejer(d2, M)


# Name used by the published interface.
theorem2_probabilities = best_estimate_probabilities


def estimate_k(outcome: int, p: int, n: int) -> float:
    """``n sin^2(pi outcome / M)``, i.e. ``n sin^2(theta_tilde / 2)``."""
    M = PhaseRegister(p).M
    if not 0 <= outcome < M:
        raise DomainError(f"outcome must lie in [0, {M - 1}], got {outcome}")
    return n * math.sin(math.pi * outcome / M) ** 2


def counting_error_bound(n: int, k: float, M: int) -> float:
    """``(2pi/M) sqrt(k(n-k)) + (pi^2/M^2) n``."""
    if not 0 <= k <= n:
        raise DomainError(f"k must lie in [0, n = {n}], got {k}")
    return 2 * math.pi / M * math.sqrt(k * (n - k)) + math.pi ** 2 / M ** 2 * n


@dataclass(frozen=True)
class CountEstimate:
    """Result of :func:`run_counting`.

    ``error_bound`` substitutes the estimate ``k_tilde`` for the unknown true
    count. The overall success probability is at least
    ``branch_probability * qpe_probability``: the first factor is the weight
    of the uniform state on the conjugate eigenvector pair, the second the
    phase-estimation guarantee for an eigenvector input.
    """

    outcome: Optional[int]
    theta_tilde: Optional[float]
    k_tilde: Optional[float]
    error_bound: Optional[float]
    retries_used: int
    from_pi_branch: bool
    p: int
    n: int
    branch_probability: float
    qpe_probability: float = BEST_ESTIMATE_PROBABILITY

    @property
    def inconclusive(self) -> bool:
        return self.outcome is None

    @property
    def success_probability_lower_bound(self) -> float:
        return self.branch_probability * self.qpe_probability

    def to_dict(self) -> dict:
        return {
            "outcome": self.outcome,
            "theta_tilde": self.theta_tilde,
            "k_tilde": self.k_tilde,
            "error_bound": self.error_bound,
            "retries_used": self.retries_used,
            "from_pi_branch": self.from_pi_branch,
            "inconclusive": self.inconclusive,
            "p": self.p,
            "M": 1 << self.p,
            "branch_probability": self.branch_probability,
            "qpe_probability": self.qpe_probability,
            "success_probability_lower_bound": self.success_probability_lower_bound,
        }


def counting_distribution(inst: BicliqueInstance, p: int) -> np.ndarray:
    """Outcome distribution of phase estimation on ``U(t0)`` from the uniform state."""
    U = search_operator(inst, counting_time(inst), REDUCED)
    return qpe_distribution(U, uniform_state_reduced(inst), p)


def run_counting(inst: BicliqueInstance, p: int, max_retries: int = 8,
                 rng: RngLike = 0, enforce_proviso: bool = True,
                 distribution: Optional[np.ndarray] = None) -> CountEstimate:
    """Estimate the number of marked vertices from sampled phase-estimation runs.

    An outcome whose estimate reaches ``n/2`` is attributed to the eigenphase
    ``pi`` and triggers a fresh run, up to ``max_retries`` times. When every
    run lands there the estimate is inconclusive (``outcome is None``).

    Args:
        rng: seed or generator; an explicit generator is advanced in place.
        enforce_proviso: reject instances with ``k >= n/2``, where the
            ``pi``-branch filter would also discard genuine estimates.
        distribution: precomputed :func:`counting_distribution`, to avoid
            recomputing it across repeated calls.
    """
    if enforce_proviso and not 2 * inst.k < inst.n:
        raise DomainError(f"counting needs k < n/2; got k = {inst.k}, n = {inst.n}")
    if max_retries < 0:
        raise DomainError(f"max_retries must be non-negative, got {max_retries}")
    M = PhaseRegister(p).M
    probs = counting_distribution(inst, p) if distribution is None else distribution
    if probs.shape != (M,):
        raise DomainError(f"distribution must have length {M}, got {probs.shape}")
    gen = _rng(rng)
    branch = inst.n / inst.dim
    probs = probs / probs.sum()
    from_pi = False
    for attempt in range(max_retries + 1):
        outcome = int(gen.choice(M, p=probs))
        k_tilde = estimate_k(outcome, p, inst.n)
        if 2 * k_tilde >= inst.n:
            from_pi = True
            continue
        return CountEstimate(
            outcome=outcome,
            theta_tilde=2 * math.pi * outcome / M,
            k_tilde=k_tilde,
            error_bound=counting_error_bound(inst.n, k_tilde, M),
            retries_used=attempt,
            from_pi_branch=from_pi,
            p=p, n=inst.n, branch_probability=branch,
        )
    return CountEstimate(None, None, None, None, max_retries, True, p, inst.n, branch)
