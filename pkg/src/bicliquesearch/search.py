"""Deterministic search schedule and its simulation.

The algorithm prepares ``exp(-iA t/2)|s>`` from the uniform first-part state
and then applies ``U(t)`` ``l`` times. With

    t = 2/sqrt(mn) * arcsin(sqrt(n/k) * sin(pi / (2(2l+1))))

the amplitude on ``|w>`` has unit modulus, so the final state is the uniform
superposition of the marked vertices.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DomainError
from .graph import BicliqueInstance, invariant_basis
from .walk import FULL, REDUCED, _check_space, search_operator, walk_operator

# Slack on the arcsin argument so that exactly-admissible schedules
# (argument == 1 in exact arithmetic) survive rounding.
ARG_TOL = 1e-12
# asin has a square-root singularity at 1, so one ulp of rounding in the
# argument would shift t by ~1e-8; arguments this close to 1 are exactly 1.
_ARG_SNAP = 4 * np.finfo(float).eps


def iteration_bound(inst: BicliqueInstance) -> float:
    """Real-valued lower bound ``pi/4 sqrt(n/k) - 1/2`` on the iteration count."""
    return math.pi / 4.0 * math.sqrt(inst.n / inst.k) - 0.5


def arcsin_argument(inst: BicliqueInstance, l: int) -> float:
    """``sqrt(n/k) sin(pi / (2(2l+1)))``; the schedule exists iff this is <= 1."""
    return math.sqrt(inst.n / inst.k) * math.sin(math.pi / (2 * (2 * l + 1)))


def is_admissible(inst: BicliqueInstance, l: int) -> bool:
    return l >= 0 and arcsin_argument(inst, l) <= 1.0 + ARG_TOL


def min_iterations(inst: BicliqueInstance) -> int:
    """Smallest ``l >= 0`` for which a deterministic schedule exists.

    Starts from ``ceil(iteration_bound)`` and steps down while the arcsin
    argument stays at most 1. The published bound comes from ``sin y <= y``
    and overshoots by one where the argument hits 1 exactly (``n/k == 4``)
    and for ``k == n`` (where ``l = 0`` works).
    """
    l = max(0, math.ceil(iteration_bound(inst)))
    while l > 0 and is_admissible(inst, l - 1):
        l -= 1
    return l


def evolution_time(inst: BicliqueInstance, l: int) -> float:
    """Walk time ``t`` that makes ``l`` iterations succeed with certainty."""
    if isinstance(l, bool) or not isinstance(l, (int, np.integer)) or l < 0:
        raise DomainError(f"l must be a non-negative integer, got {l!r}")
    arg = arcsin_argument(inst, int(l))
    if arg > 1.0 + ARG_TOL:
        raise DomainError(
            f"l = {l} is below the admissible range for n={inst.n}, k={inst.k} "
            f"(arcsin argument {arg:.6g} > 1); minimal admissible l is {min_iterations(inst)}")
    angle = math.pi / 2 if arg >= 1.0 - _ARG_SNAP else math.asin(arg)
    return 2.0 / math.sqrt(inst.m * inst.n) * angle


def substitution_x(inst: BicliqueInstance, t: float) -> float:
    """``x(t) = (2/pi) arcsin(sqrt(k/n) sin(sqrt(mn) t / 2))``, so ``theta = pi x``."""
    half = math.sqrt(inst.m * inst.n) * t / 2.0
    return 2.0 / math.pi * math.asin(math.sqrt(inst.k / inst.n) * math.sin(half))


def predicted_overlap(inst: BicliqueInstance, l: int, t: float) -> float:
    """``sin(l theta + pi x / 2)`` with ``x = x(t)`` and ``theta = pi x``.

    This is the overlap ``<w| U^l exp(-iAt/2) |s>`` up to a global factor of
    ``-i``; see :func:`predicted_amplitude` for the exact complex value.
    """
    x = substitution_x(inst, t)
    return math.sin(l * math.pi * x + math.pi * x / 2.0)


def predicted_amplitude(inst: BicliqueInstance, l: int, t: float) -> complex:
    return -1j * predicted_overlap(inst, l, t)


@dataclass(frozen=True)
class SearchSchedule:
    """Iteration count ``l`` and walk time ``t``.

    ``signature`` records the ``(m, n, k)`` a schedule was derived for; it is
    ``None`` for hand-built schedules, which :func:`run_search` accepts for
    any instance.
    """

    l: int
    t: float
    signature: Optional[tuple[int, int, int]] = field(default=None, compare=False)

    def __post_init__(self):
        if isinstance(self.l, bool) or not isinstance(self.l, (int, np.integer)) or self.l < 0:
            raise DomainError(f"l must be a non-negative integer, got {self.l!r}")
        if not math.isfinite(self.t):
            raise DomainError(f"t must be finite, got {self.t!r}")
        object.__setattr__(self, "l", int(self.l))
        object.__setattr__(self, "t", float(self.t))

    @property
    def x(self) -> float:
        return 1.0 / (2 * self.l + 1)

    def to_dict(self) -> dict:
        return {"l": self.l, "t": self.t, "x": self.x}


def make_schedule(inst: BicliqueInstance, l: Optional[int] = None) -> SearchSchedule:
    """Deterministic schedule for ``inst``; ``l`` defaults to :func:`min_iterations`."""
    if l is None:
        l = min_iterations(inst)
    return SearchSchedule(l, evolution_time(inst, l), signature=(inst.m, inst.n, inst.k))


@dataclass(frozen=True)
class SearchReport:
    final_state: np.ndarray
    overlap_with_w: complex
    success_probability: float
    schedule: SearchSchedule
    space: str
    skipped: bool = False

    def to_dict(self) -> dict:
        return {
            "l": self.schedule.l,
            "t": self.schedule.t,
            "overlap_re": float(np.real(self.overlap_with_w)),
            "overlap_im": float(np.imag(self.overlap_with_w)),
            "success_probability": self.success_probability,
            "space": self.space,
        }


def final_state(inst: BicliqueInstance, schedule: SearchSchedule,
                space: str = REDUCED) -> np.ndarray:
    """``U(t)^l exp(-iA t/2) |s>`` in reduced or full coordinates."""
    _check_space(space)
    if space == REDUCED:
        psi = np.zeros(inst.reduced_dim, dtype=complex)
        psi[0] = 1.0
    else:
        psi = invariant_basis(inst).s.copy()
    psi = walk_operator(inst, schedule.t / 2.0, space) @ psi
    U = search_operator(inst, schedule.t, space)
    for _ in range(schedule.l):
        psi = U @ psi
    return psi


def run_search(inst: BicliqueInstance, schedule: SearchSchedule,
               space: str = REDUCED) -> SearchReport:
    """Simulate the search and report the overlap with ``|w>``.

    ``success_probability`` is the probability that measuring the final
    state yields a marked vertex.
    """
    if schedule.signature is not None and schedule.signature != (inst.m, inst.n, inst.k):
        raise DomainError(
            f"schedule was computed for (m, n, k) = {schedule.signature}, "
            f"not {(inst.m, inst.n, inst.k)}")
    psi = final_state(inst, schedule, space)
    if space == REDUCED:
        overlap = complex(psi[1])
        prob = abs(overlap) ** 2
    else:
        overlap = complex(np.vdot(invariant_basis(inst).w, psi))
        prob = float(np.sum(np.abs(psi[list(inst.marked)]) ** 2))
    return SearchReport(psi, overlap, float(min(prob, 1.0)), schedule, space)


def sample_measurement(report: SearchReport, inst: BicliqueInstance,
                       rng: np.random.Generator, shots: int = 1) -> np.ndarray:
    """Sample vertex indices from a full-space report (demonstration only)."""
    if report.space != FULL:
        raise DomainError("sampling vertices needs a full-space report")
    p = np.abs(report.final_state) ** 2
    return rng.choice(inst.dim, size=shots, p=p / p.sum())


def run_two_part_search(m: int, n: int, marked, space: str = REDUCED
                        ) -> tuple[SearchReport, SearchReport]:
    """Search marks in both parts, one part at a time.

    Returns ``(second_part_report, first_part_report)``. The first-part
    search runs on ``K_{n,m}`` with the parts exchanged. A side without marks
    yields a report with ``skipped=True`` and zero success probability.
    """
    marked = sorted({int(i) for i in marked})
    if not marked:
        raise DomainError("no marked vertices in either part")
    bad = [i for i in marked if not 0 <= i < m + n]
    if bad:
        raise DomainError(f"marked vertices must lie in [0, {m + n - 1}], got {bad}")
    second = [i for i in marked if i >= m]
    first = [i for i in marked if i < m]

    def _skipped() -> SearchReport:
        return SearchReport(np.zeros(0, dtype=complex), 0j, 0.0,
                            SearchSchedule(0, 0.0), space, skipped=True)

    if second:
        inst = BicliqueInstance(m, n, tuple(second))
        report_second = run_search(inst, make_schedule(inst), space)
    else:
        report_second = _skipped()
    if first:
        swapped = BicliqueInstance(n, m, tuple(n + i for i in first))
        report_first = run_search(swapped, make_schedule(swapped), space)
    else:
        report_first = _skipped()
    return report_second, report_first
