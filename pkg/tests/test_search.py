import math

import numpy as np
import pytest
import scipy.linalg

from bicliquesearch.errors import DomainError
from bicliquesearch.graph import BicliqueInstance, adjacency_full, lift
from bicliquesearch.linalg import max_deviation
from bicliquesearch.search import (
    SearchSchedule, arcsin_argument, evolution_time, iteration_bound, make_schedule,
    min_iterations, predicted_amplitude, predicted_overlap, run_search, run_two_part_search,
    sample_measurement,
)


def brute_force_probability(inst, l, t):
    """Success probability from scipy's expm on the dense vertex space."""
    A = adjacency_full(inst).real
    O = np.eye(inst.dim)
    unmarked = [v for v in range(inst.m, inst.dim) if v not in inst.marked]
    O[unmarked, unmarked] = -1.0
    psi = np.zeros(inst.dim, dtype=complex)
    psi[:inst.m] = 1 / math.sqrt(inst.m)
    psi = scipy.linalg.expm(-0.5j * t * A) @ psi
    U = scipy.linalg.expm(-1j * t * A) @ O
    for _ in range(l):
        psi = U @ psi
    return float(np.sum(np.abs(psi[list(inst.marked)]) ** 2))


class TestMinIterations:
    def test_large_ratio(self):
        inst = BicliqueInstance.from_counts(3, 100, 1)
        assert iteration_bound(inst) == pytest.approx(7.354, abs=1e-3)
        assert min_iterations(inst) == 8

    def test_argument_hits_one(self):
        # n/k = 4: l = 1 gives argument 2 sin(pi/6) = 1 exactly
        inst = BicliqueInstance.from_counts(4, 4, 1)
        assert arcsin_argument(inst, 1) == pytest.approx(1.0, abs=1e-15)
        assert min_iterations(inst) == 1

    def test_all_marked(self):
        assert min_iterations(BicliqueInstance.from_counts(2, 5, 5)) == 0

    def test_matches_brute_force_scan(self):
        for n in range(2, 40):
            for k in range(1, n + 1):
                inst = BicliqueInstance.from_counts(3, n, k)
                scan = next(l for l in range(100) if arcsin_argument(inst, l) <= 1 + 1e-12)
                assert min_iterations(inst) == scan


class TestEvolutionTime:
    def test_all_marked_one_iteration(self):
        t = evolution_time(BicliqueInstance.from_counts(2, 2, 2), 1)
        assert t == pytest.approx(math.pi / 6, abs=1e-12)

    def test_two_iterations(self):
        t = evolution_time(BicliqueInstance.from_counts(4, 4, 1), 2)
        assert t == pytest.approx(0.3331197, abs=1e-7)
        assert t == pytest.approx(0.5 * math.asin(2 * math.sin(math.pi / 10)), abs=1e-15)

    def test_below_range_reports_minimum(self):
        with pytest.raises(DomainError, match="minimal admissible l is 8"):
            evolution_time(BicliqueInstance.from_counts(3, 100, 1), 7)

    @pytest.mark.parametrize("l", [-1, 1.5, True])
    def test_bad_l(self, l):
        with pytest.raises(DomainError):
            evolution_time(BicliqueInstance.from_counts(2, 2, 1), l)

    def test_monotone_in_l(self):
        for n, k in ((8, 1), (16, 3), (32, 31)):
            inst = BicliqueInstance.from_counts(5, n, k)
            l0 = min_iterations(inst)
            ts = [evolution_time(inst, l) for l in range(l0, l0 + 20)]
            assert all(b < a for a, b in zip(ts, ts[1:]))


class TestPredictedOverlap:
    def test_unit_at_schedule(self):
        inst = BicliqueInstance.from_counts(4, 16, 3)
        for l in range(min_iterations(inst), min_iterations(inst) + 4):
            assert predicted_overlap(inst, l, evolution_time(inst, l)) == pytest.approx(1, abs=1e-12)

    def test_zero_time(self):
        assert predicted_overlap(BicliqueInstance.from_counts(4, 4, 1), 3, 0.0) == 0.0

    def test_matches_simulation_off_schedule(self):
        inst = BicliqueInstance.from_counts(4, 4, 1)
        report = run_search(inst, SearchSchedule(2, 0.25))
        assert abs(report.overlap_with_w - predicted_amplitude(inst, 2, 0.25)) <= 1e-10

    def test_matches_simulation_random(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            m, n = (int(v) for v in rng.integers(1, 20, size=2))
            k = int(rng.integers(1, n + 1))
            inst = BicliqueInstance.from_counts(m, n, k)
            l, t = int(rng.integers(0, 10)), float(rng.uniform(0, 3))
            report = run_search(inst, SearchSchedule(l, t))
            assert abs(report.overlap_with_w - predicted_amplitude(inst, l, t)) <= 1e-10


class TestRunSearch:
    @pytest.mark.parametrize("space", ["reduced", "full"])
    def test_all_marked(self, space):
        inst = BicliqueInstance.from_counts(2, 2, 2)
        report = run_search(inst, SearchSchedule(1, math.pi / 6), space)
        assert report.success_probability == pytest.approx(1, abs=1e-9)

    @pytest.mark.parametrize("space", ["reduced", "full"])
    def test_two_iterations(self, space):
        inst = BicliqueInstance.from_counts(4, 4, 1)
        report = run_search(inst, make_schedule(inst, 2), space)
        assert report.success_probability == pytest.approx(1, abs=1e-9)
        assert brute_force_probability(inst, 2, report.schedule.t) == pytest.approx(1, abs=1e-9)

    def test_half_time_guard(self):
        inst = BicliqueInstance.from_counts(4, 4, 1)
        t = evolution_time(inst, 2)
        wrong = run_search(inst, SearchSchedule(2, t / 2))
        assert wrong.success_probability < 1 - 1e-3
        assert wrong.success_probability == pytest.approx(brute_force_probability(inst, 2, t / 2),
                                                          abs=1e-10)

    def test_final_state_is_marked_superposition(self):
        inst = BicliqueInstance(3, 7, (4, 6, 9))
        report = run_search(inst, make_schedule(inst), "full")
        expected = -1j * lift(inst, [0, 1, 0])
        assert max_deviation(report.final_state, expected) <= 1e-9

    def test_against_brute_force(self):
        rng = np.random.default_rng(8)
        for _ in range(30):
            m, n = (int(v) for v in rng.integers(1, 16, size=2))
            k = int(rng.integers(1, n + 1))
            marked = tuple(int(v) for v in rng.choice(np.arange(m, m + n), k, replace=False))
            inst = BicliqueInstance(m, n, marked)
            l, t = int(rng.integers(0, 6)), float(rng.uniform(0, 2))
            expected = brute_force_probability(inst, l, t)
            for space in ("reduced", "full"):
                got = run_search(inst, SearchSchedule(l, t), space).success_probability
                assert got == pytest.approx(expected, abs=1e-10)

    def test_signature_mismatch(self):
        sched = make_schedule(BicliqueInstance.from_counts(4, 4, 1))
        with pytest.raises(DomainError, match="schedule was computed"):
            run_search(BicliqueInstance.from_counts(4, 4, 2), sched)

    def test_report_dict(self):
        inst = BicliqueInstance.from_counts(4, 4, 1)
        d = run_search(inst, make_schedule(inst)).to_dict()
        assert set(d) == {"l", "t", "overlap_re", "overlap_im", "success_probability", "space"}
        assert d["overlap_im"] == pytest.approx(-1, abs=1e-9)

    def test_sampling_hits_marked(self):
        inst = BicliqueInstance(2, 6, (3, 5))
        report = run_search(inst, make_schedule(inst), "full")
        shots = sample_measurement(report, inst, np.random.default_rng(0), 200)
        assert set(shots.tolist()) <= {3, 5}
        with pytest.raises(DomainError):
            sample_measurement(run_search(inst, make_schedule(inst)), inst,
                               np.random.default_rng(0))


class TestTwoPartSearch:
    def test_only_second_part(self):
        second, first = run_two_part_search(3, 4, [5])
        assert first.skipped and first.success_probability == 0.0
        assert second.success_probability == pytest.approx(1, abs=1e-9)

    @pytest.mark.parametrize("space", ["reduced", "full"])
    def test_both_parts(self, space):
        second, first = run_two_part_search(2, 2, [0, 3], space)
        assert not (first.skipped or second.skipped)
        assert second.success_probability == pytest.approx(1, abs=1e-9)
        assert first.success_probability == pytest.approx(1, abs=1e-9)

    def test_first_part_lands_on_relabelled_vertex(self):
        _, first = run_two_part_search(3, 5, [1], "full")
        # K_{5,3}: old first-part vertex 1 becomes vertex 5 + 1
        assert abs(first.final_state[6]) == pytest.approx(1, abs=1e-9)

    def test_errors(self):
        with pytest.raises(DomainError):
            run_two_part_search(2, 2, [])
        with pytest.raises(DomainError):
            run_two_part_search(2, 2, [4])
