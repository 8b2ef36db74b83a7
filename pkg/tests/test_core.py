import itertools

import numpy as np
import pytest

from bruteforce import dominates_ref, filter_indices_ref
from mobnb.core import (
    ParetoArchive,
    Solution,
    VariableVector,
    archive_merge,
    constrained_dominates,
    dominates,
    ideal_point,
    non_dominated_2d,
    non_dominated_indices,
    pareto_filter,
)


def sol(objectives, violation=0.0, integer=()):
    return Solution(
        vars=VariableVector(continuous=(), integer=tuple(integer)),
        objectives=tuple(float(v) for v in objectives),
        violation=violation,
    )


class TestDominates:
    def test_strict_improvement(self):
        assert dominates((1, 2), (2, 3))

    def test_equal_vectors_do_not_dominate(self):
        assert not dominates((1, 2), (1, 2))

    def test_incomparable(self):
        assert not dominates((1, 3), (3, 1))
        assert not dominates((3, 1), (1, 3))

    def test_weak_improvement_one_axis(self):
        assert dominates((1, 2), (1, 3))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            dominates((1, 2), (1, 2, 3))

    def test_irreflexive_asymmetric_transitive(self):
        rng = np.random.default_rng(11)
        vecs = [tuple(v) for v in rng.integers(0, 4, size=(18, 3)).astype(float)]
        checked = 0
        for a in vecs:
            assert not dominates(a, a)
        for a, b, c in itertools.product(vecs, repeat=3):
            assert not (dominates(a, b) and dominates(b, a))
            if dominates(a, b) and dominates(b, c):
                assert dominates(a, c)
                checked += 1
        assert checked > 0


class TestConstrainedDominates:
    def test_feasible_beats_infeasible(self):
        assert constrained_dominates(sol((9, 9)), sol((1, 1), violation=3.0))

    def test_smaller_violation_wins(self):
        assert constrained_dominates(sol((9, 9), violation=2.0), sol((1, 1), violation=5.0))
        assert not constrained_dominates(sol((1, 1), violation=5.0), sol((9, 9), violation=2.0))

    def test_both_feasible_incomparable(self):
        assert not constrained_dominates(sol((1, 2)), sol((0, 3)))

    def test_matches_reference_on_random_pairs(self):
        from bruteforce import constrained_dominates_ref

        rng = np.random.default_rng(5)
        for _ in range(300):
            oa, ob = rng.integers(0, 4, size=(2, 2)).astype(float)
            va, vb = np.where(rng.random(2) < 0.5, 0.0, rng.integers(1, 4, 2).astype(float))
            got = constrained_dominates(sol(oa, va), sol(ob, vb))
            assert got == constrained_dominates_ref(tuple(oa), va, tuple(ob), vb)


class TestParetoFilter:
    def test_basic(self):
        pts = [sol((1, 2)), sol((2, 1)), sol((2, 2))]
        assert pareto_filter(pts) == [pts[0], pts[1]]

    def test_empty(self):
        assert pareto_filter([]) == []

    def test_duplicates_kept_once_first_wins(self):
        a, b = sol((1, 2), integer=(1,)), sol((1, 2), integer=(2,))
        assert pareto_filter([a, b, sol((2, 1))]) == [a, sol((2, 1))]

    def test_feasible_displaces_infeasible(self):
        pts = [sol((0, 0), violation=1.0), sol((5, 5))]
        assert pareto_filter(pts) == [pts[1]]

    def test_random_sets_match_bruteforce(self):
        rng = np.random.default_rng(3)
        for _ in range(60):
            n = int(rng.integers(1, 100))
            objs = rng.integers(0, 8, size=(n, 2)).astype(float)
            viols = np.where(rng.random(n) < 0.3, rng.integers(1, 3, n).astype(float), 0.0)
            pts = [sol(o, v) for o, v in zip(objs, viols)]
            got = pareto_filter(pts)
            want = [pts[i] for i in filter_indices_ref(objs.tolist(), viols.tolist())]
            assert got == want

    def test_idempotent_and_mutually_non_dominated(self):
        rng = np.random.default_rng(9)
        pts = [sol(o) for o in rng.random((150, 2))]
        once = pareto_filter(pts)
        assert pareto_filter(once) == once
        for a, b in itertools.permutations(once, 2):
            assert not constrained_dominates(a, b)

    def test_fast_2d_matches_general_filter(self):
        rng = np.random.default_rng(21)
        for _ in range(80):
            n = int(rng.integers(1, 300))
            F = rng.integers(0, 12, size=(n, 2)).astype(float)
            assert np.array_equal(non_dominated_2d(F), non_dominated_indices(F))


class TestIdealPoint:
    def test_pair(self):
        assert ideal_point([(1, 3), (2, 1)]) == (1.0, 1.0)

    def test_singleton(self):
        assert ideal_point([(5, 5)]) == (5.0, 5.0)

    def test_empty_is_error(self):
        with pytest.raises(ValueError):
            ideal_point([])

    def test_gear_restricted_full_scan(self):
        # componentwise minima over the full 9^4 sub-lattice, against an
        # independently coded scan of the gear formulas
        vectors = []
        best = [float("inf"), float("inf")]
        for z in itertools.product(range(12, 21), repeat=4):
            f1 = 1.0 / 6.931 - ((z[0] * z[1]) / (z[2] * z[3])) ** 2
            f2 = float(max(z))
            vectors.append((f1, f2))
            best[0] = min(best[0], f1)
            best[1] = min(best[1], f2)
        assert ideal_point(vectors) == tuple(best)

    def test_lower_bounds_every_member(self):
        rng = np.random.default_rng(2)
        vecs = rng.random((200, 2))
        ideal = ideal_point(vecs)
        assert (vecs >= np.array(ideal)).all()


class TestArchiveMerge:
    def test_basic(self):
        archive = ParetoArchive(members=[sol((1, 2))])
        merged = archive_merge(archive, [sol((0, 3)), sol((2, 2))])
        assert [m.objectives for m in merged.members] == [(1.0, 2.0), (0.0, 3.0)]

    def test_into_empty(self):
        merged = archive_merge(ParetoArchive(), [sol((4, 4))])
        assert [m.objectives for m in merged.members] == [(4.0, 4.0)]

    def test_evaluations_accumulate(self):
        archive = ParetoArchive(members=[sol((1, 2))], evaluations=10)
        merged = archive_merge(archive, [sol((0, 3))], evaluations=7)
        assert merged.evaluations == 17

    def test_equals_filter_of_union(self):
        rng = np.random.default_rng(7)
        pts = [sol(o) for o in rng.integers(0, 10, size=(80, 2)).astype(float)]
        archive = ParetoArchive(members=pareto_filter(pts[:40]))
        merged = archive_merge(archive, pts[40:])
        assert merged.members == pareto_filter(archive.members + pts[40:])

    def test_order_insensitive_as_set(self):
        rng = np.random.default_rng(8)
        pts = [sol(o) for o in rng.integers(0, 10, size=(90, 2)).astype(float)]
        batches = [pts[:30], pts[30:60], pts[60:]]
        results = []
        for order in itertools.permutations(range(3)):
            archive = ParetoArchive()
            for k in order:
                archive = archive_merge(archive, batches[k])
            results.append({m.objectives for m in archive.members})
        assert all(r == results[0] for r in results)
