import numpy as np
import pytest

import aoakit.search as search
from aoakit.arrays import Array, is_oa, tolerance, unbalance
from aoakit.search import (
    FrontMember,
    ObjectiveVector,
    ParetoFront,
    SearchConfig,
    brute_force_optimum,
    front_insert,
    local_pareto_search,
    neighborhood_scan,
)
from aoakit.symmetry import bicyclic_generator, is_automorphism

from oracles import min_unbalance_grid_4_4_2


def member(unb, tol) -> FrontMember:
    cells = np.zeros((1, 1), dtype=np.int64)
    arr = Array(np.array([[1]]), 2)
    return FrontMember(cells=cells, array=arr, objective=ObjectiveVector(unb, tol))


class TestParetoFront:
    def test_insert_keeps_antichain(self):
        front = ParetoFront()
        assert front_insert(front, member(10, 3))
        assert front_insert(front, member(8, 4))
        assert not front_insert(front, member(12, 5))  # dominated by (10, 3)
        assert not front_insert(front, member(10, 3))  # equal is rejected
        assert front_insert(front, member(9, 3))  # evicts (10, 3)
        assert sorted(front.objectives()) == [(8, 4), (9, 3)]

    def test_insert_can_evict_several(self):
        front = ParetoFront()
        front_insert(front, member(10, 1))
        front_insert(front, member(5, 5))
        assert front_insert(front, member(4, 1))
        assert front.objectives() == [(4, 1)]

    def test_best_accessors(self):
        front = ParetoFront()
        front_insert(front, member(8, 4))
        front_insert(front, member(9, 2))
        assert front.best_unbalance() == 8
        assert front.best_tolerance() == 2

    def test_dominates_or_equals(self):
        assert ObjectiveVector(3, 2).dominates_or_equals(ObjectiveVector(3, 2))
        assert ObjectiveVector(2, 2).dominates_or_equals(ObjectiveVector(3, 2))
        assert not ObjectiveVector(2, 3).dominates_or_equals(ObjectiveVector(3, 2))


class TestConfigValidation:
    def test_rejects_bad_values(self):
        with pytest.raises(ValueError):
            SearchConfig(p=3)
        with pytest.raises(ValueError):
            SearchConfig(radius=0)
        with pytest.raises(ValueError):
            SearchConfig(encoding="spiral")
        with pytest.raises(ValueError):
            SearchConfig(restarts=0)

    def test_radius_cap_at_scan_time(self):
        front = ParetoFront()
        front_insert(front, member(1, 1))
        with pytest.raises(ValueError):
            neighborhood_scan(front, 3, lambda i, c: False)


class TestNeighborhoodScan:
    def test_visits_singles_then_pairs(self):
        cells = np.array([[1, 1]], dtype=np.int64)
        arr = Array(cells, 2)
        front = ParetoFront()
        front_insert(
            front,
            FrontMember(cells=cells, array=arr, objective=ObjectiveVector(0, 0)),
        )
        seen = []
        neighborhood_scan(front, 2, lambda i, c: seen.append(c.copy()) and False)
        # Two cells with one alternative each: 2 singles, then 1 pair move
        # (both flipped), in deterministic order.
        assert [c.tolist() for c in seen] == [
            [[2, 1]],
            [[1, 2]],
            [[2, 2]],
        ]

    def test_stops_on_first_insertion(self):
        cells = np.array([[1, 1]], dtype=np.int64)
        arr = Array(cells, 2)
        front = ParetoFront()
        front_insert(
            front,
            FrontMember(cells=cells, array=arr, objective=ObjectiveVector(9, 9)),
        )
        report = neighborhood_scan(front, 2, lambda i, c: True)
        assert report.changed and report.examined == 1

    def test_radius_one_skips_pairs(self):
        cells = np.array([[1, 1]], dtype=np.int64)
        arr = Array(cells, 2)
        front = ParetoFront()
        front_insert(
            front,
            FrontMember(cells=cells, array=arr, objective=ObjectiveVector(0, 0)),
        )
        report = neighborhood_scan(front, 1, lambda i, c: False)
        assert report.examined == 2


class TestDeltaEvaluation:
    def test_change_matches_full_recount(self, rng):
        from conftest import random_array

        for _ in range(25):
            s = int(rng.integers(2, 5))
            a = random_array(rng, n_runs=s * s, n_factors=4, n_levels=s)
            p = int(rng.integers(1, 3))
            tables = search._PairTables(a, p)
            i = int(rng.integers(0, a.n_runs))
            j = int(rng.integers(0, a.n_factors))
            value = int(rng.integers(1, s + 1))
            if value == int(a.cells[i, j]):
                continue
            got = tables.change(i, j, value)
            mutated = a.cells.copy()
            mutated[i, j] = value
            b = Array(mutated, s)
            assert got.unbalance == unbalance(b, 2, p)
            assert got.tolerance == tolerance(b, 2)

    def test_search_with_cross_check_enabled(self, monkeypatch):
        monkeypatch.setattr(search, "CROSS_CHECK_DELTA", True)
        front = local_pareto_search(4, 4, 2, SearchConfig(p=1, seed=3))
        assert front.members


class TestLocalSearch:
    def test_finds_orthogonal_array(self):
        front = local_pareto_search(4, 3, 2, SearchConfig(p=2, seed=0))
        assert front.objectives() == [(0, 0)]
        assert is_oa(front.members[0].array, 2)

    def test_target_4_4_2(self):
        front = local_pareto_search(4, 4, 2, SearchConfig(p=1, seed=0, restarts=10))
        assert (4, 1) in front.objectives()

    def test_target_9_5_3_bicyclic(self):
        cfg = SearchConfig(p=2, seed=0, restarts=10, encoding="bicyclic")
        front = local_pareto_search(9, 5, 3, cfg)
        assert (18, 1) in front.objectives()

    def test_front_members_verify(self):
        cfg = SearchConfig(p=2, seed=1, restarts=2)
        front = local_pareto_search(9, 4, 3, cfg)
        for m in front.members:
            assert m.objective.unbalance == unbalance(m.array, 2, 2)
            assert m.objective.tolerance == tolerance(m.array, 2)

    def test_deterministic_for_seed(self):
        cfg = SearchConfig(p=1, seed=5, restarts=2)
        a = local_pareto_search(4, 4, 2, cfg)
        b = local_pareto_search(4, 4, 2, cfg)
        assert a.objectives() == b.objectives()
        for ma, mb in zip(a.members, b.members):
            assert ma.array == mb.array

    def test_requires_square_divisor(self):
        with pytest.raises(ValueError):
            local_pareto_search(10, 3, 3, SearchConfig())

    def test_max_passes_cap(self):
        cfg = SearchConfig(p=2, seed=0, max_passes=1)
        front = local_pareto_search(9, 4, 3, cfg)
        assert front.members  # capped but still returns a valid front


class TestEncodings:
    def test_bicyclic_expansion_is_automorphic(self):
        cfg = SearchConfig(p=2, seed=2, encoding="bicyclic")
        front = local_pareto_search(9, 5, 3, cfg)
        g = bicyclic_generator(3, 5)
        for m in front.members:
            assert m.cells.shape == (3, 5)  # N/s core rows
            assert is_automorphism(g, m.array)

    def test_quasicyclic_has_fixed_ones_rows(self):
        cfg = SearchConfig(p=2, seed=2, encoding="quasicyclic")
        front = local_pareto_search(9, 4, 3, cfg)
        for m in front.members:
            arr = m.array
            ones = (arr.cells == 1).all(axis=1).sum()
            assert ones >= 1  # lambda all-ones fixed rows
            assert arr.n_runs == 9

    def test_bicyclic_r_override(self):
        cfg = SearchConfig(p=2, seed=0, encoding="bicyclic", bicyclic_r=1)
        front = local_pareto_search(4, 3, 2, cfg)
        assert front.members


class TestBruteForce:
    def test_matches_unreduced_grid_enumeration(self):
        # The oracle pins the first two columns; the reference enumerates all
        # 2^16 arrays without any reduction.
        for p in (1, 2):
            expected_unb, expected_tol = min_unbalance_grid_4_4_2(p)
            got = brute_force_optimum(4, 4, 2, p=p)
            assert got.min_unbalance == expected_unb == 4
            assert got.min_tolerance == expected_tol == 1

    def test_witnesses_realize_minima(self):
        r = brute_force_optimum(4, 4, 2, p=1)
        assert r.unbalance_witnesses and r.tolerance_witnesses
        for w in r.unbalance_witnesses:
            assert unbalance(w, 2, 1) == r.min_unbalance
        for w in r.tolerance_witnesses:
            assert tolerance(w, 2) == r.min_tolerance

    def test_oa_case_is_zero(self):
        r = brute_force_optimum(4, 3, 2, p=2)
        assert r.min_unbalance == 0 and r.min_tolerance == 0

    def test_tol_cap_variant(self):
        capped = brute_force_optimum(4, 4, 2, p=1, tol_cap=1)
        assert capped.tol_cap == 1
        assert capped.min_unbalance == 4
        # Tolerance 0 is infeasible at these parameters (no OA exists).
        with pytest.raises(ValueError):
            brute_force_optimum(4, 4, 2, p=1, tol_cap=0)

    def test_guards(self):
        with pytest.raises(ValueError):
            brute_force_optimum(10, 3, 3)
        with pytest.raises(ValueError):
            brute_force_optimum(25, 8, 5, max_states=1000)
