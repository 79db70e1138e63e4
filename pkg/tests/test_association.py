"""ROI filtering, interaction gating, the matching cost, and assignment."""

import numpy as np
import pytest

from coopfuse.association import (
    MatchWeights,
    RoiSpec,
    associate,
    filter_roi,
    gate_interaction,
    geo_appearance_cost,
    match,
    solve_assignment,
)
from conftest import make_instance
from oracles import brute_force_matched_total, brute_force_min_total


class TestFilterRoi:
    roi = RoiSpec(x_half=51.2, y_half=51.2, z_min=-3.0, z_max=3.0)

    def test_empty(self):
        assert filter_roi([], self.roi) == []

    def test_closed_boundary(self):
        inst = make_instance(x=51.2)
        assert filter_roi([inst], self.roi) == [inst]

    def test_hand_case(self):
        instances = [make_instance(x=x) for x in (10.0, 60.0, -70.0)]
        kept = filter_roi(instances, self.roi)
        assert kept == [instances[0]]

    def test_z_band(self):
        assert filter_roi([make_instance(z=5.0)], self.roi) == []

    def test_order_preserved(self):
        instances = [make_instance(x=x) for x in (3.0, -2.0, 1.0)]
        assert filter_roi(instances, self.roi) == instances


class TestGateInteraction:
    def test_huge_range_takes_all(self):
        instances = [make_instance(x=x) for x in (1.0, 40.0)]
        near, far = gate_interaction(instances, 1e9)
        assert near == instances and far == []

    def test_three_four_five_boundary_is_near(self):
        inst = make_instance(x=30.0, y=40.0)
        near, far = gate_interaction([inst], 50.0)
        assert near == [inst] and far == []

    def test_split(self):
        instances = [make_instance(x=d) for d in (10.0, 29.0, 31.0)]
        near, far = gate_interaction(instances, 30.0)
        assert near == instances[:2]
        assert far == instances[2:]


class TestGeoAppearanceCost:
    def test_identical_is_zero(self):
        a = make_instance(feature_seed=5)
        b = make_instance(feature_seed=5)
        assert geo_appearance_cost(a, b, MatchWeights()) == pytest.approx(0.0, abs=1e-12)

    def test_orthogonal_features(self):
        f1 = np.zeros(4); f1[0] = 1.0
        f2 = np.zeros(4); f2[1] = 1.0
        a = make_instance(feature=f1)
        b = make_instance(feature=f2)
        assert geo_appearance_cost(a, b, MatchWeights(alpha=1.0)) == pytest.approx(1.0)

    def test_single_axis_offset(self):
        a = make_instance(x=0.0, feature_seed=5)
        b = make_instance(x=2.0, feature_seed=5)
        cost = geo_appearance_cost(a, b, MatchWeights(w_pos=1.0))
        assert cost == pytest.approx(2.0, abs=1e-12)

    def test_symmetry_exact(self, rng):
        for _ in range(50):
            a = make_instance(x=rng.uniform(-5, 5), yaw=rng.uniform(-3, 3), feature_seed=1)
            b = make_instance(x=rng.uniform(-5, 5), yaw=rng.uniform(-3, 3), feature_seed=2)
            w = MatchWeights()
            assert geo_appearance_cost(a, b, w) == geo_appearance_cost(b, a, w)


class TestSolveAssignment:
    def test_hand_diagonal(self):
        pairs = solve_assignment(np.array([[1.0, 10.0], [10.0, 1.0]]))
        assert pairs == [(0, 0), (1, 1)]

    def test_optimal_beats_greedy(self):
        # Greedy would take (0,0)+(1,1) for 101; the optimum is 4.
        cost = np.array([[1.0, 2.0], [2.0, 100.0]])
        pairs = solve_assignment(cost)
        assert pairs == [(0, 1), (1, 0)]
        assert sum(cost[i, j] for i, j in pairs) == pytest.approx(4.0)

    def test_lexicographic_ties(self):
        assert solve_assignment(np.ones((2, 2))) == [(0, 0), (1, 1)]
        assert solve_assignment(np.zeros((1, 3))) == [(0, 0)]
        assert solve_assignment(np.zeros((3, 2))) == [(0, 0), (1, 1)]
        # Equal totals (2+4 = 3+3): the lexicographically smaller pairing wins.
        assert solve_assignment(np.array([[2.0, 3.0], [3.0, 4.0]])) == [(0, 0), (1, 1)]

    def test_matches_brute_force(self, rng):
        for _ in range(150):
            n, m = rng.integers(1, 8, 2)
            cost = rng.uniform(0, 10, (int(n), int(m)))
            pairs = solve_assignment(cost)
            total = sum(cost[i, j] for i, j in pairs)
            assert total == pytest.approx(brute_force_min_total(cost), abs=1e-9)


class TestMatch:
    w = MatchWeights(w_pos=1.0, w_dim=0.5, w_heading=1.0, w_vel=0.5, alpha=0.0,
                     cost_threshold=5.0)

    def test_empty_ego(self):
        coop = [make_instance(x=1.0)]
        result = match([], coop, self.w)
        assert result.matched == []
        assert result.unmatched_coop_near == coop

    def test_one_to_one(self):
        ego = [make_instance(x=0.0, feature_seed=1)]
        coop = [make_instance(x=1.0, feature_seed=1)]
        result = match(ego, coop, self.w)
        assert len(result.matched) == 1
        e, c, cost = result.matched[0]
        assert cost == pytest.approx(1.0, abs=1e-12)
        assert result.unmatched_ego == [] and result.unmatched_coop_near == []

    def test_threshold_demotion_is_strict(self):
        ego = [make_instance(x=0.0, feature_seed=1)]
        at_threshold = [make_instance(x=5.0, feature_seed=1)]
        result = match(ego, at_threshold, self.w)
        assert len(result.matched) == 1  # cost == threshold stays matched
        beyond = [make_instance(x=5.000001, feature_seed=1)]
        result = match(ego, beyond, self.w)
        assert result.matched == []
        assert result.unmatched_ego == ego
        assert result.unmatched_coop_near == beyond

    def test_partition_property(self, rng):
        for _ in range(30):
            ego = [
                make_instance(x=rng.uniform(-20, 20), y=rng.uniform(-20, 20),
                              feature_seed=int(i), track_id=i)
                for i in range(rng.integers(0, 6))
            ]
            coop = [
                make_instance(x=rng.uniform(-20, 20), y=rng.uniform(-20, 20),
                              feature_seed=int(100 + i), track_id=100 + i, source_agent=1)
                for i in range(rng.integers(0, 6))
            ]
            result = match(ego, coop, self.w)
            matched_ego = [e for e, _, _ in result.matched]
            matched_coop = [c for _, c, _ in result.matched]
            assert sorted(
                id(x) for x in matched_ego + result.unmatched_ego
            ) == sorted(id(x) for x in ego)
            assert sorted(
                id(x) for x in matched_coop + result.unmatched_coop_near
            ) == sorted(id(x) for x in coop)

    def test_threshold_monotonicity(self, rng):
        for _ in range(20):
            ego = [make_instance(x=rng.uniform(-10, 10), feature_seed=i) for i in range(4)]
            coop = [make_instance(x=rng.uniform(-10, 10), feature_seed=i + 50) for i in range(5)]
            counts = []
            for threshold in (0.5, 1.0, 2.0, 5.0, 20.0):
                w = MatchWeights(alpha=0.0, cost_threshold=threshold)
                counts.append(len(match(ego, coop, w).matched))
            assert counts == sorted(counts)

    def test_matched_total_matches_demotion_oracle(self, rng):
        # The demote-after-solve contract, checked against pure enumeration.
        for _ in range(60):
            n, m = rng.integers(1, 6, 2)
            ego = [make_instance(x=float(10 * i), feature_seed=i, track_id=i)
                   for i in range(int(n))]
            coop = [make_instance(x=float(rng.uniform(-5, 5 + 10 * int(n))),
                                  feature_seed=int(200 + j), track_id=200 + j)
                    for j in range(int(m))]
            w = MatchWeights(alpha=0.0, cost_threshold=float(rng.uniform(2, 15)))
            cost = np.array(
                [[geo_appearance_cost(e, c, w) for c in coop] for e in ego]
            )
            got = sum(c for _, _, c in match(ego, coop, w).matched)
            want = brute_force_matched_total(cost, w.cost_threshold)
            assert got == pytest.approx(want, abs=1e-9)


class TestAssociate:
    def test_full_chain_partition(self):
        roi = RoiSpec(x_half=50.0, y_half=50.0, z_min=-3, z_max=3)
        w = MatchWeights(alpha=0.0, cost_threshold=5.0)
        ego = [make_instance(x=1.0, feature_seed=1, track_id=1),
               make_instance(x=40.0, feature_seed=2, track_id=2)]
        coop = [
            make_instance(x=1.5, feature_seed=1, track_id=11, source_agent=1),   # matches ego[0]
            make_instance(x=45.0, feature_seed=3, track_id=12, source_agent=1),  # far: beyond r_int
            make_instance(x=80.0, feature_seed=4, track_id=13, source_agent=1),  # outside ROI
        ]
        result = associate(ego, coop, roi, r_int=30.0, w=w)
        assert len(result.matched) == 1
        assert result.matched[0][0] is ego[0]
        assert result.unmatched_ego == [ego[1]]  # beyond r_int, kept as ego-only
        assert result.unmatched_coop_near == []
        assert result.coop_far == [coop[1]]
