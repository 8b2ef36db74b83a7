import math

import numpy as np
import pytest

from mobnb.core import VariableVector
from mobnb.problems import (
    EvaluationError,
    ProblemSpec,
    VariableDomain,
    get_problem,
    make_tong,
    registry,
    restrict,
)

# problem -> (# variables, # integer-like variables, integer kind, # constraints)
TABLE_ROWS = {
    "gear": (4, 4, "integer", 0),
    "brake": (4, 1, "integer", 5),
    "truss": (9, 6, "discrete", 0),
    "mela": (10, 8, "binary", 0),
    "tong": (6, 3, "binary", 9),
}


def uniform_points(problem, n, seed=0):
    rng = np.random.default_rng(seed)
    c_lo, c_hi = problem.continuous_bounds()
    i_lo, i_hi = problem.integer_bounds()
    X = c_lo + rng.random((n, len(c_lo))) * (c_hi - c_lo)
    Y = rng.integers(i_lo, i_hi + 1, size=(n, len(i_lo)))
    return X, Y


class TestRegistry:
    def test_names(self):
        assert [p.name for p in registry()] == ["gear", "brake", "truss", "mela", "tong"]

    @pytest.mark.parametrize("name", sorted(TABLE_ROWS))
    def test_variable_and_constraint_counts(self, name):
        n_vars, n_int, int_kind, n_cons = TABLE_ROWS[name]
        p = get_problem(name)
        assert len(p.domains) == n_vars
        assert p.n_integer == n_int
        assert p.m_ineq == n_cons and p.m_eq == 0
        assert p.p == 2
        assert all(d.kind == int_kind for d in p.integer_domains)

    def test_gear_bounds(self):
        assert all(d.encoded_bounds() == (12, 60) for d in get_problem("gear").domains)

    def test_tong_continuous_bounds(self):
        doms = get_problem("tong").continuous_domains
        assert [(d.lo, d.hi) for d in doms] == [(-100.0, 100.0)] * 3

    def test_truss_discrete_sets(self):
        assert all(d.values == (1.0, 5.0, 10.0, 15.0) for d in get_problem("truss").integer_domains)

    def test_brake_integer_range(self):
        assert get_problem("brake").integer_domains[0].encoded_bounds() == (55, 80)

    def test_unknown_name(self):
        with pytest.raises(KeyError):
            get_problem("bearing")


class TestVariableDomain:
    def test_binary_is_integer_01(self):
        assert VariableDomain.binary().encoded_bounds() == (0, 1)

    def test_discrete_must_be_sorted_unique(self):
        with pytest.raises(ValueError):
            VariableDomain.discrete([3, 1, 2])
        with pytest.raises(ValueError):
            VariableDomain.discrete([1, 1, 2])
        with pytest.raises(ValueError):
            VariableDomain.discrete([])

    def test_empty_box(self):
        with pytest.raises(ValueError):
            VariableDomain.continuous(2.0, 1.0)


class TestEvaluate:
    def test_gear_all_twelve(self):
        obj, viol = get_problem("gear").evaluate(VariableVector((), (12, 12, 12, 12)))
        assert obj[0] == pytest.approx(1.0 / 6.931 - 1.0, rel=1e-12)
        assert obj == (1.0 / 6.931 - 1.0, 12.0)
        assert viol == 0.0

    def test_gear_ratio_asymmetry(self):
        obj, _ = get_problem("gear").evaluate(VariableVector((), (60, 60, 12, 12)))
        assert obj[0] == pytest.approx(1.0 / 6.931 - 625.0, rel=1e-12)
        assert obj[1] == 60.0

    def test_mela_zero_vector(self):
        obj, viol = get_problem("mela").evaluate(VariableVector((0.0, 0.0), (0,) * 8))
        assert obj == (0.0, 0.0) and viol == 0.0

    def test_mela_hand_case(self):
        # independent recomputation with explicit loops over G, c1, c2
        G = [
            [1, -1, 2, 0, 0, 0, 0, 0, 0, 0],
            [-1, 2, 0, 0, 2, 0, 0, 0, 0, 0],
            [0, 0, 3, 0, 2, 0, 0, 0, 0, 0],
            [2, 0, 0, 4, 0, 2, 0, 2, 0, 0],
            [0, 0, 0, 0, 5, 2, 0, 0, 0, 0],
            [0, 0, 0, 0, 0, 6, 0, 0, 0, 0],
            [0, 0, 0, 0, 0, 0, 7, 0, 0, 0],
            [0, 0, 0, 0, 0, 0, 0, 0, 0, 0],
            [0, 0, 0, 0, 0, 2, 0, 0, 0, 0],
            [0, 2, 0, 0, 0, 0, 0, 0, 0, 10],
        ]
        c1 = [-1, -1, 1, -10, 0, 1, -2, 0, 3, 0]
        c2 = [1, 2, -1, 1, 5, -2, 0, 6, 0, -3]
        z = [0.5, -0.25, 1, 0, 1, 0, 1, 1, 0, 1]
        quad = sum(z[i] * G[i][j] * z[j] for i in range(10) for j in range(10))
        want_f1 = 0.5 * quad + sum(a * b for a, b in zip(c1, z))
        want_f2 = sum(a * b for a, b in zip(c2, z))
        obj, viol = get_problem("mela").evaluate(
            VariableVector((0.5, -0.25), (1, 0, 1, 0, 1, 1, 0, 1))
        )
        assert obj[0] == pytest.approx(want_f1, rel=1e-12)
        assert obj[1] == pytest.approx(want_f2, rel=1e-12)
        assert viol == 0.0

    def test_tong_origin_satisfies_everything(self):
        obj, viol = get_problem("tong").evaluate(VariableVector((0.0, 0.0, 0.0), (0, 0, 0)))
        assert obj == (0.0, 0.0) and viol == 0.0

    def test_tong_hand_objectives(self):
        obj, _ = get_problem("tong").evaluate(VariableVector((2.0, 3.0, -1.0), (1, 0, 1)))
        assert obj[0] == pytest.approx(4 - 3 - 1 + 3 + 0 + 1, rel=1e-12)
        assert obj[1] == pytest.approx(8 + 3 + 3 - 2 + 0 - 2, rel=1e-12)

    def test_tong_g2_transcription_switch(self):
        # x = (0, 40, 1): g2 reads 40 - (x2 - 9*x3) = 9 under the default
        # transcription but 40 - (x2 + 9*x3) = -9 under the alternative
        v = VariableVector((0.0, 40.0, 1.0), (0, 0, 0))
        _, viol_minus = get_problem("tong").evaluate(v)
        _, viol_plus = make_tong(g2_plus_9x3=True).evaluate(v)
        assert viol_minus == 0.0
        assert viol_plus == pytest.approx(9.0, rel=1e-12)

    def test_truss_upper_bound_recomputation(self):
        r2 = math.sqrt(2.0)
        a = [10.0, 10.0, 10.0, 15.0, 15.0, 15.0, 15.0, 15.0, 15.0]
        want_f1 = a[0] + a[1] + a[2] + r2 * a[3] + a[4] + r2 * a[5] + a[6] + r2 * a[7] + a[8]
        want_f2 = (
            4 / a[0] + 1 / a[1] + 1 / a[2] + 8 * r2 / a[3] + 4 / a[4]
            + 2 * r2 / a[5] + 4 / a[6] + 2 * r2 / a[7]
        )
        obj, viol = get_problem("truss").evaluate(
            VariableVector((10.0, 10.0, 10.0), (3, 3, 3, 3, 3, 3))
        )
        assert obj[0] == pytest.approx(want_f1, rel=1e-12)
        assert obj[1] == pytest.approx(want_f2, rel=1e-12)
        assert viol == 0.0

    def test_truss_discrete_index_decoding(self):
        # index 2 selects area 10.0 for every discrete member
        obj_idx, _ = get_problem("truss").evaluate(
            VariableVector((1.0, 1.0, 1.0), (2, 2, 2, 2, 2, 2))
        )
        r2 = math.sqrt(2.0)
        assert obj_idx[0] == pytest.approx(3 + 3 * r2 * 10 + 3 * 10, rel=1e-12)

    def test_brake_g1(self):
        brake = get_problem("brake")
        _, viol = brake.evaluate(VariableVector((110.0, 1000.0, 2.0), (55,)))
        assert viol == 0.0
        # x1 - y1 = 15 < 20: g1 violated by 5, all other constraints satisfied
        _, viol = brake.evaluate(VariableVector((80.0, 1000.0, 2.0), (65,)))
        assert viol == pytest.approx(5.0, rel=1e-12)

    def test_brake_hand_objectives(self):
        x1, x2, x3, y1 = 100.0, 2000.0, 10.0, 60
        obj, _ = get_problem("brake").evaluate(VariableVector((x1, x2, x3), (y1,)))
        assert obj[0] == pytest.approx(4.9e-5 * (x1**2 - y1**2) * (x3 - 1), rel=1e-12)
        assert obj[1] == pytest.approx(
            9.82e6 * (x1**2 - y1**2) / (x2 * x3 * (x1**3 - y1**3)), rel=1e-12
        )

    def test_brake_total_at_equal_radii(self):
        # x1 == y1 is reachable (integer inner radius, continuous outer);
        # objectives stay finite, infeasibility is driven to +inf
        obj, viol = get_problem("brake").evaluate(VariableVector((75.0, 1000.0, 2.0), (75,)))
        assert all(math.isfinite(v) for v in obj)
        assert viol > 0


class TestProperties:
    @pytest.mark.parametrize("name", sorted(TABLE_ROWS))
    def test_deterministic_and_finite_on_10k_samples(self, name):
        problem = get_problem(name)
        X, Y = uniform_points(problem, 10_000, seed=17)
        F1, V1 = problem.batch_evaluate(X, Y)
        F2, V2 = problem.batch_evaluate(X, Y)
        assert np.array_equal(F1, F2) and np.array_equal(V1, V2)
        assert np.isfinite(F1).all()

    @pytest.mark.parametrize("name", ["gear", "truss", "mela"])
    def test_unconstrained_problems_always_feasible(self, name):
        problem = get_problem(name)
        X, Y = uniform_points(problem, 10_000, seed=3)
        _, viol = problem.batch_evaluate(X, Y)
        assert (viol == 0).all()

    def test_scalar_matches_batch_bitwise(self):
        problem = get_problem("brake")
        X, Y = uniform_points(problem, 50, seed=5)
        F, V = problem.batch_evaluate(X, Y)
        for k in range(50):
            obj, viol = problem.evaluate(VariableVector(tuple(X[k]), tuple(int(v) for v in Y[k])))
            assert obj == tuple(F[k]) and viol == V[k]


class TestErrors:
    def test_out_of_domain_continuous(self):
        with pytest.raises(ValueError):
            get_problem("brake").evaluate(VariableVector((200.0, 1000.0, 2.0), (55,)))

    def test_out_of_domain_integer(self):
        with pytest.raises(ValueError):
            get_problem("gear").evaluate(VariableVector((), (12, 12, 12, 61)))

    def test_bad_arity(self):
        with pytest.raises(ValueError):
            get_problem("gear").evaluate(VariableVector((), (12, 12, 12)))

    def test_discrete_index_out_of_range(self):
        with pytest.raises(ValueError):
            get_problem("truss").evaluate(VariableVector((1.0, 1.0, 1.0), (0, 0, 0, 0, 0, 4)))

    def test_non_finite_objective_reported(self):
        def bad_raw(X, Yv):
            F = np.full((len(Yv), 2), np.nan)
            return F, np.empty((len(Yv), 0))

        bad = ProblemSpec(name="bad", domains=(VariableDomain.integer(0, 1),), raw=bad_raw)
        with pytest.raises(EvaluationError, match="bad"):
            bad.evaluate(VariableVector((), (0,)))


class TestRestrict:
    def test_narrows_integer_bounds(self):
        gear = restrict(get_problem("gear"), [(12, 20)] * 4)
        assert all(d.encoded_bounds() == (12, 20) for d in gear.domains)
        obj, _ = gear.evaluate(VariableVector((), (20, 20, 12, 12)))
        assert obj[1] == 20.0

    def test_discrete_sliced_by_index(self):
        truss = restrict(get_problem("truss"), [(1, 2)] * 6)
        assert all(d.values == (5.0, 10.0) for d in truss.integer_domains)

    def test_rejects_widening(self):
        with pytest.raises(ValueError):
            restrict(get_problem("gear"), [(10, 60)] + [(12, 60)] * 3)

    def test_rejects_wrong_arity(self):
        with pytest.raises(ValueError):
            restrict(get_problem("gear"), [(12, 20)] * 3)
