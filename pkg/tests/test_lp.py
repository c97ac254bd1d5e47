import numpy as np
import pytest
from scipy.optimize import linprog

from iqp.lp import INFEASIBLE, OPTIMAL, UNBOUNDED, SimplexFailure, solve_lp


def scipy_reference(c, rows, rhs, senses, maximize=False):
    a_ub, b_ub, a_eq, b_eq = [], [], [], []
    for row, value, sense in zip(rows, rhs, senses):
        if sense == "==":
            a_eq.append(row)
            b_eq.append(value)
        elif sense == "<=":
            a_ub.append(row)
            b_ub.append(value)
        else:
            a_ub.append(-np.asarray(row))
            b_ub.append(-value)
    return linprog(
        -np.asarray(c) if maximize else c,
        A_ub=np.array(a_ub) if a_ub else None,
        b_ub=np.array(b_ub) if b_ub else None,
        A_eq=np.array(a_eq) if a_eq else None,
        b_eq=np.array(b_eq) if b_eq else None,
        bounds=[(0, None)] * len(c),
        method="highs",
        options={"presolve": False},  # presolve mislabels some unbounded LPs
    )


class TestKnownCases:
    def test_simple_max(self):
        res = solve_lp(
            np.array([1.0, 1.0]), np.array([[1.0, 1.0]]), np.array([1.0]), ["<="],
            maximize=True,
        )
        assert res.status == OPTIMAL
        assert res.objective == pytest.approx(1.0, abs=1e-12)

    def test_equality_and_bound(self):
        # marginal pin via the inequality pair: p0+p1 >= 0.5 and p2+p3 >= 0.5
        rows = np.array([
            [1.0, 1.0, 1.0, 1.0],
            [1.0, 1.0, 0.0, 0.0],
            [0.0, 0.0, 1.0, 1.0],
        ])
        rhs = np.array([1.0, 0.5, 0.5])
        senses = ["==", ">=", ">="]
        low = solve_lp(np.array([1.0, 0, 0, 0]), rows, rhs, senses)
        high = solve_lp(np.array([1.0, 0, 0, 0]), rows, rhs, senses, maximize=True)
        assert low.objective == pytest.approx(0.0, abs=1e-12)
        assert high.objective == pytest.approx(0.5, abs=1e-12)

    def test_infeasible_with_farkas(self):
        rows = np.array([[1, 1, 1, 1.0], [1, 1, 0, 0.0], [0, 0, 1, 1.0]])
        rhs = np.array([1.0, 0.8, 0.8])
        res = solve_lp(np.zeros(4), rows, rhs, ["==", ">=", ">="])
        assert res.status == INFEASIBLE
        y = res.farkas_duals
        assert y @ rhs == pytest.approx(0.6, abs=1e-9)
        assert np.all(y @ rows <= 1e-9)
        assert y[1] >= -1e-9 and y[2] >= -1e-9  # inequality rows: y >= 0

    def test_unbounded(self):
        res = solve_lp(np.array([-1.0]), np.array([[0.0]]), np.array([1.0]), ["<="])
        assert res.status == UNBOUNDED

    def test_negative_rhs_flip(self):
        # -x <= -2 means x >= 2
        res = solve_lp(np.array([1.0]), np.array([[-1.0]]), np.array([-2.0]), ["<="])
        assert res.status == OPTIMAL
        assert res.objective == pytest.approx(2.0, abs=1e-12)

    def test_degenerate_pin(self):
        rows = np.array([[1, 1, 1, 1.0], [1, 0, 0, 0.0], [0, 1, 1, 1.0]])
        rhs = np.array([1.0, 0.3, 0.7])
        low = solve_lp(np.array([1.0, 0, 0, 0]), rows, rhs, ["==", ">=", ">="])
        high = solve_lp(np.array([1.0, 0, 0, 0]), rows, rhs, ["==", ">=", ">="], maximize=True)
        assert low.objective == pytest.approx(0.3, abs=1e-12)
        assert high.objective == pytest.approx(0.3, abs=1e-12)

    def test_redundant_rows_survive(self):
        rows = np.array([[1.0, 1.0], [2.0, 2.0]])
        rhs = np.array([1.0, 2.0])
        res = solve_lp(np.array([1.0, 0.0]), rows, rhs, ["==", "=="])
        assert res.status == OPTIMAL
        assert res.objective == pytest.approx(0.0, abs=1e-12)


class TestValidation:
    def test_bad_sense(self):
        with pytest.raises(ValueError, match="sense"):
            solve_lp(np.zeros(1), np.array([[1.0]]), np.array([1.0]), [">"])

    def test_shape_mismatch(self):
        with pytest.raises(ValueError, match="length"):
            solve_lp(np.zeros(2), np.array([[1.0]]), np.array([1.0]), ["<="])

    def test_pivot_cap_raises_failure(self):
        rows = np.array([[1, 1, 1, 1.0], [1, 1, 0, 0.0]])
        rhs = np.array([1.0, 0.5])
        with pytest.raises(SimplexFailure, match="pivot limit"):
            solve_lp(np.array([1.0, 0, 0, 0]), rows, rhs, ["==", ">="], pivot_cap=1)


class TestDeterminism:
    def test_identical_runs(self):
        rng = np.random.default_rng(0)
        rows = rng.normal(size=(5, 8))
        rhs = rng.normal(size=5)
        c = rng.normal(size=8)
        senses = ["<=", ">=", "==", "<=", ">="]
        first = solve_lp(c, rows, rhs, senses)
        second = solve_lp(c, rows, rhs, senses)
        assert first.status == second.status
        if first.status == OPTIMAL:
            assert first.x.tobytes() == second.x.tobytes()
        elif first.status == INFEASIBLE:
            assert first.farkas_duals.tobytes() == second.farkas_duals.tobytes()


class TestAgainstScipy:
    @pytest.mark.parametrize("seed", range(4))
    def test_random_mixed(self, seed):
        rng = np.random.default_rng(100 + seed)
        for _ in range(80):
            n = int(rng.integers(2, 9))
            m = int(rng.integers(1, 7))
            rows = rng.normal(size=(m, n))
            rhs = rng.normal(size=m)
            senses = [["==", ">=", "<="][int(rng.integers(3))] for _ in range(m)]
            c = rng.normal(size=n)
            mine = solve_lp(c, rows, rhs, senses)
            ref = scipy_reference(c, rows, rhs, senses)
            if ref.status == 0:
                assert mine.status == OPTIMAL
                assert mine.objective == pytest.approx(ref.fun, abs=1e-6)
            elif ref.status == 2:
                assert mine.status == INFEASIBLE
                y = mine.farkas_duals
                assert y @ rhs > 1e-10
                assert np.all(y @ rows <= 1e-8)
            elif ref.status == 3:
                assert mine.status == UNBOUNDED

    def test_probability_polytopes(self):
        rng = np.random.default_rng(200)
        for _ in range(60):
            size = int(rng.integers(2, 17))
            n_cons = int(rng.integers(1, 6))
            rows = [np.ones(size)]
            rhs = [1.0]
            senses = ["=="]
            for _ in range(n_cons):
                mask = (rng.random(size) < 0.5).astype(float)
                rows.append(mask)
                rhs.append(float(rng.random()))
                senses.append(">=")
            c = rng.normal(size=size)
            mine = solve_lp(c, np.array(rows), np.array(rhs), senses)
            ref = scipy_reference(c, np.array(rows), np.array(rhs), senses)
            if ref.status == 0:
                assert mine.status == OPTIMAL
                assert mine.objective == pytest.approx(ref.fun, abs=1e-7)
                assert mine.x.min() >= -1e-9
            else:
                assert ref.status == 2
                assert mine.status == INFEASIBLE
