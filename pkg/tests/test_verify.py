import numpy as np
import pytest

from divopt import (
    Hybrid,
    ModelParams,
    PeriodicZero,
    audit_derivative_pattern,
    brute_force_hybrid,
    check_hjb,
    solve,
    solve_roots,
)
from divopt.verify import hybrid_objective


@pytest.fixture(scope="module")
def solved(pos_params):
    return solve(pos_params).strategy


class TestCheckHJB:
    def test_solved_strategy_passes(self, pos_params, pos_roots, solved):
        rep = check_hjb(pos_params, pos_roots, solved)
        assert rep.passed
        assert rep.max_generator_violation <= 1e-6
        assert rep.max_payment_residual <= 1e-6

    def test_periodic_zero_passes_where_optimal(self):
        p = ModelParams(mu=-1.0, sigma=0.3, chi=0.9, beta=0.7, gamma=1.0, delta=0.15)
        r = solve_roots(p)
        rep = check_hjb(p, r, PeriodicZero())
        assert rep.passed

    def test_liquidation_window_passes(self, neg_params, neg_roots):
        st = solve(neg_params).strategy
        rep = check_hjb(neg_params, neg_roots, st)
        assert rep.passed

    def test_upper_barrier_perturbation_detected_near_b(
        self, pos_params, pos_roots, solved
    ):
        bad = Hybrid(solved.a_p, solved.a_c, solved.b + 0.2)
        rep = check_hjb(pos_params, pos_roots, bad)
        assert not rep.passed
        assert rep.max_payment_residual > rep.tol
        # the improving payment shows up around the displaced barrier
        assert solved.a_c < rep.worst_x_payment < bad.b + 0.5

    def test_lower_barrier_perturbation_is_a_strong_violation(
        self, pos_params, pos_roots, solved
    ):
        bad = Hybrid(solved.a_p + 0.3, max(solved.a_c, solved.a_p + 0.3), solved.b)
        rep = check_hjb(pos_params, pos_roots, bad)
        assert rep.max_generator_violation > 1e-3

    def test_inner_sup_attained_at_periodic_target(
        self, pos_params, pos_roots, solved
    ):
        rep = check_hjb(pos_params, pos_roots, solved, xi_grid_density=300)
        x = rep.x_generator
        sel = x > solved.a_p + 0.05
        cell = x[sel] / 299.0  # uniform xi spacing is x/(density-1)
        gap = np.abs(rep.generator_argmax_xi[sel] - (x[sel] - solved.a_p))
        assert np.all(gap <= cell + 1e-12)

    def test_refining_xi_grid_never_lowers_suprema(self, pos_params, pos_roots, solved):
        bad = Hybrid(solved.a_p, solved.a_c, solved.b + 0.2)
        x = np.linspace(0.0, 3.0, 400)
        coarse = check_hjb(pos_params, pos_roots, bad, x_grid=x, xi_grid_density=101)
        fine = check_hjb(pos_params, pos_roots, bad, x_grid=x, xi_grid_density=201)
        assert fine.max_payment_residual >= coarse.max_payment_residual - 1e-15
        assert fine.max_generator_violation >= coarse.max_generator_violation - 1e-15


class TestBruteForce:
    def test_solver_dominates_lattice(self, pos_params, pos_roots, solved):
        res = brute_force_hybrid(pos_params, pos_roots, n_per_axis=30)
        obj_star = float(
            hybrid_objective(
                pos_params,
                pos_roots,
                solved.a_p,
                solved.a_c - solved.a_p,
                solved.b - solved.a_c,
            )
        )
        assert obj_star >= res.objective - 1e-6

    def test_refinement_moves_argmax_toward_solver(self, pos_params, pos_roots, solved):
        target = np.array([solved.a_p, solved.a_c - solved.a_p, solved.b - solved.a_c])
        bounds = (4 * target[1], 4 * target[2])
        coarse = brute_force_hybrid(pos_params, pos_roots, bounds, n_per_axis=12)
        fine = brute_force_hybrid(pos_params, pos_roots, bounds, n_per_axis=48)
        d_coarse = np.linalg.norm(np.array([coarse.a, coarse.l, coarse.y]) - target)
        d_fine = np.linalg.norm(np.array([fine.a, fine.l, fine.y]) - target)
        assert d_fine < d_coarse
        assert fine.objective >= coarse.objective

    def test_lattice_respects_minimum_payment_gap(self, pos_params, pos_roots):
        res = brute_force_hybrid(pos_params, pos_roots, n_per_axis=10)
        assert res.barriers[2] - res.barriers[1] > pos_params.chi / pos_params.beta

    def test_paying_the_bare_minimum_is_never_best(self, pos_params, pos_roots, solved):
        # objective strictly worse when the gap nets exactly zero
        at_min = float(
            hybrid_objective(
                pos_params,
                pos_roots,
                solved.a_p,
                solved.a_c - solved.a_p,
                pos_params.chi / pos_params.beta * 1.0000001,
            )
        )
        best = float(
            hybrid_objective(
                pos_params,
                pos_roots,
                solved.a_p,
                solved.a_c - solved.a_p,
                solved.b - solved.a_c,
            )
        )
        assert at_min < best


class TestPatternAudit:
    def test_solved_passes(self, pos_params, pos_roots, solved):
        audit = audit_derivative_pattern(pos_params, pos_roots, solved)
        assert audit.passed and audit.branch == "interior"

    def test_inflated_lower_barrier_fails_with_location(
        self, pos_params, pos_roots, solved
    ):
        bad = Hybrid(solved.a_p + 0.3, max(solved.a_c, solved.a_p + 0.3), solved.b)
        audit = audit_derivative_pattern(pos_params, pos_roots, bad)
        assert not audit.passed
        assert audit.violations
        xs = [v[0] for v in audit.violations]
        assert any(x < bad.a_p for x in xs)  # slope drops below 1 before a_p

    def test_collapsed_barriers_use_reduced_branch(self):
        p = ModelParams(mu=0.05, sigma=3.0, chi=0.01, beta=0.95, gamma=1.0, delta=0.15)
        st = solve(p).strategy
        assert st.a_p == 0.0 and st.a_c == 0.0
        audit = audit_derivative_pattern(p, solve_roots(p), st)
        assert audit.branch == "both_zero"
        assert audit.passed

    def test_rejects_non_hybrid(self, neg_params, neg_roots):
        with pytest.raises(TypeError):
            audit_derivative_pattern(neg_params, neg_roots, PeriodicZero())


class TestValueDominance:
    def test_solved_value_dominates_grid_candidates_pointwise(
        self, pos_params, pos_roots, solved
    ):
        from divopt import ValueFunction

        vf_star = ValueFunction(pos_params, pos_roots, solved)
        xs = np.linspace(0.0, 2.5 * solved.b, 40)
        rng = np.random.default_rng(77)
        min_gap = pos_params.chi / pos_params.beta
        for _ in range(25):
            a = rng.uniform(0.0, pos_roots.a_bar)
            l = rng.uniform(0.0, 0.5)
            y = rng.uniform(min_gap * 1.05, 3.0)
            cand = Hybrid(a, a + l, a + l + y)
            vc = ValueFunction(pos_params, pos_roots, cand)
            assert np.all(vf_star(xs) >= vc(xs) - 1e-6)
