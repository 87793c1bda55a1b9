import pytest

from qfrac import (
    DomainError,
    IVProblem,
    MLParams,
    QParams,
    ivp_residual,
    left_frac_integral,
    q_exp_e,
    q_factorial_power,
    q_gamma,
    q_mittag_leffler,
    solve_ivp_closed,
    solve_ivp_picard,
)

from conftest import rel_err

# alpha=0.9, beta=1, lam=0.3, z=1, z0=q^4, q=1/2; frozen from a 50-digit run.
ML_REGRESSION = 1.3634725967451728


class TestMLParams:
    @pytest.mark.parametrize("alpha", [0.0, -1.0])
    def test_alpha_positive(self, alpha):
        with pytest.raises(DomainError):
            MLParams(alpha)

    def test_negative_origin_rejected(self):
        with pytest.raises(DomainError):
            MLParams(0.9, z0=-1.0)


class TestMittagLeffler:
    def test_zero_rate_collapses_to_leading_term(self, p_half):
        for beta in (1.0, 1.3, 2.0):
            got = q_mittag_leffler(MLParams(0.9, beta, 0.0, 0.0), 1.0, p_half)
            assert rel_err(got, 1.0 / q_gamma(beta, p_half)) < 1e-13

    @pytest.mark.parametrize("q", [0.3, 0.5, 0.8])
    def test_reduces_to_small_exponential(self, q):
        p = QParams(q)
        for lam in (0.5, -0.5):
            for z in (q, 1.0):
                got = q_mittag_leffler(MLParams(1.0, 1.0, lam, 0.0), z, p)
                assert rel_err(got, q_exp_e(lam * z, p)) < 1e-10

    def test_regression_value(self, p_half):
        mp = MLParams(0.9, 1.0, 0.3, 0.5**4)
        got = q_mittag_leffler(mp, 1.0, p_half)
        assert rel_err(got, ML_REGRESSION) < 1e-12
        # Independent partial-sum oracle over the same primitives.
        total = 0.0
        for k in range(80):
            total += (
                0.3**k
                * q_factorial_power(1.0, 0.5**4, 0.9 * k, p_half)
                / q_gamma(0.9 * k + 1.0, p_half)
            )
        assert rel_err(got, total) < 1e-13

    def test_vanishing_powers_below_origin(self, p_half):
        # Aligned z below z0 kills every k >= 1 term exactly.
        mp = MLParams(0.9, 1.0, 0.3, 0.5**2)
        assert q_mittag_leffler(mp, 0.5**4, p_half) == 1.0


class TestProblemTypes:
    @pytest.mark.parametrize("alpha", [0.0, 1.2, -0.3])
    def test_order_range(self, alpha):
        with pytest.raises(DomainError):
            IVProblem(alpha, 0.3, 0.0, 1.0)

    def test_negative_base_rejected(self):
        with pytest.raises(DomainError):
            IVProblem(0.9, 0.3, -1.0, 1.0)


class TestClosedForm:
    def test_unforced_zero_rate_is_constant(self, p_half):
        y = solve_ivp_closed(IVProblem(0.7, 0.0, 0.5**4, 2.5), p_half)
        for t in (0.5**4, 0.25, 1.0):
            assert y(t) == pytest.approx(2.5, rel=1e-12)

    def test_initial_value_is_exact(self, p_half):
        a = 0.5**4
        y = solve_ivp_closed(IVProblem(0.9, 0.3, a, 1.0), p_half)
        assert y(a) == 1.0

    def test_unforced_solution_is_scaled_kernel(self, p_half):
        a = 0.5**4
        prob = IVProblem(0.9, 0.3, a, 2.0)
        y = solve_ivp_closed(prob, p_half)
        for t in (0.25, 1.0):
            expected = 2.0 * q_mittag_leffler(MLParams(0.9, 1.0, 0.3, a), t, p_half)
            assert rel_err(y(t), expected) < 1e-12

    def test_order_one_unit_rate_from_origin_is_small_exp(self, p_half):
        y = solve_ivp_closed(IVProblem(1.0, 1.0, 0.0, 1.0), p_half)
        for t in (0.5**3, 0.25, 0.5, 1.0):
            assert rel_err(y(t), q_exp_e(t, p_half)) < 1e-8

    def test_method_tag_and_diagnostics(self, p_half):
        y = solve_ivp_closed(IVProblem(0.9, 0.3, 0.0, 1.0), p_half)
        y(1.0)
        assert y.method == "closed-form"
        assert y.diagnostics["evaluations"] >= 1


class TestPicard:
    def test_zero_iterations_is_initial_constant(self, p_half):
        y = solve_ivp_picard(IVProblem(0.9, 0.3, 0.0, 4.0), 0, p_half)
        for t in (0.25, 1.0):
            assert y(t) == 4.0
        assert y.diagnostics["iterations"] == 0

    def test_single_step_formula(self, p_half):
        # a0 (1 + lam (t - a)_q^alpha / q_gamma(alpha + 1))
        a, alpha, lam, a0 = 0.5**4, 0.9, 0.3, 2.0
        y = solve_ivp_picard(IVProblem(alpha, lam, a, a0), 1, p_half)
        for t in (0.25, 1.0):
            expected = a0 * (
                1.0
                + lam
                * q_factorial_power(t, a, alpha, p_half)
                / q_gamma(alpha + 1.0, p_half)
            )
            assert rel_err(y(t), expected) < 1e-9

    def test_converges_to_closed_form(self, p_half):
        prob = IVProblem(0.9, 0.3, 0.5**4, 1.0)
        closed = solve_ivp_closed(prob, p_half)
        picard = solve_ivp_picard(prob, 25, p_half)
        for t in (0.5**3, 0.25, 0.5, 1.0):
            assert rel_err(picard(t), closed(t)) < 1e-6

    def test_error_shrinks_with_iterations(self, p_half):
        prob = IVProblem(0.9, 0.3, 0.5**4, 1.0)
        closed = solve_ivp_closed(prob, p_half)
        ts = (0.5**3, 0.25, 0.5, 1.0)
        errors = []
        for m in (5, 15, 25):
            ym = solve_ivp_picard(prob, m, p_half)
            errors.append(max(abs(ym(t) - closed(t)) for t in ts))
        assert errors[1] <= errors[0] + 1e-9
        assert errors[2] <= errors[1] + 1e-9

    def test_negative_iteration_count_rejected(self, p_half):
        with pytest.raises(DomainError):
            solve_ivp_picard(IVProblem(0.9, 0.3, 0.0, 1.0), -1, p_half)

    def test_forced_problem_matches_closed_form(self, p_half):
        prob = IVProblem(0.9, 0.3, 0.0, 1.0, lambda s: s)
        closed = solve_ivp_closed(prob, p_half)
        picard = solve_ivp_picard(prob, 25, p_half)
        for t in (0.25, 0.5, 1.0):
            assert rel_err(closed(t), picard(t)) < 1e-6


class TestResidual:
    def test_zero_rate_constant_solution(self, p_half):
        prob = IVProblem(0.7, 0.0, 0.5**4, 2.0)
        y = solve_ivp_closed(prob, p_half)
        for t in (0.25, 1.0):
            assert abs(ivp_residual(prob, y, t, p_half)) < 1e-11

    def test_closed_form_satisfies_equation(self, p_half):
        prob = IVProblem(0.9, 0.3, 0.5**4, 1.0)
        y = solve_ivp_closed(prob, p_half)
        for t in (0.5**3, 0.25, 0.5, 1.0):
            assert abs(ivp_residual(prob, y, t, p_half)) <= 1e-5

    def test_constant_is_not_a_solution(self, p_half):
        prob = IVProblem(0.9, 0.3, 0.5**4, 1.0)
        got = ivp_residual(prob, lambda t: 1.0, 0.25, p_half)
        assert got == pytest.approx(-0.3, rel=1e-12)

    def test_point_must_exceed_base(self, p_half):
        prob = IVProblem(0.9, 0.3, 0.25, 1.0)
        with pytest.raises(DomainError):
            ivp_residual(prob, lambda t: 1.0, 0.25, p_half)

    def test_forced_closed_form_satisfies_equation(self, p_half):
        prob = IVProblem(0.9, 0.3, 0.0, 1.0, lambda s: s)
        y = solve_ivp_closed(prob, p_half)
        for t in (0.25, 1.0):
            assert abs(ivp_residual(prob, y, t, p_half)) <= 1e-5


class TestFixedPoint:
    @pytest.mark.parametrize("alpha", [0.5, 0.9])
    @pytest.mark.parametrize("lam", [0.3, -0.3])
    def test_solution_solves_the_integral_equation(self, alpha, lam):
        q = 0.3
        p = QParams(q)
        a = q**4
        prob = IVProblem(alpha, lam, a, 1.0)
        y = solve_ivp_closed(prob, p)
        for t in (q**2, 1.0):
            rhs = 1.0 + lam * left_frac_integral(y, a, alpha, t, p)
            assert rel_err(y(t), rhs) < 1e-6

    def test_series_term_matches_iterated_power_rule(self, p_half):
        # Term k of the solution kernel equals k nested fractional integrals
        # of the constant 1, evaluated numerically.
        alpha, lam, a = 0.9, 0.3, 0.5**4
        rule = lambda x: 1.0
        for k in range(1, 5):
            prev = rule
            rule = (
                lambda x, prev=prev: lam
                * left_frac_integral(prev, a, alpha, x, p_half)
            )
            for t in (0.25, 1.0):
                term = (
                    lam**k
                    * q_factorial_power(t, a, alpha * k, p_half)
                    / q_gamma(alpha * k + 1.0, p_half)
                )
                assert rel_err(term, rule(t)) < 1e-9
