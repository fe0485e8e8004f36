"""Tests for the element integrators, baselines, and the integrate driver."""

import numpy as np
import numpy.testing as npt
import pytest

from geodesy import (
    ElementGrid,
    ElementSolution,
    IntegrationError,
    Method,
    NewtonConfig,
    OdeSystem,
    default_qrhs,
    explicit_euler_step,
    get_problem,
    integrate,
    make_circle,
    mci_residual,
    mci_step,
    mgi_residual,
    mgi_step,
    rk4_step,
    sample_trajectory,
    symplectic_euler_step,
)

TIGHT = NewtonConfig(abs_tol=1e-13)


def midpoint_circle_step(y, dt):
    # Closed-form implicit midpoint map for y' = (y2, -y1):
    #   p+ = (p (4 - dt^2) + 4 dt q) / (4 + dt^2)
    #   q+ = (q (4 - dt^2) - 4 dt p) / (4 + dt^2)
    p, q = y
    den = 4.0 + dt * dt
    return np.array(
        [
            (p * (4.0 - dt * dt) + 4.0 * dt * q) / den,
            (q * (4.0 - dt * dt) - 4.0 * dt * p) / den,
        ]
    )


def make_quartic_oscillator():
    # H = (p^4 + q^4) / 4 with state (p, q); field is the canonical flow.
    return OdeSystem(
        dim=2,
        field=lambda y: np.array([-y[1] ** 3, y[0] ** 3]),
        jacobian=lambda y: np.array(
            [[0.0, -3.0 * y[1] ** 2], [3.0 * y[0] ** 2, 0.0]]
        ),
        invariants=(("H", lambda y: 0.25 * (y[0] ** 4 + y[1] ** 4)),),
    )


def quartic_energy(y):
    return 0.25 * (y[0] ** 4 + y[1] ** 4)


class TestMciStep:
    def test_p1_equals_implicit_midpoint(self):
        circle = make_circle()
        for dt in (0.1, 0.5, 1.0):
            y = np.array([2.0, 0.0])
            t = 0.0
            for _ in range(10):
                got = mci_step(circle.system, y, t, dt, 1, config=TIGHT).endpoint()
                want = midpoint_circle_step(y, dt)
                npt.assert_allclose(got, want, rtol=0.0, atol=1e-13)
                y = got
                t += dt

    def test_circle_radius_preserved_single_step(self):
        circle = make_circle()
        sol = mci_step(circle.system, circle.y0, 0.0, 1.0, 2, config=TIGHT)
        y1 = sol.endpoint()
        assert abs(y1 @ y1 - circle.y0 @ circle.y0) <= 1e-12

    def test_linear_field_converges_in_one_iteration(self):
        circle = make_circle()
        sol = mci_step(circle.system, circle.y0, 0.0, 0.5, 3)
        assert sol.newton_iterations == 1

    def test_solution_stores_initial_condition_exactly(self):
        pend = get_problem("pendulum")
        sol = mci_step(pend.system, pend.y0, 0.0, 0.4, 3)
        # column 0 is the initial condition, bitwise
        assert np.array_equal(sol.coefficients[:, 0], pend.y0)
        npt.assert_array_equal(sol.evaluate(-1.0), pend.y0)
        npt.assert_array_equal(sol.endpoint(), sol.coefficients[:, -1])

    def test_constant_field_yields_linear_solution(self):
        const = OdeSystem(dim=2, field=lambda y: np.array([1.5, -0.5]))
        y0 = np.array([1.0, 2.0])
        sol = mci_step(const, y0, 0.0, 0.8, 3)
        res = mci_residual(const, sol)
        assert np.max(np.abs(res)) <= 1e-13
        # y(t) = y0 + c t at every node of the element
        nodes_t = sol.grid.to_time(sol.grid.primal.nodes)
        want = y0[:, None] + np.array([1.5, -0.5])[:, None] * nodes_t[None, :]
        npt.assert_allclose(sol.coefficients, want, rtol=0.0, atol=1e-13)

    def test_negative_dt_reverses_the_step(self):
        pend = get_problem("pendulum")
        fwd = mci_step(pend.system, pend.y0, 0.0, 0.4, 2, config=TIGHT).endpoint()
        back = mci_step(pend.system, fwd, 0.4, -0.4, 2, config=TIGHT).endpoint()
        npt.assert_allclose(back, pend.y0, rtol=0.0, atol=1e-11)

    def test_preserves_random_quadratic_invariants(self):
        # I(y) = y^T C y is conserved whenever y^T C h(y) = 0 everywhere.
        # Such pairs come from any SPD C and skew S via h(y) = inv(C) S y.
        rng = np.random.default_rng(1234)
        for p in (1, 2, 3, 4):
            B = rng.standard_normal((4, 4))
            C = B.T @ B + 4.0 * np.eye(4)
            W = rng.standard_normal((4, 4))
            A = np.linalg.solve(C, W - W.T)
            sys = OdeSystem(
                dim=4,
                field=lambda y, A=A: A @ y,
                jacobian=lambda y, A=A: A,
            )
            y = rng.standard_normal(4)
            i0 = y @ C @ y
            for k in range(50):
                y = mci_step(sys, y, 0.3 * k, 0.3, p, config=TIGHT).endpoint()
                assert abs(y @ C @ y - i0) <= 1e-11 * abs(i0)


class TestResiduals:
    def test_mci_residual_vanishes_at_converged_solution(self):
        pend = get_problem("pendulum")
        sol = mci_step(pend.system, pend.y0, 0.0, 0.4, 3, config=TIGHT)
        res = mci_residual(pend.system, sol)
        assert np.max(np.abs(res)) <= 1e-12

    def test_mci_residual_detects_perturbation(self):
        pend = get_problem("pendulum")
        sol = mci_step(pend.system, pend.y0, 0.0, 0.4, 3, config=TIGHT)
        coeffs = sol.coefficients.copy()
        coeffs[0, 2] += 1e-3
        res = mci_residual(pend.system, ElementSolution(sol.grid, coeffs))
        assert np.max(np.abs(res)) > 1e-6

    def test_mgi_residual_vanishes_at_converged_solution(self):
        pend = get_problem("pendulum")
        sol = mgi_step(pend.system, pend.y0, 0.0, 0.4, 3, config=TIGHT)
        res = mgi_residual(pend.system, sol, default_qrhs(3))
        assert np.max(np.abs(res)) <= 1e-12

    def test_mgi_residual_rejects_bad_quadrature_size(self):
        pend = get_problem("pendulum")
        sol = mgi_step(pend.system, pend.y0, 0.0, 0.4, 2)
        with pytest.raises(ValueError):
            mgi_residual(pend.system, sol, 0)

    def test_residual_rows_are_variable_major(self):
        # With a constant field (0, 1000) and the constant-in-time candidate,
        # the rate term vanishes, so the residual is -field per stage:
        # rows 0..p-1 belong to variable one, rows p.. to variable two.
        sys = OdeSystem(dim=2, field=lambda y: np.array([0.0, 1000.0]))
        p = 3
        grid = ElementGrid.build(p, 0.0, 0.5)
        coeffs = np.tile(np.array([[1.0], [2.0]]), (1, p + 1))
        res = mci_residual(sys, ElementSolution(grid, coeffs))
        npt.assert_array_equal(res[:p], 0.0)
        npt.assert_array_equal(res[p:], -1000.0)


class TestMgiStep:
    def test_p1_matches_average_vector_field_map(self):
        # For p = 1 the method reduces to y1 = y0 + dt * avg field along the
        # chord, so a fixed-point solve of that map is an independent oracle.
        pend = get_problem("pendulum")
        dt = 0.2
        xg, wg = np.polynomial.legendre.leggauss(30)
        s01 = 0.5 * (xg + 1.0)
        w01 = 0.5 * wg

        y1 = pend.y0.copy()
        for _ in range(300):
            acc = np.zeros(2)
            for s, w in zip(s01, w01):
                acc += w * pend.system.field((1.0 - s) * pend.y0 + s * y1)
            y_next = pend.y0 + dt * acc
            if np.max(np.abs(y_next - y1)) < 1e-15:
                y1 = y_next
                break
            y1 = y_next

        got = mgi_step(
            pend.system, pend.y0, 0.0, dt, 1, q_rhs=30, config=NewtonConfig(abs_tol=1e-14)
        ).endpoint()
        npt.assert_allclose(got, y1, rtol=0.0, atol=1e-11)

    def test_energy_exact_for_polynomial_hamiltonian(self):
        sys = make_quartic_oscillator()
        y = np.array([1.0, 0.5])
        h0 = quartic_energy(y)
        for k in range(10):
            y = mgi_step(sys, y, 0.2 * k, 0.2, 2, config=TIGHT).endpoint()
            assert abs(quartic_energy(y) - h0) <= 1e-12

    def test_underresolved_quadrature_loses_exactness(self):
        # q_rhs = 2 cannot integrate the degree-7 pairing, so the energy
        # error reappears at the truncation level.
        sys = make_quartic_oscillator()
        y = np.array([1.0, 0.5])
        h0 = quartic_energy(y)
        drift = 0.0
        for k in range(10):
            y = mgi_step(sys, y, 0.2 * k, 0.2, 2, q_rhs=2, config=TIGHT).endpoint()
            drift = max(drift, abs(quartic_energy(y) - h0))
        assert drift > 1e-7

    def test_quadrature_at_dual_nodes_collapses_to_collocation(self):
        # With q_rhs = p the pairing is sampled exactly at the dual nodes,
        # so the two methods solve the same equations.
        pend = get_problem("pendulum")
        for p in (1, 2, 3):
            a = mci_step(pend.system, pend.y0, 0.0, 0.4, p, config=TIGHT).endpoint()
            b = mgi_step(
                pend.system, pend.y0, 0.0, 0.4, p, q_rhs=p, config=TIGHT
            ).endpoint()
            npt.assert_allclose(a, b, rtol=0.0, atol=1e-11)

    def test_differs_from_collocation_on_nonlinear_problems(self):
        pend = get_problem("pendulum")
        a = mci_step(pend.system, pend.y0, 0.0, 0.4, 2, config=TIGHT).endpoint()
        b = mgi_step(pend.system, pend.y0, 0.0, 0.4, 2, config=TIGHT).endpoint()
        assert np.max(np.abs(a - b)) > 1e-6

    def test_negative_dt_reverses_the_step(self):
        pend = get_problem("pendulum")
        fwd = mgi_step(pend.system, pend.y0, 0.0, 0.4, 2, config=TIGHT).endpoint()
        back = mgi_step(pend.system, fwd, 0.4, -0.4, 2, config=TIGHT).endpoint()
        npt.assert_allclose(back, pend.y0, rtol=0.0, atol=1e-11)

    def test_default_quadrature_size(self):
        assert default_qrhs(1) == 12
        assert default_qrhs(4) == 18


class TestBaselines:
    def test_explicit_euler_frozen_step(self):
        harm = get_problem("harmonic")
        got = explicit_euler_step(harm.system, np.array([1.0, 0.0]), 0.0, 0.1)
        npt.assert_array_equal(got, np.array([1.0, -0.1]))

    def test_symplectic_euler_frozen_step(self):
        # momentum update first: p1 = p0 + dt g(q0), then q1 = q0 + dt f(p1)
        harm = get_problem("harmonic")
        got = symplectic_euler_step(harm.system, np.array([1.0, 0.0]), 0.0, 1.0)
        npt.assert_array_equal(got, np.array([0.0, -1.0]))

    def test_symplectic_euler_requires_partition(self):
        lv = get_problem("lotka-volterra")
        with pytest.raises(ValueError):
            symplectic_euler_step(lv.system, lv.y0, 0.0, 0.1)

    def test_symplectic_euler_preserves_angular_momentum(self):
        kep = get_problem("kepler")
        traj = integrate(kep.system, Method.SYMPLECTIC_EULER, kep.y0, 0.0, 10.0, 0.1)
        L = traj.invariants["L"]
        assert np.max(np.abs(L - L[0])) <= 1e-12

    def test_rk4_matches_truncated_exponential_on_rotation(self):
        circle = make_circle()
        dt = 0.3
        A = np.array([[0.0, 1.0], [-1.0, 0.0]])
        R = np.eye(2)
        term = np.eye(2)
        for k in range(1, 5):
            term = term @ A * (dt / k)
            R = R + term
        got = rk4_step(circle.system, circle.y0, 0.0, dt)
        npt.assert_allclose(got, R @ circle.y0, rtol=0.0, atol=1e-14)

    def test_rk4_matches_exponential_growth(self):
        import math

        sys = OdeSystem(dim=1, field=lambda y: y.copy())
        got = rk4_step(sys, np.array([1.0]), 0.0, 0.1)
        taylor = sum(0.1**k / math.factorial(k) for k in range(5))
        assert abs(got[0] - taylor) <= 1e-15
        assert abs(got[0] - math.exp(0.1)) <= 1e-7

    def test_baseline_steps_do_not_mutate_input(self):
        harm = get_problem("harmonic")
        y0 = np.array([1.0, 0.0])
        explicit_euler_step(harm.system, y0, 0.0, 0.1)
        symplectic_euler_step(harm.system, y0, 0.0, 0.1)
        rk4_step(harm.system, y0, 0.0, 0.1)
        npt.assert_array_equal(y0, np.array([1.0, 0.0]))


class TestIntegrateDriver:
    def test_time_grid_lands_on_final_time(self):
        circle = make_circle()
        traj = integrate(circle.system, Method.EXPLICIT_EULER, circle.y0, 0.0, 1.0, 0.3)
        npt.assert_allclose(
            traj.times, [0.0, 0.3, 0.6, 0.9, 1.0], rtol=0.0, atol=1e-15
        )
        assert traj.times[-1] == 1.0

    def test_time_grid_exact_division(self):
        circle = make_circle()
        traj = integrate(circle.system, Method.EXPLICIT_EULER, circle.y0, 0.0, 1.0, 0.25)
        assert traj.steps == 4
        assert traj.times[-1] == 1.0

    def test_time_grid_tolerates_rounded_ratio(self):
        circle = make_circle()
        traj = integrate(
            circle.system, Method.EXPLICIT_EULER, circle.y0, 0.0, 1.0, 1.0 / 3.0
        )
        assert traj.steps == 3

    def test_invariant_series_shape(self):
        circle = make_circle()
        traj = integrate(circle.system, Method.MCI, circle.y0, 0.0, 2.0, 0.5, p=2)
        assert list(traj.invariants) == ["H", "R"]
        for series in traj.invariants.values():
            assert series.shape == (traj.steps + 1,)

    def test_trajectory_metadata(self):
        circle = make_circle()
        tr_e = integrate(circle.system, Method.EXPLICIT_EULER, circle.y0, 0.0, 1.0, 0.5)
        assert tr_e.order is None
        assert tr_e.elements is None
        assert tr_e.newton_iterations is None
        tr_m = integrate(circle.system, Method.MCI, circle.y0, 0.0, 1.0, 0.5, p=3)
        assert tr_m.order == 3
        assert len(tr_m.elements) == tr_m.steps
        assert len(tr_m.newton_iterations) == tr_m.steps
        assert tr_m.dim == 2

    def test_rejects_bad_arguments(self):
        circle = make_circle()
        with pytest.raises(ValueError):
            integrate(circle.system, Method.MCI, circle.y0, 0.0, -1.0, 0.1)
        with pytest.raises(ValueError):
            integrate(circle.system, Method.MCI, circle.y0, 0.0, 1.0, 0.0)
        with pytest.raises(ValueError):
            integrate(circle.system, Method.MCI, np.array([1.0, 2.0, 3.0]), 0.0, 1.0, 0.1)

    def test_domain_violation_is_annotated(self):
        lv = get_problem("lotka-volterra")
        with pytest.raises(IntegrationError) as info:
            integrate(
                lv.system, Method.EXPLICIT_EULER, np.array([5.0, 0.5]), 0.0, 3.0, 0.3
            )
        assert info.value.step == 0
        assert info.value.time == 0.0

    def test_warm_start_matches_cold_start(self):
        pend = get_problem("pendulum")
        cold = integrate(
            pend.system, Method.MCI, pend.y0, 0.0, 4.0, 0.4, p=3, newton=TIGHT
        )
        warm = integrate(
            pend.system,
            Method.MCI,
            pend.y0,
            0.0,
            4.0,
            0.4,
            p=3,
            newton=TIGHT,
            warm_start=True,
        )
        npt.assert_allclose(
            warm.states[:, -1], cold.states[:, -1], rtol=0.0, atol=1e-11
        )
        assert sum(warm.newton_iterations) <= sum(cold.newton_iterations)


class TestSampling:
    def test_samples_match_step_states_at_grid_times(self):
        pend = get_problem("pendulum")
        traj = integrate(pend.system, Method.MCI, pend.y0, 0.0, 2.0, 0.4, p=2)
        ys = sample_trajectory(traj, traj.times)
        npt.assert_allclose(ys, traj.states, rtol=0.0, atol=1e-12)

    def test_interior_error_scales_with_step_size(self):
        # Between grid points the order-p reconstruction is accurate to
        # O(dt^(p+1)); the measured envelope for p = 3 sits near 1e-3 * dt^4.
        circle = make_circle()
        ts = np.linspace(0.03, 1.97, 17)
        exact = np.stack([circle.system.exact_solution(t, circle.y0) for t in ts], axis=1)
        for dt in (0.5, 0.25):
            traj = integrate(
                circle.system, Method.MCI, circle.y0, 0.0, 2.0, dt, p=3, newton=TIGHT
            )
            ys = sample_trajectory(traj, ts)
            assert np.max(np.abs(ys - exact)) <= 0.01 * dt**4

    def test_rejects_times_outside_span(self):
        circle = make_circle()
        traj = integrate(circle.system, Method.MCI, circle.y0, 0.0, 1.0, 0.5, p=2)
        with pytest.raises(ValueError):
            sample_trajectory(traj, np.array([-0.5]))
        with pytest.raises(ValueError):
            sample_trajectory(traj, np.array([1.5]))

    def test_rejects_trajectories_without_elements(self):
        circle = make_circle()
        traj = integrate(circle.system, Method.EXPLICIT_EULER, circle.y0, 0.0, 1.0, 0.5)
        with pytest.raises(ValueError):
            sample_trajectory(traj, np.array([0.25]))

    def test_element_solution_evaluate_time_on_reversed_step(self):
        pend = get_problem("pendulum")
        sol = mci_step(pend.system, pend.y0, 0.0, -0.4, 2, config=TIGHT)
        npt.assert_allclose(sol.evaluate_time(0.0), pend.y0, rtol=0.0, atol=1e-14)
        npt.assert_array_equal(sol.evaluate_time(-0.4), sol.endpoint())
