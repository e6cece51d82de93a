import math

import numpy as np
import pytest
from scipy.linalg import expm

from levyfv.errors import CflViolation, ConfigMismatch, NoConvergence
from levyfv.measures import (DyadicB, FractionalRadial, single_atom, truncate,
                             zero_measure)
from levyfv.problem import (PROBLEM_PRESETS, ProblemSpec, diffusion_identity,
                            diffusion_zero, exterior_constant, flux_burgers,
                            flux_linear, flux_zero, interval_domain,
                            make_problem)
from levyfv.scheme import (SchemeConfig, cfl_max_dt, l1_q_distance,
                           picard_solve, solve, stability_run, step,
                           vanishing_viscosity_run)
from levyfv.stencil import apply_stencil, build_stencil


def conf(dx, r=None, Z=0.25, **kw):
    return SchemeConfig(dx=dx, r=r if r is not None else dx, Z=Z, **kw)


# -- CFL ----------------------------------------------------------------------

def test_cfl_unconstrained_flagged_infinite():
    spec = make_problem("zero", "zero", "bump")
    st = build_stencil(zero_measure(), 0.01, 0.01, 0.1)
    assert cfl_max_dt(spec, st, 0.01, (0.0, 1.0)) == math.inf


def test_cfl_linear_transport_instance():
    spec = make_problem("linear", "zero", "bump")
    st = build_stencil(zero_measure(), 0.01, 0.01, 0.1)
    assert cfl_max_dt(spec, st, 0.01, (0.0, 1.0)) == pytest.approx(0.005)


def test_cfl_burgers_single_atom_instance():
    spec = make_problem("burgers", "identity", "bump")
    st = build_stencil(single_atom(z=0.3, w=0.5), 0.1, 0.1, 0.5)
    assert st.weight_sum == 1.0 and st.tau == 0
    assert cfl_max_dt(spec, st, 0.1, (0.0, 1.0)) == pytest.approx(1.0 / 21.0)


def test_monotone_update_brute_force():
    # at dt = dt_max the update must stay order preserving in every argument
    spec = make_problem("burgers", "identity", "bump")
    dx = 0.1
    st = build_stencil(single_atom(z=0.3, w=0.5), dx, dx, 0.5)
    from levyfv.problem import discretize
    disc = discretize(spec, dx, st.Z)
    dt = cfl_max_dt(spec, st, dx, disc.data_range)
    rng = np.random.default_rng(4)
    c = conf(dx, Z=0.5)
    for _ in range(40):
        u = rng.uniform(0.0, 1.0, size=disc.grid.n_full)
        base = step(u, disc, st, c, 0.0, dt)[disc.grid.interior]
        p = int(rng.integers(0, disc.grid.n_full))
        delta = float(rng.uniform(0.01, 0.2))
        u2 = u.copy()
        u2[p] += delta
        bumped = step(u2, disc, st, c, 0.0, dt)[disc.grid.interior]
        assert np.all(bumped >= base - 1e-12)


# -- step oracles --------------------------------------------------------------

def test_constant_state_is_exact_fixed_point():
    spec = ProblemSpec(domain=interval_domain(0.0, 1.0), flux=flux_burgers(),
                       diffusion=diffusion_identity(),
                       u0=lambda x: np.full_like(np.asarray(x, float), 0.7),
                       exterior=exterior_constant(0.7), T=0.1)
    st = build_stencil(single_atom(z=0.1, w=0.5), 1 / 32, 1 / 32, 0.25)
    traj = solve(spec, st, conf(1 / 32))
    assert np.all(traj.interior() == 0.7)


def test_upwind_transport_first_order_against_translate():
    errs = {}
    for dx in (1 / 64, 1 / 128):
        spec = ProblemSpec(domain=interval_domain(0.0, 1.0),
                           flux=flux_linear(1.0), diffusion=diffusion_zero(),
                           u0=lambda x: np.exp(-100 * (np.asarray(x) - 0.3) ** 2),
                           exterior=exterior_constant(0.0), T=0.25)
        st = build_stencil(zero_measure(), dx, dx, 4 * dx)
        traj = solve(spec, st, conf(dx, Z=4 * dx))
        x = traj.grid.x_interior()
        exact = np.exp(-100 * (x - 0.3 - 0.25) ** 2)
        errs[dx] = dx * np.abs(traj.interior()[-1] - exact).sum()
    assert errs[1 / 128] <= 0.7 * errs[1 / 64]  # ~halves for O(dx)


def test_zero_flux_matches_matrix_exponential_oracle():
    spec = ProblemSpec(domain=interval_domain(0.0, 1.0), flux=flux_zero(),
                       diffusion=diffusion_identity(),
                       u0=lambda x: np.exp(-50 * (np.asarray(x) - 0.5) ** 2),
                       exterior=exterior_constant(0.0), T=0.2)
    dx = 1 / 64
    st = build_stencil(single_atom(z=0.125, w=0.5), dx, dx, 0.25)
    c = conf(dx)
    traj = solve(spec, st, c)
    n, h = traj.grid.n, traj.grid.n_halo
    A = np.zeros((n, n))
    for i in range(n):
        e = np.zeros(traj.grid.n_full)
        e[h + i] = 1.0
        A[:, i] = apply_stencil(e, st, h)
    u0 = traj.states[0, traj.grid.interior]

    # single explicit step equals the Euler step of the linear system
    one = step(traj.states[0].copy(), traj.disc, st, c, 0.0,
               traj.stats["dt"])[traj.grid.interior]
    assert np.allclose(one, u0 + traj.stats["dt"] * (A @ u0), atol=1e-14)

    exact = expm(spec.T * A) @ u0
    err_coarse = dx * np.abs(traj.interior()[-1] - exact).sum()
    fine = solve(spec, st, c, dt_override=traj.stats["dt"] / 4)
    err_fine = dx * np.abs(fine.interior()[-1] - exact).sum()
    assert err_fine <= 0.35 * err_coarse  # O(dt) in time


def test_shock_speed_against_rankine_hugoniot():
    spec = PROBLEM_PRESETS["burgers_riemann"]()
    dx = 1 / 256
    st = build_stencil(zero_measure(), dx, dx, 4 * dx)
    traj = solve(spec, st, conf(dx, Z=4 * dx))
    x = traj.grid.x_interior()
    pos = x[np.argmin(np.abs(traj.interior()[-1] - 0.5))]
    assert abs(pos - 0.75) <= 3 * dx  # speed (1+0)/2 from the jump levels


def test_stefan_above_range_matches_zero_diffusion_bitwise():
    base = make_problem("burgers", "zero", "riemann")
    stefan = make_problem("burgers", "stefan", "riemann", ell=1.5)
    dx = 1 / 64
    st = build_stencil(single_atom(z=0.125, w=0.5), dx, dx, 0.25)
    a = solve(base, st, conf(dx))
    b = solve(stefan, st, conf(dx))
    assert np.array_equal(a.states, b.states)


def test_dyadic_b_constant_data_stays_constant():
    spec = ProblemSpec(domain=interval_domain(0.0, 1.0), flux=flux_zero(),
                       diffusion=diffusion_identity(),
                       u0=lambda x: np.full_like(np.asarray(x, float), 0.4),
                       exterior=exterior_constant(0.4), T=0.1)
    dx = 1 / 32
    st = build_stencil(DyadicB(), dx, dx, 0.5)
    traj = solve(spec, st, conf(dx, Z=0.5))
    assert np.all(traj.interior() == 0.4)


def test_lax_friedrichs_cross_check():
    # the alternative monotone flux obeys the same bounds and lands near the
    # default flux solution
    spec = make_problem("burgers", "identity", "riemann", T=0.25)
    dx = 1 / 128
    st = build_stencil(single_atom(z=0.125, w=0.5), dx, dx, 0.25)
    eo = solve(spec, st, conf(dx))
    lf = solve(spec, st, conf(dx, numerical_flux="lax_friedrichs"),
               dt_override=float(eo.times[1] - eo.times[0]))
    from levyfv import analysis
    assert analysis.max_principle_check(lf).passed
    assert l1_q_distance(eo, lf) <= 20 * dx  # both first order, same limit


def test_cfl_violation_raised_when_enforced():
    spec = make_problem("linear", "zero", "riemann")
    dx = 1 / 32
    st = build_stencil(zero_measure(), dx, dx, 4 * dx)
    with pytest.raises(CflViolation):
        solve(spec, st, SchemeConfig(dx=dx, r=dx, Z=4 * dx, dt=2 * dx))


def test_nonfinite_values_detected():
    # quadratic flux with a wildly unstable step overflows within a few
    # iterations; the stepper must flag it rather than march on
    from levyfv.errors import NonfiniteValue
    spec = make_problem("burgers", "zero", "bump", T=20.0)
    dx = 1 / 32
    st = build_stencil(zero_measure(), dx, dx, 4 * dx)
    with np.errstate(over="ignore", invalid="ignore"):
        with pytest.raises(NonfiniteValue):
            solve(spec, st, SchemeConfig(dx=dx, r=dx, Z=4 * dx, dt=1.0,
                                         enforce_cfl=False))


# -- fixed-point construction ---------------------------------------------------

def test_picard_zero_diffusion_converges_immediately():
    spec = make_problem("burgers", "zero", "bump", T=0.5)
    res = picard_solve(spec, single_atom(z=0.3, w=0.5),
                       conf(1 / 32, Z=0.5), k_max=5, tol=1e-12)
    assert res.gaps[0] == 0.0
    assert res.iterations == 2


def test_picard_gap_envelope_unit_mass():
    spec = make_problem("burgers", "identity", "bump", T=0.5)
    res = picard_solve(spec, single_atom(z=0.3, w=0.5),
                       conf(1 / 64, Z=0.5), k_max=9, tol=0.0)
    rate = 2.0 * 1.0 * 1.0 * spec.T  # 2 L_b ||mu|| T
    for k, gap in enumerate(res.gaps, start=1):
        bound = res.first_iterate_norm * rate ** k / math.factorial(k)
        assert gap <= 1.1 * bound + 1e-14


def test_picard_limit_matches_direct_solve():
    spec = make_problem("burgers", "identity", "bump", T=0.5)
    c = conf(1 / 64, Z=0.5)
    tol = 1e-6
    res = picard_solve(spec, single_atom(z=0.3, w=0.5), c, k_max=30, tol=tol)
    st = build_stencil(single_atom(z=0.3, w=0.5), c.dx, c.r, c.Z)
    direct = solve(spec, st, c,
                   dt_override=float(res.trajectory.times[1]
                                     - res.trajectory.times[0]))
    assert l1_q_distance(res.trajectory, direct) <= 10 * tol


def test_picard_requires_finite_mass():
    spec = make_problem("burgers", "identity", "bump")
    with pytest.raises(ValueError):
        picard_solve(spec, FractionalRadial(alpha=1.0), conf(1 / 32))


def test_picard_no_convergence_reported():
    spec = make_problem("burgers", "identity", "bump", T=0.5)
    with pytest.raises(NoConvergence):
        picard_solve(spec, single_atom(z=0.3, w=0.5), conf(1 / 32, Z=0.5),
                     k_max=2, tol=1e-14)


# -- chain drivers ---------------------------------------------------------------

def test_vanishing_viscosity_trend():
    rare = make_problem("burgers", "identity", "riemann_up", T=0.2)
    rep = vanishing_viscosity_run(rare, 1.0, [1, 4, 16],
                                  conf(1 / 64, Z=0.5))
    assert all(np.diff(rep.l1_distances) < 0.0)


def test_vanishing_viscosity_zero_diffusion_gives_zero_distances():
    # diffusion degenerate over the whole data range: every member equals the
    # conservation-law run
    spec = make_problem("burgers", "stefan", "riemann_up", ell=1.5, T=0.2)
    rep = vanishing_viscosity_run(spec, 1.0, [1, 4], conf(1 / 64, Z=0.5))
    assert all(d == 0.0 for d in rep.l1_distances)


def test_vanishing_viscosity_distance_stabilizes_under_refinement():
    spec = make_problem("burgers", "identity", "riemann_up", T=0.2)
    vals = []
    for dx in (1 / 64, 1 / 128):
        rep = vanishing_viscosity_run(spec, 1.0, [4], conf(dx, Z=0.5))
        vals.append(rep.l1_distances[0])
    assert abs(vals[1] - vals[0]) <= 0.05 * max(vals)


def test_stability_chain_trends():
    base = FractionalRadial(alpha=1.0)
    measures = [truncate(base, 1.0 / n)[1] for n in (4, 8, 16, 32)]
    spec = make_problem("burgers", "identity", "bump", T=0.2)
    rep = stability_run(spec, measures, conf(1 / 64, Z=1.0), labels=[4, 8, 16])
    assert all(np.diff(rep.measure_distances) < 0.0)
    assert all(np.diff(rep.l2_b_distances) < 0.0)
    assert all(np.diff(rep.l1_distances) < 0.0)


def test_stability_nondegenerate_perturbation_chain():
    # mu_eps = mu + eps * (fractional order 1), eps in {1, 1/4, 1/16}, against
    # the eps = 0 run: distances decrease with eps
    from levyfv.measures import ScaledMeasure, SumMeasure
    atom = single_atom(z=0.125, w=0.5)
    frac = FractionalRadial(alpha=1.0)
    chain = [SumMeasure(parts=(atom, ScaledMeasure(factor=e, inner=frac)))
             for e in (1.0, 0.25, 0.0625)] + [atom]
    spec = make_problem("burgers", "identity", "bump", T=0.2)
    rep = stability_run(spec, chain, conf(1 / 64, Z=0.5),
                        labels=[1.0, 0.25, 0.0625])
    assert all(np.diff(rep.l1_distances) < 0.0)
    assert all(np.diff(rep.l2_b_distances) < 0.0)
    assert all(np.diff(rep.measure_distances) < 0.0)


def test_drop_tail_mode_records_apriori_bound():
    spec = make_problem("burgers", "identity", "riemann")
    dx = 1 / 32
    st = build_stencil(single_atom(z=2.0, w=0.25), dx, dx, 0.25)
    assert st.tau == 0.5  # all mass beyond Z
    c = SchemeConfig(dx=dx, r=dx, Z=0.25, tail_mode="drop")
    traj = solve(spec, st, c)
    # b = identity on range [0, 1]: bound is 2 * sup|b| * tau = 1 * tau * 2
    assert traj.stats["drop_tail_bound"] == pytest.approx(2 * 1.0 * 0.5)
    from levyfv import analysis
    assert analysis.max_principle_check(traj).passed


def test_stability_identical_measures_zero_distances():
    m = single_atom(z=0.125, w=0.5)
    spec = make_problem("burgers", "identity", "bump", T=0.2)
    rep = stability_run(spec, [m, m, m], conf(1 / 64), labels=[0, 1])
    assert all(d == 0.0 for d in rep.l1_distances)
    assert all(d == 0.0 for d in rep.l2_b_distances)
    assert all(d == 0.0 for d in rep.measure_distances)


def test_trajectories_on_different_grids_not_comparable():
    spec = make_problem("burgers", "zero", "riemann")
    a = solve(spec, build_stencil(zero_measure(), 1 / 32, 1 / 32, 0.125),
              conf(1 / 32, Z=0.125))
    b = solve(spec, build_stencil(zero_measure(), 1 / 64, 1 / 64, 0.125),
              conf(1 / 64, Z=0.125))
    with pytest.raises(ConfigMismatch):
        l1_q_distance(a, b)
