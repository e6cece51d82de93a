import math

import numpy as np
import pytest

from levyfv import analysis
from levyfv.errors import ConfigMismatch, MissingExtensionDerivatives
from levyfv.measures import (FractionalRadial, single_atom, truncate,
                             zero_measure)
from levyfv.problem import (ExteriorData, ProblemSpec, diffusion_identity,
                            diffusion_power, diffusion_stefan,
                            exterior_constant, flux_burgers, interval_domain,
                            make_problem)
from levyfv.scheme import SchemeConfig, solve
from levyfv.stencil import build_stencil


def run(spec, measure, dx, Z=0.25, r=None, dt=None, enforce=True):
    c = SchemeConfig(dx=dx, r=r if r is not None else dx, Z=Z, dt=dt,
                     enforce_cfl=enforce)
    st = build_stencil(measure, dx, c.r, c.Z)
    return solve(spec, st, c)


# -- maximum principle -----------------------------------------------------------

def test_max_principle_constant_data():
    spec = ProblemSpec(domain=interval_domain(0.0, 1.0), flux=flux_burgers(),
                       diffusion=diffusion_identity(),
                       u0=lambda x: np.full_like(np.asarray(x, float), 0.5),
                       exterior=exterior_constant(0.5), T=0.1)
    res = analysis.max_principle_check(run(spec, single_atom(z=0.1, w=0.5),
                                           1 / 32))
    assert res.passed and res.worst_slack == 0.0


def test_max_principle_riemann_under_cfl():
    spec = make_problem("burgers", "stefan", "riemann", ell=0.4)
    res = analysis.max_principle_check(run(spec, single_atom(z=0.1, w=0.5),
                                           1 / 128))
    assert res.passed and res.worst_slack >= 0.0


def test_max_principle_flags_violated_cfl():
    # negative control: doubling the stable step must be caught by the check
    spec = make_problem("linear", "zero", "riemann", T=0.2)
    dx = 1 / 64
    res = analysis.max_principle_check(
        run(spec, zero_measure(), dx, Z=4 * dx, dt=2 * dx, enforce=False))
    assert not res.passed
    assert res.worst_slack < 0.0  # slack recorded, not clamped


# -- L1 contraction ---------------------------------------------------------------

def test_contraction_identical_data_zero_series():
    spec = make_problem("burgers", "identity", "riemann")
    a = run(spec, single_atom(z=0.1, w=0.5), 1 / 64)
    b = run(spec, single_atom(z=0.1, w=0.5), 1 / 64)
    series, verdict = analysis.l1_contraction_check(a, b)
    assert verdict.passed
    assert np.all(series == 0.0)


def test_contraction_perturbed_bump():
    spec = make_problem("burgers", "stefan", "riemann", ell=0.4)
    from dataclasses import replace
    pert = replace(spec, u0=lambda x: np.clip(
        spec.u0(x) + 0.1 * np.exp(-80 * (np.asarray(x) - 0.3) ** 2), 0.0, 1.0))
    a = run(spec, single_atom(z=0.1, w=0.5), 1 / 64)
    b = run(pert, single_atom(z=0.1, w=0.5), 1 / 64,
            dt=float(a.times[1] - a.times[0]))
    series, verdict = analysis.l1_contraction_check(a, b)
    assert verdict.passed
    assert series[-1] <= series[0]


def test_contraction_refuses_different_exterior():
    spec = make_problem("burgers", "zero", "riemann")
    other = make_problem("burgers", "zero", "riemann_up")
    a = run(spec, zero_measure(), 1 / 64)
    b = run(other, zero_measure(), 1 / 64, dt=float(a.times[1] - a.times[0]))
    with pytest.raises(ConfigMismatch):
        analysis.l1_contraction_check(a, b)


def test_order_preservation():
    spec = make_problem("burgers", "identity", "riemann")
    from dataclasses import replace
    above = replace(spec, u0=lambda x: np.minimum(spec.u0(x) + 0.2, 1.0))
    a = run(spec, single_atom(z=0.1, w=0.5), 1 / 64)
    b = run(above, single_atom(z=0.1, w=0.5), 1 / 64,
            dt=float(a.times[1] - a.times[0]))
    assert analysis.order_preservation_check(a, b).passed


def test_order_preservation_with_ordered_exterior():
    # both the initial datum and the exterior datum shifted upward
    spec = make_problem("burgers", "identity", "riemann")
    from dataclasses import replace
    ext = spec.exterior
    lifted = replace(spec,
                     u0=lambda x: spec.u0(x) + 0.2,
                     exterior=ExteriorData(
                         value=lambda t, x: np.asarray(ext.value(t, x)) + 0.2,
                         dt=ext.dt, grad=ext.grad))
    # the lifted range [0.2, 1.2] has the tighter flux bound; share its dt
    b = run(lifted, single_atom(z=0.1, w=0.5), 1 / 64)
    a = run(spec, single_atom(z=0.1, w=0.5), 1 / 64,
            dt=float(b.times[1] - b.times[0]))
    assert analysis.order_preservation_check(a, b).passed


def test_mass_budget_identity():
    spec = make_problem("burgers", "identity", "riemann")
    res = analysis.mass_budget_check(run(spec, single_atom(z=0.1, w=0.5),
                                         1 / 64))
    assert res.passed


# -- energy -----------------------------------------------------------------------

def test_energy_trivial_constant_exterior_matching_datum():
    spec = ProblemSpec(domain=interval_domain(0.0, 1.0), flux=flux_burgers(),
                       diffusion=diffusion_identity(),
                       u0=lambda x: np.full_like(np.asarray(x, float), 0.3),
                       exterior=exterior_constant(0.3), T=0.1)
    rep = analysis.energy_report(run(spec, single_atom(z=0.1, w=0.5), 1 / 32))
    assert rep["lhs"] == 0.0
    assert rep["rhs"] == pytest.approx(0.0, abs=1e-14)


def test_energy_zero_diffusion_all_terms_vanish():
    spec = make_problem("burgers", "zero", "bump")
    rep = analysis.energy_report(run(spec, single_atom(z=0.1, w=0.5), 1 / 32))
    assert rep["lhs"] == 0.0
    assert rep["rhs"] == 0.0


def test_energy_requires_extension_derivatives():
    spec = make_problem("burgers", "identity", "bump")
    from dataclasses import replace
    bare = replace(spec, exterior=ExteriorData(
        value=spec.exterior.value, dt=None, grad=None))
    traj = run(bare, single_atom(z=0.1, w=0.5), 1 / 32)
    with pytest.raises(MissingExtensionDerivatives):
        analysis.energy_report(traj)


def test_energy_inequality_with_nonzero_exterior():
    # riemann data: the transport and operator terms of the bound are active
    measure = truncate(FractionalRadial(alpha=1.0), 1 / 16)[1]
    for diff, kw in (("identity", {}), ("stefan", {"ell": 0.3})):
        spec = make_problem("burgers", diff, "riemann", T=0.25, **kw)
        slack = {}
        for dx in (1 / 32, 1 / 64):
            slack[dx] = analysis.energy_report(
                run(spec, measure, dx, Z=1.0, r=1 / 16))["slack"]
        eps = analysis.two_grid_tolerance(slack[1 / 32], slack[1 / 64])
        assert slack[1 / 64] >= -eps


def test_energy_slack_nonnegative_and_shrinking():
    measure = truncate(FractionalRadial(alpha=1.0), 1 / 16)[1]
    spec = make_problem("burgers", "identity", "bump", T=0.25)
    slack = {}
    for dx in (1 / 32, 1 / 64):
        slack[dx] = analysis.energy_report(
            run(spec, measure, dx, Z=1.0, r=1 / 16))["slack"]
    eps = analysis.two_grid_tolerance(slack[1 / 32], slack[1 / 64])
    assert slack[1 / 64] >= -eps


# -- entropy residuals ---------------------------------------------------------

def test_residual_constant_solution_is_zero():
    spec = ProblemSpec(domain=interval_domain(0.0, 1.0), flux=flux_burgers(),
                       diffusion=diffusion_identity(),
                       u0=lambda x: np.full_like(np.asarray(x, float), 0.5),
                       exterior=exterior_constant(0.5), T=0.1)
    traj = run(spec, single_atom(z=0.1, w=0.5), 1 / 32)
    fam = analysis.default_test_family(0.0, 1.0, spec.T)
    rep = analysis.entropy_residual(traj, single_atom(z=0.1, w=0.5), fam,
                                    [0.5], 1 / 16)
    assert rep.worst <= 1e-12


def test_residual_burgers_shock_kruzkov():
    spec = make_problem("burgers", "zero", "riemann", T=0.25)
    worst = {}
    for dx in (1 / 64, 1 / 128):
        traj = run(spec, zero_measure(), dx, Z=0.25)
        fam = analysis.default_test_family(0.0, 1.0, spec.T)
        levels = analysis.quantile_levels(*traj.disc.data_range)
        rep = analysis.entropy_residual(traj, zero_measure(), fam, levels,
                                        4 * dx)
        worst[dx] = rep.worst
    eps = analysis.two_grid_tolerance(worst[1 / 64], worst[1 / 128])
    assert worst[1 / 128] <= eps


def test_residual_levels_outside_range_pass_structurally():
    spec = make_problem("burgers", "stefan", "bump", ell=0.3, T=0.2)
    traj = run(spec, single_atom(z=0.125, w=0.5), 1 / 64)
    fam = analysis.default_test_family(0.0, 1.0, spec.T)
    hi = analysis.entropy_residual(traj, single_atom(z=0.125, w=0.5), fam,
                                   [1.7], 1 / 16, signs=("plus",))
    lo = analysis.entropy_residual(traj, single_atom(z=0.125, w=0.5), fam,
                                   [-0.7], 1 / 16, signs=("minus",))
    assert hi.worst <= 1e-12
    assert lo.worst <= 1e-12


def test_residual_counts_inadmissible_pairs():
    spec = make_problem("burgers", "identity", "bump", T=0.2)
    traj = run(spec, single_atom(z=0.125, w=0.5), 1 / 64)
    fam = analysis.default_test_family(0.0, 1.0, spec.T)
    # negative-sign entropies with k > 0 conflict with the zero exterior for
    # bumps whose support touches the halo
    rep = analysis.entropy_residual(traj, single_atom(z=0.125, w=0.5), fam,
                                    [0.5], 1 / 16, signs=("minus",))
    assert rep.skipped > 0


# -- compactness quantities -------------------------------------------------------

def test_moduli_zero_field():
    tabs = analysis.translation_moduli(np.zeros((10, 20)), 0.1, 0.1,
                                       [1, 2], [1, 2])
    assert all(v == 0.0 for _, v in tabs["space"])
    assert all(v == 0.0 for _, v in tabs["time"])


def test_moduli_block_closed_form():
    # block of height 1 over m cells: shifting by h cells changes 2h cells
    # per time slice -> modulus sqrt(2 h dx * n_t dt)
    dt, dx = 0.25, 0.1
    g = np.zeros((4, 30))
    g[:, 10:20] = 1.0
    tabs = analysis.translation_moduli(g, dt, dx, [1, 3], [])
    for h_cells, (h, v) in zip([1, 3], tabs["space"]):
        assert h == pytest.approx(h_cells * dx)
        assert v == pytest.approx(math.sqrt(2 * h_cells * dx * 4 * dt))


def test_moduli_vanish_at_zero_and_satisfy_doubling():
    # subadditivity of translations gives the exact bound w(2h) <= 2 w(h)
    rng = np.random.default_rng(9)
    g = rng.normal(size=(12, 40))
    tabs = analysis.translation_moduli(g, 0.01, 0.05, [0, 1, 2, 4], [0, 1, 2])
    sv = [v for _, v in tabs["space"]]
    tv = [v for _, v in tabs["time"]]
    assert sv[0] == 0.0 and tv[0] == 0.0
    assert sv[2] <= 2 * sv[1] + 1e-12
    assert sv[3] <= 2 * sv[2] + 1e-12
    assert tv[2] <= 2 * tv[1] + 1e-12


def test_moduli_monotone_on_solution_flux():
    # below the feature width the moduli of a smooth diffusive flux increase
    # with the shift
    spec = make_problem("burgers", "identity", "bump", T=0.2)
    traj = run(spec, truncate(FractionalRadial(alpha=1.0), 1 / 16)[1],
               1 / 64, Z=1.0, r=1 / 16)
    dt = float(traj.times[1] - traj.times[0])
    tabs = analysis.translation_moduli(traj.gamma(), dt, 1 / 64,
                                       [1, 2, 4, 8], [1, 2, 4])
    sv = [v for _, v in tabs["space"]]
    tv = [v for _, v in tabs["time"]]
    assert all(np.diff(sv) > 0.0)
    assert all(np.diff(tv) > 0.0)


def test_uniform_energy_series_identical_runs():
    spec = make_problem("burgers", "identity", "bump", T=0.2)
    t1 = run(spec, single_atom(z=0.125, w=0.5), 1 / 64)
    series = analysis.uniform_energy_series(
        [(t1.stencil, t1), (t1.stencil, t1)])
    assert series[0] == series[1]


def test_uniform_energy_series_zero_diffusion():
    spec = make_problem("burgers", "stefan", "bump", ell=1.5, T=0.2)
    t1 = run(spec, single_atom(z=0.125, w=0.5), 1 / 64)
    series = analysis.uniform_energy_series([(t1.stencil, t1)])
    assert series[0] == 0.0


# -- pointwise mollification bound -------------------------------------------------

def test_mollification_constant_field():
    w = analysis.mollifier_weights(3)
    slack = analysis.mollification_bound_check(np.full((5, 32), 0.7),
                                               diffusion_identity(), w)
    assert slack >= 0.0


def test_mollification_identity_and_stefan_random_fields():
    rng = np.random.default_rng(17)
    w = analysis.mollifier_weights(4)
    for diff in (diffusion_identity(), diffusion_stefan(0.1),
                 diffusion_power(2.0)):
        u = rng.uniform(-1.0, 1.0, size=(2000, 32))
        assert analysis.mollification_bound_check(u, diff, w) >= 0.0


def test_mollifier_weights_are_a_probability():
    w = analysis.mollifier_weights(5)
    assert np.all(w >= 0.0)
    assert w.sum() == pytest.approx(1.0, abs=1e-15)


# -- mean bound ---------------------------------------------------------------------

def test_mean_bound_two_symmetric_atoms():
    grid = np.linspace(-1.0, 1.0, 41)
    h = np.abs(grid)
    slack = analysis.mean_bound_check(np.array([-1.0, 1.0]),
                                      np.array([0.5, 0.5]), grid, h,
                                      L=1.0, R=1.0)
    # mean sits at 0 where h vanishes; bound reads 0 <= L R mean(h) = 1
    assert slack == pytest.approx(1.0)


def test_mean_bound_single_atom():
    grid = np.linspace(-2.0, 2.0, 81)
    h = 0.5 * np.abs(grid)
    slack = analysis.mean_bound_check(np.array([1.3]), np.array([1.0]),
                                      grid, h, L=0.5, R=2.0)
    assert slack >= 0.0


def test_mean_bound_randomized_suite():
    rng = np.random.default_rng(23)
    rep = analysis.mean_bound_suite(rng, trials=2000)
    assert rep["violations"] == 0


# -- gallery ---------------------------------------------------------------------

def test_gallery_all_rows_pass():
    rows = analysis.counterexample_gallery()
    assert rows  # non-empty
    for r in rows:
        assert r.passed, (r.name, r.check, r.param, r.value, r.reference)


def test_gallery_frozen_values():
    rows = {(r.name, r.check, r.param): r for r in
            analysis.counterexample_gallery()}
    assert rows[("dyadic_a", "levy_moment", 0.0)].value == pytest.approx(
        1.0 / 3.0, abs=1e-12)
    assert rows[("dyadic_b", "levy_moment", 0.0)].value == pytest.approx(
        1.0, abs=1e-12)
    # first dyadic frequency: 2 + 1 + sum of the remaining cosine gaps
    row = rows[("dyadic_a", "partial_sum_identity", 1.0)]
    assert row.value == pytest.approx(row.reference, abs=1e-10)
