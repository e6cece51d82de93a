"""Explicit monotone finite-volume time stepping, plus the fixed-point and
approximation-chain drivers built on top of it.

The update on interior cells is

    u_i' = u_i - (dt/dx) (Fhat_{i+1/2} - Fhat_{i-1/2}) + dt * (L_h b(u))_i,

with a monotone numerical flux (Engquist-Osher by default) and the discrete
jump operator from `stencil`.  Under the CFL bound the update is order
preserving in every stencil argument, which yields the discrete maximum
principle and L1 contraction checked by `analysis`.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, replace

import numpy as np

from .errors import CflViolation, ConfigMismatch, DegenerateGrid, \
    NoConvergence, NonfiniteValue
from .measures import FractionalRadial, LevyMeasure, ScaledMeasure, \
    weighted_tv_distance, zero_measure
from .problem import DiscreteProblem, ProblemSpec, diffusion_zero, discretize
from .stencil import StencilWeights, apply_stencil, build_stencil


@dataclass(frozen=True)
class SchemeConfig:
    dx: float
    r: float
    Z: float
    dt: float | None = None          # None -> auto CFL
    numerical_flux: str = "engquist_osher"   # or "lax_friedrichs"
    cfl_safety: float = 0.95
    tail_mode: str = "exterior_mean"         # or "drop"
    enforce_cfl: bool = True
    store_every: int = 1             # cadence for exported trajectories
    budget: int = 60


@dataclass
class Trajectory:
    """States at every accepted step, on the full (interior + halo) grid."""

    times: np.ndarray
    states: np.ndarray               # (n_times, n_full)
    disc: DiscreteProblem
    stencil: StencilWeights
    config: SchemeConfig
    stats: dict

    @property
    def grid(self):
        return self.disc.grid

    @property
    def spec(self):
        return self.disc.spec

    def interior(self) -> np.ndarray:
        return self.states[:, self.grid.interior]

    def gamma(self) -> np.ndarray:
        """b(u) - b(extension) on the interior; identically zero outside."""
        b = self.spec.diffusion.b
        x = self.grid.x_interior()
        ext = np.stack([np.asarray(self.spec.exterior.value(t, x), dtype=float)
                        for t in self.times])
        return b(self.interior()) - b(ext)


def _numerical_flux(config, spec, lam):
    if config.numerical_flux == "engquist_osher":
        fp, fm = spec.flux.f_plus, spec.flux.f_minus
        return lambda a, b: fp(a) + fm(b)
    if config.numerical_flux == "lax_friedrichs":
        f = spec.flux.f
        return lambda a, b: 0.5 * (f(a) + f(b)) - 0.5 * lam * (b - a)
    raise ValueError(f"unknown numerical flux {config.numerical_flux!r}")


def cfl_max_dt(spec: ProblemSpec, stencil: StencilWeights, dx: float,
               data_range: tuple) -> float:
    """Largest dt keeping the explicit update order preserving:
    1 / (2 d L_f / dx + L_b (W + tau)), inf when unconstrained."""
    if dx <= 0:
        raise DegenerateGrid(f"dx={dx}")
    lo, hi = data_range
    lf = spec.flux.lipschitz_on(lo, hi)
    lb = spec.diffusion.lipschitz_on(lo, hi)
    denom = 2.0 * lf / dx + lb * (stencil.weight_sum + stencil.tau)
    return math.inf if denom == 0.0 else 1.0 / denom


def _tail_value(disc, bfield):
    h = disc.grid.n_halo
    return 0.5 * (float(bfield[:h].mean()) + float(bfield[-h:].mean()))


def step(u_full: np.ndarray, disc: DiscreteProblem, stencil: StencilWeights,
         config: SchemeConfig, t: float, dt: float,
         source: np.ndarray | None = None,
         diffusion=None, flux_pair=None) -> np.ndarray:
    """One forward-Euler update; halo of the result holds the exterior datum
    at t + dt.  `source` (interior-sized) replaces the jump term when given,
    which is how the fixed-point iteration freezes its right-hand side."""
    spec = disc.spec
    grid = disc.grid
    diffusion = diffusion or spec.diffusion
    if flux_pair is None:
        lo, hi = disc.data_range
        flux_pair = _numerical_flux(config, spec, spec.flux.lipschitz_on(lo, hi))
    if source is None:
        bfield = diffusion.b(u_full)
        tail = 0.0 if config.tail_mode == "drop" else _tail_value(disc, bfield)
        if config.tail_mode == "drop":
            stencil = replace(stencil, tau=0.0)
        nonlocal_term = apply_stencil(bfield, stencil, grid.n_halo,
                                      tail_value=tail)
    else:
        nonlocal_term = source
    h = grid.n_halo
    left = u_full[h - 1:h + grid.n]      # u_{i-1} on interfaces
    right = u_full[h:h + grid.n + 1]     # u_{i+1} side
    fhat = flux_pair(left, right)        # interface i-1/2 for i = 0..n
    interior = u_full[grid.interior]
    new_interior = (interior - (dt / grid.dx) * (fhat[1:] - fhat[:-1])
                    + dt * nonlocal_term)
    if not np.all(np.isfinite(new_interior)):
        raise NonfiniteValue(f"nonfinite state at t={t}")
    out = u_full.copy()
    out[grid.interior] = new_interior
    disc.refresh_halo(out, min(t + dt, spec.T))
    return out


def solve(spec: ProblemSpec, stencil: StencilWeights, config: SchemeConfig,
          dt_override: float | None = None,
          source_states: np.ndarray | None = None,
          diffusion=None) -> Trajectory:
    """March to T; the step count is chosen so the horizon is hit exactly."""
    disc = discretize(spec, config.dx, stencil.Z)
    drange = disc.data_range
    diffusion = diffusion or spec.diffusion
    dtmax = cfl_max_dt(replace_spec_diffusion(spec, diffusion), stencil,
                       config.dx, drange)
    dt = dt_override if dt_override is not None else config.dt
    if dt is None:
        dt = config.cfl_safety * dtmax if math.isfinite(dtmax) else spec.T / 64.0
    n_steps = max(1, int(math.ceil(spec.T / dt - 1e-12)))
    dt = spec.T / n_steps
    if config.enforce_cfl and dt > dtmax * (1.0 + 1e-9):
        raise CflViolation(f"dt={dt} above monotonicity bound {dtmax}")
    lo, hi = drange
    flux_pair = _numerical_flux(config, spec, spec.flux.lipschitz_on(lo, hi))

    u = disc.u0_full.copy()
    disc.refresh_halo(u, 0.0)
    states = np.empty((n_steps + 1, disc.grid.n_full))
    states[0] = u
    wall = time.perf_counter()
    for n in range(n_steps):
        src = source_states[n] if source_states is not None else None
        u = step(u, disc, stencil, config, n * dt, dt, source=src,
                 diffusion=diffusion, flux_pair=flux_pair)
        states[n + 1] = u
    stats = {
        "dt": dt,
        "n_steps": n_steps,
        "cfl_ratio": 0.0 if not math.isfinite(dtmax) else dt / dtmax,
        "cfl_max_dt": dtmax,
        "data_range": drange,
        "wall_time_s": time.perf_counter() - wall,
    }
    if config.tail_mode == "drop" and stencil.tau > 0.0:
        # a-priori bound on the dropped operator tail, per unit time
        b_sup = float(np.max(np.abs(diffusion.b(np.asarray(drange)))))
        stats["drop_tail_bound"] = 2.0 * b_sup * stencil.tau
    return Trajectory(times=np.linspace(0.0, spec.T, n_steps + 1),
                      states=states, disc=disc, stencil=stencil,
                      config=config, stats=stats)


def replace_spec_diffusion(spec: ProblemSpec, diffusion) -> ProblemSpec:
    if diffusion is spec.diffusion:
        return spec
    return replace(spec, diffusion=diffusion)


# ---------------------------------------------------------------------------
# trajectory comparison helpers
# ---------------------------------------------------------------------------

def _check_comparable(a: Trajectory, b: Trajectory) -> None:
    if a.states.shape != b.states.shape or a.grid != b.grid:
        raise ConfigMismatch("trajectories live on different grids")
    if not np.allclose(a.times, b.times, rtol=0.0, atol=1e-12):
        raise ConfigMismatch("trajectories use different time steps")
    ha = a.states[:, a.grid.halo_mask()]
    hb = b.states[:, b.grid.halo_mask()]
    if not np.array_equal(ha, hb):
        raise ConfigMismatch("trajectories carry different exterior data")


def l1_series(a: Trajectory, b: Trajectory) -> np.ndarray:
    """dx * sum |u - v| on the interior, one value per stored time."""
    _check_comparable(a, b)
    return a.grid.dx * np.abs(a.interior() - b.interior()).sum(axis=1)


def l1_q_distance(a: Trajectory, b: Trajectory) -> float:
    series = l1_series(a, b)
    dt = float(a.times[1] - a.times[0])
    return dt * float(series[:-1].sum())


def l2_q_distance(fa: np.ndarray, fb: np.ndarray, dt: float,
                  dx: float) -> float:
    if fa.shape != fb.shape:
        raise ConfigMismatch("field shapes differ")
    return math.sqrt(dt * dx * float(np.sum((fa - fb)[:-1] ** 2)))


# ---------------------------------------------------------------------------
# fixed-point construction for bounded measures
# ---------------------------------------------------------------------------

@dataclass
class PicardResult:
    trajectory: Trajectory
    gaps: list                      # gaps[k-1] = sup_t ||u_{k+1} - u_k||_L1
    first_iterate_norm: float       # max_t ||u_1||_L1
    iterations: int
    converged: bool


def picard_solve(spec: ProblemSpec, measure: LevyMeasure,
                 config: SchemeConfig, k_max: int = 20,
                 tol: float = 1e-6) -> PicardResult:
    """Fixed-point loop: each iterate solves the conservation law with the
    jump term frozen from the previous iterate (extended by the exterior
    datum).  Requires a finite-mass measure; contraction at rate
    (2 L_b ||mu|| T)^k / k! then makes the iterates Cauchy.

    tol = 0 runs exactly k_max iterations (envelope-measurement mode);
    otherwise failing to reach tol raises NoConvergence.
    """
    mass = measure.total_mass(budget=config.budget)
    if not math.isfinite(mass):
        raise ValueError("fixed-point construction needs a finite measure")
    stencil = build_stencil(measure, config.dx, config.r, config.Z,
                            budget=config.budget)
    disc = discretize(spec, config.dx, stencil.Z)
    dtmax = cfl_max_dt(spec, stencil, config.dx, disc.data_range)
    dt = config.dt
    if dt is None:
        dt = config.cfl_safety * dtmax if math.isfinite(dtmax) else spec.T / 64.0
    n_steps = max(1, int(math.ceil(spec.T / dt - 1e-12)))
    dt = spec.T / n_steps

    bfun = spec.diffusion.b
    cl_diffusion = diffusion_zero()

    def frozen_source(traj_states):
        """Jump term of each stored state, interior-sized, one row per step."""
        out = np.empty((n_steps, disc.grid.n))
        for n in range(n_steps):
            bfield = bfun(traj_states[n])
            tail = (0.0 if config.tail_mode == "drop"
                    else _tail_value(disc, bfield))
            out[n] = apply_stencil(bfield, stencil, disc.grid.n_halo,
                                   tail_value=tail)
        return out

    # iterate 0: the zero trajectory (halo still carries the exterior datum)
    prev_states = np.empty((n_steps + 1, disc.grid.n_full))
    for n in range(n_steps + 1):
        row = disc.exterior_values(min(n * dt, spec.T))
        row[disc.grid.interior] = 0.0
        prev_states[n] = row

    gaps: list[float] = []
    first_norm = None
    traj = None
    converged = False
    for k in range(1, k_max + 1):
        src = frozen_source(prev_states)
        traj = solve(spec, stencil, config, dt_override=dt,
                     source_states=src, diffusion=cl_diffusion)
        gap = float(np.max(disc.grid.dx *
                           np.abs(traj.interior()
                                  - prev_states[:, disc.grid.interior])
                           .sum(axis=1)))
        if first_norm is None:
            first_norm = float(np.max(
                disc.grid.dx * np.abs(traj.interior()).sum(axis=1)))
        else:
            gaps.append(gap)
        prev_states = traj.states
        if tol > 0.0 and gap <= tol and k > 1:
            converged = True
            break
    if tol > 0.0 and not converged:
        raise NoConvergence(f"gap {gaps[-1] if gaps else first_norm:.3e} "
                            f"above tol {tol} after {k_max} iterations",
                            gaps=gaps)
    traj.stats["picard_gaps"] = gaps
    return PicardResult(trajectory=traj, gaps=gaps,
                        first_iterate_norm=first_norm,
                        iterations=k, converged=converged or tol == 0.0)


# ---------------------------------------------------------------------------
# approximation-chain drivers
# ---------------------------------------------------------------------------

@dataclass
class ChainReport:
    labels: list
    trajectories: list
    stencils: list
    l1_distances: list
    l2_b_distances: list
    measure_distances: list
    reference: Trajectory


def _common_dt(spec, stencils, config):
    """One dt admissible for every member, so trajectories share time grids."""
    dts = []
    for st in stencils:
        disc = discretize(spec, config.dx, st.Z)
        dtmax = cfl_max_dt(spec, st, config.dx, disc.data_range)
        dts.append(config.cfl_safety * dtmax if math.isfinite(dtmax)
                   else spec.T / 64.0)
    return min(dts)


def _pad_to_common_reach(stencils):
    """Equal halo widths keep trajectories shape-comparable."""
    K = max(st.max_offset for st in stencils)
    out = []
    for st in stencils:
        w = np.zeros(K)
        w[:st.max_offset] = st.weights
        out.append(replace(st, offsets=np.arange(1, K + 1), weights=w,
                           Z=K * st.dx))
    return out


def vanishing_viscosity_run(spec: ProblemSpec, alpha: float, n_list,
                            config: SchemeConfig) -> ChainReport:
    """Solve with the diffusion scaled by 1/n and compare against the pure
    conservation-law run (zero measure)."""
    if not 0.0 < alpha < 2.0:
        raise ValueError("alpha must lie in (0, 2)")
    measures = [ScaledMeasure(factor=1.0 / n,
                              inner=FractionalRadial(alpha=alpha))
                for n in n_list]
    stencils = [build_stencil(m, config.dx, config.r, config.Z,
                              budget=config.budget) for m in measures]
    cl_stencil = build_stencil(zero_measure(), config.dx, config.r, config.Z)
    stencils = _pad_to_common_reach(stencils + [cl_stencil])
    cl_stencil = stencils[-1]
    stencils = stencils[:-1]
    dt = _common_dt(spec, stencils + [cl_stencil], config)
    reference = solve(spec, cl_stencil, config, dt_override=dt)
    trajectories, l1d = [], []
    for st in stencils:
        tr = solve(spec, st, config, dt_override=dt)
        trajectories.append(tr)
        l1d.append(l1_q_distance(tr, reference))
    return ChainReport(labels=list(n_list), trajectories=trajectories,
                       stencils=stencils, l1_distances=l1d,
                       l2_b_distances=[], measure_distances=[],
                       reference=reference)


def stability_run(spec: ProblemSpec, measures, config: SchemeConfig,
                  labels=None) -> ChainReport:
    """Solve along a measure chain; the last entry is the reference.  Reports
    solution distances, diffusive-flux L2 distances, and the weighted total
    variation distances of the measures themselves."""
    measures = list(measures)
    stencils = _pad_to_common_reach(
        [build_stencil(m, config.dx, config.r, config.Z, budget=config.budget)
         for m in measures])
    dt_run = _common_dt(spec, stencils, config)
    trajs = [solve(spec, st, config, dt_override=dt_run) for st in stencils]
    reference = trajs[-1]
    bfun = spec.diffusion.b
    dt = float(reference.times[1] - reference.times[0])
    l1d, l2d, md = [], [], []
    for m, tr in zip(measures[:-1], trajs[:-1]):
        l1d.append(l1_q_distance(tr, reference))
        l2d.append(l2_q_distance(bfun(tr.interior()),
                                 bfun(reference.interior()),
                                 dt, config.dx))
        md.append(weighted_tv_distance(m, measures[-1], budget=config.budget))
    return ChainReport(labels=list(labels) if labels is not None
                       else list(range(len(measures) - 1)),
                       trajectories=trajs[:-1], stencils=stencils[:-1],
                       l1_distances=l1d, l2_b_distances=l2d,
                       measure_distances=md, reference=reference)
