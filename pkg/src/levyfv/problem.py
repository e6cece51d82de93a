"""Problem data: domain, flux, nonlinearity, initial and exterior values.

Fluxes and diffusion nonlinearities are carried with the closed forms the
scheme and the diagnostics need (monotone splitting, derivative, exact
antiderivative, Lipschitz constants on a range).  Exterior data is analytic:
the halo, the operator tail, and the boundary integrals all sample it at
arbitrary points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import (
    EmptyInterior,
    ExteriorMismatch,
    HaloTooSmall,
    OutOfTimeRange,
    UnknownPreset,
)
from .grids import Grid1d, make_grid


# ---------------------------------------------------------------------------
# scalar nonlinearities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class PiecewiseLinear:
    """Piecewise-linear scalar map from breakpoint tables.

    Constant extension beyond the table keeps the function globally Lipschitz
    and makes the reported constants exact.
    """

    xs: tuple
    ys: tuple

    def __call__(self, u):
        return np.interp(u, self.xs, self.ys)

    def deriv(self, u):
        xs = np.asarray(self.xs)
        slopes = np.diff(self.ys) / np.diff(xs)
        idx = np.clip(np.searchsorted(xs, u, side="right") - 1, 0,
                      len(slopes) - 1)
        out = slopes[idx]
        return np.where((np.asarray(u) < xs[0]) | (np.asarray(u) >= xs[-1]),
                        0.0, out)

    def antiderivative(self, u):
        xs = np.asarray(self.xs, dtype=float)
        ys = np.asarray(self.ys, dtype=float)
        cum = np.concatenate([[0.0], np.cumsum(np.diff(xs) * (ys[:-1] + ys[1:]) / 2.0)])
        anchor = np.interp(0.0, xs, cum)  # exact for the pw-linear integrand
        u = np.asarray(u, dtype=float)
        below = ys[0] * np.minimum(u - xs[0], 0.0)
        above = ys[-1] * np.maximum(u - xs[-1], 0.0)
        uc = np.clip(u, xs[0], xs[-1])
        idx = np.clip(np.searchsorted(xs, uc, side="right") - 1, 0,
                      len(xs) - 2)
        x0, x1 = xs[idx], xs[idx + 1]
        y0, y1 = ys[idx], ys[idx + 1]
        t = uc - x0
        seg = y0 * t + (y1 - y0) / (x1 - x0) * t * t / 2.0
        val = cum[idx] + seg + below + above
        return val - anchor

    def lipschitz_on(self, lo, hi):
        xs = np.asarray(self.xs)
        slopes = np.abs(np.diff(self.ys) / np.diff(xs))
        keep = (xs[1:] > lo) & (xs[:-1] < hi)
        return float(slopes[keep].max()) if keep.any() else 0.0

    def split_monotone(self):
        """Exact splitting into nondecreasing and nonincreasing parts with
        value 0 at u = 0 (for monotone numerical fluxes)."""
        xs = np.asarray(self.xs, dtype=float)
        slopes = np.diff(self.ys) / np.diff(xs)
        def build(sl):
            ys = np.concatenate([[0.0], np.cumsum(sl * np.diff(xs))])
            p = PiecewiseLinear(tuple(xs), tuple(ys))
            shift = float(p(0.0))
            return PiecewiseLinear(tuple(xs), tuple(np.asarray(ys) - shift))
        return build(np.maximum(slopes, 0.0)), build(np.minimum(slopes, 0.0))


@dataclass(frozen=True)
class FluxFn:
    """Convective flux with its monotone (upwind) splitting f = f+ + f-."""

    name: str
    f: Callable
    f_plus: Callable   # nondecreasing part, f_plus(0) = 0
    f_minus: Callable  # nonincreasing part, f_minus(0) = 0
    _lipschitz: Callable

    def lipschitz_on(self, lo: float, hi: float) -> float:
        return self._lipschitz(lo, hi)


def flux_zero() -> FluxFn:
    z = lambda u: np.zeros_like(np.asarray(u, dtype=float))
    return FluxFn("zero", z, z, z, lambda lo, hi: 0.0)


def flux_linear(c: float = 1.0) -> FluxFn:
    cp, cm = max(c, 0.0), min(c, 0.0)
    return FluxFn(f"linear({c})",
                  lambda u: c * np.asarray(u, dtype=float),
                  lambda u: cp * np.asarray(u, dtype=float),
                  lambda u: cm * np.asarray(u, dtype=float),
                  lambda lo, hi: abs(c))


def flux_burgers() -> FluxFn:
    return FluxFn(
        "burgers",
        lambda u: 0.5 * np.square(np.asarray(u, dtype=float)),
        lambda u: 0.5 * np.square(np.maximum(u, 0.0)),
        lambda u: 0.5 * np.square(np.minimum(u, 0.0)),
        lambda lo, hi: max(abs(lo), abs(hi)),
    )


def flux_from_table(xs, ys) -> FluxFn:
    p = PiecewiseLinear(tuple(xs), tuple(ys))
    if abs(float(p(0.0))) > 0.0:
        p = PiecewiseLinear(p.xs, tuple(np.asarray(p.ys) - float(p(0.0))))
    plus, minus = p.split_monotone()
    return FluxFn("table", p, plus, minus, p.lipschitz_on)


@dataclass(frozen=True)
class DiffusionFn:
    """Nondecreasing nonlinearity b with b(0) = 0.

    `bprime` uses the lower one-sided derivative at kinks (irrelevant for the
    checks, which only meet kinks on measure-zero sets).  `antiderivative` is
    B with B(0) = 0, so the entropy potential is
    H(u, k) = B(u) - B(k) - b(k)(u - k) >= 0.
    """

    name: str
    b: Callable
    bprime: Callable
    antiderivative: Callable
    _lipschitz: Callable

    def lipschitz_on(self, lo: float, hi: float) -> float:
        return self._lipschitz(lo, hi)

    def entropy_h(self, u, k):
        return (self.antiderivative(u) - self.antiderivative(k)
                - self.b(k) * (np.asarray(u, dtype=float) - k))

    @property
    def is_zero(self) -> bool:
        return self.name == "zero"


def diffusion_zero() -> DiffusionFn:
    z = lambda u: np.zeros_like(np.asarray(u, dtype=float))
    return DiffusionFn("zero", z, z, z, lambda lo, hi: 0.0)


def diffusion_identity() -> DiffusionFn:
    return DiffusionFn("identity",
                       lambda u: np.asarray(u, dtype=float),
                       lambda u: np.ones_like(np.asarray(u, dtype=float)),
                       lambda u: 0.5 * np.square(np.asarray(u, dtype=float)),
                       lambda lo, hi: 1.0)


def diffusion_power(m: float = 2.0) -> DiffusionFn:
    if m <= 1.0:
        raise ValueError("power exponent must exceed 1")
    return DiffusionFn(
        f"power({m})",
        lambda u: np.sign(u) * np.abs(u) ** m,
        lambda u: m * np.abs(u) ** (m - 1.0),
        lambda u: np.abs(u) ** (m + 1.0) / (m + 1.0),
        lambda lo, hi: m * max(abs(lo), abs(hi)) ** (m - 1.0),
    )


def diffusion_stefan(ell: float = 0.5) -> DiffusionFn:
    if ell < 0.0:
        raise ValueError("stefan threshold must be >= 0 to keep b(0) = 0")
    return DiffusionFn(
        f"stefan({ell})",
        lambda u: np.maximum(np.asarray(u, dtype=float) - ell, 0.0),
        lambda u: np.where(np.asarray(u, dtype=float) > ell, 1.0, 0.0),
        lambda u: 0.5 * np.square(np.maximum(np.asarray(u, dtype=float) - ell,
                                             0.0)),
        lambda lo, hi: 1.0 if hi > ell else 0.0,
    )


def diffusion_from_table(xs, ys) -> DiffusionFn:
    p = PiecewiseLinear(tuple(xs), tuple(ys))
    if np.any(np.diff(p.ys) < 0):
        raise ValueError("diffusion table must be nondecreasing")
    if abs(float(p(0.0))) > 0.0:
        p = PiecewiseLinear(p.xs, tuple(np.asarray(p.ys) - float(p(0.0))))
    return DiffusionFn("table", p, p.deriv, p.antiderivative, p.lipschitz_on)


# ---------------------------------------------------------------------------
# exterior data
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ExteriorData:
    """Analytic exterior extension: value and optional closed-form
    derivatives, all vectorized over x."""

    value: Callable            # (t, x) -> array
    dt: Callable | None = None
    grad: Callable | None = None


def exterior_constant(c: float) -> ExteriorData:
    return ExteriorData(
        value=lambda t, x: np.full_like(np.asarray(x, dtype=float), c),
        dt=lambda t, x: np.zeros_like(np.asarray(x, dtype=float)),
        grad=lambda t, x: np.zeros_like(np.asarray(x, dtype=float)))


def exterior_smoothstep(x0: float, x1: float, left: float,
                        right: float) -> ExteriorData:
    """Time-independent C^2 ramp: quintic smoothstep from `left` to `right`
    across [x0, x1], exactly constant outside."""
    span = x1 - x0

    def theta(x):
        return np.clip((np.asarray(x, dtype=float) - x0) / span, 0.0, 1.0)

    def value(t, x):
        th = theta(x)
        s = th ** 3 * (10.0 + th * (-15.0 + 6.0 * th))
        return left + (right - left) * s

    def grad(t, x):
        th = theta(x)
        ds = 30.0 * th ** 2 * (1.0 - th) ** 2 / span
        return (right - left) * ds

    return ExteriorData(value=value,
                        dt=lambda t, x: np.zeros_like(np.asarray(x, dtype=float)),
                        grad=grad)


# ---------------------------------------------------------------------------
# domain geometry
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DomainMask:
    """Domain with a signed distance (negative inside) and boundary nodes."""

    kind: str        # interval | box | ball
    params: tuple
    dim: int

    def signed_distance(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "interval":
            a, b = self.params
            return np.maximum(a - x, x - b)
        if self.kind == "ball":
            center = np.asarray(self.params[0], dtype=float)
            radius = self.params[1]
            return np.linalg.norm(x - center, axis=-1) - radius
        if self.kind == "box":
            lo = np.asarray(self.params[0], dtype=float)
            hi = np.asarray(self.params[1], dtype=float)
            return np.max(np.maximum(lo - x, x - hi), axis=-1)
        raise UnknownPreset(f"unknown domain kind {self.kind!r}")

    def contains(self, x):
        return self.signed_distance(x) < 0.0

    def boundary_nodes(self):
        """Quadrature nodes and surface weights on the boundary."""
        if self.kind == "interval":
            a, b = self.params
            return np.array([a, b]), np.array([1.0, 1.0])
        if self.kind == "ball" and self.dim == 2:
            center = np.asarray(self.params[0], dtype=float)
            radius = self.params[1]
            n = 256
            ang = 2.0 * np.pi * (np.arange(n) + 0.5) / n
            pts = center + radius * np.stack([np.cos(ang), np.sin(ang)], -1)
            return pts, np.full(n, 2.0 * np.pi * radius / n)
        raise NotImplementedError(
            f"boundary quadrature for {self.kind} in dim {self.dim}")


def interval_domain(a: float, b: float) -> DomainMask:
    return DomainMask("interval", (a, b), 1)


def ball_domain(center, radius: float) -> DomainMask:
    center = tuple(np.atleast_1d(np.asarray(center, dtype=float)))
    return DomainMask("ball", (center, radius), len(center))


def box_domain(lo, hi) -> DomainMask:
    lo = tuple(np.atleast_1d(np.asarray(lo, dtype=float)))
    hi = tuple(np.atleast_1d(np.asarray(hi, dtype=float)))
    return DomainMask("box", (lo, hi), len(lo))


# ---------------------------------------------------------------------------
# problem specification
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ProblemSpec:
    domain: DomainMask
    flux: FluxFn
    diffusion: DiffusionFn
    u0: Callable                       # x -> value, on the interior
    exterior: ExteriorData             # global extension
    T: float
    exterior_datum: Callable | None = None  # datum on the exterior; defaults
                                            # to the extension restricted there

    def datum(self, t, x):
        if self.exterior_datum is not None:
            return self.exterior_datum(t, x)
        return self.exterior.value(t, x)


def eval_extension(spec: ProblemSpec, t: float, x):
    if not 0.0 <= t <= spec.T:
        raise OutOfTimeRange(f"t={t} outside [0, {spec.T}]")
    return spec.exterior.value(t, x)


def validate_problem(spec: ProblemSpec, rng=None, samples: int = 1000) -> None:
    """Structural checks: normalization, monotone b, extension consistency."""
    rng = rng or np.random.default_rng(0)
    if abs(float(np.asarray(spec.flux.f(0.0)))) > 1e-14:
        raise ValueError("flux not normalized: f(0) != 0")
    if abs(float(np.asarray(spec.diffusion.b(0.0)))) > 1e-14:
        raise ValueError("diffusion not normalized: b(0) != 0")
    lo, hi = -2.0, 2.0
    s = rng.uniform(lo, hi, size=samples)
    t = rng.uniform(lo, hi, size=samples)
    s, t = np.minimum(s, t), np.maximum(s, t)
    bs, bt = spec.diffusion.b(s), spec.diffusion.b(t)
    if np.any(bs > bt + 1e-12):
        raise ValueError("diffusion nonlinearity is not nondecreasing")
    # extension must agree with the exterior datum away from the domain
    if spec.domain.dim == 1:
        a, b = spec.domain.params
        width = b - a
        xs = np.concatenate([np.linspace(a - 2 * width, a - 1e-9, 40),
                             np.linspace(b + 1e-9, b + 2 * width, 40)])
        for t_probe in np.linspace(0.0, spec.T, 9):
            gap = np.max(np.abs(np.asarray(spec.exterior.value(t_probe, xs))
                                - np.asarray(spec.datum(t_probe, xs))))
            if gap > 1e-10:
                raise ExteriorMismatch(
                    f"extension differs from exterior datum by {gap:.2e}")


@dataclass
class DiscreteProblem:
    """Grid-sampled instance: cell-centered initial data plus an exterior
    sampler bound to the analytic extension."""

    grid: Grid1d
    spec: ProblemSpec
    u0_full: np.ndarray
    data_range: tuple

    def exterior_values(self, t: float) -> np.ndarray:
        """Extension sampled on the full grid (used for halo refreshes)."""
        return np.asarray(self.spec.exterior.value(t, self.grid.x_full()),
                          dtype=float)

    def refresh_halo(self, u_full: np.ndarray, t: float) -> None:
        vals = self.exterior_values(t)
        h = self.grid.n_halo
        u_full[..., :h] = vals[:h]
        u_full[..., -h:] = vals[-h:]


def discretize(spec: ProblemSpec, dx: float, halo_width: float,
               n_time_samples: int = 33) -> DiscreteProblem:
    """Cell-centered sampling of the initial datum with an exterior halo.

    The recorded data range is taken over the sampled initial datum and the
    exterior values on the halo across [0, T]; it is exact for the piecewise
    constant/plateau presets used in the tests.
    """
    if spec.domain.dim != 1:
        return _discretize_nd(spec, dx)
    a, b = spec.domain.params
    n_halo = int(math.ceil(halo_width / dx - 1e-12))
    if n_halo < 1:
        raise HaloTooSmall("halo must cover at least one cell")
    grid = make_grid(a, b, dx, n_halo)
    if grid.n < 1:
        raise EmptyInterior("no interior cells")
    x = grid.x_full()
    u0 = np.asarray(spec.exterior.value(0.0, x), dtype=float).copy()
    u0[grid.interior] = spec.u0(x[grid.interior])
    lo = float(u0[grid.interior].min())
    hi = float(u0[grid.interior].max())
    halo_x = x[grid.halo_mask()]
    for t in np.linspace(0.0, spec.T, n_time_samples):
        vals = np.asarray(spec.datum(t, halo_x), dtype=float)
        lo = min(lo, float(vals.min()))
        hi = max(hi, float(vals.max()))
    return DiscreteProblem(grid=grid, spec=spec, u0_full=u0,
                           data_range=(lo, hi))


@dataclass
class DiscreteProblemNd:
    centers: np.ndarray       # (..., dim) cell centers of the bounding box
    interior: np.ndarray      # boolean mask
    u0: np.ndarray            # initial datum on interior cells
    spec: ProblemSpec


def _discretize_nd(spec: ProblemSpec, dx: float) -> DiscreteProblemNd:
    if spec.domain.kind == "ball":
        center, radius = spec.domain.params
        lo = np.asarray(center) - 2.5 * radius
        hi = np.asarray(center) + 2.5 * radius
    else:
        lo = np.asarray(spec.domain.params[0], dtype=float)
        hi = np.asarray(spec.domain.params[1], dtype=float)
    axes = [np.arange(l + dx / 2.0, h, dx) for l, h in zip(lo, hi)]
    mesh = np.meshgrid(*axes, indexing="ij")
    centers = np.stack(mesh, axis=-1)
    inside = spec.domain.contains(centers)
    if not inside.any():
        raise EmptyInterior("mask classifies no cell as interior")
    u0 = np.asarray(spec.u0(centers[inside]), dtype=float)
    return DiscreteProblemNd(centers=centers, interior=inside, u0=u0,
                             spec=spec)


# ---------------------------------------------------------------------------
# presets
# ---------------------------------------------------------------------------

def _bump_datum(center=0.5, radius=0.25, height=1.0):
    def u0(x):
        x = np.asarray(x, dtype=float)
        s = np.clip(np.abs(x - center) / radius, 0.0, 1.0)
        return height * np.cos(np.pi * s / 2.0) ** 2
    return u0


def make_problem(flux="burgers", diffusion="zero", data="riemann",
                 domain=(0.0, 1.0), T=0.5, **kw) -> ProblemSpec:
    """Assemble an instance from named pieces (the test-matrix entry point)."""
    fluxes = {"burgers": flux_burgers, "linear": flux_linear,
              "zero": flux_zero}
    diffs = {"zero": diffusion_zero, "identity": diffusion_identity,
             "power": diffusion_power, "stefan": diffusion_stefan}
    if isinstance(flux, FluxFn):
        fx = flux
    else:
        if flux not in fluxes:
            raise UnknownPreset(f"unknown flux {flux!r}")
        fx = fluxes[flux]()
    if isinstance(diffusion, DiffusionFn):
        df = diffusion
    else:
        if diffusion not in diffs:
            raise UnknownPreset(f"unknown diffusion {diffusion!r}")
        args = {k: kw[k] for k in ("m", "ell") if k in kw}
        df = diffs[diffusion](**args) if args else diffs[diffusion]()
    a, b = domain
    mid = 0.5 * (a + b)
    wid = 0.1 * (b - a)
    if data == "riemann":
        u0 = lambda x: np.where(np.asarray(x, dtype=float) < mid, 1.0, 0.0)
        ext = exterior_smoothstep(mid - wid, mid + wid, 1.0, 0.0)
    elif data == "riemann_up":
        u0 = lambda x: np.where(np.asarray(x, dtype=float) < mid, 0.0, 1.0)
        ext = exterior_smoothstep(mid - wid, mid + wid, 0.0, 1.0)
    elif data == "bump":
        u0 = _bump_datum(mid, 0.25 * (b - a))
        ext = exterior_constant(0.0)
    else:
        raise UnknownPreset(f"unknown datum {data!r}")
    return ProblemSpec(domain=interval_domain(a, b), flux=fx, diffusion=df,
                       u0=u0, exterior=ext, T=T)


PROBLEM_PRESETS = {
    "burgers_riemann": lambda: make_problem("burgers", "zero", "riemann"),
    "burgers_rarefaction": lambda: make_problem("burgers", "zero",
                                                "riemann_up", T=0.3),
    "burgers_bump": lambda: make_problem("burgers", "identity", "bump"),
    "linear_bump": lambda: make_problem("linear", "zero", "bump"),
    "stefan_mixed": lambda: make_problem("burgers", "stefan", "bump",
                                         ell=0.3),
}


def problem_from_config(cfg) -> ProblemSpec:
    if isinstance(cfg, str):
        if cfg not in PROBLEM_PRESETS:
            raise UnknownPreset(f"unknown problem preset {cfg!r}")
        return PROBLEM_PRESETS[cfg]()
    kw = {}
    for key in ("m", "ell"):
        if key in cfg:
            kw[key] = float(cfg[key])
    flux = cfg.get("flux", "burgers")
    if isinstance(flux, dict):  # piecewise-linear coefficient table
        flux = flux_from_table(flux["x"], flux["y"])
    diffusion = cfg.get("diffusion", "zero")
    if isinstance(diffusion, dict):
        diffusion = diffusion_from_table(diffusion["x"], diffusion["y"])
    return make_problem(flux=flux, diffusion=diffusion,
                        data=cfg.get("data", "riemann"),
                        domain=tuple(cfg.get("domain", (0.0, 1.0))),
                        T=float(cfg.get("T", 0.5)), **kw)
