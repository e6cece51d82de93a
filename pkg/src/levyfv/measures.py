"""Symmetric jump (Lévy) measures: moments, truncations, and distances.

Every measure is symmetric about the origin, carries no mass at zero, and has
a finite (|z|^2 ^ 1)-moment.  A measure also carries an optional support
window {lo <= |z| <= hi}, so truncations are first-class values: the part of
mu on {|z| >= r} is the same measure with `lo` raised to r.

Kinds
-----
FractionalRadial   power-law density c |z|^(-d-alpha), the stable family
AtomicSymmetric    finite list of mirrored atom pairs (one representative each)
DyadicA            atoms at 2^-k with pair weight 1 (infinite mass, moment 1/3)
DyadicB            atoms at 2^-k with pair weight 2^k (infinite mass, moment 1)
RadialDensity      generic radial density g(|z|), one dimension
SumMeasure         finite sum of measures
ScaledMeasure      positive multiple of a measure

Atoms exactly on a truncation radius belong to the outer part {|z| >= r};
tail masses use the strict inequality {|z| > Z}.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import Callable, Iterator

import numpy as np
from scipy import integrate

from .errors import (
    DivergentLevyMoment,
    MassAtOrigin,
    NonSymmetric,
    UnknownPreset,
    UnsupportedPair,
)

_INF = math.inf


def sphere_surface(dim: int) -> float:
    """Surface measure of the unit sphere in R^dim (2 for dim = 1)."""
    return 2.0 * math.pi ** (dim / 2.0) / math.gamma(dim / 2.0)


@dataclass(frozen=True)
class MomentReport:
    levy_moment: float
    total_mass: float  # math.inf allowed


# ---------------------------------------------------------------------------
# base class
# ---------------------------------------------------------------------------

@dataclass(frozen=True, kw_only=True)
class LevyMeasure:
    """Base type.  Band arguments are radii 0 <= a <= b <= inf; the inclusive
    flags only matter for atomic kinds."""

    lo: float = 0.0
    hi: float = _INF

    # -- kind hooks (band already clipped to the window) ----------------------
    def _mass(self, a, b, ia, ib, budget) -> float:
        raise NotImplementedError

    def _second(self, a, b, ia, ib, budget) -> float:
        raise NotImplementedError

    def _multiplier(self, xi, a, b, ia, ib, budget, tol) -> float:
        raise NotImplementedError

    def _atoms(self, a, b, ia, ib, budget):
        """Pairs (radius, per-side weight) inside the band, or None."""
        return None

    def _side_cell_mass(self, a, b, budget) -> float:
        """One-sided mass of [a, b] for 1-d continuous kinds, else None."""
        return None

    @property
    def dim(self) -> int:
        return 1

    def validate(self) -> None:
        """Structural checks; kinds with atom lists override."""

    # -- window plumbing -------------------------------------------------------
    def _clip(self, a, b, ia, ib):
        a2 = max(a, self.lo)
        b2 = min(b, self.hi)
        ia2 = ia if a2 == a else True
        ib2 = ib if b2 == b else True
        return a2, b2, ia2, ib2

    def _band_empty(self, a, b, ia, ib) -> bool:
        return a > b or (a == b and not (ia and ib))

    # -- public band quantities ------------------------------------------------
    def mass_between(self, a=0.0, b=_INF, include_a=True, include_b=True,
                     budget=60) -> float:
        a, b, ia, ib = self._clip(a, b, include_a, include_b)
        if self._band_empty(a, b, ia, ib):
            return 0.0
        return self._mass(a, b, ia, ib, budget)

    def second_moment_between(self, a=0.0, b=_INF, include_a=True,
                              include_b=True, budget=60) -> float:
        a, b, ia, ib = self._clip(a, b, include_a, include_b)
        if self._band_empty(a, b, ia, ib):
            return 0.0
        return self._second(a, b, ia, ib, budget)

    def levy_moment_between(self, a=0.0, b=_INF, include_a=True,
                            include_b=True, budget=60) -> float:
        """Integral of (|z|^2 ^ 1) over the band (split at |z| = 1, where the
        weight is continuous, so the split point is counted exactly once)."""
        inner = self.second_moment_between(a, min(b, 1.0), include_a,
                                           include_b and b < 1.0, budget)
        outer = self.mass_between(max(a, 1.0), b,
                                  include_a if a >= 1.0 else True,
                                  include_b, budget)
        return inner + outer

    def levy_moment(self, budget=60) -> float:
        return self.levy_moment_between(budget=budget)

    def total_mass(self, budget=60) -> float:
        return self.mass_between(budget=budget)

    def mass_above(self, Z: float, budget=60) -> float:
        """mu({|z| > Z}), strict."""
        return self.mass_between(Z, _INF, include_a=False, budget=budget)

    def second_moment_below(self, r: float, budget=60) -> float:
        """Integral of |z|^2 over {|z| < r}, strict."""
        return self.second_moment_between(0.0, r, include_b=False,
                                          budget=budget)

    def truncated(self, r: float, budget=60):
        """Split at r: returns (sigma2, outer measure restricted to |z| >= r)."""
        sigma2 = self.second_moment_below(r, budget=budget)
        return sigma2, replace(self, lo=max(self.lo, r))

    def multiplier_value(self, xi, budget=60, tol=1e-8) -> float:
        """Symbol m(xi) = integral of (1 - cos(xi . z)) d mu."""
        a, b, ia, ib = self._clip(0.0, _INF, True, True)
        if self._band_empty(a, b, ia, ib):
            return 0.0
        return self._multiplier(xi, a, b, ia, ib, budget, tol)

    def multiplier_values(self, xis, budget=60, tol=1e-8) -> np.ndarray:
        """Vectorized symbol over scalar frequencies (atomic kinds evaluate
        the whole grid at once; quadrature kinds and vector frequencies fall
        back to a loop)."""
        xis = np.atleast_1d(np.asarray(xis, dtype=float))
        atoms = self.atoms_between(budget=budget) if xis.ndim == 1 else None
        if atoms is not None:
            if not atoms:
                return np.zeros_like(xis)
            rad = np.array([a[0] for a in atoms])
            w = np.array([a[1] for a in atoms])
            return 2.0 * np.sum(
                w * (1.0 - np.cos(np.multiply.outer(xis, rad))), axis=-1)
        return np.array([self.multiplier_value(x, budget, tol) for x in xis])

    def atoms_between(self, a=0.0, b=_INF, include_a=True, include_b=True,
                      budget=60):
        a, b, ia, ib = self._clip(a, b, include_a, include_b)
        if self._band_empty(a, b, ia, ib):
            return []
        return self._atoms(a, b, ia, ib, budget)

    def leaves(self) -> Iterator[tuple[float, "LevyMeasure"]]:
        """Flatten sums/scalings into (coefficient, leaf) with windows folded."""
        yield 1.0, self

    def side_cell_mass(self, a, b, budget=60) -> float:
        a2, b2, _, _ = self._clip(a, b, True, True)
        if a2 >= b2:
            return 0.0
        return self._side_cell_mass(a2, b2, budget)


# ---------------------------------------------------------------------------
# power-law radial family
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FractionalRadial(LevyMeasure):
    """Density coeff * |z|^(-dim-alpha) on R^dim, alpha in (0, 2).

    The normalization constant is a free parameter (default 1); nothing in the
    package bakes in a particular convention.
    """

    alpha: float = 1.0
    coeff: float = 1.0
    ndim: int = 1

    def __post_init__(self):
        if not 0.0 < self.alpha < 2.0:
            raise ValueError(f"alpha must lie in (0, 2), got {self.alpha}")
        if self.coeff <= 0:
            raise ValueError("coeff must be positive")

    @property
    def dim(self) -> int:
        return self.ndim

    def _coef(self) -> float:
        return self.coeff * sphere_surface(self.ndim)

    def _mass(self, a, b, ia, ib, budget):
        if a <= 0.0:
            return _INF
        al = self.alpha
        upper = 0.0 if b == _INF else b ** -al
        return self._coef() * (a ** -al - upper) / al

    def _second(self, a, b, ia, ib, budget):
        if b == _INF:
            return _INF
        p = 2.0 - self.alpha
        return self._coef() * (b ** p - a ** p) / p

    def _side_cell_mass(self, a, b, budget):
        # one side of the line; dim 1 only
        if self.ndim != 1:
            raise NotImplementedError("cell masses only in one dimension")
        al = self.alpha
        upper = 0.0 if b == _INF else b ** -al
        return self.coeff * (a ** -al - upper) / al

    def _multiplier(self, xi, a, b, ia, ib, budget, tol):
        if self.ndim != 1:
            raise NotImplementedError(
                "radial symbol quadrature implemented in one dimension only")
        return _power_law_multiplier(abs(float(xi)), a, b, self.alpha,
                                     self.coeff, budget, tol)


def _power_law_multiplier(xi, a, b, alpha, coeff, budget, tol):
    """2*coeff * int_a^b (1 - cos(xi z)) z^(-1-alpha) dz."""
    if xi == 0.0:
        return 0.0
    if alpha == 1.0:
        # exact antiderivative: -(1 - cos(xi z))/z + xi * Si(xi z)
        def anti(z):
            if z == 0.0:
                return 0.0
            if z == _INF:
                return xi * (math.pi / 2.0)
            si = float(integrate_sici(xi * z))
            return -(1.0 - math.cos(xi * z)) / z + xi * si
        return 2.0 * coeff * (anti(b) - anti(a))
    return 2.0 * coeff * _oscillatory_band_integral(
        lambda z: z ** (-1.0 - alpha), xi, a, b,
        mass_side=lambda a_, b_: (a_ ** -alpha -
                                  (0.0 if b_ == _INF else b_ ** -alpha)) / alpha,
        tol=tol)


def integrate_sici(x: float) -> float:
    from scipy.special import sici
    return sici(x)[0]


def _oscillatory_band_integral(g, xi, a, b, mass_side, tol):
    """int_a^b (1 - cos(xi z)) g(z) dz for a decaying density g >= 0.

    Near the origin 1 - cos tames the singularity; past 1/xi the two parts
    are integrated separately, with scipy's oscillatory rules for the cosine.
    Convergence is enforced through the returned error estimates, so scipy's
    advisory warnings are silenced here.
    """
    import warnings
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        return _oscillatory_pieces(g, xi, a, b, mass_side, tol)


def _oscillatory_pieces(g, xi, a, b, mass_side, tol):
    split = min(max(a, 1.0 / xi), b)
    total, err = 0.0, 0.0
    if split > a:
        v, e = integrate.quad(lambda z: (1.0 - math.cos(xi * z)) * g(z),
                              a, split, limit=200, epsabs=1e-13, epsrel=1e-11)
        total += v
        err += e
    if b > split:
        if mass_side is not None:
            total += mass_side(split, b)
        else:
            v, e = (integrate.quad(g, split, b, limit=200)
                    if b < _INF else integrate.quad(g, split, _INF, limit=200))
            total += v
            err += e
        if b == _INF:
            v, e = integrate.quad(g, split, _INF, weight="cos", wvar=xi,
                                  limit=400, epsabs=1e-12)
        else:
            v, e = integrate.quad(g, split, b, weight="cos", wvar=xi,
                                  limit=400, epsabs=1e-12, epsrel=1e-11)
        total -= v
        err += e
    from .errors import QuadratureNotConverged
    if err > max(tol * abs(total), 1e-9):
        raise QuadratureNotConverged(
            f"symbol quadrature error {err:.2e} at xi={xi}")
    return total


# ---------------------------------------------------------------------------
# atomic kinds
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AtomicSymmetric(LevyMeasure):
    """Finite list of mirrored atom pairs.

    Each entry is (z, w) with z != 0 and w > 0: mass w sits at both z and -z,
    so one entry carries total mass 2w.  An entry may carry an explicit third
    element `mirrored`; passing False is rejected (only symmetric measures are
    representable).  Listing both z and -z is a mirror conflict.
    """

    entries: tuple = ()

    def validate(self) -> None:
        seen = {}
        for entry in self.entries:
            z, w = entry[0], entry[1]
            if len(entry) > 2 and not entry[2]:
                raise NonSymmetric(f"atom at z={z} declared unmirrored")
            zv = np.atleast_1d(np.asarray(z, dtype=float))
            if float(np.linalg.norm(zv)) == 0.0:
                raise MassAtOrigin("atom at z=0")
            if w <= 0:
                raise NonSymmetric(f"atom at z={z} has nonpositive weight {w}")
            key = tuple(zv)
            mirror = tuple(-zv)
            if mirror in seen and seen[mirror] != w:
                raise NonSymmetric(
                    f"conflicting mirror atoms at ±{np.abs(zv)}")
            seen[key] = w

    @property
    def dim(self) -> int:
        if not self.entries:
            return 1
        z = np.atleast_1d(np.asarray(self.entries[0][0], dtype=float))
        return z.size

    def _pairs(self):
        """Normalized (radius, direction vector, side weight) list."""
        merged = {}
        for entry in self.entries:
            zv = np.atleast_1d(np.asarray(entry[0], dtype=float))
            rad = float(np.linalg.norm(zv))
            key = tuple(np.abs(zv)) if zv.size > 1 else (abs(float(zv[0])),)
            prev = merged.get(key)
            if prev is None:
                merged[key] = [rad, zv, float(entry[1])]
            else:
                prev[2] += float(entry[1])
        return sorted(merged.values(), key=lambda t: t[0])

    def _in_band(self, rad, a, b, ia, ib):
        return ((rad > a or (rad == a and ia)) and
                (rad < b or (rad == b and ib)))

    def _mass(self, a, b, ia, ib, budget):
        return sum(2.0 * w for rad, _, w in self._pairs()
                   if self._in_band(rad, a, b, ia, ib))

    def _second(self, a, b, ia, ib, budget):
        return sum(2.0 * w * rad ** 2 for rad, _, w in self._pairs()
                   if self._in_band(rad, a, b, ia, ib))

    def _multiplier(self, xi, a, b, ia, ib, budget, tol):
        xiv = np.atleast_1d(np.asarray(xi, dtype=float))
        total = 0.0
        for rad, zv, w in self._pairs():
            if self._in_band(rad, a, b, ia, ib):
                total += 2.0 * w * (1.0 - math.cos(float(xiv @ zv)))
        return total

    def _atoms(self, a, b, ia, ib, budget):
        if self.dim != 1:
            return None
        return [(rad, w) for rad, _, w in self._pairs()
                if self._in_band(rad, a, b, ia, ib)]


@dataclass(frozen=True)
class _DyadicFamily(LevyMeasure):
    """Atoms at radii 2^-k, k >= 1, with kind-specific pair weights."""

    def _pair_weight(self, k: int) -> float:
        raise NotImplementedError

    def _tail_second(self, k: int) -> float:
        """Sum over j > k of pair_weight(j) * 4^-j, in closed form."""
        raise NotImplementedError

    def _k_range(self, a, b, ia, ib, budget):
        """Explicit atom indices in the band, capped at `budget`; bands that
        reach radius zero also report an analytic tail flag."""
        ks = []
        for k in range(1, budget + 1):
            rad = 2.0 ** -k
            if rad > b or (rad == b and not ib):
                continue
            if rad < a or (rad == a and not ia):
                break
            ks.append(k)
        reaches_zero = a <= 0.0 or (a < 2.0 ** -budget)
        return ks, reaches_zero

    def _mass(self, a, b, ia, ib, budget):
        ks, reaches_zero = self._k_range(a, b, ia, ib, budget)
        if reaches_zero:
            return _INF
        return sum(self._pair_weight(k) for k in ks)

    def _second(self, a, b, ia, ib, budget):
        ks, reaches_zero = self._k_range(a, b, ia, ib, budget)
        out = sum(self._pair_weight(k) * 4.0 ** -k for k in ks)
        if reaches_zero:
            out += self._tail_second(budget)
        return out

    def _multiplier(self, xi, a, b, ia, ib, budget, tol):
        # remainder past the budget is below xi^2 * tail_second / 2
        ks, _ = self._k_range(a, b, ia, ib, budget)
        x = abs(float(np.atleast_1d(xi)[0]))
        return sum(self._pair_weight(k) * (1.0 - math.cos(x * 2.0 ** -k))
                   for k in ks)

    def _atoms(self, a, b, ia, ib, budget):
        ks, _ = self._k_range(a, b, ia, ib, budget)
        return [(2.0 ** -k, 0.5 * self._pair_weight(k)) for k in ks]


@dataclass(frozen=True)
class DyadicA(_DyadicFamily):
    """Pair weight 1 at every dyadic radius: infinite mass, moment 1/3, and a
    symbol that stays below (2/3)*pi^2 along xi = pi*2^n while growing like
    log2|xi| along generic rays."""

    def _pair_weight(self, k):
        return 1.0

    def _tail_second(self, k):
        return (4.0 ** -k) / 3.0


@dataclass(frozen=True)
class DyadicB(_DyadicFamily):
    """Pair weight 2^k: infinite mass, moment 1, coercive symbol, but with
    truncations whose symbols vanish at xi = pi*2^(n+1)."""

    def _pair_weight(self, k):
        return float(2 ** k)

    def _tail_second(self, k):
        return 2.0 ** -k


# ---------------------------------------------------------------------------
# generic radial density (one dimension)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class RadialDensity(LevyMeasure):
    """Density g(|z|) dz on the line; g >= 0 evaluable, integrability declared.

    `finite_mass` documents whether  int g  converges near 0; None means
    "decide by quadrature", which raises DivergentLevyMoment on failure.
    """

    g: Callable[[float], float] = None
    finite_mass: bool | None = None

    def _quad(self, f, a, b):
        import warnings
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", integrate.IntegrationWarning)
                v, e = integrate.quad(f, a, b, limit=200, epsabs=1e-12,
                                      epsrel=1e-10)
        except Exception as exc:  # pragma: no cover - scipy failure paths
            raise DivergentLevyMoment(str(exc)) from exc
        if not math.isfinite(v) or e > max(1e-8 * abs(v), 1e-9):
            raise DivergentLevyMoment(
                f"quadrature error {e:.2e} on [{a}, {b}]")
        return v

    def _mass(self, a, b, ia, ib, budget):
        if a <= 0.0 and self.finite_mass is False:
            return _INF
        if a <= 0.0 and self.finite_mass is None:
            # probe: if g blows up non-integrably this raises
            return 2.0 * self._quad(self.g, 0.0, min(b, 1.0)) + (
                2.0 * self._quad(self.g, 1.0, b) if b > 1.0 else 0.0)
        return 2.0 * self._quad(self.g, a, b)

    def _second(self, a, b, ia, ib, budget):
        return 2.0 * self._quad(lambda z: z * z * self.g(z), a, b)

    def _side_cell_mass(self, a, b, budget):
        return self._quad(self.g, a, b)

    def _multiplier(self, xi, a, b, ia, ib, budget, tol):
        return 2.0 * _oscillatory_band_integral(self.g, abs(float(xi)), a, b,
                                                mass_side=None, tol=tol)


# ---------------------------------------------------------------------------
# composites
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SumMeasure(LevyMeasure):
    parts: tuple = ()

    @property
    def dim(self) -> int:
        return self.parts[0].dim if self.parts else 1

    def validate(self) -> None:
        for p in self.parts:
            p.validate()

    def _apply(self, method, *args):
        vals = [getattr(p, method)(*args) for p in self.parts]
        return math.fsum(vals) if all(math.isfinite(v) for v in vals) else _INF

    def _mass(self, a, b, ia, ib, budget):
        return self._apply("mass_between", a, b, ia, ib, budget)

    def _second(self, a, b, ia, ib, budget):
        return self._apply("second_moment_between", a, b, ia, ib, budget)

    def _multiplier(self, xi, a, b, ia, ib, budget, tol):
        total = 0.0
        for p in self.parts:
            pa, pb, pia, pib = p._clip(a, b, ia, ib)
            if not p._band_empty(pa, pb, pia, pib):
                total += p._multiplier(xi, pa, pb, pia, pib, budget, tol)
        return total

    def _atoms(self, a, b, ia, ib, budget):
        out = []
        for p in self.parts:
            sub = p.atoms_between(a, b, ia, ib, budget)
            if sub is None:
                return None
            out.extend(sub)
        return out

    def leaves(self):
        for p in self.parts:
            for coef, leaf in p.leaves():
                yield coef, replace(leaf, lo=max(leaf.lo, self.lo),
                                    hi=min(leaf.hi, self.hi))


@dataclass(frozen=True)
class ScaledMeasure(LevyMeasure):
    factor: float = 1.0
    inner: LevyMeasure = None

    def __post_init__(self):
        if self.factor <= 0:
            raise ValueError("scale factor must be positive")

    @property
    def dim(self) -> int:
        return self.inner.dim

    def validate(self) -> None:
        self.inner.validate()

    def _mass(self, a, b, ia, ib, budget):
        return self.factor * self.inner.mass_between(a, b, ia, ib, budget)

    def _second(self, a, b, ia, ib, budget):
        return self.factor * self.inner.second_moment_between(a, b, ia, ib,
                                                              budget)

    def _multiplier(self, xi, a, b, ia, ib, budget, tol):
        pa, pb, pia, pib = self.inner._clip(a, b, ia, ib)
        if self.inner._band_empty(pa, pb, pia, pib):
            return 0.0
        return self.factor * self.inner._multiplier(xi, pa, pb, pia, pib,
                                                    budget, tol)

    def _atoms(self, a, b, ia, ib, budget):
        sub = self.inner.atoms_between(a, b, ia, ib, budget)
        if sub is None:
            return None
        return [(rad, self.factor * w) for rad, w in sub]

    def _side_cell_mass(self, a, b, budget):
        v = self.inner.side_cell_mass(a, b, budget)
        return None if v is None else self.factor * v

    def leaves(self):
        for coef, leaf in self.inner.leaves():
            yield self.factor * coef, replace(leaf, lo=max(leaf.lo, self.lo),
                                              hi=min(leaf.hi, self.hi))


# ---------------------------------------------------------------------------
# validation and distance
# ---------------------------------------------------------------------------

def validate_measure(measure: LevyMeasure, budget: int = 60) -> MomentReport:
    """Check structure and return the (|z|^2 ^ 1)-moment and total mass.

    Total mass may be inf (structural divergence).  A levy moment that fails
    to converge raises DivergentLevyMoment.
    """
    if budget < 1:
        raise ValueError("budget must be >= 1")
    measure.validate()
    moment = measure.levy_moment(budget=budget)
    if not math.isfinite(moment):
        raise DivergentLevyMoment("levy moment diverges")
    mass = measure.total_mass(budget=budget)
    return MomentReport(levy_moment=moment, total_mass=mass)


def truncate(measure: LevyMeasure, r: float, budget: int = 60):
    """Split at radius r: (inner second moment sigma^2,  outer part mu|{|z|>=r})."""
    if r <= 0:
        raise ValueError("truncation radius must be positive")
    return measure.truncated(r, budget=budget)


def _atom_dict(leaves, budget):
    """Radius -> total per-side weight for the purely atomic leaves."""
    out = {}
    for coef, leaf in leaves:
        atoms = leaf.atoms_between(budget=budget)
        if atoms is None:
            return None
        for rad, w in atoms:
            out[rad] = out.get(rad, 0.0) + coef * w
    # merge near-identical radii produced by different expressions
    merged = {}
    for rad in sorted(out):
        for seen in merged:
            if abs(seen - rad) <= 1e-12 * (1.0 + abs(seen)):
                merged[seen] += out[rad]
                break
        else:
            merged[rad] = out[rad]
    return merged


def _split_leaves(measure):
    atomic, continuous = [], []
    for coef, leaf in measure.leaves():
        if leaf.atoms_between(budget=4) is not None:
            atomic.append((coef, leaf))
        else:
            continuous.append((coef, leaf))
    return atomic, continuous


def weighted_tv_distance(mu1: LevyMeasure, mu2: LevyMeasure,
                         budget: int = 60) -> float:
    """Integral of (|z|^2 ^ 1) against the total variation |mu1 - mu2|.

    Atomic and absolutely continuous parts are mutually singular, so the
    distance splits cleanly.  Continuous parts are compared in closed form
    when they share a power law, by quadrature otherwise.
    """
    if mu1.dim != mu2.dim:
        raise UnsupportedPair("dimension mismatch")
    a1, c1 = _split_leaves(mu1)
    a2, c2 = _split_leaves(mu2)
    total = 0.0

    d1 = _atom_dict(a1, budget)
    d2 = _atom_dict(a2, budget)
    if d1 is None or d2 is None:
        raise UnsupportedPair("atoms in dimension > 1 are not comparable")
    for rad in set(d1) | set(d2):
        w1 = _lookup(d1, rad)
        w2 = _lookup(d2, rad)
        total += min(rad * rad, 1.0) * 2.0 * abs(w1 - w2)

    if not c1 and not c2:
        return total
    total += _continuous_tv(c1, c2, budget)
    return total


def _lookup(d, rad):
    if rad in d:
        return d[rad]
    for seen, w in d.items():
        if abs(seen - rad) <= 1e-12 * (1.0 + abs(seen)):
            return w
    return 0.0


def _continuous_tv(c1, c2, budget):
    if all(isinstance(leaf, FractionalRadial) for _, leaf in c1 + c2):
        params1 = {(leaf.alpha, leaf.ndim) for _, leaf in c1}
        params2 = {(leaf.alpha, leaf.ndim) for _, leaf in c2}
        if len(params1 | params2) == 1 and len(c1) <= 1 and len(c2) <= 1:
            # same power law: |c1 1_W1 - c2 1_W2| is piecewise a power law
            (k1, l1) = (c1[0][0] * c1[0][1].coeff, c1[0][1]) if c1 else (0.0, None)
            (k2, l2) = (c2[0][0] * c2[0][1].coeff, c2[0][1]) if c2 else (0.0, None)
            base = l1 or l2
            unit = replace(base, coeff=1.0, lo=0.0, hi=_INF)
            edges = sorted({0.0, 1.0,
                            *( [l1.lo, l1.hi] if l1 else [] ),
                            *( [l2.lo, l2.hi] if l2 else [] ), _INF})
            total = 0.0
            for a, b in zip(edges[:-1], edges[1:]):
                if b <= a:
                    continue
                w1 = k1 if (l1 and l1.lo <= a and b <= l1.hi) else 0.0
                w2 = k2 if (l2 and l2.lo <= a and b <= l2.hi) else 0.0
                diff = abs(w1 - w2)
                if diff > 0.0:
                    total += diff * unit.levy_moment_between(a, b)
            return total
    # generic path: quadrature of the absolute density difference (dim 1)
    for _, leaf in c1 + c2:
        if leaf.dim != 1:
            raise UnsupportedPair("continuous parts only comparable in 1-d")

    def density(parts):
        def g(z):
            val = 0.0
            for coef, leaf in parts:
                if leaf.lo <= z <= leaf.hi:
                    if isinstance(leaf, FractionalRadial):
                        val += coef * leaf.coeff * z ** (-1.0 - leaf.alpha)
                    elif isinstance(leaf, RadialDensity):
                        val += coef * leaf.g(z)
                    else:
                        raise UnsupportedPair(
                            f"cannot evaluate density of {type(leaf).__name__}")
            return val
        return g

    g1, g2 = density(c1), density(c2)
    edges = sorted({1.0, *[leaf.lo for _, leaf in c1 + c2],
                    *[leaf.hi for _, leaf in c1 + c2 if leaf.hi < _INF]})
    edges = [e for e in edges if e > 0.0]
    total = 0.0
    prev = 0.0
    for e in edges + [_INF]:
        if e <= prev:
            continue
        f = lambda z: min(z * z, 1.0) * abs(g1(z) - g2(z))
        v, err = integrate.quad(f, prev, e, limit=400, epsabs=1e-12,
                                epsrel=1e-9)
        total += 2.0 * v
        prev = e
    return total


# ---------------------------------------------------------------------------
# presets and config ingestion
# ---------------------------------------------------------------------------

def zero_measure() -> AtomicSymmetric:
    return AtomicSymmetric(entries=())


def single_atom(z: float = 0.5, w: float = 0.5) -> AtomicSymmetric:
    return AtomicSymmetric(entries=((z, w),))


MEASURE_PRESETS = {
    "none": zero_measure,
    "single_atom": single_atom,
    "dyadic_a": DyadicA,
    "dyadic_b": DyadicB,
    "fractional": FractionalRadial,
}


def measure_from_config(cfg) -> LevyMeasure:
    """Build a measure from a config mapping {kind: ..., <params>}."""
    if isinstance(cfg, str):
        if cfg not in MEASURE_PRESETS:
            raise UnknownPreset(f"unknown measure preset {cfg!r}")
        return MEASURE_PRESETS[cfg]()
    kind = cfg.get("kind")
    window = {k: float(cfg[k]) for k in ("lo", "hi") if k in cfg}
    if kind == "none":
        return zero_measure()
    if kind == "single_atom":
        return single_atom(float(cfg.get("z", 0.5)), float(cfg.get("w", 0.5)))
    if kind == "atoms":
        entries = tuple((float(z), float(w)) for z, w in cfg["entries"])
        return AtomicSymmetric(entries=entries, **window)
    if kind == "dyadic_a":
        return DyadicA(**window)
    if kind == "dyadic_b":
        return DyadicB(**window)
    if kind == "fractional":
        return FractionalRadial(alpha=float(cfg.get("alpha", 1.0)),
                                coeff=float(cfg.get("coeff", 1.0)),
                                ndim=int(cfg.get("dim", 1)), **window)
    if kind == "scaled":
        return ScaledMeasure(factor=float(cfg["factor"]),
                             inner=measure_from_config(cfg["inner"]), **window)
    if kind == "sum":
        return SumMeasure(parts=tuple(measure_from_config(p)
                                      for p in cfg["parts"]), **window)
    raise UnknownPreset(f"unknown measure kind {kind!r}")
