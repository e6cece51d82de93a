"""Discrete jump operators: nonnegative shift weights plus a tail mass.

A stencil realizes the splitting of a jump operator into
  * cell weights for jumps with r <= |z| <= Z (midpoint-labeled, half-open
    cells, each intersected with the band so the band is partitioned exactly),
  * a nearest-neighbor diffusion surrogate for the small jumps |z| < r,
    carrying their second moment sigma^2,
  * a lumped tail mass tau = mu({|z| > Z}).
All weights are nonnegative and mirror-symmetric, so the resulting operator
is monotone.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import BadRadii, HaloTooSmall, ShapeMismatch
from .measures import LevyMeasure
from .multiplier import MultiplierEval


@dataclass(frozen=True)
class StencilWeights:
    dx: float
    r: float
    Z: float
    offsets: np.ndarray      # positive cell offsets, ascending
    weights: np.ndarray      # per offset; the mirrored weight is implied
    sigma2: float            # second moment carried by the surrogate
    tau: float               # mass beyond Z

    @property
    def max_offset(self) -> int:
        return int(self.offsets[-1]) if self.offsets.size else 0

    @property
    def weight_sum(self) -> float:
        """Sum over all offsets j != 0 (both signs)."""
        return 2.0 * float(self.weights.sum())

    def symbol(self, xi) -> np.ndarray:
        """Symbol of the shift part: sum_j w_j (1 - cos(xi j dx))."""
        xi = np.asarray(xi, dtype=float)
        shifts = self.offsets * self.dx
        return 2.0 * np.sum(
            self.weights * (1.0 - np.cos(np.multiply.outer(xi, shifts))),
            axis=-1)

    def dump_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write("offset,weight\n")
            for j, w in zip(self.offsets, self.weights):
                fh.write(f"{-int(j)},{float(w)!r}\n")
            for j, w in zip(self.offsets, self.weights):
                fh.write(f"{int(j)},{float(w)!r}\n")


def build_stencil(measure: LevyMeasure, dx: float, r: float, Z: float,
                  budget: int = 60) -> StencilWeights:
    """Discretize a measure into shift weights on a grid of spacing dx.

    Requires 0 < dx <= r <= Z.  Z is snapped to the nearest multiple of dx.
    Atoms are assigned to the half-open cell containing them (mirrored pairs
    are binned by their positive representative, preserving symmetry exactly);
    continuous kinds contribute the closed-form or quadrature mass of each
    cell intersected with [r, Z].
    """
    if not (0.0 < dx <= r <= Z):
        raise BadRadii(f"need 0 < dx <= r <= Z, got dx={dx}, r={r}, Z={Z}")
    if measure.dim != 1:
        raise NotImplementedError("stencils are built in one dimension")
    K = max(1, int(round(Z / dx)))
    Z_eff = K * dx
    weights = np.zeros(K)

    for coef, leaf in measure.leaves():
        atoms = leaf.atoms_between(r, Z_eff, include_a=True, include_b=True,
                                   budget=budget)
        if atoms is not None:
            for rad, w in atoms:
                j = int(round(rad / dx))
                j = min(max(j, 1), K)
                weights[j - 1] += coef * w
        else:
            for j in range(1, K + 1):
                a = max((j - 0.5) * dx, r)
                b = min((j + 0.5) * dx, Z_eff)
                if b > a:
                    m = leaf.side_cell_mass(a, b, budget=budget)
                    if m is None:
                        raise NotImplementedError(
                            f"no cell masses for {type(leaf).__name__}")
                    weights[j - 1] += coef * m

    sigma2 = measure.second_moment_below(r, budget=budget)
    weights[0] += sigma2 / (2.0 * dx * dx)
    tau = measure.mass_above(Z_eff, budget=budget)
    return StencilWeights(dx=dx, r=r, Z=Z_eff,
                          offsets=np.arange(1, K + 1),
                          weights=weights, sigma2=sigma2, tau=tau)


def apply_stencil(values: np.ndarray, s: StencilWeights, n_halo: int,
                  tail_value: float = 0.0, exterior=None) -> np.ndarray:
    """Apply the discrete operator on interior cells.

    `values` covers interior plus `n_halo` halo cells per side (shifts act on
    the last axis).  Shifts leaving the stored halo read `exterior`, an array
    of `max_offset - n_halo` extension cells per side; without it the call
    fails.  Returns sum_j w_j (v(x + j dx) - v(x)) + tau (tail_value - v(x)).

    Increments are accumulated per offset in ascending order, so constants map
    to exactly zero.
    """
    J = s.max_offset
    if n_halo < J:
        if exterior is None:
            raise HaloTooSmall(
                f"halo {n_halo} < stencil reach {J} and no extension given")
        left, right = exterior
        pad = J - n_halo
        if np.shape(left)[-1] != pad or np.shape(right)[-1] != pad:
            raise ShapeMismatch("extension width must be max_offset - n_halo")
        values = np.concatenate([left, values, right], axis=-1)
        n_halo = J
    n_int = values.shape[-1] - 2 * n_halo
    if n_int <= 0:
        raise ShapeMismatch("no interior cells")
    c0 = n_halo
    center = values[..., c0:c0 + n_int]
    out = np.zeros_like(center)
    for j, w in zip(s.offsets, s.weights):
        if w == 0.0:
            continue
        plus = values[..., c0 + j:c0 + j + n_int]
        minus = values[..., c0 - j:c0 - j + n_int]
        out += w * ((plus - center) + (minus - center))
    if s.tau != 0.0:
        out += s.tau * (tail_value - center)
    return out


def bilinear_energy(phi: np.ndarray, psi: np.ndarray,
                    s: StencilWeights, dx: float | None = None) -> float:
    """Discrete energy form: dx * sum_x sum_j (w_j/2) dphi_j(x) dpsi_j(x).

    The arrays are the consistently extended samples (zero- or exterior-
    extended by the caller); increments are taken over index pairs that both
    lie inside, so a constant array has energy exactly zero and the form
    vanishes precisely on fields constant per stencil-connected component.
    Leading axes (e.g. time) are summed as a batch.  Symmetric in (phi, psi)
    and nonnegative on the diagonal.
    """
    phi = np.asarray(phi, dtype=float)
    psi = np.asarray(psi, dtype=float)
    if phi.shape != psi.shape:
        raise ShapeMismatch(f"{phi.shape} vs {psi.shape}")
    if dx is None:
        dx = s.dx
    total = 0.0
    n = phi.shape[-1]
    for j, w in zip(s.offsets, s.weights):
        if w == 0.0 or j >= n:
            continue
        dp = phi[..., j:] - phi[..., :n - j]
        dq = psi[..., j:] - psi[..., :n - j]
        # both signs of the shift contribute the same sum: 2 * (w/2) = w
        total += w * float(np.sum(dp * dq))
    return dx * total


def fourier_energy_check(phi: np.ndarray, dx: float, ev: MultiplierEval,
                         s: StencilWeights) -> dict:
    """Cross-check the energy form against its Fourier-side expression.

    lhs: direct double sum through the stencil.  rhs: (2 pi)^-1 times the
    symbol-weighted power spectrum, with the transform normalized as
    phi_hat(xi) = int phi e^(-i xi x) dx and xi on the DFT frequencies.
    Non-power-of-two sizes are handled by the same FFT and only flagged.
    """
    phi = np.asarray(phi, dtype=float)
    n = phi.shape[-1]
    lhs = bilinear_energy(phi, phi, s, dx)
    xi = 2.0 * np.pi * np.fft.fftfreq(n, d=dx)
    power = np.abs(np.fft.fft(phi)) ** 2
    mvals = ev.m_many(xi)
    rhs = (dx / n) * float(np.sum(mvals * power))
    denom = max(abs(lhs), abs(rhs), 1e-300)
    return {
        "lhs": lhs,
        "rhs": rhs,
        "rel_err": abs(lhs - rhs) / denom,
        "fft_pow2": n & (n - 1) == 0,
    }
