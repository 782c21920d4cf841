"""Order-8 spectral filter and the postprocessing pipeline.

The filter multiplies sine coefficient k of the (shifted, odd-extended)
field by sigma(kappa * k / N).  The stretching factor kappa moves the
effective cutoff down to the linearly stable band: with kappa >= kappa_c
every mode the filter retains satisfies the two-step scheme's per-mode
stability condition, so time steps far beyond dt = h^2/3 become usable.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field
from typing import Callable

import numpy as np
from scipy.fft import dst, idst

from .core import Field, ReactionSystem
from .shift import (
    ShiftCoeffs1,
    ShiftCoeffs3,
    shift1,
    shift1_values,
    shift3,
    unshift,
    unshift_values,
)

RETAIN_TOL = 1.0e-12


def sigma8(xi) -> np.ndarray | float:
    """Eighth-order filter: (35 - 84y + 70y^2 - 20y^3) y^4, y = (1 + cos(pi xi))/2,
    zero outside |xi| < 1.  Even, C^7, unit value and 7 vanishing derivatives at 0."""
    xi = np.asarray(xi, dtype=float)
    y = 0.5 * (1.0 + np.cos(np.pi * np.clip(np.abs(xi), 0.0, 1.0)))
    val = (35.0 - 84.0 * y + 70.0 * y**2 - 20.0 * y**3) * y**4
    out = np.where(np.abs(xi) >= 1.0, 0.0, val)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class FilterSpec:
    kappa: float
    order: int = 8
    sigma: Callable = dc_field(default=sigma8, repr=False)

    def with_kappa(self, kappa: float) -> "FilterSpec":
        return FilterSpec(kappa=kappa, order=self.order, sigma=self.sigma)


def kappa_critical(dt: float, h: float) -> float:
    """Critical stretching factor: the filter cutoff k = N/kappa_c sits exactly
    at the stability boundary of the unfiltered scheme.  Below dt = h^2/3 no
    mode is unstable and no stretching is needed."""
    if dt <= 0.0 or h <= 0.0:
        raise ValueError("dt and h must be positive")
    arg = 1.0 - 2.0 * h**2 / (3.0 * dt)
    if arg <= -1.0:  # dt <= h^2/3: every mode already stable
        return 1.0
    return np.pi / np.arccos(arg)


def sine_coefficients(values: np.ndarray) -> np.ndarray:
    """Sine-series coefficients b_k (k = 1..N-1) of the odd extension of
    (N+1, m) values with zero endpoints; DST-I of the interior values."""
    n = values.shape[0] - 1
    return dst(values[1:-1], type=1, axis=0) / n


def sine_reconstruct(coeffs: np.ndarray) -> np.ndarray:
    """Evaluate a sine series at the grid nodes; endpoints are exactly zero."""
    n = coeffs.shape[0] + 1
    out = np.zeros((n + 1,) + coeffs.shape[1:])
    out[1:-1] = idst(coeffs * n, type=1, axis=0)
    return out


def filter_factors(n_intervals: int, spec: FilterSpec) -> np.ndarray:
    k = np.arange(1, n_intervals)
    return spec.sigma(spec.kappa * k / n_intervals)


def apply_filter_values(values: np.ndarray, spec: FilterSpec) -> np.ndarray:
    """Filter raw (N+1, m) values with zero endpoints in place of a Field."""
    end = max(float(np.max(np.abs(values[0]))), float(np.max(np.abs(values[-1]))))
    if end > RETAIN_TOL:
        raise ValueError(f"apply_filter needs shifted input (endpoints {end:.3e})")
    n = values.shape[0] - 1
    factors = filter_factors(n, spec)
    coeffs = sine_coefficients(values) * factors.reshape((-1,) + (1,) * (values.ndim - 1))
    return sine_reconstruct(coeffs)


def apply_filter(v: Field, spec: FilterSpec) -> Field:
    return v.with_values(apply_filter_values(v.values, spec))


def filter_boundary_trace(samples: np.ndarray, spec: FilterSpec) -> np.ndarray:
    """Filter a 1D boundary trace: shift, filter, unshift.  Endpoint values of
    the trace are reproduced exactly (the filtered part is a pure sine series)."""
    samples = np.asarray(samples, dtype=float)
    squeeze = samples.ndim == 1
    vals = samples[:, np.newaxis] if squeeze else samples
    x = np.linspace(0.0, np.pi, vals.shape[0])
    v, alpha = shift1_values(vals, x)
    v[0] = 0.0
    v[-1] = 0.0
    filtered = apply_filter_values(v, spec)
    out = unshift_values(filtered, alpha, x)
    out[0] = vals[0]
    out[-1] = vals[-1]
    return out[:, 0] if squeeze else out


class KappaMonitor:
    """Optional per-step kappa adaptation.

    Watches the energy in the top quarter of the retained sine modes; if it
    grows by more than ``growth_threshold`` two steps in a row, kappa is
    increased by ``bump_factor`` (thresholds are ours; the method only says
    the optimum can be found by monitoring high-frequency growth).
    """

    def __init__(self, kappa: float, growth_threshold: float = 1.05,
                 bump_factor: float = 1.10, consecutive: int = 2):
        self.kappa = float(kappa)
        self.growth_threshold = growth_threshold
        self.bump_factor = bump_factor
        self.consecutive = consecutive
        self._prev_energy: float | None = None
        self._streak = 0

    def observe(self, coeffs: np.ndarray, n_intervals: int,
                sigma: Callable = sigma8) -> float:
        factors = sigma(self.kappa * np.arange(1, n_intervals) / n_intervals)
        retained = np.nonzero(factors > RETAIN_TOL)[0]
        if retained.size:
            k_max = retained[-1] + 1
            lo = max(1, int(np.ceil(0.75 * k_max)))
            band = coeffs[lo - 1:k_max]
            energy = float(np.sum(band * band))
        else:
            energy = 0.0
        if self._prev_energy is not None and self._prev_energy > 0.0 \
                and energy > self.growth_threshold * self._prev_energy:
            self._streak += 1
        else:
            self._streak = 0
        if self._streak >= self.consecutive:
            self.kappa *= self.bump_factor
            self._streak = 0
        self._prev_energy = energy
        return self.kappa


def postprocess_field(u: Field, spec: FilterSpec, shift_order: int = 1,
                      history: tuple[Field, Field] | None = None,
                      reaction: ReactionSystem | None = None,
                      dt: float | None = None, t_next: float | None = None,
                      monitor: KappaMonitor | None = None) -> Field:
    """Full single-domain postprocess: shift, filter, inverse shift.

    ``shift_order`` 3 needs the two history levels plus the reaction and time
    step so the endpoint second derivatives can be estimated from the scheme.
    """
    if shift_order == 1:
        v, coeffs = shift1(u)
    elif shift_order == 3:
        if history is None or reaction is None or dt is None or t_next is None:
            raise ValueError("shift_order=3 needs history, reaction, dt and t_next")
        v, coeffs = shift3(u, history[0], history[1], reaction, dt, t_next)
    else:
        raise ValueError(f"shift_order must be 1 or 3, got {shift_order}")
    vals = v.values.copy()
    vals[0] = 0.0
    vals[-1] = 0.0
    if monitor is not None:
        b = sine_coefficients(vals)
        kappa = monitor.observe(b, u.grid.n_intervals, spec.sigma)
        spec = spec.with_kappa(kappa)
    filtered = v.with_values(apply_filter_values(vals, spec))
    return unshift(filtered, coeffs)
