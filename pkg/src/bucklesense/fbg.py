"""Curvature -> strain -> Bragg wavelength shift for the fiber gratings."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import ConfigError, InvalidInputError, NumericalError
from .quadrature import hermite_trapezoid

# coefficient after gluing (pm / microstrain); the bare fiber is 1.2
K_EPS_GLUED = 0.424
K_EPS_PRISTINE = 1.2
S_T = 10.0  # pm / degC

AGREEMENT_TOL = 1e-9

Span = Tuple[float, float]


@dataclass(frozen=True)
class GratingLayout:
    """Arc-length spans of the gratings ("peaks") and their coefficients.

    Spans are measured from the clamped end in metres.
    """

    peaks: Tuple[Span, ...]
    dy_fbg: float
    k_eps: float = K_EPS_GLUED
    s_T: float = S_T

    def __post_init__(self):
        peaks = tuple((float(a), float(b)) for a, b in self.peaks)
        object.__setattr__(self, "peaks", peaks)
        if not (math.isfinite(self.k_eps) and self.k_eps > 0):
            raise ConfigError("layout.k_eps", f"strain coefficient must be positive, got {self.k_eps!r}")
        if not math.isfinite(self.dy_fbg):
            raise ConfigError("layout.dy_fbg", "fiber offset must be finite")
        prev = -math.inf
        for i, (a, b) in enumerate(peaks):
            if not (0.0 <= a < b):
                raise ConfigError(f"layout.peaks[{i}]", f"span ({a}, {b}) must satisfy 0 <= start < end")
            if a < prev:
                raise ConfigError(f"layout.peaks[{i}]", "spans must be increasing and non-overlapping")
            prev = b

    @classmethod
    def evenly_spaced(cls, dy_fbg, first_offset=6e-3, pitch=8e-3, grating_length=5e-3, count=3,
                      k_eps=K_EPS_GLUED, s_T=S_T):
        peaks = tuple((first_offset + i * pitch, first_offset + i * pitch + grating_length) for i in range(count))
        return cls(peaks, dy_fbg, k_eps, s_T)

    @property
    def count(self) -> int:
        return len(self.peaks)

    def check_within(self, length: float):
        for i, (a, b) in enumerate(self.peaks):
            if b > length * (1 + 1e-12):
                raise InvalidInputError(f"peak {i + 1} span ({a}, {b}) exceeds beam length {length}")


def strain_field(sol, dy_fbg: float) -> np.ndarray:
    """Fiber strain dy_fbg * dtheta/ds at each grid point."""
    return dy_fbg * np.asarray(sol.curvature)


def _check_span(sol, span):
    s1, s2 = span
    if not (0.0 <= s1 < s2 <= sol.length * (1 + 1e-12)):
        raise InvalidInputError(f"span ({s1}, {s2}) not inside [0, {sol.length}]")
    return s1, min(s2, sol.length)


def average_strain_quadrature(sol, span: Span, dy_fbg: float) -> float:
    """Span-mean strain by composite quadrature of the curvature samples."""
    s1, s2 = _check_span(sol, span)
    s = np.asarray(sol.s)
    inside = (s > s1) & (s < s2)
    nodes = np.concatenate([[s1], s[inside], [s2]])
    f = np.concatenate([[sol.curvature_at(s1)], np.asarray(sol.curvature)[inside], [sol.curvature_at(s2)]])
    df = np.concatenate([[sol.curvature_slope_at(s1)], np.asarray(sol.curvature_slope)[inside],
                         [sol.curvature_slope_at(s2)]])
    return dy_fbg * hermite_trapezoid(nodes, f, df) / (s2 - s1)


def average_strain_closed(sol, span: Span, dy_fbg: float) -> float:
    """Span-mean strain from the slope difference dy (theta(s2) - theta(s1)) / (s2 - s1)."""
    s1, s2 = _check_span(sol, span)
    return dy_fbg * float(sol.theta_at(s2) - sol.theta_at(s1)) / (s2 - s1)


def average_strain(sol, span: Span, dy_fbg: float, tol: float = AGREEMENT_TOL) -> float:
    """Span-mean strain; both evaluation routes must agree within ``tol``."""
    q = average_strain_quadrature(sol, span, dy_fbg)
    c = average_strain_closed(sol, span, dy_fbg)
    if abs(q - c) > tol:
        raise NumericalError(f"average strain routes disagree: {q!r} vs {c!r}")
    return q


def peak_strains(sol, layout: GratingLayout) -> np.ndarray:
    layout.check_within(sol.length)
    return np.array([average_strain(sol, span, layout.dy_fbg) for span in layout.peaks])


def wavelength_shift(eps, layout: GratingLayout, dT=0.0):
    """Bragg shift in pm: k_eps * (strain in microstrain) + s_T * dT."""
    return layout.k_eps * (np.asarray(eps) * 1e6) + layout.s_T * dT


def strain_from_wavelength(d_lambda, layout: GratingLayout):
    """Inverse of :func:`wavelength_shift` at constant temperature."""
    if layout.k_eps == 0:
        raise ConfigError("layout.k_eps", "cannot invert a zero strain coefficient")
    return np.asarray(d_lambda) / layout.k_eps * 1e-6
