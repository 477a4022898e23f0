"""Fixed-pinned post-buckling elastica.

The column is clamped at s = 0 and pinned at s = L. With t = s sqrt(R/EI),
eta = y sqrt(R/EI) and kappa = P/R the moment balance becomes

    theta'' + kappa sin(theta) + cos(theta) = 0,    eta' = sin(theta)

with theta(0) = 0, theta'(t_end) = 0 and eta(t_end) = 0. For a given kappa the
unknown initial slope theta'(0) is found by shooting. The pinned end is the
first point where theta' returns to zero from below (the clamped end starts
with theta' > 0, so theta' first vanishes at the crest of the slope profile).
"""
from __future__ import annotations

import functools
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.interpolate import CubicHermiteSpline
from scipy.optimize import brentq

from . import _rk4
from .errors import DivergenceError, InvalidInputError, NoBuckledSolutionError, RangeError
from .quadrature import hermite_trapezoid
from .section import BeamSpec

log = logging.getLogger(__name__)


@functools.lru_cache(maxsize=None)
def critical_load_factor() -> float:
    """mu^2 with mu the smallest positive root of tan(mu) = mu (about 20.19)."""
    mu = brentq(lambda m: math.sin(m) - m * math.cos(m), math.pi, 1.5 * math.pi, xtol=1e-15)
    return mu * mu


def _linear_t_end(kappa: float) -> float:
    # small-amplitude span: sqrt(kappa) * t_end = mu
    return math.sqrt(critical_load_factor() / kappa)


@dataclass(frozen=True)
class SolverConfig:
    """Shooting parameters.

    ``n_steps`` sets the RK4 step as a fraction of the small-amplitude span
    estimate, so the step scales with the solution across kappa.
    """

    n_steps: int = 2000
    slope_bracket: Tuple[float, float] = (1e-4, 2.0)
    bracket_growth: float = 1.5
    max_expand: int = 40
    t_cap_factor: float = 8.0
    kappa_floor: float = 1.0

    def step(self, kappa: float) -> float:
        return _linear_t_end(kappa) / self.n_steps


DEFAULT_SOLVER = SolverConfig()


def default_kappa_grid(kappa_min=2.0, kappa_max=500.0, count=64) -> np.ndarray:
    return np.geomspace(kappa_min, kappa_max, count)


@dataclass(frozen=True, eq=False)
class NormalizedSolution:
    kappa: float
    slope0: float
    t_end: float
    t_samples: np.ndarray
    theta_samples: np.ndarray
    omega_samples: np.ndarray
    eta_samples: np.ndarray
    zeta_samples: np.ndarray

    @property
    def end_shortening_ratio(self) -> float:
        """(L - x(L)) / L, independent of the beam."""
        return float(self.zeta_samples[-1] / self.t_end)

    @property
    def load_factor(self) -> float:
        """P L^2 / EI = kappa t_end^2."""
        return self.kappa * self.t_end**2

    def boundary_residuals(self) -> Tuple[float, float, float]:
        return (
            abs(float(self.theta_samples[0])),
            abs(float(self.omega_samples[-1])),
            abs(float(self.eta_samples[-1])),
        )


def _shoot(kappa, slope0, h, t_cap):
    found, t_end, th, w, eta, zeta = _rk4.shoot(kappa, slope0, h, t_cap)
    return found, t_end, eta


@functools.lru_cache(maxsize=4096)
def solve_normalized(kappa: float, cfg: SolverConfig = DEFAULT_SOLVER) -> NormalizedSolution:
    """Shoot on theta'(0) until eta(t_end) = 0 for the given load ratio."""
    kappa = float(kappa)
    if not (math.isfinite(kappa) and kappa > 0):
        raise InvalidInputError(f"kappa must be positive and finite, got {kappa!r}")
    h = cfg.step(kappa)
    t_cap = cfg.t_cap_factor * _linear_t_end(kappa)

    def resid(s0):
        found, _, eta = _shoot(kappa, s0, h, t_cap)
        if not found:
            raise DivergenceError(f"no pinned-end event before t = {t_cap:.6g} (kappa={kappa}, slope0={s0})")
        return eta

    lo, hi = cfg.slope_bracket
    f_lo = resid(lo)
    n = 0
    while f_lo >= 0.0:
        if n >= cfg.max_expand:
            raise NoBuckledSolutionError(f"eta(t_end) >= 0 down to slope0={lo:.3g} (kappa={kappa})")
        lo /= 10.0
        f_lo = resid(lo)
        n += 1

    # above the whirling threshold the event disappears; pull hi back first
    n = 0
    while True:
        found, _, f_hi = _shoot(kappa, hi, h, t_cap)
        if found:
            break
        if n >= cfg.max_expand:
            raise NoBuckledSolutionError(f"no terminal event anywhere above slope0={lo:.3g} (kappa={kappa})")
        hi = 0.5 * (lo + hi)
        n += 1
    n = 0
    while f_hi <= 0.0:
        if n >= cfg.max_expand:
            raise NoBuckledSolutionError(f"no sign change of eta(t_end) in slope0 bracket (kappa={kappa})")
        lo, f_lo = hi, f_hi
        hi *= cfg.bracket_growth
        found, _, f_hi = _shoot(kappa, hi, h, t_cap)
        if not found:
            raise NoBuckledSolutionError(
                f"kappa={kappa} lies outside the buckled branch: slope0 reaches whirling before eta(t_end)=0"
            )
        n += 1

    slope0 = brentq(resid, lo, hi, xtol=1e-16, rtol=4 * np.finfo(float).eps, maxiter=200)
    found, t_end, _ = _shoot(kappa, slope0, h, t_cap)
    if not found:
        raise DivergenceError(f"converged slope0 lost the terminal event (kappa={kappa})")

    n_uniform = max(16, math.ceil(t_end / h))
    n_uniform += n_uniform % 2
    traj = _rk4.trajectory(kappa, slope0, t_end / n_uniform, n_uniform)
    t = np.linspace(0.0, t_end, n_uniform + 1)
    cols = [t] + [np.ascontiguousarray(traj[:, j]) for j in range(4)]
    for c in cols:
        c.flags.writeable = False
    return NormalizedSolution(kappa, float(slope0), float(t_end), *cols)


@dataclass(frozen=True, eq=False)
class PostBuckleSolution:
    """Dimensional buckled configuration sampled along the arc."""

    beam: BeamSpec
    kappa: float
    P: float
    R: float
    s: np.ndarray
    theta: np.ndarray
    curvature: np.ndarray
    x: np.ndarray
    y: np.ndarray
    curvature_slope: Optional[np.ndarray] = None
    end_shortening: float = field(init=False)

    def __post_init__(self):
        if self.curvature_slope is None:
            object.__setattr__(self, "curvature_slope", np.gradient(self.curvature, self.s))
        object.__setattr__(self, "end_shortening", end_shortening(self))

    @classmethod
    def from_profile(cls, beam, s, theta, curvature, P=0.0, R=0.0, kappa=math.inf):
        """Build a solution from an arbitrary slope profile (synthetic shapes)."""
        from scipy.integrate import cumulative_trapezoid

        s = np.asarray(s, dtype=float)
        theta = np.asarray(theta, dtype=float)
        x = cumulative_trapezoid(np.cos(theta), s, initial=0.0)
        y = cumulative_trapezoid(np.sin(theta), s, initial=0.0)
        return cls(beam, kappa, P, R, s, theta, np.asarray(curvature, dtype=float), x, y)

    @property
    def length(self) -> float:
        return float(self.s[-1])

    @cached_property
    def _theta_spline(self):
        return CubicHermiteSpline(self.s, self.theta, self.curvature)

    @cached_property
    def _curvature_spline(self):
        return CubicHermiteSpline(self.s, self.curvature, self.curvature_slope)

    def theta_at(self, s):
        return self._theta_spline(s)

    def curvature_at(self, s):
        return self._curvature_spline(s)

    def curvature_slope_at(self, s):
        return self._curvature_spline(s, 1)


def denormalize(norm: NormalizedSolution, beam: BeamSpec) -> PostBuckleSolution:
    """Recover forces and the dimensional shape.

    R = EI (t_end / L)^2 and P = kappa R. The arc maps as s = t L / t_end.
    """
    scale = norm.t_end / beam.length
    R = beam.EI * scale**2
    P = norm.kappa * R
    s = norm.t_samples / scale
    s[-1] = beam.length
    theta = np.array(norm.theta_samples)
    curvature = norm.omega_samples * scale
    theta_tt = -norm.kappa * np.sin(theta) - np.cos(theta)
    x = s - norm.zeta_samples / scale
    y = norm.eta_samples / scale
    return PostBuckleSolution(beam, norm.kappa, P, R, s, theta, curvature, x, y, theta_tt * scale**2)


def end_shortening(sol: PostBuckleSolution) -> float:
    """L - integral of cos(theta) ds, integrated as 2 sin^2(theta/2)."""
    theta = np.asarray(sol.theta)
    f = 2.0 * np.sin(0.5 * theta) ** 2
    df = np.sin(theta) * np.asarray(sol.curvature)
    return hermite_trapezoid(sol.s, f, df)


def solve(beam: BeamSpec, kappa: float, cfg: SolverConfig = DEFAULT_SOLVER) -> PostBuckleSolution:
    return denormalize(solve_normalized(float(kappa), cfg), beam)


def solve_at_end_shortening(beam: BeamSpec, shortening: float, cfg: SolverConfig = DEFAULT_SOLVER,
                            kappa_guess: Optional[float] = None) -> PostBuckleSolution:
    """Buckled configuration whose end-shortening equals ``shortening``.

    Inverts the monotone map kappa -> (L - x(L))/L on the branch
    kappa >= kappa_floor. ``kappa_guess`` narrows the initial bracket when
    stepping along the branch.
    """
    if not (math.isfinite(shortening) and shortening > 0):
        raise InvalidInputError(f"end-shortening must be positive, got {shortening!r}")
    target = shortening / beam.length
    upper = solve_normalized(cfg.kappa_floor, cfg).end_shortening_ratio
    if target > upper:
        raise RangeError(shortening, upper * beam.length, f"end-shortening {shortening!r} beyond branch limit")

    def g(u):
        return math.log(solve_normalized(math.exp(u), cfg).end_shortening_ratio) - math.log(target)

    u_floor = math.log(cfg.kappa_floor)
    if kappa_guess is not None:
        u0, width = math.log(kappa_guess), 0.05
    else:
        # small-amplitude asymptote (L - x(L))/L ~ 5.05 / kappa^2
        u0, width = 0.5 * math.log(5.05 / target), 0.5
    lo, hi = max(u0 - width, u_floor), u0 + width
    g_lo, g_hi = g(lo), g(hi)
    while g_lo < 0.0:
        if lo <= u_floor:
            # target equals the floor ratio up to round-off
            return solve(beam, cfg.kappa_floor, cfg)
        hi, g_hi = lo, g_lo
        width *= 2.0
        lo = max(lo - width, u_floor)
        g_lo = g(lo)
    while g_hi > 0.0:
        lo, g_lo = hi, g_hi
        width *= 2.0
        hi += width
        g_hi = g(hi)
    u = brentq(g, lo, hi, xtol=1e-14, rtol=4 * np.finfo(float).eps)
    return solve(beam, math.exp(u), cfg)


@dataclass(frozen=True, eq=False)
class ForceCurve:
    """Force-displacement branch of one beam, sorted by end-shortening."""

    beam: BeamSpec
    kappa: np.ndarray
    slope0: np.ndarray
    t_end: np.ndarray
    P: np.ndarray
    R: np.ndarray
    end_shortening: np.ndarray
    failures: List[Tuple[float, str]] = field(default_factory=list)

    def __len__(self):
        return len(self.kappa)

    def for_length(self, length: float) -> "ForceCurve":
        """Same branch rescaled to another length at fixed EI."""
        c = self.beam.length / length
        return ForceCurve(
            self.beam.with_length(length),
            self.kappa, self.slope0, self.t_end,
            self.P * c * c, self.R * c * c, self.end_shortening / c,
            list(self.failures),
        )


def force_displacement_curve(beam: BeamSpec, kappa_grid: Optional[Sequence[float]] = None,
                             cfg: SolverConfig = DEFAULT_SOLVER) -> ForceCurve:
    """Solve one point per kappa; failed points are logged and skipped."""
    if kappa_grid is None:
        kappa_grid = default_kappa_grid()
    rows, failures = [], []
    for k in kappa_grid:
        try:
            norm = solve_normalized(float(k), cfg)
        except (NoBuckledSolutionError, DivergenceError) as exc:
            log.warning("kappa=%g skipped: %s", k, exc)
            failures.append((float(k), str(exc)))
            continue
        sol = denormalize(norm, beam)
        rows.append((norm.kappa, norm.slope0, norm.t_end, sol.P, sol.R, sol.end_shortening))
    rows.sort(key=lambda r: r[5])
    # keep the branch strictly single-valued
    kept = []
    for r in rows:
        if kept and r[5] <= kept[-1][5]:
            failures.append((r[0], "duplicate end-shortening"))
            continue
        kept.append(r)
    cols = np.array(kept, dtype=float).reshape(-1, 6).T
    return ForceCurve(beam, *cols, failures=failures)


def force_at_displacement(curve: ForceCurve, shortening: float) -> float:
    """Piecewise-linear P at the given end-shortening."""
    e = curve.end_shortening
    if len(e) == 0:
        raise RangeError(shortening, None, "empty curve")
    if shortening < e[0]:
        raise RangeError(shortening, float(e[0]))
    if shortening > e[-1]:
        raise RangeError(shortening, float(e[-1]))
    return float(np.interp(shortening, e, curve.P))
