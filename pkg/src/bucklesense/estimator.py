"""Tissue modulus from an indentation trace.

Contact comes from the force channel (or an externally supplied index),
buckling onset from the Euclidean norm of the per-peak strains. The
indentation is the encoder travel between the two, the force is read from
the elastica branch, and the spherical-indenter Hertz relation gives E_t.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence

import numpy as np

from . import elastica, fbg
from .elastica import ForceCurve
from .errors import (
    InvalidInputError,
    MissingContactSourceError,
    NoBucklingError,
    NoContactError,
    SingularIndentationError,
)
from .fbg import GratingLayout
from .section import BeamSpec
from .trials import R_TIP, TrialTrace

OUTLIER_CAP = 3e6

# 5 sigma of a 2 pm interrogator floor at the glued coefficient, as strain
DEFAULT_STRAIN_THRESHOLD = 5 * 2.0 / fbg.K_EPS_GLUED * 1e-6


@dataclass(frozen=True)
class EstimatorConfig:
    nu_assumed: float
    strain_norm_threshold: float = DEFAULT_STRAIN_THRESHOLD
    contact_force_threshold: float = 1e-3
    contact_index_override: Optional[int] = None
    outlier_cap: float = OUTLIER_CAP
    confirm_displacement: float = 2e-3
    r_tip: float = R_TIP

    def __post_init__(self):
        if not (self.strain_norm_threshold > 0 and self.contact_force_threshold > 0):
            raise InvalidInputError("detection thresholds must be positive")
        if not self.outlier_cap > 0:
            raise InvalidInputError("outlier cap must be positive")
        if not (0.0 <= self.nu_assumed < 1.0):
            raise InvalidInputError(f"Poisson ratio {self.nu_assumed!r} out of range")

    @classmethod
    def for_noise(cls, nu_assumed, sigma_pm, k_eps=fbg.K_EPS_GLUED, factor=5.0, **kw):
        """Strain-norm threshold at ``factor`` times the per-channel noise."""
        return cls(nu_assumed, strain_norm_threshold=factor * sigma_pm / k_eps * 1e-6, **kw)


@dataclass(frozen=True)
class StiffnessEstimate:
    E_t: float
    contact_index: int
    buckling_index: int
    delta_i: float
    P: float
    beam_length_at_buckling: float
    outlier: bool
    E_t_low: float
    E_t_high: float


def hertz_modulus(P, delta, nu, R_tip=R_TIP):
    """E_t = 3/4 P (1 - nu^2) / sqrt(delta^3 R_tip)."""
    if delta <= 0:
        raise SingularIndentationError(f"indentation {delta!r} leaves the modulus undefined")
    return 0.75 * P * (1.0 - nu * nu) / math.sqrt(delta**3 * R_tip)


def detect_contact(trace: TrialTrace, cfg: EstimatorConfig) -> int:
    if cfg.contact_index_override is not None:
        return int(cfg.contact_index_override)
    if not trace.has_force:
        raise MissingContactSourceError("trace has no force channel and no contact index was supplied")
    hits = np.flatnonzero(np.nan_to_num(trace.force, nan=-math.inf) >= cfg.contact_force_threshold)
    if hits.size == 0:
        raise NoContactError(f"force never reaches {cfg.contact_force_threshold} N")
    return int(hits[0])


def strain_norm(trace: TrialTrace, layout: GratingLayout) -> np.ndarray:
    eps = fbg.strain_from_wavelength(trace.d_lambda, layout)
    return np.sqrt(np.sum(eps * eps, axis=1))


def detect_buckling(trace: TrialTrace, layout: GratingLayout, cfg: EstimatorConfig, start: int = 0) -> int:
    """First index at or after ``start`` where the strain norm reaches the threshold."""
    if trace.n_peaks < 3:
        raise InvalidInputError(f"need at least 3 peak channels, trace has {trace.n_peaks}")
    norm = strain_norm(trace, layout)
    hits = np.flatnonzero(norm[start:] >= cfg.strain_norm_threshold)
    if hits.size == 0:
        raise NoBucklingError(f"strain norm never reaches {cfg.strain_norm_threshold:.3g}; trial incomplete")
    return int(hits[0]) + start


def estimate_stiffness(trace: TrialTrace, beam: BeamSpec, layout: GratingLayout, cfg: EstimatorConfig,
                       curve: Optional[ForceCurve] = None) -> StiffnessEstimate:
    kc = detect_contact(trace, cfg)
    kb = detect_buckling(trace, layout, cfg, start=kc)
    enc = trace.encoder
    delta = float(enc[kb] - enc[kc])
    if delta <= 0:
        raise SingularIndentationError(
            f"buckling detected at the contact sample ({kc}); rigid surface or detection failure"
        )
    length = trace.length_at(kb)
    if curve is None:
        curve = elastica.force_displacement_curve(beam.with_length(length))
    elif not math.isclose(curve.beam.length, length, rel_tol=1e-12):
        curve = curve.for_length(length)
    P = elastica.force_at_displacement(curve, cfg.confirm_displacement)
    E = hertz_modulus(P, delta, cfg.nu_assumed, cfg.r_tip)

    step = float(np.median(np.diff(enc))) if len(enc) > 1 else 0.0
    E_high = hertz_modulus(P, delta - step, cfg.nu_assumed, cfg.r_tip) if delta > step else math.inf
    E_low = hertz_modulus(P, delta + step, cfg.nu_assumed, cfg.r_tip)
    return StiffnessEstimate(E, kc, kb, delta, P, length, E > cfg.outlier_cap, E_low, E_high)


# batch statistics -------------------------------------------------------


def rmse(estimates: Sequence[float], actual: float) -> float:
    e = np.asarray(estimates, dtype=float)
    return float(np.sqrt(np.mean((e - actual) ** 2)))


def iqr(estimates: Sequence[float]) -> float:
    q75, q25 = np.percentile(np.asarray(estimates, dtype=float), [75, 25])
    return float(q75 - q25)


@dataclass(frozen=True)
class SampleSummary:
    """One row of a results table (values in Pa)."""

    name: str
    estimate: float
    actual: float
    rmse: float
    iqr: float
    n_used: int
    n_outliers: int


def summarize_sample(name: str, estimates: Iterable[float], actual: float,
                     outlier_cap: float = OUTLIER_CAP) -> SampleSummary:
    """Median estimate, RMSE against ``actual`` and IQR, after removing outliers."""
    est = np.asarray(list(estimates), dtype=float)
    keep = est[est <= outlier_cap]
    n_out = int(est.size - keep.size)
    if keep.size == 0:
        return SampleSummary(name, math.nan, actual, math.nan, math.nan, 0, n_out)
    return SampleSummary(name, float(np.median(keep)), actual, rmse(keep, actual), iqr(keep), int(keep.size), n_out)


@dataclass(frozen=True)
class BatchSummary:
    rows: List[SampleSummary]

    @property
    def mean_rmse(self) -> float:
        vals = [r.rmse for r in self.rows if math.isfinite(r.rmse)]
        return float(np.mean(vals)) if vals else math.nan

    @property
    def std_rmse(self) -> float:
        vals = [r.rmse for r in self.rows if math.isfinite(r.rmse)]
        return float(np.std(vals, ddof=1)) if len(vals) > 1 else math.nan

    def format(self) -> str:
        lines = [f"{'Sample':<12} {'E_est (KPa)':>12} {'E_act (KPa)':>12} {'RMSE (KPa)':>11} {'IQR (KPa)':>10} {'n':>3} {'out':>3}"]
        for r in self.rows:
            lines.append(
                f"{r.name:<12} {r.estimate / 1e3:12.2f} {r.actual / 1e3:12.2f} {r.rmse / 1e3:11.2f} "
                f"{r.iqr / 1e3:10.2f} {r.n_used:3d} {r.n_outliers:3d}"
            )
        lines.append(f"mean RMSE (KPa): {self.mean_rmse / 1e3:.2f}")
        lines.append(f"std RMSE (KPa): {self.std_rmse / 1e3:.2f}")
        return "\n".join(lines) + "\n"


def summarize_batch(groups: Dict[str, Sequence[float]], actual: Dict[str, float],
                    outlier_cap: float = OUTLIER_CAP) -> BatchSummary:
    return BatchSummary([summarize_sample(k, groups[k], actual[k], outlier_cap) for k in groups])
