"""Synthetic indentation trials against a virtual Hertzian tissue.

Encoder advance drives the spherical tip through three phases: free
approach, Hertzian sinking while the beam stays straight, and post-buckling
once the contact force reaches the fixed-pinned Euler load. After onset the
indentation is frozen and extra advance becomes end-shortening of the beam.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from . import elastica, fbg
from .elastica import DEFAULT_SOLVER, SolverConfig
from .errors import IncompleteTrialError, InvalidInputError
from .fbg import GratingLayout
from .section import BeamSpec

R_TIP = 3.5e-3


@dataclass(frozen=True)
class TissueSpec:
    E_t: float
    nu: float
    R_tip: float = R_TIP
    name: str = "tissue"

    def __post_init__(self):
        if not (math.isfinite(self.E_t) and self.E_t > 0):
            raise InvalidInputError(f"E_t must be positive, got {self.E_t!r}")
        if not (0.0 <= self.nu <= 0.5):
            raise InvalidInputError(f"Poisson ratio must lie in [0, 0.5], got {self.nu!r}")
        if not self.R_tip > 0:
            raise InvalidInputError("R_tip must be positive")


def hertz_force(E_t, nu, delta, R_tip=R_TIP):
    """Rigid sphere on an elastic half-space: P = 4/3 E sqrt(delta^3 R) / (1 - nu^2)."""
    if abs(nu) >= 1.0:
        raise InvalidInputError(f"Poisson ratio {nu!r} gives a singular contact modulus")
    if delta < 0:
        raise InvalidInputError(f"indentation must be non-negative, got {delta!r}")
    return 4.0 / 3.0 * E_t * math.sqrt(delta**3 * R_tip) / (1.0 - nu * nu)


def indentation_at_force(E_t, nu, P, R_tip=R_TIP):
    """Depth at which :func:`hertz_force` reaches ``P``."""
    if abs(nu) >= 1.0:
        raise InvalidInputError(f"Poisson ratio {nu!r} gives a singular contact modulus")
    return (3.0 * P * (1.0 - nu * nu) / (4.0 * E_t * math.sqrt(R_tip))) ** (2.0 / 3.0)


@dataclass(frozen=True)
class Protocol:
    """Linear-stage motion and interrogator noise.

    The tissue surface sits at ``approach + surface_phase * step`` on the
    encoder axis, i.e. ``surface_phase`` places it between two samples.
    """

    step: float = 10e-6
    travel: float = 6e-3
    approach: float = 1e-3
    surface_phase: float = 0.5
    noise_pm: float = 0.0

    def __post_init__(self):
        if not self.step > 0:
            raise InvalidInputError("advance step must be positive")
        if not self.travel > 0:
            raise InvalidInputError("travel must be positive")
        if self.noise_pm < 0:
            raise InvalidInputError("noise level must be non-negative")

    @property
    def surface(self) -> float:
        return self.approach + self.surface_phase * self.step


@dataclass(eq=False)
class TrialTrace:
    """One indentation record. Missing force samples are NaN."""

    encoder: np.ndarray
    d_lambda: np.ndarray
    force: Optional[np.ndarray]
    beam_length: float
    meta: Dict[str, object] = field(default_factory=dict)
    index: Optional[np.ndarray] = None

    def __post_init__(self):
        self.encoder = np.asarray(self.encoder, dtype=float)
        self.d_lambda = np.atleast_2d(np.asarray(self.d_lambda, dtype=float))
        if self.force is not None:
            self.force = np.asarray(self.force, dtype=float)
        if self.index is None:
            self.index = np.arange(len(self.encoder))
        n = len(self.encoder)
        if n == 0:
            raise InvalidInputError("a trace needs at least one sample")
        if self.d_lambda.shape[0] != n or (self.force is not None and len(self.force) != n):
            raise InvalidInputError("trace channels must have equal length")
        if np.any(np.diff(self.encoder) < 0):
            raise InvalidInputError("encoder must be non-decreasing")

    def __len__(self):
        return len(self.encoder)

    @property
    def n_peaks(self) -> int:
        return self.d_lambda.shape[1]

    @property
    def has_force(self) -> bool:
        return self.force is not None and bool(np.any(np.isfinite(self.force)))

    def length_at(self, i: int) -> float:
        """Exposed beam length at sample ``i``.

        When the meta carries ``exposed_length0`` (sensor pushed out of a
        tube), the length grows with the encoder.
        """
        l0 = self.meta.get("exposed_length0")
        if l0 is None or l0 == "":
            return self.beam_length
        return float(l0) + float(self.encoder[i])

    def with_noise(self, sigma_pm: float, seed) -> "TrialTrace":
        rng = np.random.default_rng(seed)
        noisy = self.d_lambda + rng.normal(0.0, sigma_pm, size=self.d_lambda.shape)
        meta = dict(self.meta, **{"protocol.noise_pm": sigma_pm, "seed": _seed_text(seed)})
        return TrialTrace(self.encoder.copy(), noisy, None if self.force is None else self.force.copy(),
                          self.beam_length, meta, self.index.copy())


def _seed_text(seed):
    if isinstance(seed, (list, tuple)):
        return ":".join(str(int(s)) for s in seed)
    return str(int(seed))


def trial_meta(beam: BeamSpec, tissue: TissueSpec, layout: GratingLayout, protocol: Protocol):
    meta = {
        "tissue.name": tissue.name,
        "tissue.E_t": tissue.E_t,
        "tissue.nu": tissue.nu,
        "tissue.R_tip": tissue.R_tip,
        "beam.r_fbg": beam.r_fbg,
        "beam.r_wire": beam.r_wire,
        "beam.E_fbg": beam.E_fbg,
        "beam.E_wire": beam.E_wire,
        "beam.n_wires": beam.n_wires,
        "beam.length": beam.length,
        "beam.EI": beam.EI,
        "layout.peaks": ", ".join(f"{a!r}:{b!r}" for a, b in layout.peaks),
        "layout.k_eps": layout.k_eps,
        "layout.dy_fbg": layout.dy_fbg,
        "protocol.step": protocol.step,
        "protocol.travel": protocol.travel,
        "protocol.approach": protocol.approach,
        "protocol.surface_phase": protocol.surface_phase,
        "protocol.noise_pm": protocol.noise_pm,
    }
    return meta


def simulate_trial(beam: BeamSpec, tissue: TissueSpec, layout: GratingLayout, protocol: Protocol,
                   seed=0, cfg: SolverConfig = DEFAULT_SOLVER) -> TrialTrace:
    """Generate one indentation trace with ground truth recorded in ``meta``."""
    layout.check_within(beam.length)
    p_cr = beam.critical_load
    delta_i = indentation_at_force(tissue.E_t, tissue.nu, p_cr, tissue.R_tip)
    surface = protocol.surface
    onset = surface + delta_i

    n = int(math.floor(protocol.travel / protocol.step + 1e-9)) + 1
    encoder = protocol.step * np.arange(n)
    past_surface = np.flatnonzero(encoder > surface)
    if past_surface.size == 0:
        raise IncompleteTrialError("free advance", f"travel {protocol.travel} never reaches the surface at {surface}")
    past_onset = np.flatnonzero(encoder > onset)
    if past_onset.size == 0:
        raise IncompleteTrialError("pre-buckling sink", f"travel ends before buckling onset at encoder {onset:.6g} m")
    contact_idx = int(past_surface[0])
    buckling_idx = int(past_onset[0])
    if buckling_idx >= n - 1:
        raise IncompleteTrialError("buckling onset", "no post-buckling samples after onset")

    d_lambda = np.zeros((n, layout.count))
    force = np.zeros(n)
    for k in range(contact_idx, buckling_idx):
        force[k] = hertz_force(tissue.E_t, tissue.nu, encoder[k] - surface, tissue.R_tip)
    guess = None
    for k in range(buckling_idx, n):
        sol = elastica.solve_at_end_shortening(beam, encoder[k] - onset, cfg, kappa_guess=guess)
        guess = sol.kappa
        d_lambda[k] = fbg.wavelength_shift(fbg.peak_strains(sol, layout), layout)
        force[k] = sol.P

    meta = trial_meta(beam, tissue, layout, protocol)
    meta.update({
        "seed": _seed_text(seed),
        "truth.contact_index": contact_idx,
        "truth.buckling_index": buckling_idx,
        "truth.delta_i": delta_i,
        "truth.P_cr": p_cr,
        "truth.surface": surface,
        "truth.onset": onset,
    })
    trace = TrialTrace(encoder, d_lambda, force, beam.length, meta)
    if protocol.noise_pm > 0:
        trace = trace.with_noise(protocol.noise_pm, seed)
    return trace
