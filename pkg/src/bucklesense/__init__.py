"""Tissue stiffness from a buckling FBG-sensorized beam.

Modules: ``section`` (composite cross-section), ``elastica`` (fixed-pinned
post-buckling shooting solver), ``collocation`` (independent spectral
solver), ``fbg`` (strain and Bragg shift), ``trials`` (synthetic
indentation traces), ``estimator`` (modulus estimation), ``cli``.
"""
from .elastica import (
    ForceCurve,
    NormalizedSolution,
    PostBuckleSolution,
    SolverConfig,
    critical_load_factor,
    denormalize,
    end_shortening,
    force_at_displacement,
    force_displacement_curve,
    solve,
    solve_at_end_shortening,
    solve_normalized,
)
from .estimator import EstimatorConfig, StiffnessEstimate, estimate_stiffness, hertz_modulus
from .fbg import GratingLayout, average_strain, peak_strains, strain_from_wavelength, wavelength_shift
from .section import BeamSpec, flexural_rigidity, neutral_axis
from .trials import Protocol, TissueSpec, TrialTrace, hertz_force, simulate_trial

__version__ = "0.1.0"
