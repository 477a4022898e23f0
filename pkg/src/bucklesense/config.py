"""Run configuration from a flat ``section.key = value`` file."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Dict, List, Optional, Tuple

import numpy as np

from .elastica import SolverConfig, default_kappa_grid
from .errors import ConfigError, InvalidInputError
from .estimator import EstimatorConfig
from .fbg import GratingLayout
from .io import parse_kv
from .section import BeamSpec, SENSOR_LENGTHS
from .trials import Protocol, TissueSpec

_SCALAR_KEYS = {
    "beam.r_fbg", "beam.r_wire", "beam.E_fbg", "beam.E_wire", "beam.n_wires", "beam.fiber_height",
    "beam.lengths",
    "layout.first_offset", "layout.pitch", "layout.grating_length", "layout.count", "layout.k_eps",
    "layout.s_T", "layout.peaks",
    "solver.n_steps", "solver.kappa_min", "solver.kappa_max", "solver.kappa_count",
    "protocol.step", "protocol.travel", "protocol.approach", "protocol.surface_phase", "protocol.noise_pm",
    "estimator.nu", "estimator.strain_norm_threshold", "estimator.contact_force_threshold",
    "estimator.contact_index", "estimator.outlier_cap", "estimator.confirm_displacement", "estimator.r_tip",
    "output.dir", "seed",
}
_TISSUE_FIELDS = {"E_t", "nu", "R_tip"}


def _num(raw: Dict[str, str], key: str, default=None, cast: Callable = float):
    if key not in raw:
        if default is None:
            raise ConfigError(key, "required key missing")
        return default
    try:
        v = cast(raw[key])
    except ValueError:
        raise ConfigError(key, f"cannot parse {raw[key]!r}") from None
    if isinstance(v, float) and not math.isfinite(v):
        raise ConfigError(key, "must be finite")
    return v


def _opt(raw, key, cast=float):
    return _num(raw, key, cast=cast) if key in raw else None


@dataclass
class RunConfig:
    beam: BeamSpec
    lengths: Tuple[float, ...]
    layout: GratingLayout
    solver: SolverConfig
    kappa_grid: np.ndarray
    tissues: List[TissueSpec]
    protocol: Protocol
    estimator: Dict[str, object] = field(default_factory=dict)
    nu_override: Optional[float] = None
    out_dir: Path = Path("out")
    seed: int = 0

    def estimator_config(self, nu: float) -> EstimatorConfig:
        return EstimatorConfig(nu, **self.estimator)

    @classmethod
    def from_text(cls, text: str, source: str = "<config>") -> "RunConfig":
        return cls.from_dict(parse_kv(text, source))

    @classmethod
    def from_file(cls, path) -> "RunConfig":
        path = Path(path)
        try:
            text = path.read_text()
        except OSError as exc:
            raise ConfigError(str(path), f"cannot read: {exc.strerror}") from None
        return cls.from_text(text, str(path))

    @classmethod
    def from_dict(cls, raw: Dict[str, str]) -> "RunConfig":
        if not raw:
            raise ConfigError("<config>", "configuration is empty")
        tissue_raw: Dict[str, Dict[str, str]] = {}
        for key in raw:
            if key.startswith("tissue."):
                parts = key.split(".")
                if len(parts) != 3 or parts[2] not in _TISSUE_FIELDS or not parts[1]:
                    raise ConfigError(key, "expected tissue.<name>.E_t|nu|R_tip")
                tissue_raw.setdefault(parts[1], {})[parts[2]] = raw[key]
            elif key not in _SCALAR_KEYS:
                raise ConfigError(key, "unknown key")

        try:
            beam = BeamSpec(
                r_fbg=_num(raw, "beam.r_fbg", 0.115e-3),
                r_wire=_num(raw, "beam.r_wire", 0.1e-3),
                E_fbg=_num(raw, "beam.E_fbg", 67e9),
                E_wire=_num(raw, "beam.E_wire", 55e9),
                n_wires=_num(raw, "beam.n_wires", 4, int),
                fiber_height=_opt(raw, "beam.fiber_height"),
            )
        except InvalidInputError as exc:
            raise ConfigError("beam", str(exc)) from None

        lengths = SENSOR_LENGTHS
        if "beam.lengths" in raw:
            try:
                lengths = tuple(float(v) for v in raw["beam.lengths"].split(",") if v.strip())
            except ValueError:
                raise ConfigError("beam.lengths", f"cannot parse {raw['beam.lengths']!r}") from None
            if not lengths or any(not (math.isfinite(v) and v > 0) for v in lengths):
                raise ConfigError("beam.lengths", "need one or more positive lengths")
        beam = beam.with_length(lengths[0])

        k_eps = _num(raw, "layout.k_eps", 0.424)
        s_T = _num(raw, "layout.s_T", 10.0)
        if "layout.peaks" in raw:
            try:
                peaks = tuple(tuple(float(x) for x in item.split(":")) for item in raw["layout.peaks"].split(","))
            except ValueError:
                raise ConfigError("layout.peaks", "expected 'start:end, start:end, ...'") from None
            if any(len(p) != 2 for p in peaks):
                raise ConfigError("layout.peaks", "expected 'start:end, start:end, ...'")
            layout = GratingLayout(peaks, beam.dy_fbg, k_eps, s_T)
        else:
            layout = GratingLayout.evenly_spaced(
                beam.dy_fbg,
                first_offset=_num(raw, "layout.first_offset", 6e-3),
                pitch=_num(raw, "layout.pitch", 8e-3),
                grating_length=_num(raw, "layout.grating_length", 5e-3),
                count=_num(raw, "layout.count", 3, int),
                k_eps=k_eps,
                s_T=s_T,
            )
        if layout.count != 3:
            raise ConfigError("layout.count", "the trace format carries exactly three peaks")
        for L in lengths:
            if layout.peaks[-1][1] > L:
                raise ConfigError("layout.peaks", f"last grating ends beyond the {L * 1e3:g} mm beam")

        n_steps = _num(raw, "solver.n_steps", 2000, int)
        if n_steps < 16:
            raise ConfigError("solver.n_steps", "need at least 16 steps")
        solver = SolverConfig(n_steps=n_steps)
        k_min = _num(raw, "solver.kappa_min", 2.0)
        k_max = _num(raw, "solver.kappa_max", 500.0)
        k_count = _num(raw, "solver.kappa_count", 64, int)
        if not (0 < k_min < k_max) or k_count < 2:
            raise ConfigError("solver.kappa_min", "need 0 < kappa_min < kappa_max and kappa_count >= 2")
        grid = default_kappa_grid(k_min, k_max, k_count)

        tissues = []
        for name, fields in tissue_raw.items():
            try:
                tissues.append(TissueSpec(
                    E_t=_num(fields, "E_t"),
                    nu=_num(fields, "nu"),
                    R_tip=_num(fields, "R_tip", 3.5e-3),
                    name=name,
                ))
            except ConfigError as exc:
                raise ConfigError(f"tissue.{name}.{exc.key}", str(exc).split(": ", 1)[-1]) from None
            except InvalidInputError as exc:
                raise ConfigError(f"tissue.{name}", str(exc)) from None

        try:
            protocol = Protocol(
                step=_num(raw, "protocol.step", 10e-6),
                travel=_num(raw, "protocol.travel", 6e-3),
                approach=_num(raw, "protocol.approach", 1e-3),
                surface_phase=_num(raw, "protocol.surface_phase", 0.5),
                noise_pm=_num(raw, "protocol.noise_pm", 0.0),
            )
        except InvalidInputError as exc:
            raise ConfigError("protocol", str(exc)) from None

        est: Dict[str, object] = {}
        for key, attr, cast in (
            ("estimator.strain_norm_threshold", "strain_norm_threshold", float),
            ("estimator.contact_force_threshold", "contact_force_threshold", float),
            ("estimator.contact_index", "contact_index_override", int),
            ("estimator.outlier_cap", "outlier_cap", float),
            ("estimator.confirm_displacement", "confirm_displacement", float),
            ("estimator.r_tip", "r_tip", float),
        ):
            if key in raw:
                est[attr] = _num(raw, key, cast=cast)
        nu = _opt(raw, "estimator.nu")
        try:
            EstimatorConfig(0.0 if nu is None else nu, **est)
        except InvalidInputError as exc:
            raise ConfigError("estimator", str(exc)) from None

        seed = _num(raw, "seed", 0, int)
        if not 0 <= seed < 2**64:
            raise ConfigError("seed", "must be an unsigned 64-bit integer")
        return cls(
            beam=beam,
            lengths=lengths,
            layout=layout,
            solver=solver,
            kappa_grid=grid,
            tissues=tissues,
            protocol=protocol,
            estimator=est,
            nu_override=nu,
            out_dir=Path(raw.get("output.dir", "out")),
            seed=seed,
        )
