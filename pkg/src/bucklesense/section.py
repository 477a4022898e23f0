"""Composite cross-section of the sensor beam.

One optical fiber rests on a coplanar row of NiTi wires. The bending plane
is normal to the wire row, so every wire shares the same offset from the
neutral axis. All quantities are SI.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional, Sequence

import numpy as np

from .errors import InvalidInputError

# fiber / wire constants of the reference sensor
R_FBG = 0.115e-3
R_WIRE = 0.1e-3
E_FBG = 67e9
E_WIRE = 55e9
N_WIRES = 4
SENSOR_LENGTHS = (42e-3, 44e-3, 46e-3, 48e-3, 50e-3)


def weighted_centroid(ea: Sequence[float], y: Sequence[float]) -> float:
    """Modulus-weighted centroid  sum(E_i A_i y_i) / sum(E_i A_i)."""
    ea = np.asarray(ea, dtype=float)
    y = np.asarray(y, dtype=float)
    total = ea.sum()
    if not total > 0:
        raise InvalidInputError("total axial stiffness must be positive")
    return float((ea * y).sum() / total)


def neutral_axis(r_fbg, r_wire, E_fbg, E_wire, n_wires=N_WIRES, fiber_height=None):
    """Offsets of the fiber, the wire row and the fiber center-line from the
    combined neutral axis.

    Parameters
    ----------
    r_fbg, r_wire : float
        Fiber and wire radii (m).
    E_fbg, E_wire : float
        Young's moduli (Pa). Either may be zero (degenerate section) but not both.
    n_wires : int
        Number of wires in the row.
    fiber_height : float, optional
        Distance from the wire-row center plane to the fiber center. Defaults to
        ``r_fbg + r_wire`` (fiber tangent to the wires).

    Returns
    -------
    (dy_na, dy_wire, dy_fbg) : tuple of float
        Signed offsets (m). ``dy_fbg`` equals ``dy_na``.
    """
    if not (r_fbg > 0 and r_wire > 0):
        raise InvalidInputError("radii must be positive")
    if E_fbg < 0 or E_wire < 0 or not (math.isfinite(E_fbg) and math.isfinite(E_wire)):
        raise InvalidInputError("moduli must be finite and non-negative")
    if n_wires < 1:
        raise InvalidInputError("need at least one wire")
    h = r_fbg + r_wire if fiber_height is None else fiber_height
    a_fbg = math.pi * r_fbg**2
    a_wire = math.pi * r_wire**2
    y_na = weighted_centroid([E_fbg * a_fbg, n_wires * E_wire * a_wire], [h, 0.0])
    dy_na = h - y_na
    dy_wire = 0.0 - y_na
    return dy_na, dy_wire, dy_na


def flexural_rigidity(r_fbg, r_wire, E_fbg, E_wire, dy_na, dy_wire, n_wires=N_WIRES):
    """Combined EI = E_fbg I_fbg + E_wire I_wire (N m^2).

    ``I_wire`` aggregates all wires; for four wires it reduces to
    ``pi r^2 (r^2 + 4 dy_wire^2)``.
    """
    i_fbg = math.pi * r_fbg**2 * (r_fbg**2 / 4.0 + dy_na**2)
    i_wire = n_wires * math.pi * r_wire**2 * (r_wire**2 / 4.0 + dy_wire**2)
    return E_fbg * i_fbg + E_wire * i_wire


@dataclass(frozen=True)
class BeamSpec:
    """Geometry and material constants of the composite sensor beam.

    The offsets and EI are derived on construction.
    """

    r_fbg: float = R_FBG
    r_wire: float = R_WIRE
    E_fbg: float = E_FBG
    E_wire: float = E_WIRE
    length: float = SENSOR_LENGTHS[0]
    n_wires: int = N_WIRES
    fiber_height: Optional[float] = None
    dy_na: float = field(init=False)
    dy_wire: float = field(init=False)
    dy_fbg: float = field(init=False)
    EI: float = field(init=False)

    def __post_init__(self):
        for name in ("r_fbg", "r_wire", "E_fbg", "E_wire", "length"):
            v = getattr(self, name)
            if not (math.isfinite(v) and v > 0):
                raise InvalidInputError(f"{name} must be positive and finite, got {v!r}")
        dy_na, dy_wire, dy_fbg = neutral_axis(
            self.r_fbg, self.r_wire, self.E_fbg, self.E_wire, self.n_wires, self.fiber_height
        )
        ei = flexural_rigidity(self.r_fbg, self.r_wire, self.E_fbg, self.E_wire, dy_na, dy_wire, self.n_wires)
        object.__setattr__(self, "dy_na", dy_na)
        object.__setattr__(self, "dy_wire", dy_wire)
        object.__setattr__(self, "dy_fbg", dy_fbg)
        object.__setattr__(self, "EI", ei)

    def with_length(self, length: float) -> "BeamSpec":
        return replace(self, length=length)

    @property
    def critical_load(self) -> float:
        """Fixed-pinned Euler load mu^2 EI / L^2."""
        from .elastica import critical_load_factor

        return critical_load_factor() * self.EI / self.length**2
