"""File formats: flat key-value text, curve / strain / trace / report CSVs."""
from __future__ import annotations

import csv
import math
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .elastica import ForceCurve
from .errors import ConfigError, TraceParseError
from .section import BeamSpec
from .trials import TrialTrace

CURVE_COLUMNS = ("kappa", "slope0", "t_end", "P_N", "R_N", "end_shortening_m")
TRACE_COLUMNS = ("index", "encoder_m", "dl1_pm", "dl2_pm", "dl3_pm", "force_N")
REPORT_COLUMNS = ("trace_id", "E_t_Pa", "delta_i_m", "P_N", "contact_idx", "buckling_idx", "outlier")


def fmt12(v: float) -> str:
    return f"{v:.12g}"


def fmt_exact(v: float) -> str:
    """Shortest text that round-trips to the same double."""
    return repr(float(v))


# key-value --------------------------------------------------------------


def parse_kv(text: str, source: str = "<config>") -> Dict[str, str]:
    """Parse ``key = value`` lines; ``#`` starts a comment. Later keys win."""
    out: Dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{source}:{lineno}", f"expected 'key = value', got {raw.strip()!r}")
        key, value = (p.strip() for p in line.split("=", 1))
        if not key:
            raise ConfigError(f"{source}:{lineno}", "empty key")
        out[key] = value
    return out


def read_kv(path) -> Dict[str, str]:
    path = Path(path)
    return parse_kv(path.read_text(), str(path))


def format_kv(items: Dict[str, object]) -> str:
    lines = []
    for k, v in items.items():
        if isinstance(v, float):
            v = fmt_exact(v)
        lines.append(f"{k} = {v}")
    return "\n".join(lines) + "\n"


def write_kv(path, items: Dict[str, object]):
    Path(path).write_text(format_kv(items))


# curves ----------------------------------------------------------------


def write_curve_csv(path, curve: ForceCurve):
    cols = (curve.kappa, curve.slope0, curve.t_end, curve.P, curve.R, curve.end_shortening)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(CURVE_COLUMNS)
        for row in zip(*cols):
            w.writerow([fmt12(v) for v in row])


def read_curve_csv(path, beam: BeamSpec) -> ForceCurve:
    rows = _read_numeric_csv(path, CURVE_COLUMNS)
    cols = np.array(rows, dtype=float).reshape(-1, len(CURVE_COLUMNS)).T
    return ForceCurve(beam, *cols)


def write_strain_csv(path, shortening: Sequence[float], eps: np.ndarray, d_lambda: np.ndarray):
    n = eps.shape[1]
    header = ["end_shortening_m"] + [f"eps{i + 1}" for i in range(n)] + [f"dl{i + 1}_pm" for i in range(n)]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for e, row_eps, row_dl in zip(shortening, eps, d_lambda):
            w.writerow([fmt12(e)] + [fmt12(v) for v in row_eps] + [fmt12(v) for v in row_dl])


def _read_numeric_csv(path, columns) -> List[List[float]]:
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            raise TraceParseError(path, 1, "empty file")
        if tuple(h.strip() for h in header) != tuple(columns):
            raise TraceParseError(path, 1, f"expected header {','.join(columns)}")
        for lineno, row in enumerate(reader, 2):
            if len(row) != len(columns):
                raise TraceParseError(path, lineno, f"expected {len(columns)} fields, got {len(row)}")
            try:
                rows.append([float(v) for v in row])
            except ValueError as exc:
                raise TraceParseError(path, lineno, str(exc)) from None
    return rows


# traces ----------------------------------------------------------------


def meta_path(csv_path) -> Path:
    p = Path(csv_path)
    return p.with_suffix(".meta")


def write_trace(path, trace: TrialTrace):
    """Write the trace CSV and its key-value sidecar next to it."""
    if trace.n_peaks != 3:
        raise ValueError("trace CSV format carries exactly three peak channels")
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_COLUMNS)
        for i in range(len(trace)):
            f = "" if trace.force is None or not math.isfinite(trace.force[i]) else fmt_exact(trace.force[i])
            w.writerow([str(int(trace.index[i])), fmt_exact(trace.encoder[i])]
                       + [fmt_exact(v) for v in trace.d_lambda[i]] + [f])
    meta = dict(trace.meta)
    meta.setdefault("beam.length", trace.beam_length)
    write_kv(meta_path(path), meta)


def read_trace(path, beam_length: Optional[float] = None) -> TrialTrace:
    """Parse a trace CSV (and its sidecar, if present).

    The beam length comes from ``beam_length`` or the sidecar's ``beam.length``.
    """
    path = Path(path)
    text = path.read_text()
    lines = text.splitlines()
    if not lines:
        raise TraceParseError(path, 1, "empty trace file")
    header = [h.strip() for h in lines[0].split(",")]
    if tuple(header) != TRACE_COLUMNS:
        raise TraceParseError(path, 1, f"expected header {','.join(TRACE_COLUMNS)}")
    idx, enc, dl, force = [], [], [], []
    for lineno, line in enumerate(lines[1:], 2):
        if not line.strip():
            continue
        fields = line.split(",")
        if len(fields) != len(TRACE_COLUMNS):
            raise TraceParseError(path, lineno, f"expected {len(TRACE_COLUMNS)} fields, got {len(fields)}")
        try:
            idx.append(int(fields[0]))
            enc.append(float(fields[1]))
            dl.append([float(v) for v in fields[2:5]])
            force.append(float(fields[5]) if fields[5].strip() else math.nan)
        except ValueError as exc:
            raise TraceParseError(path, lineno, str(exc)) from None
        if len(enc) > 1 and enc[-1] < enc[-2]:
            raise TraceParseError(path, lineno, "encoder decreases")
    if not enc:
        raise TraceParseError(path, 2, "trace has no samples")
    mp = meta_path(path)
    meta: Dict[str, object] = dict(read_kv(mp)) if mp.exists() else {}
    if beam_length is None:
        if "beam.length" not in meta:
            raise TraceParseError(path, 1, "beam length unknown (no sidecar beam.length)")
        beam_length = float(meta["beam.length"])
    force_arr = np.array(force)
    if np.all(np.isnan(force_arr)):
        force_arr = None
    return TrialTrace(np.array(enc), np.array(dl), force_arr, beam_length, meta, np.array(idx))


# estimate report ---------------------------------------------------------


def write_report(path, rows: Sequence[Tuple[str, object]]):
    """Rows are (trace_id, StiffnessEstimate)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(REPORT_COLUMNS)
        for trace_id, est in rows:
            w.writerow([trace_id, fmt_exact(est.E_t), fmt_exact(est.delta_i), fmt_exact(est.P),
                        est.contact_index, est.buckling_index, int(bool(est.outlier))])


def read_report(path) -> List[dict]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if tuple(reader.fieldnames or ()) != REPORT_COLUMNS:
            raise TraceParseError(path, 1, f"expected header {','.join(REPORT_COLUMNS)}")
        for lineno, row in enumerate(reader, 2):
            try:
                out.append({
                    "trace_id": row["trace_id"],
                    "E_t_Pa": float(row["E_t_Pa"]),
                    "delta_i_m": float(row["delta_i_m"]),
                    "P_N": float(row["P_N"]),
                    "contact_idx": int(row["contact_idx"]),
                    "buckling_idx": int(row["buckling_idx"]),
                    "outlier": bool(int(row["outlier"])),
                })
            except (TypeError, ValueError) as exc:
                raise TraceParseError(path, lineno, str(exc)) from None
    return out
