"""Machine-readable report files: per-step CSV and summary JSON.

Every float is serialized with 17 significant digits so runs round-trip
exactly and repeated runs produce byte-identical files.  Angle columns
are emitted in degrees for easier comparison with plotted measurement
series; everything internal stays in radians.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Iterable, Sequence

from .scenario import RunReport

CSV_HEADER = (
    "t,ideal_x,ideal_y,est_x,est_y,follower_x,follower_y,"
    "meas_dist,meas_angle_deg,pred_dist,pred_angle_deg"
)


def fmt_float(x) -> str:
    """17-significant-digit decimal form (exact double round trip)."""
    return format(float(x), ".17g")


def _cell(x) -> str:
    return "" if x is None else fmt_float(x)


def run_csv_text(report: RunReport) -> str:
    lines = [CSV_HEADER]
    for r in report.records:
        est_x = est_y = pred_dist = pred_angle = None
        if r.estimated is not None:
            est_x, est_y = r.estimated
        if r.pred_rel is not None:
            pred_dist, pred_angle = r.pred_rel[0], math.degrees(r.pred_rel[1])
        cells = [
            str(r.t),
            fmt_float(r.ideal[0]),
            fmt_float(r.ideal[1]),
            _cell(est_x),
            _cell(est_y),
            fmt_float(r.follower[0]),
            fmt_float(r.follower[1]),
            fmt_float(r.meas_rel[0]),
            fmt_float(math.degrees(r.meas_rel[1])),
            _cell(pred_dist),
            _cell(pred_angle),
        ]
        lines.append(",".join(cells))
    return "\n".join(lines) + "\n"


def render_json(obj, indent: int = 0) -> str:
    """JSON text with floats at 17 significant digits.

    The standard json module serializes floats via repr; this small
    renderer keeps the fixed-precision contract of the report files.
    """
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f'{inner}"{k}": {render_json(v, indent + 1)}' for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        items = [f"{inner}{render_json(v, indent + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, int):
        return str(obj)
    if isinstance(obj, float):
        return fmt_float(obj)
    if obj is None:
        return "null"
    return '"' + str(obj).replace("\\", "\\\\").replace('"', '\\"') + '"'


def summary_json_text(report: RunReport) -> str:
    payload = {
        "rmse": report.rmse,
        "avg_sensing_range": report.avg_sensing_range,
        "config": report.config,
    }
    return render_json(payload) + "\n"


def trajectories_csv_text(report: RunReport) -> str:
    """Tidy series table (series,t,x,y,z) of the leader, ideal and
    estimated curves, ready for plotting."""
    geom = report.geometry
    if geom is None:
        raise ValueError("report carries no geometry")
    surface = geom.surface
    period = report.config["extension"]["period"]
    lines = ["series,t,x,y,z"]

    def add(series, t, x, y):
        z = surface.height((x, y))
        lines.append(
            f"{series},{fmt_float(t)},{fmt_float(x)},{fmt_float(y)},{fmt_float(z)}"
        )

    for t, s in zip(geom.leader.times, geom.leader.states):
        add("leader", t, s[0], s[1])
    for t, pos in zip(geom.ideal.times, geom.ideal.positions):
        add("ideal", t, pos[0], pos[1])
    for r in report.records:
        if r.estimated is not None:
            add("estimated", r.t * period, r.estimated[0], r.estimated[1])
    return "\n".join(lines) + "\n"


def table_csv_text(header: Sequence[str], rows: Iterable[Sequence]) -> str:
    lines = [",".join(header)]
    for row in rows:
        lines.append(
            ",".join(fmt_float(c) if isinstance(c, float) else str(c) for c in row)
        )
    return "\n".join(lines) + "\n"


def write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return path
