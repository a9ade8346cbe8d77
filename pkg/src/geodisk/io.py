"""Polygon files, run records and SVG rendering.

Polygon files are JSON objects ``{"outer": [[x, y], ...], "holes": [[[x, y], ...], ...]}``.
Rendering uses only ``path``, ``circle``, ``line`` and ``rect`` elements,
with every number printed at fixed precision so output is byte-stable.
"""
from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .disk import Arc, BoundarySegment, DiskBoundary, GeodesicDisk, disk_region
from .engine import GeodesicPath
from .errors import InputError, PolygonError
from .geometry import Point2, Polygon, validate_polygon

SEGMENTS = 256
MARGIN = 0.05
SHADES = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf")


# --------------------------------------------------------------------------
# polygon files


def _ring_field(ring: int | None) -> str:
    if ring is None:
        return "polygon"
    return "outer" if ring == 0 else f"holes[{ring - 1}]"


def _coords(value, name: str) -> list:
    if not isinstance(value, list) or not value:
        raise InputError(name, "expected a non-empty list of [x, y] pairs")
    out = []
    for i, p in enumerate(value):
        ok = isinstance(p, (list, tuple)) and len(p) == 2
        ok = ok and all(isinstance(c, (int, float)) and not isinstance(c, bool) for c in p)
        if not ok or not all(math.isfinite(c) for c in p):
            raise InputError(f"{name}[{i}]", f"expected two finite numbers, got {p!r}")
        out.append((float(p[0]), float(p[1])))
    return out


def polygon_from_dict(data) -> Polygon:
    if not isinstance(data, dict):
        raise InputError("polygon", "expected a JSON object with 'outer' and optional 'holes'")
    if "outer" not in data:
        raise InputError("outer", "missing")
    unknown = sorted(set(data) - {"outer", "holes"})
    if unknown:
        raise InputError(unknown[0], "unknown key")
    outer = _coords(data["outer"], "outer")
    holes = data.get("holes", [])
    if not isinstance(holes, list):
        raise InputError("holes", "expected a list of rings")
    rings = [outer] + [_coords(h, f"holes[{i}]") for i, h in enumerate(holes)]
    try:
        return validate_polygon(rings)
    except PolygonError as exc:
        msg = str(exc).split(": ", 1)[-1] if exc.ring is not None else str(exc)
        raise InputError(_ring_field(exc.ring), msg) from exc


def load_polygon(path) -> Polygon:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise InputError("polygon file", f"cannot read {path}: {exc.strerror}") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError("polygon file", f"invalid JSON at line {exc.lineno} column {exc.colno}") from exc
    return polygon_from_dict(data)


def save_polygon(P: Polygon, path) -> None:
    Path(path).write_text(json.dumps(P.to_dict()) + "\n")


def file_digest(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


# --------------------------------------------------------------------------
# run records


def to_jsonable(obj):
    """Convert result objects into plain JSON values."""
    if isinstance(obj, Point2):
        return [float(obj.x), float(obj.y)]
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return to_jsonable(obj.tolist())
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else None
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    return obj


@dataclass
class RunRecord:
    command: str
    params: dict
    input_digest: str
    output: dict
    timings: dict = field(default_factory=dict)  # phase -> milliseconds

    def to_dict(self, timings: bool = True) -> dict:
        d = {
            "command": {"name": self.command, "params": to_jsonable(self.params)},
            "input": {"sha256": self.input_digest},
            "output": to_jsonable(self.output),
        }
        if timings:
            d["timings_ms"] = to_jsonable(self.timings)
        return d

    def to_json(self, timings: bool = True) -> str:
        return json.dumps(self.to_dict(timings), indent=2, sort_keys=True) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "RunRecord":
        return cls(
            d["command"]["name"],
            d["command"].get("params", {}),
            d["input"]["sha256"],
            d["output"],
            d.get("timings_ms", {}),
        )

    @classmethod
    def from_json(cls, text: str) -> "RunRecord":
        return cls.from_dict(json.loads(text))


def overlays_from_output(output: dict) -> list:
    """Overlay objects described by a serialized command output."""
    out = []
    centers = output.get("centers") or []
    r = output.get("radius")
    if centers and r:
        out += [GeodesicDisk(Point2.of(c), float(r)) for c in centers]
    elif centers:
        out += [Point2.of(c) for c in centers]
    for path in output.get("paths", []):
        out.append(GeodesicPath([Point2.of(p) for p in path["waypoints"]], float(path["length"])))
    return out


# --------------------------------------------------------------------------
# SVG


class _Frame:
    """Maps polygon coordinates to SVG user space (y axis pointing down)."""

    def __init__(self, P: Polygon):
        x0, y0, x1, y1 = P.shape.bounds
        w, h = x1 - x0, y1 - y0
        m = MARGIN * max(w, h)
        self.x0, self.y0, self.x1, self.y1 = x0 - m, y0 - m, x1 + m, y1 + m
        self.scale = max(self.x1 - self.x0, self.y1 - self.y0)

    def xy(self, x, y) -> str:
        return f"{_num(x)},{_num(self.y0 + self.y1 - y)}"

    def view_box(self) -> str:
        return f"{_num(self.x0)} {_num(self.y0)} {_num(self.x1 - self.x0)} {_num(self.y1 - self.y0)}"


def _num(v: float) -> str:
    s = f"{float(v):.6f}".rstrip("0").rstrip(".")
    return "0" if s in ("-0", "") else s


def _ring_d(frame: _Frame, ring) -> str:
    pts = list(ring)
    if len(pts) > 1 and tuple(pts[0]) == tuple(pts[-1]):
        pts = pts[:-1]
    return "M " + " L ".join(frame.xy(x, y) for x, y in pts) + " Z"


def _geometry_d(frame: _Frame, geom) -> str:
    parts = []
    for poly in getattr(geom, "geoms", [geom]):
        if poly.is_empty or poly.geom_type != "Polygon":
            continue
        parts.append(_ring_d(frame, poly.exterior.coords))
        parts += [_ring_d(frame, r.coords) for r in poly.interiors]
    return " ".join(parts)


def _arc_d(frame: _Frame, arc: Arc) -> str:
    cx, cy, rho = arc.anchor.x, arc.anchor.y, arc.residual_radius
    sweep = arc.sweep
    # split so that no single command covers half a turn or more
    k = max(1, int(math.ceil(sweep / (math.pi * 0.99))))
    angles = [arc.start_angle + sweep * i / k for i in range(k + 1)]
    pt = lambda t: frame.xy(cx + rho * math.cos(t), cy + rho * math.sin(t))
    cmds = [f"M {pt(angles[0])}"]
    for t in angles[1:]:
        # counterclockwise in the plane is clockwise once y is flipped
        cmds.append(f"A {_num(rho)} {_num(rho)} 0 0 0 {pt(t)}")
    return " ".join(cmds)


def disk_boundary_svg_paths(boundary: DiskBoundary, frame: _Frame | None = None, stroke: str = "#000000") -> list:
    """SVG ``path`` elements for the arcs and boundary portions of a disk boundary."""
    frame = frame or _Frame(boundary.polygon)
    width = _num(0.004 * frame.scale)
    out = []
    for arc in boundary.arcs:
        out.append(f'<path d="{_arc_d(frame, arc)}" fill="none" stroke="{stroke}" stroke-width="{width}"/>')
    for seg in boundary.boundary_portions:
        d = f"M {frame.xy(seg.start.x, seg.start.y)} L {frame.xy(seg.end.x, seg.end.y)}"
        out.append(f'<path d="{d}" fill="none" stroke="{stroke}" stroke-width="{width}" stroke-dasharray="{width}"/>')
    return out


def render_svg(P: Polygon, overlays=(), size: int = 800) -> str:
    """SVG document of ``P`` with disks, boundaries, paths and points drawn on top."""
    from .disk import disk_boundary

    frame = _Frame(P)
    w = frame.x1 - frame.x0
    h = frame.y1 - frame.y0
    width, height = (size, size * h / w) if w >= h else (size * w / h, size)
    sw = _num(0.003 * frame.scale)
    out = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" width="{_num(width)}" height="{_num(height)}" '
        f'viewBox="{frame.view_box()}">',
        f'<rect x="{_num(frame.x0)}" y="{_num(frame.y0)}" width="{_num(w)}" height="{_num(h)}" fill="#ffffff"/>',
        f'<path d="{_ring_d(frame, P.outer)}" fill="#d9d9d9" stroke="#000000" stroke-width="{sw}"/>',
    ]
    out += [f'<path d="{_ring_d(frame, hole)}" fill="#ffffff" stroke="#000000" stroke-width="{sw}"/>' for hole in P.holes]

    disks = [o for o in overlays if isinstance(o, GeodesicDisk)]
    dot = _num(0.006 * frame.scale)
    for i, d in enumerate(disks):
        shade = SHADES[i % len(SHADES)]
        region = disk_region(P, d.center, d.radius, SEGMENTS)
        out.append(f'<path d="{_geometry_d(frame, region)}" fill="{shade}" fill-opacity="0.3" fill-rule="evenodd" stroke="none"/>')
        out += disk_boundary_svg_paths(disk_boundary(P, d.center, d.radius), frame, shade)
    for o in overlays:
        if isinstance(o, DiskBoundary):
            out += disk_boundary_svg_paths(o, frame)
        elif isinstance(o, GeodesicPath) and len(o.waypoints) > 1:
            d = "M " + " L ".join(frame.xy(p.x, p.y) for p in o.waypoints)
            out.append(f'<path d="{d}" fill="none" stroke="#000000" stroke-width="{sw}"/>')
        elif isinstance(o, (Arc, BoundarySegment)):
            d = _arc_d(frame, o) if isinstance(o, Arc) else f"M {frame.xy(*o.start)} L {frame.xy(*o.end)}"
            out.append(f'<path d="{d}" fill="none" stroke="#000000" stroke-width="{sw}"/>')
    for i, d in enumerate(disks):
        x, y = frame.xy(*d.center).split(",")
        out.append(f'<circle cx="{x}" cy="{y}" r="{dot}" fill="{SHADES[i % len(SHADES)]}" stroke="#000000" stroke-width="{_num(0.001 * frame.scale)}"/>')
    for o in overlays:
        if isinstance(o, Point2) or (type(o) is tuple and len(o) == 2 and all(isinstance(v, (int, float)) for v in o)):
            x, y = frame.xy(*o).split(",")
            out.append(f'<circle cx="{x}" cy="{y}" r="{dot}" fill="#000000"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(path, P: Polygon, overlays=()) -> None:
    Path(path).write_text(render_svg(P, overlays))
