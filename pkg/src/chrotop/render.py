"""SVG rendering of one- and two-dimensional realizations and DOT export
of face posets.  Geometry stays exact until the final coordinate
formatting; output is deterministic for a given input."""

from __future__ import annotations

import xml.etree.ElementTree as ET

from .errors import Unsupported
from .simplicial import Complex, label_string
from .subdivision import coordinates

PROCESS_COLORS = ["#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#8c564b"]
DEPTH_FILLS = ["#f7fbff", "#deebf7", "#c6dbef", "#9ecae1", "#6baed6", "#4292c6"]

_SQRT3_OVER_2 = 0.8660254037844386


def _fmt(x: float) -> str:
    return f"{x:.4f}"


def _plane_coords(point_weights, corners_2d):
    x = 0.0
    y = 0.0
    for v, w in point_weights:
        cx, cy = corners_2d[v]
        x += float(w) * cx
        y += float(w) * cy
    return x, y


def render_svg(K: Complex, base: Complex, depth_of=None, size: int = 480) -> str:
    """Draw a subdivision of a 1- or 2-dimensional base.

    `depth_of` optionally maps each facet of K to a small integer used
    to pick a fill shade (termination depth).
    """
    dim = base.dim
    if dim not in (1, 2):
        raise Unsupported(f"SVG rendering supports dimensions 1 and 2, not {dim}")
    margin = 30.0
    span = size - 2 * margin
    base_vertices = base.vertices()
    corners_2d = {}
    if dim == 1:
        for v in base_vertices:
            idx = base_vertices.index(v)
            corners_2d[v] = (margin + span * idx / max(1, len(base_vertices) - 1), size / 2)
    else:
        template = [(margin, size - margin), (size - margin, size - margin), (size / 2, size - margin - span * _SQRT3_OVER_2)]
        for i, v in enumerate(base_vertices):
            corners_2d[v] = template[i % 3]

    svg = ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        width=f"{size}px",
        height=f"{size}px",
        viewBox=f"0 0 {size} {size}",
    )
    cells = ET.SubElement(svg, "g", attrib={"stroke": "#333333", "stroke-width": "1"})
    for i, facet in enumerate(K.facets):
        pts = [
            _plane_coords(coordinates(v, base).items, corners_2d) for v in facet
        ]
        d = int(depth_of(facet)) if depth_of is not None else 0
        fill = DEPTH_FILLS[d % len(DEPTH_FILLS)]
        if len(pts) >= 3:
            ET.SubElement(
                cells,
                "polygon",
                points=" ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts),
                fill=fill,
            )
        elif len(pts) == 2:
            (x1, y1), (x2, y2) = pts
            ET.SubElement(
                cells,
                "line",
                x1=_fmt(x1), y1=_fmt(y1), x2=_fmt(x2), y2=_fmt(y2),
                attrib={"stroke": fill if depth_of is not None else "#333333", "stroke-width": "4"},
            )
    dots = ET.SubElement(svg, "g")
    seen = set()
    for facet in K.facets:
        for v in facet:
            if v in seen:
                continue
            seen.add(v)
            x, y = _plane_coords(coordinates(v, base).items, corners_2d)
            ET.SubElement(
                dots,
                "circle",
                cx=_fmt(x), cy=_fmt(y), r="4",
                fill=PROCESS_COLORS[v.color % len(PROCESS_COLORS)],
            )
    return ET.tostring(svg, encoding="unicode")


def render_terminating_svg(tsub, depth: int, size: int = 480) -> str:
    """Stable complex of a terminating subdivision with cells shaded by
    the round they were terminated at."""
    cells = tsub.stable_cells(depth)
    if not cells:
        raise Unsupported("no stable cells materialized yet")
    depth_by_facet = {c.geom_simplex(): c.depth for c in cells}
    stable = tsub.stable_complex(depth)

    def depth_of(facet):
        return depth_by_facet.get(facet, 0)

    return _render_geometric(stable, tsub.base, depth_of, size)


def _render_geometric(K: Complex, base: Complex, depth_of, size: int) -> str:
    """Like render_svg but for complexes whose vertex labels are already
    exact points of the base realization."""
    dim = base.dim
    if dim not in (1, 2):
        raise Unsupported(f"SVG rendering supports dimensions 1 and 2, not {dim}")
    margin = 30.0
    span = size - 2 * margin
    base_vertices = base.vertices()
    corners_2d = {}
    if dim == 1:
        for i, v in enumerate(base_vertices):
            corners_2d[v] = (margin + span * i / max(1, len(base_vertices) - 1), size / 2)
    else:
        template = [(margin, size - margin), (size - margin, size - margin), (size / 2, size - margin - span * _SQRT3_OVER_2)]
        for i, v in enumerate(base_vertices):
            corners_2d[v] = template[i % 3]
    svg = ET.Element(
        "svg",
        xmlns="http://www.w3.org/2000/svg",
        width=f"{size}px",
        height=f"{size}px",
        viewBox=f"0 0 {size} {size}",
    )
    group = ET.SubElement(svg, "g", attrib={"stroke": "#333333", "stroke-width": "1"})
    for facet in K.facets:
        pts = [_plane_coords(v.label.items, corners_2d) for v in facet]
        fill = DEPTH_FILLS[depth_of(facet) % len(DEPTH_FILLS)]
        if len(pts) >= 3:
            ET.SubElement(group, "polygon",
                          points=" ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts), fill=fill)
        elif len(pts) == 2:
            (x1, y1), (x2, y2) = pts
            ET.SubElement(group, "line", x1=_fmt(x1), y1=_fmt(y1), x2=_fmt(x2), y2=_fmt(y2),
                          attrib={"stroke": fill, "stroke-width": "6"})
    dots = ET.SubElement(svg, "g")
    for v in K.vertices():
        x, y = _plane_coords(v.label.items, corners_2d)
        ET.SubElement(dots, "circle", cx=_fmt(x), cy=_fmt(y), r="4",
                      fill=PROCESS_COLORS[v.color % len(PROCESS_COLORS)])
    return ET.tostring(svg, encoding="unicode")


def render_dot(K: Complex) -> str:
    """Face poset of a complex as a DOT digraph: an edge per covering
    containment, lowest-dimensional faces at the bottom."""
    simplexes = K.simplexes()
    ids = {s: f"s{i}" for i, s in enumerate(simplexes)}
    lines = ["digraph faceposet {", "  rankdir=BT;"]
    for s in simplexes:
        label = "|".join(f"{v.color}:{label_string(v.label)}" for v in s)
        lines.append(f'  {ids[s]} [label="{label}"];')
    for s in simplexes:
        if s.dim == 0:
            continue
        for face in s.faces():
            if face.dim == s.dim - 1:
                lines.append(f"  {ids[face]} -> {ids[s]};")
    lines.append("}")
    return "\n".join(lines) + "\n"
