"""Deterministic SVG rendering of truss designs.

The drawing is computed entirely from (problem, design): identical inputs
produce byte-identical documents. Member stroke width is proportional to
sqrt(area) so the drawing hints at the force flow.
"""

from __future__ import annotations

import math

from trussopt.truss import (
    DegenerateGeometryError,
    DesignVector,
    TrussProblem,
    mass,
    node_positions,
)

CANVAS_WIDTH = 800.0
MARGIN = 60.0
NODE_RADIUS = 5.0
SUPPORT_SIZE = 16.0
ARROW_LENGTH = 70.0
MAX_STROKE = 14.0


def _fmt(value: float) -> str:
    return f"{value:.2f}"


def render_svg(problem: TrussProblem, design: DesignVector, title: str | None = None) -> str:
    """SVG document for a design; raises on degenerate geometry."""
    pos = node_positions(problem, design)
    for m in problem.members:
        pa, pb = pos[m.end_a], pos[m.end_b]
        if math.hypot(pb[0] - pa[0], pb[1] - pa[1]) <= 0.0:
            raise DegenerateGeometryError(f"member {m.id} has coincident endpoints")

    xs = [p[0] for p in pos.values()]
    ys = [p[1] for p in pos.values()]
    span_x = max(xs) - min(xs) or 1.0
    span_y = max(ys) - min(ys) or 1.0
    scale = (CANVAS_WIDTH - 2 * MARGIN) / span_x
    height = span_y * scale + 2 * MARGIN + 40.0  # room for the label

    def to_canvas(p):
        # flip y: SVG grows downward, the truss y grows upward
        x = MARGIN + (p[0] - min(xs)) * scale
        y = MARGIN + (max(ys) - p[1]) * scale
        return x, y

    max_area = max(float(a) for a in design.areas)
    total_mass = mass(problem, design)

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(CANVAS_WIDTH)}" '
        f'height="{_fmt(height)}" viewBox="0 0 {_fmt(CANVAS_WIDTH)} {_fmt(height)}">',
        '<rect width="100%" height="100%" fill="white"/>',
    ]

    for m, area in zip(problem.members, design.areas):
        (x1, y1), (x2, y2) = to_canvas(pos[m.end_a]), to_canvas(pos[m.end_b])
        stroke = max(0.5, MAX_STROKE * math.sqrt(float(area) / max_area))
        parts.append(
            f'<line x1="{_fmt(x1)}" y1="{_fmt(y1)}" x2="{_fmt(x2)}" y2="{_fmt(y2)}" '
            f'stroke="#444444" stroke-width="{_fmt(stroke)}" stroke-linecap="round">'
            f"<title>member {m.id}: A={float(area):.2f} cm2</title></line>"
        )

    for n in problem.nodes:
        x, y = to_canvas(pos[n.id])
        if n.kind == "support":
            s = SUPPORT_SIZE
            parts.append(
                f'<polygon points="{_fmt(x)},{_fmt(y)} {_fmt(x - s / 2)},{_fmt(y + s)} '
                f'{_fmt(x + s / 2)},{_fmt(y + s)}" fill="#1f77b4"/>'
            )
        fill = {"support": "#1f77b4", "loaded": "#d62728", "movable": "#2ca02c"}[n.kind]
        parts.append(
            f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="{_fmt(NODE_RADIUS)}" fill="{fill}">'
            f"<title>node {n.id} ({n.kind})</title></circle>"
        )
        parts.append(
            f'<text x="{_fmt(x + 8)}" y="{_fmt(y - 8)}" font-family="sans-serif" '
            f'font-size="12" fill="#000000">{n.id}</text>'
        )

    for n in problem.nodes:
        fx, fy = n.load
        if fx == 0.0 and fy == 0.0:
            continue
        x, y = to_canvas(pos[n.id])
        norm = math.hypot(fx, fy)
        # unit vector in canvas space (canvas y is flipped)
        ux, uy = fx / norm, -fy / norm
        tip_x, tip_y = x + ux * ARROW_LENGTH, y + uy * ARROW_LENGTH
        # arrow head: two short back-strokes
        px, py = -uy, ux
        for s in (+1.0, -1.0):
            bx = tip_x - ux * 12.0 + s * px * 6.0
            by = tip_y - uy * 12.0 + s * py * 6.0
            parts.append(
                f'<line x1="{_fmt(tip_x)}" y1="{_fmt(tip_y)}" x2="{_fmt(bx)}" y2="{_fmt(by)}" '
                'stroke="#d62728" stroke-width="2.50"/>'
            )
        parts.append(
            f'<line x1="{_fmt(x)}" y1="{_fmt(y)}" x2="{_fmt(tip_x)}" y2="{_fmt(tip_y)}" '
            'stroke="#d62728" stroke-width="2.50"/>'
        )
        parts.append(
            f'<text x="{_fmt(tip_x + 6)}" y="{_fmt(tip_y + 4)}" font-family="sans-serif" '
            f'font-size="12" fill="#d62728">{norm:.0f} N</text>'
        )

    label = f"mass: {total_mass:.1f} kg"
    if title:
        label = f"{title} — {label}"
    parts.append(
        f'<text x="{_fmt(MARGIN)}" y="{_fmt(height - 15)}" font-family="sans-serif" '
        f'font-size="16" fill="#000000">{label}</text>'
    )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"
