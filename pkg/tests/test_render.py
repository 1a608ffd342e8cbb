"""Tests for SVG rendering."""

import xml.etree.ElementTree as ET

import numpy as np
import pytest

from trussopt import DegenerateGeometryError, DesignVector, mass
from trussopt.render import render_svg

from reference_solutions import TABU_SEARCH
from conftest import design_from_reference

SVG_NS = "{http://www.w3.org/2000/svg}"


@pytest.fixture
def design(problem):
    return design_from_reference(TABU_SEARCH)


def test_valid_xml(problem, design):
    root = ET.fromstring(render_svg(problem, design))
    assert root.tag == f"{SVG_NS}svg"


def test_deterministic(problem, design):
    assert render_svg(problem, design) == render_svg(problem, design)


def test_element_counts(problem, design):
    root = ET.fromstring(render_svg(problem, design))
    circles = root.findall(f"{SVG_NS}circle")
    polygons = root.findall(f"{SVG_NS}polygon")
    lines = root.findall(f"{SVG_NS}line")
    assert len(circles) == len(problem.nodes)
    assert len(polygons) == sum(1 for n in problem.nodes if n.kind == "support")
    # one line per member plus three per load arrow (shaft + two head strokes)
    n_loads = sum(1 for n in problem.nodes if n.load != (0.0, 0.0))
    assert len(lines) == len(problem.members) + 3 * n_loads


def test_stroke_width_tracks_area(problem, design):
    root = ET.fromstring(render_svg(problem, design))
    lines = root.findall(f"{SVG_NS}line")[: len(problem.members)]
    widths = np.array([float(l.get("stroke-width")) for l in lines])
    areas = np.asarray(design.areas, dtype=float)
    assert widths.argmax() == areas.argmax()
    # monotone: wider members never have smaller area
    order = np.argsort(areas)
    assert np.all(np.diff(widths[order]) >= -1e-9)


def test_mass_label_present(problem, design):
    svg = render_svg(problem, design)
    assert f"mass: {mass(problem, design):.1f} kg" in svg


def test_title_included(problem, design):
    svg = render_svg(problem, design, title="tabu best")
    assert "tabu best" in svg


def test_canvas_fits_geometry(problem, design):
    root = ET.fromstring(render_svg(problem, design))
    width = float(root.get("width"))
    height = float(root.get("height"))
    for line in root.findall(f"{SVG_NS}line"):
        for attr in ("x1", "x2"):
            assert 0.0 <= float(line.get(attr)) <= width
        for attr in ("y1", "y2"):
            assert 0.0 <= float(line.get(attr)) <= height


def test_degenerate_geometry_rejected(problem, design):
    # collapse movable node 5 onto fixed node 4 at (0, 910)
    coords = design.coords.copy()
    coords[2], coords[3] = 0.0, 910.0
    bad = DesignVector(coords=coords, areas=design.areas)
    with pytest.raises(DegenerateGeometryError):
        render_svg(problem, bad)
