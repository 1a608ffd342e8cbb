"""Problem-definition file loading.

The canonical truss lives in a TOML file (see problems/ten_bar.toml);
no geometry is hard-coded in the package. Schema:

    [material]            young_modulus, density, allowable_stress
    [limits]              min_member_length, coordinate_resolution,
                          area_resolution, area_min
    [[nodes]]             id, x, y, kind ("support"|"loaded"|"movable"),
                          load = [fx, fy] (loaded nodes only)
    [[members]]           id, end_a, end_b
    [bounds]              one "<var> = [lo, hi]" entry per coordinate
                          variable (x<i>/y<i> of each movable node);
                          "areas_default = [lo, hi]" plus optional
                          per-member "A<i>" overrides
"""

from __future__ import annotations

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib
from importlib import resources
from pathlib import Path

from trussopt.truss import Material, Member, NodeSpec, TrussProblem

DEFAULT_PROBLEM_RESOURCE = "ten_bar.toml"


class ProblemFileError(ValueError):
    """The problem-definition file is missing or malformed."""


def _parse(data: dict, origin: str) -> TrussProblem:
    try:
        material = Material(**data.get("material", {}))
        limits = data.get("limits", {})
        nodes = []
        for raw in data["nodes"]:
            load = tuple(raw.get("load", (0.0, 0.0)))
            nodes.append(
                NodeSpec(
                    id=int(raw["id"]),
                    x=float(raw["x"]),
                    y=float(raw["y"]),
                    kind=raw["kind"],
                    load=(float(load[0]), float(load[1])),
                )
            )
        members = [
            Member(id=int(m["id"]), end_a=int(m["end_a"]), end_b=int(m["end_b"]))
            for m in data["members"]
        ]
        bounds = data["bounds"]
        coord_bounds = []
        for n in sorted(nodes, key=lambda n: n.id):
            if n.kind != "movable":
                continue
            for axis in ("x", "y"):
                key = f"{axis}{n.id}"
                if key not in bounds:
                    raise ProblemFileError(f"{origin}: missing bound for {key}")
                lo, hi = bounds[key]
                coord_bounds.append((float(lo), float(hi)))
        area_default = bounds.get("areas_default")
        area_bounds = []
        for m in sorted(members, key=lambda m: m.id):
            entry = bounds.get(f"A{m.id}", area_default)
            if entry is None:
                raise ProblemFileError(f"{origin}: missing area bound for member {m.id}")
            area_bounds.append((float(entry[0]), float(entry[1])))
        return TrussProblem(
            nodes=tuple(sorted(nodes, key=lambda n: n.id)),
            members=tuple(sorted(members, key=lambda m: m.id)),
            material=material,
            min_member_length=float(limits.get("min_member_length", 15.0)),
            coordinate_resolution=float(limits.get("coordinate_resolution", 1.0)),
            area_resolution=float(limits.get("area_resolution", 0.01)),
            area_min=float(limits.get("area_min", 0.01)),
            coord_bounds=tuple(coord_bounds),
            area_bounds=tuple(area_bounds),
        )
    except ProblemFileError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ProblemFileError(f"{origin}: {exc}") from exc


def load_problem(path: str | Path) -> TrussProblem:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            data = tomllib.load(fh)
    except OSError as exc:
        raise ProblemFileError(f"cannot read problem file {path}: {exc}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ProblemFileError(f"{path}: invalid TOML: {exc}") from exc
    return _parse(data, str(path))


def default_problem() -> TrussProblem:
    """The calibrated ten-bar truss shipped with the package."""
    ref = resources.files("trussopt").joinpath("problems", DEFAULT_PROBLEM_RESOURCE)
    data = tomllib.loads(ref.read_text())
    return _parse(data, DEFAULT_PROBLEM_RESOURCE)
