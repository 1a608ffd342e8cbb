"""Parametric 2-D pin-jointed truss: geometry, direct-stiffness solve,
constraint checking and solution post-processing.

Units are cm, cm^2, N and kg throughout. Stresses in N/cm^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

PIVOT_TOL_FACTOR = 1e-10  # singularity threshold relative to max stiffness diagonal


class DegenerateGeometryError(ValueError):
    """A member has (near) coincident endpoints."""


class RepairFailedError(RuntimeError):
    """repair_minimal hit its iteration bound with violations remaining."""

    def __init__(self, message, violations=None):
        super().__init__(message)
        self.violations = violations


@dataclass(frozen=True)
class Material:
    young_modulus: float = 6.88e6   # N/cm^2
    density: float = 2.7e-3         # kg/cm^3
    allowable_stress: float = 17_200.0  # N/cm^2

    def __post_init__(self):
        if self.young_modulus <= 0 or self.density <= 0 or self.allowable_stress <= 0:
            raise ValueError("material constants must be strictly positive")


@dataclass(frozen=True)
class NodeSpec:
    id: int
    x: float
    y: float
    kind: str  # "support" | "loaded" | "movable"
    load: tuple[float, float] = (0.0, 0.0)

    def __post_init__(self):
        if self.kind not in ("support", "loaded", "movable"):
            raise ValueError(f"unknown node kind {self.kind!r}")
        if self.kind != "loaded" and (self.load[0] != 0.0 or self.load[1] != 0.0):
            raise ValueError(f"node {self.id}: only loaded nodes may carry a load")


@dataclass(frozen=True)
class Member:
    id: int
    end_a: int
    end_b: int
    area: float | None = None  # cm^2; None while connectivity-only

    def __post_init__(self):
        if self.end_a == self.end_b:
            raise ValueError(f"member {self.id}: end nodes must differ")


@dataclass(frozen=True)
class TrussProblem:
    nodes: tuple[NodeSpec, ...]
    members: tuple[Member, ...]
    material: Material = Material()
    min_member_length: float = 15.0   # cm
    coordinate_resolution: float = 1.0    # cm
    area_resolution: float = 0.01         # cm^2
    area_min: float = 0.01                # cm^2
    coord_bounds: tuple[tuple[float, float], ...] = ()   # one (lo, hi) per coord variable
    area_bounds: tuple[tuple[float, float], ...] = ()    # one (lo, hi) per member

    def __post_init__(self):
        ids = [n.id for n in self.nodes]
        if len(set(ids)) != len(ids):
            raise ValueError("duplicate node ids")
        mids = [m.id for m in self.members]
        if len(set(mids)) != len(mids):
            raise ValueError("duplicate member ids")
        known = set(ids)
        adj = {i: set() for i in known}
        for m in self.members:
            if m.end_a not in known or m.end_b not in known:
                raise ValueError(f"member {m.id} references unknown node")
            adj[m.end_a].add(m.end_b)
            adj[m.end_b].add(m.end_a)
        seen = {ids[0]}
        stack = [ids[0]]
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        if seen != known:
            raise ValueError("member graph is not connected")
        if len(self.coord_bounds) != 2 * len(self.movable_nodes()):
            raise ValueError("need one coordinate bound pair per movable x and y")
        if len(self.area_bounds) != len(self.members):
            raise ValueError("need one area bound pair per member")

    def movable_nodes(self) -> tuple[NodeSpec, ...]:
        return tuple(n for n in self.nodes if n.kind == "movable")

    def n_variables(self) -> int:
        return 2 * len(self.movable_nodes()) + len(self.members)

    def variable_names(self) -> list[str]:
        names = []
        for n in self.movable_nodes():
            names += [f"x{n.id}", f"y{n.id}"]
        names += [f"A{m.id}" for m in self.members]
        return names

    def variable_bounds(self) -> list[tuple[float, float]]:
        return list(self.coord_bounds) + list(self.area_bounds)

    def variable_resolutions(self) -> np.ndarray:
        ncoord = 2 * len(self.movable_nodes())
        return np.array(
            [self.coordinate_resolution] * ncoord
            + [self.area_resolution] * len(self.members)
        )


@dataclass(frozen=True)
class DesignVector:
    """Free parameters: movable-node coordinates then member areas.

    Coordinates are in node-id order (x then y per node); areas in
    member-id order, matching TrussProblem.variable_names().
    """

    coords: np.ndarray
    areas: np.ndarray

    def as_array(self) -> np.ndarray:
        return np.concatenate([self.coords, self.areas])

    @staticmethod
    def from_array(x: np.ndarray, n_coords: int) -> "DesignVector":
        x = np.asarray(x, dtype=float)
        return DesignVector(coords=x[:n_coords].copy(), areas=x[n_coords:].copy())

    def quantized(self, problem: TrussProblem) -> "DesignVector":
        c = np.round(self.coords / problem.coordinate_resolution) * problem.coordinate_resolution
        a = np.round(self.areas / problem.area_resolution) * problem.area_resolution
        a = np.maximum(a, problem.area_min)
        return DesignVector(coords=c, areas=a)

    def clipped(self, problem: TrussProblem) -> "DesignVector":
        bounds = problem.variable_bounds()
        lo = np.array([b[0] for b in bounds])
        hi = np.array([b[1] for b in bounds])
        x = np.clip(self.as_array(), lo, hi)
        return DesignVector.from_array(x, len(self.coords))

    def key(self, problem: TrussProblem) -> tuple:
        """Exact identity of the quantized vector, usable as a dict key."""
        ci = np.round(self.coords / problem.coordinate_resolution).astype(np.int64)
        ai = np.round(self.areas / problem.area_resolution).astype(np.int64)
        return tuple(ci) + tuple(ai)


@dataclass(frozen=True)
class Evaluation:
    mass: float
    lengths: np.ndarray
    axial_forces: np.ndarray
    stresses: np.ndarray
    buckling_margins: np.ndarray
    stress_excess: np.ndarray
    buckling_excess: np.ndarray
    length_deficit: np.ndarray
    feasible: bool
    singular: bool

    def max_violation(self) -> float:
        if self.singular:
            return math.inf
        return max(
            float(self.stress_excess.max(initial=0.0)),
            float(self.buckling_excess.max(initial=0.0)),
            float(self.length_deficit.max(initial=0.0)),
        )


def node_positions(problem: TrussProblem, design: DesignVector) -> dict[int, tuple[float, float]]:
    pos = {n.id: (n.x, n.y) for n in problem.nodes}
    movable = problem.movable_nodes()
    for i, n in enumerate(movable):
        pos[n.id] = (float(design.coords[2 * i]), float(design.coords[2 * i + 1]))
    return pos


def member_length(problem: TrussProblem, design: DesignVector, member_id: int) -> float:
    pos = node_positions(problem, design)
    for m in problem.members:
        if m.id == member_id:
            return _length(pos[m.end_a], pos[m.end_b], m.id)
    raise KeyError(f"no member with id {member_id}")


def _length(pa, pb, member_id) -> float:
    length = math.hypot(pb[0] - pa[0], pb[1] - pa[1])
    if length <= 0.0:
        raise DegenerateGeometryError(f"member {member_id} has coincident endpoints")
    return length


def _all_lengths(problem: TrussProblem, design: DesignVector) -> np.ndarray:
    pos = node_positions(problem, design)
    return np.array(
        [_length(pos[m.end_a], pos[m.end_b], m.id) for m in problem.members]
    )


def mass(problem: TrussProblem, design: DesignVector) -> float:
    lengths = _all_lengths(problem, design)
    return float(problem.material.density * np.dot(design.areas, lengths))


def buckling_critical_stress(material: Material, area: float, length: float) -> float:
    """Euler critical stress for a solid circular section.

    P_cr = pi^2 E I / L^2 with I = A^2 / (4 pi) gives sigma_cr = pi E A / (4 L^2).
    """
    if area <= 0 or length <= 0:
        raise ValueError("area and length must be positive")
    return math.pi * material.young_modulus * area / (4.0 * length * length)


def _cholesky_solve(K: np.ndarray, f: np.ndarray) -> np.ndarray | None:
    """Solve K u = f by Cholesky; None if a pivot falls below the tolerance."""
    n = K.shape[0]
    tol = PIVOT_TOL_FACTOR * float(np.max(np.diag(K)))
    L = np.zeros_like(K)
    for j in range(n):
        d = K[j, j] - L[j, :j] @ L[j, :j]
        if d <= tol:
            return None
        L[j, j] = math.sqrt(d)
        if j + 1 < n:
            L[j + 1 :, j] = (K[j + 1 :, j] - L[j + 1 :, :j] @ L[j, :j]) / L[j, j]
    # forward then back substitution
    y = np.zeros(n)
    for i in range(n):
        y[i] = (f[i] - L[i, :i] @ y[:i]) / L[i, i]
    u = np.zeros(n)
    for i in range(n - 1, -1, -1):
        u[i] = (y[i] - L[i + 1 :, i] @ u[i + 1 :]) / L[i, i]
    return u


def singular_evaluation(problem: TrussProblem, design: DesignVector) -> Evaluation:
    """Sentinel evaluation for mechanisms and degenerate geometry."""
    nm = len(problem.members)
    zeros = np.zeros(nm)
    return Evaluation(
        mass=math.inf,
        lengths=zeros,
        axial_forces=zeros,
        stresses=zeros,
        buckling_margins=np.full(nm, -math.inf),
        stress_excess=np.full(nm, math.inf),
        buckling_excess=np.full(nm, math.inf),
        length_deficit=np.full(nm, math.inf),
        feasible=False,
        singular=True,
    )


def solve(problem: TrussProblem, design: DesignVector) -> Evaluation:
    """Direct-stiffness solve; fills every Evaluation field.

    A rank-deficient reduced stiffness matrix (mechanism) yields an
    Evaluation with singular=True rather than an exception.
    """
    pos = node_positions(problem, design)
    node_ids = sorted(pos)
    idx = {nid: i for i, nid in enumerate(node_ids)}
    ndof = 2 * len(node_ids)
    E = problem.material.young_modulus

    lengths = np.empty(len(problem.members))
    direction = np.empty((len(problem.members), 2))
    K = np.zeros((ndof, ndof))
    for e, m in enumerate(problem.members):
        pa, pb = pos[m.end_a], pos[m.end_b]
        length = _length(pa, pb, m.id)
        lengths[e] = length
        c = (pb[0] - pa[0]) / length
        s = (pb[1] - pa[1]) / length
        direction[e] = (c, s)
        k = (E * design.areas[e] / length) * np.array([[c * c, c * s], [c * s, s * s]])
        ia, ib = 2 * idx[m.end_a], 2 * idx[m.end_b]
        K[ia : ia + 2, ia : ia + 2] += k
        K[ib : ib + 2, ib : ib + 2] += k
        K[ia : ia + 2, ib : ib + 2] -= k
        K[ib : ib + 2, ia : ia + 2] -= k

    f = np.zeros(ndof)
    fixed = []
    for n in problem.nodes:
        i = idx[n.id]
        if n.kind == "support":
            fixed += [2 * i, 2 * i + 1]
        f[2 * i] += n.load[0]
        f[2 * i + 1] += n.load[1]
    free = np.setdiff1d(np.arange(ndof), fixed)
    if free.size == 0:
        return singular_evaluation(problem, design)

    u_free = _cholesky_solve(K[np.ix_(free, free)], f[free])
    if u_free is None:
        return singular_evaluation(problem, design)
    u = np.zeros(ndof)
    u[free] = u_free

    forces = np.empty(len(problem.members))
    for e, m in enumerate(problem.members):
        ia, ib = 2 * idx[m.end_a], 2 * idx[m.end_b]
        elongation = (u[ib] - u[ia]) * direction[e, 0] + (u[ib + 1] - u[ia + 1]) * direction[e, 1]
        forces[e] = E * design.areas[e] * elongation / lengths[e]
    stresses = forces / design.areas

    total_mass = float(problem.material.density * np.dot(design.areas, lengths))
    sigma_cr = (math.pi * E / 4.0) * design.areas / lengths**2
    compression = forces < 0.0
    margins = np.where(compression, sigma_cr - np.abs(stresses), math.inf)

    allow = problem.material.allowable_stress
    stress_excess = np.maximum(0.0, np.abs(stresses) - allow)
    buckling_excess = np.where(
        compression, np.maximum(0.0, np.abs(stresses) - sigma_cr), 0.0
    )
    length_deficit = np.maximum(0.0, problem.min_member_length - lengths)
    feasible = (
        float(stress_excess.max(initial=0.0)) == 0.0
        and float(buckling_excess.max(initial=0.0)) == 0.0
        and float(length_deficit.max(initial=0.0)) == 0.0
    )
    return Evaluation(
        mass=total_mass,
        lengths=lengths,
        axial_forces=forces,
        stresses=stresses,
        buckling_margins=margins,
        stress_excess=stress_excess,
        buckling_excess=buckling_excess,
        length_deficit=length_deficit,
        feasible=feasible,
        singular=False,
    )


def check_constraints(problem: TrussProblem, evaluation: Evaluation):
    """Violation magnitudes and the feasibility flag of an evaluation."""
    violations = {
        "stress_excess": evaluation.stress_excess,
        "buckling_excess": evaluation.buckling_excess,
        "length_deficit": evaluation.length_deficit,
    }
    feasible = not evaluation.singular and all(
        float(v.max(initial=0.0)) == 0.0 for v in violations.values()
    )
    return violations, feasible


@dataclass(frozen=True)
class TopologyReport:
    removed_member_ids: tuple[int, ...]
    problem: TrussProblem | None       # reduced problem; None when nothing removed
    evaluation: Evaluation | None      # evaluation of the reduced structure
    feasible: bool
    singular: bool


def _subproblem(problem: TrussProblem, keep: list[int]) -> TrussProblem:
    members = tuple(m for m in problem.members if m.id in keep)
    bounds = tuple(
        b for m, b in zip(problem.members, problem.area_bounds) if m.id in keep
    )
    return replace(problem, members=members, area_bounds=bounds)


def _subdesign(problem: TrussProblem, design: DesignVector, keep: list[int]) -> DesignVector:
    areas = np.array(
        [a for m, a in zip(problem.members, design.areas) if m.id in keep]
    )
    return DesignVector(coords=design.coords.copy(), areas=areas)


def reduce_topology(
    problem: TrussProblem,
    design: DesignVector,
    evaluation: Evaluation | None = None,
    area_threshold: float | None = None,
):
    """Remove minimum-area members (and any below area_threshold), re-solve.

    Infeasibility or a mechanism in the reduced structure is reported,
    never raised. Returns (reduced_design, TopologyReport); when nothing
    is removed the design comes back unchanged with an empty report.
    """
    threshold = problem.area_min + 0.5 * problem.area_resolution
    if area_threshold is not None:
        threshold = max(threshold, area_threshold)
    removed = [
        m.id for m, a in zip(problem.members, design.areas) if a <= threshold
    ]
    if not removed:
        return design, TopologyReport(
            removed_member_ids=(),
            problem=None,
            evaluation=evaluation,
            feasible=evaluation.feasible if evaluation is not None else True,
            singular=False,
        )
    keep = [m.id for m in problem.members if m.id not in removed]
    try:
        sub = _subproblem(problem, keep)
    except ValueError:
        # removal disconnected the member graph: that is a mechanism,
        # reported like any other singular reduced structure
        return design, TopologyReport(
            removed_member_ids=tuple(removed),
            problem=None,
            evaluation=None,
            feasible=False,
            singular=True,
        )
    sub_design = _subdesign(problem, design, keep)
    try:
        ev = solve(sub, sub_design)
    except DegenerateGeometryError:
        ev = singular_evaluation(sub, sub_design)
    return sub_design, TopologyReport(
        removed_member_ids=tuple(removed),
        problem=sub,
        evaluation=ev,
        feasible=ev.feasible,
        singular=ev.singular,
    )


def repair_minimal(
    problem: TrussProblem,
    design: DesignVector,
    evaluation: Evaluation | None = None,
    max_iterations: int = 50,
):
    """Clear stress/buckling violations by minimal quantized area increases.

    Only member areas are adjusted; a residual length deficit (or a
    mechanism) cannot be repaired and raises RepairFailedError.
    Returns (repaired_design, evaluation) and is a no-op on feasible input.
    """
    if evaluation is None:
        evaluation = solve(problem, design)
    if evaluation.singular:
        raise RepairFailedError("cannot repair a mechanism", violations=None)
    if evaluation.feasible:
        return design, evaluation

    E = problem.material.young_modulus
    allow = problem.material.allowable_stress
    res = problem.area_resolution
    current = design
    ev = evaluation
    for _ in range(max_iterations):
        if ev.feasible:
            return current, ev
        if (
            float(ev.stress_excess.max(initial=0.0)) == 0.0
            and float(ev.buckling_excess.max(initial=0.0)) == 0.0
        ):
            break  # only length deficits remain; areas cannot fix geometry
        areas = current.areas.copy()
        for e in range(len(problem.members)):
            if ev.stress_excess[e] == 0.0 and ev.buckling_excess[e] == 0.0:
                continue
            force = abs(ev.axial_forces[e])
            need = force / allow
            if ev.axial_forces[e] < 0.0:
                # buckling: |F|/A <= pi E A / (4 L^2)  =>  A >= sqrt(4 |F| L^2 / (pi E))
                need = max(need, math.sqrt(4.0 * force * ev.lengths[e] ** 2 / (math.pi * E)))
            quantized = math.ceil(need / res - 1e-9) * res
            if quantized > areas[e]:
                areas[e] = quantized
        candidate = DesignVector(coords=current.coords.copy(), areas=areas)
        if np.array_equal(candidate.areas, current.areas):
            # forces said no increase needed yet violations persist; nudge all violators
            mask = (ev.stress_excess > 0) | (ev.buckling_excess > 0)
            areas[mask] += res
            candidate = DesignVector(coords=current.coords.copy(), areas=areas)
        current = candidate
        ev = solve(problem, current)
        if ev.singular:
            raise RepairFailedError("repair produced a mechanism", violations=None)
    if ev.feasible:
        return current, ev
    violations, _ = check_constraints(problem, ev)
    raise RepairFailedError(
        "repair iteration bound reached with violations remaining",
        violations=violations,
    )
