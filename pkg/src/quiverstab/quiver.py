"""Quivers, dimension vectors, stability parameters and representations.

A quiver is stored as an ordered tuple of vertex ids together with an
ordered tuple of ``(tail, head)`` pairs.  Edges are identified by their
position, so loops and parallel edges are distinct.  Stability parameters
are kept as :class:`fractions.Fraction` so that slope comparisons are exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Iterator, Mapping, Sequence

import numpy as np


class QuiverError(ValueError):
    """Raised for malformed quivers, setups or arguments."""


class EnumerationTooLarge(QuiverError):
    """Raised when an enumeration would exceed its candidate cap."""


def as_fraction(value) -> Fraction:
    if isinstance(value, float):
        raise QuiverError(f"floating point value {value!r} where an exact rational is required")
    try:
        return Fraction(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise QuiverError(f"not a rational number: {value!r}") from exc


@dataclass(frozen=True)
class Quiver:
    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(str(v) for v in self.vertices))
        object.__setattr__(self, "edges", tuple((str(t), str(h)) for t, h in self.edges))

    def index(self, vertex: str) -> int:
        return self.vertices.index(vertex)

    def tail(self, a: int) -> str:
        return self.edges[a][0]

    def head(self, a: int) -> str:
        return self.edges[a][1]

    @property
    def edge_indices(self) -> list[tuple[int, int]]:
        """Edges as ``(tail_index, head_index)`` pairs into ``vertices``."""
        pos = {v: i for i, v in enumerate(self.vertices)}
        return [(pos[t], pos[h]) for t, h in self.edges]


@dataclass(frozen=True)
class _VertexVector:
    vertices: tuple[str, ...]
    values: tuple

    def __getitem__(self, vertex: str):
        return self.values[self.vertices.index(vertex)]

    def __iter__(self):
        return iter(self.values)

    def __len__(self):
        return len(self.values)

    def as_dict(self) -> dict:
        return dict(zip(self.vertices, self.values))


@dataclass(frozen=True)
class DimensionVector(_VertexVector):
    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(str(v) for v in self.vertices))
        vals = tuple(int(x) for x in self.values)
        if len(vals) != len(self.vertices):
            raise QuiverError("dimension vector length does not match its vertex list")
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_mapping(cls, vertices: Sequence[str], dims: Mapping[str, int]) -> "DimensionVector":
        return cls(tuple(vertices), tuple(int(dims.get(v, 0)) for v in vertices))

    def with_values(self, values: Iterable[int]) -> "DimensionVector":
        return DimensionVector(self.vertices, tuple(values))

    @property
    def total(self) -> int:
        return sum(self.values)

    def is_zero(self) -> bool:
        return all(x == 0 for x in self.values)

    def __le__(self, other: "DimensionVector") -> bool:
        return all(a <= b for a, b in zip(self.values, other.values))

    def __sub__(self, other: "DimensionVector") -> "DimensionVector":
        return self.with_values(a - b for a, b in zip(self.values, other.values))

    def __str__(self) -> str:
        return "(" + ",".join(str(x) for x in self.values) + ")"


@dataclass(frozen=True)
class StabilityParameter(_VertexVector):
    def __post_init__(self):
        object.__setattr__(self, "vertices", tuple(str(v) for v in self.vertices))
        vals = tuple(as_fraction(x) for x in self.values)
        if len(vals) != len(self.vertices):
            raise QuiverError("stability parameter length does not match its vertex list")
        object.__setattr__(self, "values", vals)

    @classmethod
    def zero(cls, vertices: Sequence[str]) -> "StabilityParameter":
        return cls(tuple(vertices), (Fraction(0),) * len(vertices))

    def shifted(self, c) -> "StabilityParameter":
        c = as_fraction(c)
        return StabilityParameter(self.vertices, tuple(a + c for a in self.values))

    def scaled(self, lam) -> "StabilityParameter":
        lam = as_fraction(lam)
        return StabilityParameter(self.vertices, tuple(a * lam for a in self.values))

    def as_floats(self) -> np.ndarray:
        return np.array([float(a) for a in self.values])

    def __str__(self) -> str:
        return "(" + ",".join(str(a) for a in self.values) + ")"


@dataclass(frozen=True)
class QuiverSetup:
    quiver: Quiver
    dims: DimensionVector
    alpha: StabilityParameter

    @property
    def vertices(self) -> tuple[str, ...]:
        return self.quiver.vertices

    def dimension_vector(self, values: Iterable[int]) -> DimensionVector:
        return DimensionVector(self.quiver.vertices, tuple(values))


@dataclass
class ValidationReport:
    errors: list[str] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)
    trace: Fraction = Fraction(0)

    @property
    def ok(self) -> bool:
        return not self.errors

    @property
    def trace_free(self) -> bool:
        return self.trace == 0


def validate_setup(setup: QuiverSetup) -> ValidationReport:
    """Report schema violations and the value of ``sum_j alpha_j v_j``.

    A nonzero trace is only a warning: it can be normalized away by a
    uniform shift of ``alpha``.
    """
    report = ValidationReport()
    q = setup.quiver
    declared = set(q.vertices)
    if len(declared) != len(q.vertices):
        seen = set()
        for v in q.vertices:
            if v in seen:
                report.errors.append(f"duplicate vertex id {v!r}")
            seen.add(v)
    for a, (t, h) in enumerate(q.edges):
        for end in (t, h):
            if end not in declared:
                report.errors.append(f"edge {a}: unknown vertex {end!r}")
    for name, vec in (("dims", setup.dims), ("alpha", setup.alpha)):
        if vec.vertices != q.vertices:
            report.errors.append(f"{name} is not defined on exactly the quiver's vertices")
    for v, d in zip(setup.dims.vertices, setup.dims.values):
        if d < 0:
            report.errors.append(f"negative dimension {d} at vertex {v!r}")
    if report.errors:
        return report
    report.trace = sum((a * d for a, d in zip(setup.alpha.values, setup.dims.values)), Fraction(0))
    if report.trace != 0:
        report.warnings.append(f"sum of alpha_j v_j = {report.trace} != 0 (not trace-free)")
    return report


def check_representation_shapes(quiver: Quiver, dims: DimensionVector, matrices: Sequence[np.ndarray]) -> list[str]:
    problems = []
    if len(matrices) != len(quiver.edges):
        return [f"expected {len(quiver.edges)} edge matrices, got {len(matrices)}"]
    for a, (t, h) in enumerate(quiver.edges):
        want = (dims[h], dims[t])
        if tuple(matrices[a].shape) != want:
            problems.append(f"edge {a} ({t} -> {h}): matrix shape {tuple(matrices[a].shape)} != {want}")
        elif not np.all(np.isfinite(matrices[a])):
            problems.append(f"edge {a} ({t} -> {h}): non-finite entries")
    return problems


class Representation:
    """One complex matrix per edge, of shape ``(v_head, v_tail)``."""

    def __init__(self, quiver: Quiver, dims: DimensionVector, matrices: Sequence):
        mats = []
        for a, m in enumerate(matrices):
            arr = np.array(m, dtype=complex)
            if arr.size == 0 and a < len(quiver.edges):
                # empty JSON lists lose their shape
                t, h = quiver.edges[a]
                arr = arr.reshape(dims[h], dims[t])
            mats.append(arr)
        problems = check_representation_shapes(quiver, dims, mats)
        if problems:
            raise QuiverError("; ".join(problems))
        for arr in mats:
            arr.flags.writeable = False
        self.quiver = quiver
        self.dims = dims
        self.matrices: tuple[np.ndarray, ...] = tuple(mats)

    @classmethod
    def zeros(cls, quiver: Quiver, dims: DimensionVector) -> "Representation":
        return cls(quiver, dims, [np.zeros((dims[h], dims[t]), complex) for t, h in quiver.edges])

    def replace(self, matrices: Sequence) -> "Representation":
        return Representation(self.quiver, self.dims, matrices)

    def norm_squared(self) -> float:
        return float(sum(np.vdot(m, m).real for m in self.matrices))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Representation):
            return NotImplemented
        return (
            self.quiver == other.quiver
            and self.dims == other.dims
            and all(np.array_equal(a, b) for a, b in zip(self.matrices, other.matrices))
        )

    def __repr__(self) -> str:
        return f"Representation(dims={self.dims}, edges={len(self.matrices)})"


def gen_adhm(k: int, n: int) -> QuiverSetup:
    """The doubled ADHM quiver: vertices ``V`` (dim k) and ``W`` (dim 1).

    Edge order: n edges V -> W, n edges W -> V, then two loops at V.
    The stability parameter is zero.
    """
    if k < 1 or n < 1:
        raise QuiverError(f"ADHM quiver needs k >= 1 and n >= 1, got k={k}, n={n}")
    vertices = ("V", "W")
    edges = [("V", "W")] * n + [("W", "V")] * n + [("V", "V")] * 2
    q = Quiver(vertices, tuple(edges))
    return QuiverSetup(q, DimensionVector(vertices, (k, 1)), StabilityParameter.zero(vertices))


def gen_polygon(sides: Sequence) -> QuiverSetup:
    """Star quiver for polygons in R^3 with the given side lengths.

    Vertex ``"0"`` is the centre (dim 2); vertex ``str(j)`` carries side j
    (dim 1) with an edge into the centre.  ``alpha_j = -s_j`` and
    ``alpha_0 = sum(s) / 2``.
    """
    s = [as_fraction(x) for x in sides]
    if len(s) < 3:
        raise QuiverError(f"a polygon needs at least 3 sides, got {len(s)}")
    for j, x in enumerate(s, 1):
        if x <= 0:
            raise QuiverError(f"side {j} has nonpositive length {x}")
    outer = tuple(str(j) for j in range(1, len(s) + 1))
    vertices = ("0",) + outer
    q = Quiver(vertices, tuple((v, "0") for v in outer))
    dims = DimensionVector(vertices, (2,) + (1,) * len(s))
    alpha = StabilityParameter(vertices, (sum(s, Fraction(0)) / 2,) + tuple(-x for x in s))
    return QuiverSetup(q, dims, alpha)


def enumeration_size(v: DimensionVector) -> int:
    return max(0, math.prod(x + 1 for x in v.values) - 2)


def sub_dimension_vectors(v: DimensionVector) -> Iterator[DimensionVector]:
    """Proper nonzero ``v' <= v`` in ascending lexicographic order."""
    full = v.values
    for vals in itertools.product(*(range(x + 1) for x in full)):
        if vals == full or not any(vals):
            continue
        yield DimensionVector(v.vertices, vals)


@dataclass(frozen=True)
class GroupProfile:
    blocks: tuple[int, ...]
    dim_g: int
    dim_pg: int


def group_profile(v: DimensionVector) -> GroupProfile:
    """Unitary factor sizes and real dimensions of ``G_v`` and ``PG_v``."""
    dim_g = sum(x * x for x in v.values)
    return GroupProfile(tuple(v.values), dim_g, dim_g - 1)
