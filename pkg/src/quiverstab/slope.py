"""Exact rank, degree and slope, and King's destabilizing dimension vectors."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .quiver import (
    DimensionVector,
    EnumerationTooLarge,
    QuiverError,
    QuiverSetup,
    StabilityParameter,
    enumeration_size,
    sub_dimension_vectors,
)

DEFAULT_CAP = 10**6


@dataclass(frozen=True)
class SlopeReport:
    rank: int
    degree: Fraction
    slope: Fraction


def rank(v: DimensionVector) -> int:
    return sum(v.values)


def degree_alpha(v: DimensionVector, alpha: StabilityParameter) -> Fraction:
    return sum((-a * d for a, d in zip(alpha.values, v.values)), Fraction(0))


def slope_alpha(v: DimensionVector, alpha: StabilityParameter) -> Fraction:
    r = rank(v)
    if r <= 0:
        raise QuiverError("slope is undefined for a dimension vector of rank 0")
    return degree_alpha(v, alpha) / r


def slope_report(v: DimensionVector, alpha: StabilityParameter) -> SlopeReport:
    return SlopeReport(rank(v), degree_alpha(v, alpha), slope_alpha(v, alpha))


def normalization_shift(setup: QuiverSetup) -> Fraction:
    """The constant subtracted from every alpha_j to make alpha trace-free."""
    r = rank(setup.dims)
    if r <= 0:
        raise QuiverError("cannot normalize alpha for a dimension vector of rank 0")
    trace = sum((a * d for a, d in zip(setup.alpha.values, setup.dims.values)), Fraction(0))
    return trace / r


def normalize_alpha(setup: QuiverSetup) -> StabilityParameter:
    c = normalization_shift(setup)
    if c == 0:
        return setup.alpha
    return setup.alpha.shifted(-c)


def destabilizing_dimension_vectors(
    setup: QuiverSetup, *, strict: bool = False, cap: int = DEFAULT_CAP
) -> list[tuple[DimensionVector, SlopeReport]]:
    """Proper nonzero ``v' <= v`` with slope >= 0 after normalizing alpha.

    With ``strict=True`` only slope > 0 is kept.  Slope reports refer to
    the normalized parameter.  Raises :class:`EnumerationTooLarge` when
    the candidate count exceeds ``cap``.
    """
    alpha = normalize_alpha(setup)
    size = enumeration_size(setup.dims)
    if size > cap:
        raise EnumerationTooLarge(f"{size} candidate sub-dimension vectors exceed the cap of {cap}")
    out = []
    for sub in sub_dimension_vectors(setup.dims):
        report = slope_report(sub, alpha)
        if report.slope > 0 or (report.slope == 0 and not strict):
            out.append((sub, report))
    return out
