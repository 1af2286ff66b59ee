"""Hom^0/Hom^1 dimension counts, Euler characteristic and the minimal dimension.

For a subrepresentation with dimension vector ``v'`` of ``v``::

    hom0 = sum_j v'_j (v_j - v'_j)
    hom1 = sum_a v'_{t(a)} (v_{h(a)} - v'_{h(a)})

(complex dimensions), ``chi = hom0 - hom1`` and the candidate value for the
minimal dimension is ``-2 chi``, the real codimension count.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .quiver import DimensionVector, Quiver, QuiverError, QuiverSetup, as_fraction
from .slope import DEFAULT_CAP, SlopeReport, destabilizing_dimension_vectors

INFINITY = math.inf


@dataclass(frozen=True)
class HomDims:
    hom0_complex: int
    hom1_complex: int

    @property
    def hom0_real(self) -> int:
        return 2 * self.hom0_complex

    @property
    def hom1_real(self) -> int:
        return 2 * self.hom1_complex

    @property
    def euler(self) -> int:
        return self.hom0_complex - self.hom1_complex


@dataclass(frozen=True)
class Candidate:
    sub: DimensionVector
    slope: SlopeReport
    value: int  # -2 chi


@dataclass(frozen=True)
class DminReport:
    d_min: float | int
    witness: DimensionVector | None
    per_candidate: tuple[Candidate, ...] = field(default=())

    @property
    def minimizers(self) -> list[DimensionVector]:
        return [c.sub for c in self.per_candidate if c.value == self.d_min]


def hom_dims(quiver: Quiver, v: DimensionVector, v_sub: DimensionVector) -> HomDims:
    if not v_sub <= v or any(x < 0 for x in v_sub.values):
        raise QuiverError(f"{v_sub} is not a sub-dimension vector of {v}")
    hom0 = sum(s * (d - s) for s, d in zip(v_sub.values, v.values))
    hom1 = 0
    for t, h in quiver.edge_indices:
        hom1 += v_sub.values[t] * (v.values[h] - v_sub.values[h])
    return HomDims(hom0, hom1)


def euler_characteristic(quiver: Quiver, v: DimensionVector, v_sub: DimensionVector) -> int:
    return hom_dims(quiver, v, v_sub).euler


def d_min(setup: QuiverSetup, *, cap: int = DEFAULT_CAP) -> DminReport:
    """Minimum of ``-2 chi`` over destabilizing sub-dimension vectors.

    Returns ``INFINITY`` with no witness when nothing destabilizes.  Ties go
    to the lexicographically least minimizer.
    """
    candidates = []
    for sub, rep in destabilizing_dimension_vectors(setup, cap=cap):
        value = -2 * euler_characteristic(setup.quiver, setup.dims, sub)
        candidates.append(Candidate(sub, rep, value))
    if not candidates:
        return DminReport(INFINITY, None, ())
    best = min(candidates, key=lambda c: c.value)  # min keeps the first, i.e. lex-least
    return DminReport(best.value, best.sub, tuple(candidates))


def adhm_dmin_closed_form(k: int, n: int) -> int:
    if k < 1 or n < 1:
        raise QuiverError("k and n must be positive")
    return 2 * (k + n - 1)


def strictly_short_level(sides: Sequence) -> int:
    """Largest l such that every l-subset of sides is strictly short.

    A subset is strictly short when its total is less than the total of
    the remaining sides.  The binding subsets are the l largest sides.
    """
    s = [as_fraction(x) for x in sides]
    if len(s) < 3:
        raise QuiverError("need at least 3 sides")
    if any(x <= 0 for x in s):
        raise QuiverError("sides must be positive")
    total = sum(s, Fraction(0))
    ordered = sorted(s, reverse=True)
    level = 0
    partial = Fraction(0)
    for ell, x in enumerate(ordered, 1):
        partial += x
        if partial < total - partial:
            level = ell
        else:
            break
    return level


def polygon_dmin_table(level: int) -> int:
    if level < 0:
        raise QuiverError("level must be nonnegative")
    return {0: 0, 1: 2}.get(level, 4)
