"""Homotopy groups of the stable locus and of the stable moduli space.

Below the minimal dimension (``n + 1 < d_min``) the stable locus has
``pi_n = 0``, and the free action of ``PG_v = G_v / U(1)`` gives
``pi_n(M^st) = pi_{n-1}(PG_v)`` from the long exact sequence of the bundle
``PG_v -> Rep^st -> M^st``.

``pi_1(PG_v)``: the scalar circle maps into ``G_v = prod U(v_j)`` and on
``pi_1`` sends its generator to ``(v_1, ..., v_m)`` under the determinant
degrees (vertices with ``v_j = 0`` dropped).  ``pi_2(G_v) = 0`` and that map
is injective, so ``pi_1(PG_v) = Z^m / <(v_1, ..., v_m)>``, which is
``Z^(m-1) + Z/gcd``.  For ``k >= 2`` the circle fibre contributes nothing and
``pi_k(PG_v) = pi_k(G_v)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

from .dmin import INFINITY, DminReport, d_min
from .quiver import DimensionVector, QuiverError, QuiverSetup


@dataclass(frozen=True)
class FGAbelianGroup:
    free_rank: int = 0
    torsion: tuple[int, ...] = ()
    known: bool = True

    @classmethod
    def trivial(cls) -> "FGAbelianGroup":
        return cls()

    @classmethod
    def unknown(cls) -> "FGAbelianGroup":
        return cls(0, (), False)

    @classmethod
    def free(cls, r: int) -> "FGAbelianGroup":
        return cls(r, ())

    @classmethod
    def cyclic(cls, d: int) -> "FGAbelianGroup":
        if d == 0:
            return cls(1, ())
        return cls.from_generators_relations(1, [[d]])

    @classmethod
    def from_generators_relations(cls, generators: int, relations: Sequence[Sequence[int]]) -> "FGAbelianGroup":
        """``Z^generators`` modulo the span of the given relation rows."""
        rows = [list(r) for r in relations if any(r)]
        diag = smith_diagonal(rows) if rows else []
        nonzero = [d for d in diag if d != 0]
        return cls(generators - len(nonzero), tuple(d for d in nonzero if d > 1))

    @property
    def is_trivial(self) -> bool:
        return self.known and self.free_rank == 0 and not self.torsion

    def __add__(self, other: "FGAbelianGroup") -> "FGAbelianGroup":
        if not (self.known and other.known):
            return FGAbelianGroup.unknown()
        orders = list(self.torsion) + list(other.torsion)
        torsion = FGAbelianGroup.from_generators_relations(
            len(orders), [[d if i == j else 0 for j in range(len(orders))] for i, d in enumerate(orders)]
        ).torsion
        return FGAbelianGroup(self.free_rank + other.free_rank, torsion)

    def __str__(self) -> str:
        if not self.known:
            return "unknown"
        parts = []
        if self.free_rank == 1:
            parts.append("Z")
        elif self.free_rank > 1:
            parts.append(f"Z^{self.free_rank}")
        parts.extend(f"Z/{d}" for d in self.torsion)
        return " + ".join(parts) if parts else "0"


def direct_sum(groups) -> FGAbelianGroup:
    total = FGAbelianGroup.trivial()
    for g in groups:
        total = total + g
    return total


def smith_diagonal(matrix: Sequence[Sequence[int]]) -> list[int]:
    """Diagonal of the Smith normal form of an integer matrix.

    Entries are nonnegative and each divides the next; trailing zeros pad
    the result to ``min(rows, cols)``.
    """
    a = [list(map(int, row)) for row in matrix]
    if not a or not a[0]:
        return []
    m, n = len(a), len(a[0])
    for t in range(min(m, n)):
        nz = [(abs(a[i][j]), i, j) for i in range(t, m) for j in range(t, n) if a[i][j]]
        if not nz:
            break
        _, pi, pj = min(nz)
        a[t], a[pi] = a[pi], a[t]
        for row in a:
            row[t], row[pj] = row[pj], row[t]
        while True:
            done = True
            for i in range(t + 1, m):
                q = a[i][t] // a[t][t]
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[t])]
                if a[i][t]:
                    done = False
            for j in range(t + 1, n):
                q = a[t][j] // a[t][t]
                if q:
                    for row in a:
                        row[j] -= q * row[t]
                if a[t][j]:
                    done = False
            if done:
                # the pivot must divide the remaining block
                bad = next(
                    ((i, j) for i in range(t + 1, m) for j in range(t + 1, n) if a[i][j] % a[t][t]), None
                )
                if bad is None:
                    break
                a[t] = [x + y for x, y in zip(a[t], a[bad[0]])]
                continue
            # move the smallest nonzero entry of row/column t into the pivot
            cands = [(abs(a[i][t]), i, t) for i in range(t, m) if a[i][t]]
            cands += [(abs(a[t][j]), t, j) for j in range(t, n) if a[t][j]]
            _, pi, pj = min(cands)
            a[t], a[pi] = a[pi], a[t]
            for row in a:
                row[t], row[pj] = row[pj], row[t]
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
    return [abs(a[i][i]) for i in range(min(m, n))]


def unitary_homotopy(n: int, k: int) -> FGAbelianGroup:
    """``pi_k(U(n))`` from the Bott stable range and a few low-rank entries."""
    if n < 1:
        raise QuiverError(f"U(n) needs n >= 1, got {n}")
    if k < 0:
        raise QuiverError("homotopy degree must be nonnegative")
    if k == 0:
        return FGAbelianGroup.trivial()
    if n == 1:
        return FGAbelianGroup.free(1) if k == 1 else FGAbelianGroup.trivial()
    if k <= 2 * n - 1:
        return FGAbelianGroup.free(1) if k % 2 else FGAbelianGroup.trivial()
    if n == 2 and k in (4, 5):
        return FGAbelianGroup.cyclic(2)
    return FGAbelianGroup.unknown()


def gauge_group_homotopy(v: DimensionVector, k: int) -> FGAbelianGroup:
    return direct_sum(unitary_homotopy(d, k) for d in v.values if d > 0)


def pg_homotopy(v: DimensionVector, k: int) -> FGAbelianGroup:
    """``pi_k`` of the gauge group modulo its scalar circle."""
    if sum(v.values) <= 0:
        raise QuiverError("PG_v needs a dimension vector of positive rank")
    if k == 0:
        return FGAbelianGroup.trivial()
    if k >= 2:
        return gauge_group_homotopy(v, k)
    blocks = [d for d in v.values if d > 0]
    return FGAbelianGroup.from_generators_relations(len(blocks), [blocks])


SHIFT_NOTE = (
    "pi_n(M^st) is reported as pi_{n-1}(PG_v) via the bundle PG_v -> Rep^st -> M^st; "
    "this is the degree-shifted form, not pi_n(PG_v)"
)


@dataclass(frozen=True)
class HomotopyEntry:
    degree: int
    conclusive: bool
    moduli_group: FGAbelianGroup | None = None

    @property
    def stable_locus_group(self) -> FGAbelianGroup | None:
        return FGAbelianGroup.trivial() if self.conclusive else None


@dataclass(frozen=True)
class HomotopyReport:
    d_min: float | int
    entries: tuple[HomotopyEntry, ...]
    dmin_report: DminReport | None = None
    notes: tuple[str, ...] = field(default=(SHIFT_NOTE,))


def homotopy_report(setup: QuiverSetup, max_degree: int, *, dmin: DminReport | None = None) -> HomotopyReport:
    if max_degree < 0:
        raise QuiverError("max_degree must be nonnegative")
    report = dmin if dmin is not None else d_min(setup)
    entries = []
    for n in range(max_degree + 1):
        if n + 1 < report.d_min:
            group = FGAbelianGroup.trivial() if n == 0 else pg_homotopy(setup.dims, n - 1)
            entries.append(HomotopyEntry(n, True, group))
        else:
            entries.append(HomotopyEntry(n, False))
    return HomotopyReport(report.d_min, tuple(entries), report)


def moduli_dimension(quiver, v: DimensionVector) -> int:
    """Expected complex dimension of the stable moduli space."""
    if sum(v.values) <= 0:
        raise QuiverError("moduli dimension needs a dimension vector of positive rank")
    edges = sum(v.values[t] * v.values[h] for t, h in quiver.edge_indices)
    return edges - sum(d * d for d in v.values) + 1


__all__ = [
    "INFINITY",
    "FGAbelianGroup",
    "HomotopyEntry",
    "HomotopyReport",
    "direct_sum",
    "gauge_group_homotopy",
    "homotopy_report",
    "moduli_dimension",
    "pg_homotopy",
    "smith_diagonal",
    "unitary_homotopy",
]
