"""Numerical search for subrepresentations and alpha-stability verdicts.

A candidate subrepresentation with dimension vector ``v'`` is a tuple of
orthogonal projections ``P_j`` of rank ``v'_j``.  It is invariant iff

    sum_a ||(I - P_h(a)) A_a P_t(a)||_F^2 = 0,

and the search minimizes this residual over the product of Grassmannians,
with each ``P_j = Y_j Y_j^*`` for an orthonormal frame ``Y_j`` and a QR
retraction after every step.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .moment import flow
from .quiver import DimensionVector, QuiverError, QuiverSetup, Representation
from .slope import DEFAULT_CAP, SlopeReport, destabilizing_dimension_vectors, normalize_alpha


@dataclass(frozen=True)
class ProjectionTuple:
    ranks: DimensionVector
    projections: tuple[np.ndarray, ...]

    def max_defect(self) -> float:
        """Largest deviation from ``P^2 = P = P^*`` and ``tr P = rank``."""
        worst = 0.0
        for p, r in zip(self.projections, self.ranks.values):
            if p.size == 0:
                continue
            worst = max(
                worst,
                float(np.abs(p @ p - p).max()),
                float(np.abs(p - p.conj().T).max()),
                abs(float(np.trace(p).real) - r),
            )
        return worst


def coordinate_projections(v: DimensionVector, v_sub: DimensionVector) -> ProjectionTuple:
    mats = []
    for d, s in zip(v.values, v_sub.values):
        p = np.zeros((d, d), complex)
        p[:s, :s] = np.eye(s)
        mats.append(p)
    return ProjectionTuple(v_sub, tuple(mats))


def subrep_residual(rep: Representation, proj: ProjectionTuple) -> float:
    ps = proj.projections
    total = 0.0
    for (t, h), a in zip(rep.quiver.edge_indices, rep.matrices):
        r = a @ ps[t] - ps[h] @ a @ ps[t]
        total += float(np.vdot(r, r).real)
    return total


def _normalized(rep: Representation, value: float) -> float:
    scale = rep.norm_squared()
    return value / scale if scale > 0 else value


def round_projections(proj: ProjectionTuple) -> ProjectionTuple:
    """Nearest exact projections: keep the top ``v'_j`` eigenvectors of each block."""
    out = []
    for p, r in zip(proj.projections, proj.ranks.values):
        d = p.shape[0]
        if r == 0 or r == d:
            out.append(np.eye(d, dtype=complex) * (r == d))
            continue
        w, u = np.linalg.eigh(0.5 * (p + p.conj().T))
        top = u[:, np.argsort(w)[::-1][:r]]
        out.append(top @ top.conj().T)
    return ProjectionTuple(proj.ranks, tuple(out))


def _random_frame(rng: np.random.Generator, d: int, r: int) -> np.ndarray:
    z = (rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r))) / np.sqrt(2)
    q, _ = np.linalg.qr(z)
    return q


def haar_unitary(rng: np.random.Generator, d: int) -> np.ndarray:
    if d == 0:
        return np.zeros((0, 0), complex)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


class _Objective:
    """Residual and its Grassmannian gradient in the free frames."""

    def __init__(self, rep: Representation, v_sub: DimensionVector):
        dims = rep.dims.values
        subs = v_sub.values
        self.free = [j for j, (d, s) in enumerate(zip(dims, subs)) if 0 < s < d]
        self.kind = ["free" if 0 < s < d else ("full" if s == d else "zero") for d, s in zip(dims, subs)]
        self.dims, self.subs = dims, subs
        self.scale = rep.norm_squared() or 1.0
        # edges that can contribute: tail not zero, head not full
        self.edges = [
            (t, h, a)
            for (t, h), a in zip(rep.quiver.edge_indices, rep.matrices)
            if self.kind[t] != "zero" and self.kind[h] != "full" and a.size
        ]

    def value_grad(self, frames: dict[int, np.ndarray], need_grad: bool = True):
        total = 0.0
        grads = {j: np.zeros_like(y) for j, y in frames.items()} if need_grad else None
        for t, h, a in self.edges:
            b = a @ frames[t] if self.kind[t] == "free" else a
            if self.kind[h] == "free":
                y = frames[h]
                r = b - y @ (y.conj().T @ b)
            else:
                r = b
            total += float(np.vdot(r, r).real)
            if need_grad:
                if self.kind[t] == "free":
                    grads[t] += 2.0 * (a.conj().T @ r)
                if self.kind[h] == "free":
                    grads[h] -= 2.0 * (r @ (b.conj().T @ frames[h]))
        total /= self.scale
        if need_grad:
            for j in grads:
                g = grads[j] / self.scale
                y = frames[j]
                grads[j] = g - y @ (y.conj().T @ g)
        return total, grads


def _frames_to_projections(obj: _Objective, frames, v_sub: DimensionVector) -> ProjectionTuple:
    mats = []
    for j, (d, s) in enumerate(zip(obj.dims, obj.subs)):
        if obj.kind[j] == "free":
            y = frames[j]
            mats.append(y @ y.conj().T)
        else:
            mats.append(np.eye(d, dtype=complex) * (s == d))
    return ProjectionTuple(v_sub, tuple(mats))


@dataclass
class SearchResult:
    found: bool
    projections: ProjectionTuple | None
    residual: float
    exhausted: bool  # some restart hit max_iters without settling
    restarts_run: int = 0


def _descend(obj: _Objective, frames, *, max_iters: int, tol: float, grad_tol: float):
    """Riemannian steepest descent with Armijo backtracking and BB step guesses.

    Returns ``(frames, value, status)`` with status ``"small"`` (below
    ``tol``), ``"stationary"`` or ``"max_iters"``.
    """
    f, g = obj.value_grad(frames)
    step = 1.0
    prev = None
    stalled = 0
    for _ in range(max_iters):
        if f < tol:
            return frames, f, "small"
        gg = sum(float(np.vdot(x, x).real) for x in g.values())
        if np.sqrt(gg) < grad_tol:
            return frames, f, "stationary"
        if prev is not None:
            s_prev, y_prev = prev
            sy = sum(float(np.vdot(s_prev[j], y_prev[j]).real) for j in g)
            ss = sum(float(np.vdot(s_prev[j], s_prev[j]).real) for j in g)
            if sy > 0:
                step = min(max(ss / sy, 1e-6), 1e6)
        while True:
            trial = {j: np.linalg.qr(frames[j] - step * g[j])[0] for j in frames}
            f_new, _ = obj.value_grad(trial, need_grad=False)
            if f_new <= f - 1e-4 * step * gg or step < 1e-14:
                break
            step *= 0.5
        if f_new > f:
            return frames, f, "stationary"
        # decrease lost in roundoff
        stalled = stalled + 1 if f - f_new <= 1e-13 * f else 0
        if stalled >= 10:
            return frames, f, "stationary"
        f_next, g_next = obj.value_grad(trial)
        prev = ({j: trial[j] - frames[j] for j in frames}, {j: g_next[j] - g[j] for j in frames})
        frames, f, g = trial, f_next, g_next
    return frames, f, ("small" if f < tol else "max_iters")


def search_subrepresentation(
    rep: Representation,
    v_sub: DimensionVector,
    *,
    restarts: int = 20,
    max_iters: int = 2000,
    tol: float = 1e-8,
    seed=0,
) -> SearchResult:
    """Look for an invariant subspace tuple of dimension ``v_sub``.

    Residuals are normalized by ``||A||_F^2``.  A candidate counts as found
    only after its projections are rounded to exact ones and the rounded
    residual is still below ``tol``.
    """
    v = rep.dims
    if v_sub.vertices != v.vertices or not v_sub <= v or any(x < 0 for x in v_sub.values):
        raise QuiverError(f"{v_sub} is not a sub-dimension vector of {v}")
    if v_sub.is_zero() or v_sub == v:
        raise QuiverError("sub-dimension vector must be proper and nonzero")
    obj = _Objective(rep, v_sub)
    rng = np.random.default_rng(seed)
    if not obj.free:
        proj = _frames_to_projections(obj, {}, v_sub)
        res = _normalized(rep, subrep_residual(rep, proj))
        return SearchResult(res < tol, proj, res, False, 1)
    best = None
    exhausted = False
    runs = 0
    for _ in range(restarts):
        runs += 1
        frames = {j: _random_frame(rng, obj.dims[j], obj.subs[j]) for j in obj.free}
        frames, f, status = _descend(obj, frames, max_iters=max_iters, tol=tol * 1e-3, grad_tol=1e-8)
        proj = round_projections(_frames_to_projections(obj, frames, v_sub))
        res = _normalized(rep, subrep_residual(rep, proj))
        if best is None or res < best[1]:
            best = (proj, res)
        if res < tol:
            return SearchResult(True, proj, res, False, runs)
        if status == "max_iters":
            exhausted = True
    return SearchResult(False, best[0], best[1], exhausted, runs)


def find_subrepresentation(
    rep: Representation,
    v_sub: DimensionVector,
    *,
    restarts: int = 20,
    max_iters: int = 2000,
    tol: float = 1e-8,
    seed=0,
) -> tuple[ProjectionTuple, float] | None:
    result = search_subrepresentation(rep, v_sub, restarts=restarts, max_iters=max_iters, tol=tol, seed=seed)
    return (result.projections, result.residual) if result.found else None


class Verdict(enum.Enum):
    STABLE = "Stable"
    STRICTLY_SEMISTABLE = "StrictlySemistable"
    UNSTABLE = "Unstable"
    INCONCLUSIVE = "Inconclusive"


@dataclass(frozen=True)
class Evidence:
    sub: DimensionVector
    slope: SlopeReport
    projections: ProjectionTuple
    residual: float


@dataclass
class StabilityVerdict:
    verdict: Verdict
    evidence: Evidence | None
    flow_energy: float | None
    searched: list[tuple[DimensionVector, bool, float]] = field(default_factory=list)


def stability_verdict(
    rep: Representation,
    setup: QuiverSetup,
    *,
    restarts: int = 20,
    max_iters: int = 2000,
    tol: float = 1e-8,
    seed: int = 0,
    flow_steps: int = 20_000,
    cap: int = DEFAULT_CAP,
) -> StabilityVerdict:
    """Classify ``rep`` by searching every destabilizing dimension vector.

    A realized ``v'`` of positive normalized slope makes the verdict
    Unstable; otherwise one of slope zero makes it StrictlySemistable.
    With nothing found the verdict is Stable, or Inconclusive if some
    search ran out of iterations before settling.
    """
    if rep.dims != setup.dims:
        raise QuiverError(f"representation dims {rep.dims} do not match the setup's {setup.dims}")
    alpha = normalize_alpha(setup)
    searched = []
    semistable_witness = None
    exhausted = False
    for idx, (sub, slope) in enumerate(destabilizing_dimension_vectors(setup, cap=cap)):
        result = search_subrepresentation(
            rep, sub, restarts=restarts, max_iters=max_iters, tol=tol, seed=np.random.SeedSequence([seed, idx])
        )
        searched.append((sub, result.found, result.residual))
        exhausted |= result.exhausted
        if not result.found:
            continue
        evidence = Evidence(sub, slope, result.projections, result.residual)
        if slope.slope > 0:
            return StabilityVerdict(Verdict.UNSTABLE, evidence, _flow_energy(rep, alpha, flow_steps), searched)
        if semistable_witness is None:
            semistable_witness = evidence
    energy_value = _flow_energy(rep, alpha, flow_steps)
    if semistable_witness is not None:
        return StabilityVerdict(Verdict.STRICTLY_SEMISTABLE, semistable_witness, energy_value, searched)
    verdict = Verdict.INCONCLUSIVE if exhausted else Verdict.STABLE
    return StabilityVerdict(verdict, None, energy_value, searched)


def _flow_energy(rep, alpha, steps) -> float | None:
    if steps <= 0:
        return None
    return flow(rep, alpha, max_steps=steps, tol=1e-9).final_energy


def plant_with_projections(
    setup: QuiverSetup, v_sub: DimensionVector | None, seed
) -> tuple[Representation, ProjectionTuple | None]:
    """Seeded test instance, plus the planted projections when ``v_sub`` is given."""
    v = setup.dims
    rng = np.random.default_rng(seed)
    q = setup.quiver
    if v_sub is not None:
        if not v_sub <= v or v_sub.is_zero() or v_sub == v:
            raise QuiverError(f"{v_sub} must be a proper nonzero sub-dimension vector of {v}")
    mats = []
    for t, h in q.edge_indices:
        shape = (v.values[h], v.values[t])
        m = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
        if v_sub is not None:
            # block upper triangular: V'_t lands in V'_h
            m[v_sub.values[h] :, : v_sub.values[t]] = 0
        mats.append(m)
    if v_sub is None:
        return Representation(q, v, mats), None
    g = [haar_unitary(rng, d) for d in v.values]
    mats = [g[h] @ m @ g[t].conj().T for (t, h), m in zip(q.edge_indices, mats)]
    base = coordinate_projections(v, v_sub)
    planted = ProjectionTuple(v_sub, tuple(u @ p @ u.conj().T for u, p in zip(g, base.projections)))
    return Representation(q, v, mats), planted


def plant_instance(setup: QuiverSetup, v_sub: DimensionVector | None = None, seed=0) -> Representation:
    return plant_with_projections(setup, v_sub, seed)[0]
