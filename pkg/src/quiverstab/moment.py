"""Moment map, the energy ``||mu - alpha||^2``, its gradient flow, and the
dimension of the endomorphism algebra of a representation."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np

from .quiver import Representation, StabilityParameter

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class MomentValue:
    """Hermitian ``H_j`` per vertex, with ``mu_j = sqrt(-1) H_j``."""

    vertices: tuple[str, ...]
    blocks: tuple[np.ndarray, ...]

    def __getitem__(self, vertex: str) -> np.ndarray:
        return self.blocks[self.vertices.index(vertex)]

    def total_trace(self) -> complex:
        return sum(np.trace(h) for h in self.blocks)


def _moment_blocks(rep: Representation, mats) -> list[np.ndarray]:
    dims = rep.dims.values
    blocks = [np.zeros((d, d), complex) for d in dims]
    for (t, h), a in zip(rep.quiver.edge_indices, mats):
        blocks[h] += a @ a.conj().T
        blocks[t] -= a.conj().T @ a
    return blocks


def moment_map(rep: Representation) -> MomentValue:
    blocks = _moment_blocks(rep, rep.matrices)
    return MomentValue(rep.quiver.vertices, tuple(blocks))


def _shifted(rep: Representation, mats, alpha: np.ndarray) -> list[np.ndarray]:
    blocks = _moment_blocks(rep, mats)
    for j, b in enumerate(blocks):
        b -= alpha[j] * np.eye(b.shape[0])
    return blocks


def _energy(rep, mats, alpha) -> float:
    return float(sum(np.vdot(g, g).real for g in _shifted(rep, mats, alpha)))


def _energy_and_gradient(rep, mats, alpha):
    g = _shifted(rep, mats, alpha)
    f = float(sum(np.vdot(x, x).real for x in g))
    grad = [4.0 * (g[h] @ a - a @ g[t]) for (t, h), a in zip(rep.quiver.edge_indices, mats)]
    return f, grad


def energy(rep: Representation, alpha: StabilityParameter) -> float:
    """``sum_j ||H_j - alpha_j I||_F^2``."""
    return _energy(rep, rep.matrices, alpha.as_floats())


def energy_gradient(rep: Representation, alpha: StabilityParameter) -> tuple[np.ndarray, ...]:
    """Gradient of :func:`energy` for the real inner product ``Re tr(X^* Y)``.

    The edge-``a`` component is ``4 (g_h A_a - A_a g_t)`` with
    ``g_j = H_j - alpha_j I``, so ``d/dt energy(A + tD) = sum Re tr(grad_a^* D_a)``.
    """
    return tuple(_energy_and_gradient(rep, rep.matrices, alpha.as_floats())[1])


def _norm(mats) -> float:
    return float(np.sqrt(sum(np.vdot(m, m).real for m in mats)))


@dataclass
class FlowResult:
    final: Representation
    energy_trace: list[tuple[float, float]]
    converged: bool
    iterations: int
    grad_norms: list[float] = field(default_factory=list)

    @property
    def final_energy(self) -> float:
        return self.energy_trace[-1][1]


def flow(
    rep: Representation,
    alpha: StabilityParameter,
    *,
    max_steps: int = 100_000,
    tol: float = 1e-9,
    step: float | None = None,
) -> FlowResult:
    """Downward gradient flow of the energy by explicit Euler steps.

    A step that would raise the energy is halved and retried; after five
    accepted steps in a row the step doubles.  Stops once the gradient norm
    drops below ``tol``.  ``alpha`` should be trace-free.
    """
    a_vec = alpha.as_floats()
    mats = [np.array(m) for m in rep.matrices]
    f, grad = _energy_and_gradient(rep, mats, a_vec)
    gnorm = _norm(grad)
    h = step if step is not None else 1e-2 / (1.0 + rep.norm_squared())
    t = 0.0
    trace = [(t, f)]
    gnorms = [gnorm]
    clean = 0
    it = 0
    converged = gnorm < tol
    while not converged and it < max_steps:
        while True:
            trial = [m - h * g for m, g in zip(mats, grad)]
            f_new = _energy(rep, trial, a_vec)
            if f_new <= f:
                break
            h *= 0.5
            clean = 0
            if h < 1e-300:
                break
        if f_new > f:
            logger.warning("flow stalled: no decreasing step at iteration %d", it)
            break
        mats = trial
        t += h
        it += 1
        f, grad = _energy_and_gradient(rep, mats, a_vec)
        gnorm = _norm(grad)
        trace.append((t, f))
        gnorms.append(gnorm)
        clean += 1
        if clean >= 5:
            h *= 2.0
            clean = 0
        converged = gnorm < tol
    if not converged:
        logger.warning("flow did not converge after %d steps (gradient norm %.3e)", it, gnorm)
    return FlowResult(rep.replace(mats), trace, converged, it, gnorms)


def infinitesimal_action_matrix(rep: Representation) -> np.ndarray:
    """Matrix of ``u -> (u_h A_a - A_a u_t)_a`` on column-major vectorizations."""
    dims = rep.dims.values
    col_off = np.concatenate([[0], np.cumsum([d * d for d in dims])]).astype(int)
    edges = rep.quiver.edge_indices
    row_sizes = [dims[h] * dims[t] for t, h in edges]
    row_off = np.concatenate([[0], np.cumsum(row_sizes)]).astype(int)
    m = np.zeros((int(row_off[-1]), int(col_off[-1])), complex)
    for a, ((t, h), mat) in enumerate(zip(edges, rep.matrices)):
        rows = slice(row_off[a], row_off[a + 1])
        # vec(u_h A) = (A^T kron I) vec(u_h); vec(A u_t) = (I kron A) vec(u_t)
        m[rows, col_off[h] : col_off[h + 1]] += np.kron(mat.T, np.eye(dims[h]))
        m[rows, col_off[t] : col_off[t + 1]] -= np.kron(np.eye(dims[t]), mat)
    return m


def endomorphism_dimension(rep: Representation, *, rel_tol: float = 1e-8) -> int:
    """Complex dimension of the kernel of the infinitesimal action."""
    m = infinitesimal_action_matrix(rep)
    n = m.shape[1]
    if m.size == 0:
        return n
    s = np.linalg.svd(m, compute_uv=False)
    if s[0] == 0:
        return n
    return n - int(np.sum(s > rel_tol * s[0]))
