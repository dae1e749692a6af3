"""Symmetric eigensolver (cyclic Jacobi), chains supported on a graph, and the
projected-subgradient search for the largest spectral gap.

A feasible chain is a symmetric stochastic matrix whose off-diagonal support
lies inside the edge set. Its SLEM is the largest eigenvalue modulus among the
non-top eigenvalues, and the gap is 1 - SLEM. The solver minimizes the SLEM by
projected subgradient steps; every iterate is re-projected, so the best gap
found is a certified feasible lower bound on the optimum.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .graphs import Graph, is_connected
from .util import DisconnectedGraph, NumericalFailure

EIG_SIZE_CAP = 2048
SYMMETRY_TOL = 1e-10
OFFDIAG_TARGET = 1e-13     # relative to the Frobenius norm; contract is 1e-12


def _offdiag_norm(a: np.ndarray) -> float:
    # computed entrywise: the sum(a^2) - sum(diag^2) form cancels catastrophically
    sq = a * a
    np.fill_diagonal(sq, 0.0)
    return float(np.sqrt(sq.sum()))


def jacobi_eigensystem(m: np.ndarray, max_sweeps: int = 60) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi rotations. Returns (eigenvalues desc, eigenvector columns)."""
    a = np.array(m, dtype=np.float64)
    n = a.shape[0]
    v = np.eye(n)
    if n <= 1:
        return a.diagonal().copy(), v
    norm = np.linalg.norm(a)
    if norm == 0.0:
        return np.zeros(n), v
    target = OFFDIAG_TARGET * norm
    for _ in range(max_sweeps):
        off = _offdiag_norm(a)
        if off <= target:
            break
        threshold = min(off / (n * 10.0), target / n)  # skip entries already negligible
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= threshold:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = np.sign(tau) / (abs(tau) + np.sqrt(1.0 + tau * tau)) if tau != 0.0 else 1.0
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                rp, rq = a[p, :].copy(), a[q, :].copy()
                a[p, :] = c * rp - s * rq
                a[q, :] = s * rp + c * rq
                cp, cq = a[:, p].copy(), a[:, q].copy()
                a[:, p] = c * cp - s * cq
                a[:, q] = s * cp + c * cq
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        off = _offdiag_norm(a)
        if off > 1e-12 * norm:
            raise NumericalFailure(f"Jacobi did not converge: off-diagonal norm {off:.3e}")
    vals = a.diagonal().copy()
    order = np.argsort(-vals, kind="stable")
    return vals[order], v[:, order]


def sym_eigs(m: np.ndarray) -> np.ndarray:
    """Eigenvalues of a symmetric matrix, sorted descending."""
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"need a square matrix, got shape {a.shape}")
    n = a.shape[0]
    if n > EIG_SIZE_CAP:
        raise ValueError(f"eigensolver cap is n <= {EIG_SIZE_CAP}, got {n}")
    scale = max(1.0, float(np.abs(a).max()) if n else 1.0)
    if n and float(np.abs(a - a.T).max()) > SYMMETRY_TOL * scale:
        raise ValueError("matrix is not symmetric within tolerance")
    vals, _ = jacobi_eigensystem(0.5 * (a + a.T))
    return vals


@dataclass(frozen=True, eq=False)
class MarkovMatrix:
    graph: Graph
    entries: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "entries", np.asarray(self.entries, dtype=np.float64))

    def validate(self) -> None:
        p = self.entries
        n = self.graph.n
        if p.shape != (n, n):
            raise ValueError(f"matrix shape {p.shape} does not match n={n}")
        if np.abs(p - p.T).max(initial=0.0) > 1e-12:
            raise ValueError("chain is not symmetric to 1e-12")
        if p.min(initial=0.0) < 0.0:
            raise ValueError("chain has negative entries")
        if np.abs(p.sum(axis=1) - 1.0).max(initial=0.0) > 1e-10:
            raise ValueError("rows do not sum to 1 within 1e-10")
        allowed = support_mask(self.graph)
        if np.any(p[~allowed] != 0.0):
            raise ValueError("support leaks outside edges + diagonal")


@dataclass(frozen=True)
class SpectralSummary:
    eigenvalues: tuple[float, ...]  # descending
    slem: float
    gap: float

    def to_dict(self) -> dict:
        return {"eigenvalues": list(self.eigenvalues), "slem": self.slem, "gap": self.gap}


def support_mask(g: Graph) -> np.ndarray:
    mask = np.eye(g.n, dtype=bool)
    for u, v in g.edges:
        mask[u, v] = mask[v, u] = True
    return mask


def spectral_summary(p: MarkovMatrix) -> SpectralSummary:
    vals = sym_eigs(p.entries)
    if abs(vals[0] - 1.0) > 1e-8:
        raise NumericalFailure(f"top eigenvalue of a stochastic chain is {vals[0]}, expected 1")
    slem = float(np.abs(vals[1:]).max()) if len(vals) > 1 else 0.0
    return SpectralSummary(eigenvalues=tuple(float(x) for x in vals), slem=slem, gap=1.0 - slem)


def _exact_polish(x: np.ndarray, mask: np.ndarray) -> np.ndarray:
    """Snap a near-feasible matrix onto the feasible set exactly: symmetrize,
    mask, clip, then give the slack to the diagonal (scaling if a row overflows)."""
    b = 0.5 * (x + x.T)
    b[~mask] = 0.0
    np.clip(b, 0.0, None, out=b)
    np.fill_diagonal(b, 0.0)
    off = b.sum(axis=1)
    overflow = off.max(initial=0.0)
    if overflow > 1.0:
        b *= 1.0 / overflow
        off = b.sum(axis=1)
    # rescaled rows can exceed 1 by an ulp; clip so the diagonal stays nonnegative
    np.fill_diagonal(b, np.clip(1.0 - off, 0.0, None))
    return b


def project_to_feasible(m: np.ndarray, g: Graph, max_cycles: int = 2000,
                        tol: float = 1e-12) -> tuple[MarkovMatrix, bool, int]:
    """Frobenius-nearest feasible chain by Dykstra alternating projections onto
    {symmetric with allowed support}, {nonnegative}, {row sums 1}.

    Returns (chain, converged, cycles). The result is polished to satisfy the
    feasibility invariants exactly even when convergence is only approximate.
    """
    n = g.n
    a = np.asarray(m, dtype=np.float64)
    if a.shape != (n, n):
        raise ValueError(f"matrix shape {a.shape} does not match n={n}")
    mask = support_mask(g)
    x = a.copy()
    p1 = np.zeros_like(x)
    p2 = np.zeros_like(x)
    p3 = np.zeros_like(x)
    converged = False
    cycles = 0
    scale = max(1.0, float(np.abs(a).max()))
    for cycles in range(1, max_cycles + 1):
        y = x + p1
        z = 0.5 * (y + y.T)
        z[~mask] = 0.0
        p1 = y - z
        y = z + p2
        z = np.clip(y, 0.0, None)
        p2 = y - z
        y = z + p3
        z = y - ((y.sum(axis=1) - 1.0) / n)[:, None]
        p3 = y - z
        x = z
        sym_err = np.abs(x - x.T).max(initial=0.0)
        mask_err = np.abs(x[~mask]).max(initial=0.0) if (~mask).any() else 0.0
        neg_err = max(0.0, -x.min(initial=0.0))
        if max(sym_err, mask_err, neg_err) <= tol * scale:
            converged = True
            break
    chain = MarkovMatrix(graph=g, entries=_exact_polish(x, mask))
    chain.validate()
    return chain, converged, cycles


def lazy_walk(g: Graph) -> MarkovMatrix:
    """Max-degree lazy walk: off-diagonal 1/(max_degree+1) on edges, slack on the diagonal."""
    n = g.n
    p = np.zeros((n, n))
    rate = 1.0 / (g.max_degree + 1)
    for u, v in g.edges:
        p[u, v] = p[v, u] = rate
    np.fill_diagonal(p, 1.0 - p.sum(axis=1))
    chain = MarkovMatrix(graph=g, entries=p)
    chain.validate()
    return chain


@dataclass
class FmmcResult:
    chain: MarkovMatrix
    summary: SpectralSummary
    history: list[tuple[int, float, float, float]]  # (iter, mu, gap, step)
    converged: bool
    iterations: int
    slem_multiplicities: list[int] = field(default_factory=list)

    def history_rows(self) -> list[tuple[int, float, float, float]]:
        return self.history


def fmmc_solve(g: Graph, max_iters: int = 5000, step_schedule: str = "sqrt",
               step_scale: float = 1.0, seed: int = 0,
               improve_tol: float = 1e-7, patience: int = 200) -> FmmcResult:
    """Maximize the spectral gap over chains supported on g by projected
    subgradient descent on the SLEM, starting from the max-degree lazy walk.

    step_schedule:
      * "sqrt"      -- step = step_scale * mu0 / sqrt(t) (default);
      * "geometric" -- step halves after 40 iterations without improvement.

    The subgradient at P is +v v^T for the eigenvector v attaining the SLEM on
    the positive end, -v v^T on the negative end; on ties the eigenvector with
    the smallest sorted index is used and the multiplicity is recorded.
    The returned gap is a certified lower bound: the chain is feasible.
    """
    if not is_connected(g):
        raise DisconnectedGraph("spectral-gap optimization needs a connected graph (otherwise gap is 0 for every chain)")
    if step_schedule not in ("sqrt", "geometric"):
        raise ValueError(f"unknown step schedule {step_schedule!r}")
    del seed  # reserved: the solver is deterministic

    current = lazy_walk(g)
    vals, vecs = jacobi_eigensystem(current.entries)
    mu = _slem_from(vals)
    best_chain, best_mu = current, mu
    mu0 = mu if mu > 0 else 1.0
    history: list[tuple[int, float, float, float]] = [(0, mu, 1.0 - mu, 0.0)]
    multiplicities: list[int] = []
    stall = 0
    alpha_geo = step_scale * mu0
    converged = False
    iterations = 0

    for t in range(1, max_iters + 1):
        if best_mu <= 1e-15:
            converged = True
            break
        grad, multiplicity = _slem_subgradient(vals, vecs)
        multiplicities.append(multiplicity)
        step = step_scale * mu0 / np.sqrt(t) if step_schedule == "sqrt" else alpha_geo
        current, _, _ = project_to_feasible(current.entries - step * grad, g, max_cycles=400)
        vals, vecs = jacobi_eigensystem(current.entries)
        mu = _slem_from(vals)
        iterations = t
        history.append((t, mu, 1.0 - mu, float(step)))
        if mu < best_mu - improve_tol:
            best_mu, best_chain = mu, current
            stall = 0
        else:
            if mu < best_mu:
                best_mu, best_chain = mu, current
            stall += 1
            if step_schedule == "geometric" and stall > 0 and stall % 40 == 0:
                alpha_geo *= 0.5
                if alpha_geo < 1e-12 * mu0:
                    converged = True
                    break
            if stall >= patience:
                converged = True
                break

    best_chain.validate()
    return FmmcResult(
        chain=best_chain,
        summary=spectral_summary(best_chain),
        history=history,
        converged=converged,
        iterations=iterations,
        slem_multiplicities=multiplicities,
    )


def _slem_from(vals: np.ndarray) -> float:
    return float(np.abs(vals[1:]).max()) if len(vals) > 1 else 0.0


def _slem_subgradient(vals: np.ndarray, vecs: np.ndarray) -> tuple[np.ndarray, int]:
    if len(vals) <= 1:
        return np.zeros((1, 1)), 1
    mods = np.abs(vals[1:])
    mu = mods.max()
    attained = np.nonzero(mods >= mu - 1e-9)[0]
    idx = 1 + int(attained[0])  # smallest sorted index on ties
    v = vecs[:, idx]
    sign = 1.0 if vals[idx] >= 0 else -1.0
    return sign * np.outer(v, v), int(attained.size)
