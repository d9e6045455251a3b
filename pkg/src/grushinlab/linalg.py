"""Conjugate gradients and inverse power iteration for the assembled operators.

Only what the lab needs: an SPD solve with a transparent failure mode and the
smallest eigenpair of the negated diffusion operator.  Inverse power iteration
is deliberate; a single extreme eigenvalue is wanted, the code stays small and
auditable, and the inner solve reuses the same CG the time stepper runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .operators import SparseMatrix


class SolverError(RuntimeError):
    """Base class for iterative-solver failures."""


class NonConvergence(SolverError):
    """Iteration budget exhausted; carries the best iterate seen."""

    def __init__(self, message: str, best_x: np.ndarray, residual: float,
                 iterations: int) -> None:
        super().__init__(message)
        self.best_x = best_x
        self.residual = residual
        self.iterations = iterations


class NumericalBreakdown(SolverError):
    """A non-finite quantity appeared mid-iteration."""


@dataclass(frozen=True)
class SolveReport:
    iterations: int
    final_residual: float


@dataclass(frozen=True, eq=False)
class EigenResult:
    """Smallest eigenpair; phi1 has l2_norm_sq == 1 and its largest-magnitude
    entry is positive.  residual is ||B phi - lambda phi||_2 / ||phi||_2."""

    lambda1: float
    phi1: np.ndarray
    residual: float
    iterations: int


def _matvec(A):
    if isinstance(A, SparseMatrix):
        return A.apply
    if callable(A):
        return A
    raise TypeError(f"expected SparseMatrix or callable operator, got {type(A)!r}")


def cg_solve(A, b: np.ndarray, tol: float = 1e-10, max_iter: int | None = None,
             x0: np.ndarray | None = None) -> tuple[np.ndarray, SolveReport]:
    """Conjugate gradients for SPD ``A``; converges when ||b - Ax|| <= tol*||b||.

    ``A`` is a :class:`SparseMatrix` or a matvec callable.  Convergence is
    confirmed against the true residual, not just the recurrence.  Raises
    :class:`NonConvergence` (with the best iterate attached) after
    ``max_iter`` (default 10*N) and :class:`NumericalBreakdown` on NaN/Inf.
    """
    mv = _matvec(A)
    b = np.asarray(b, dtype=float)
    N = b.size
    if max_iter is None:
        max_iter = 10 * N
    b_norm = float(np.linalg.norm(b))
    if b_norm == 0.0:
        return np.zeros_like(b), SolveReport(iterations=0, final_residual=0.0)

    x = np.zeros_like(b) if x0 is None else np.array(x0, dtype=float)
    r = b - mv(x)
    p = r.copy()
    rs = float(r @ r)
    if not np.isfinite(rs):
        raise NumericalBreakdown("non-finite initial residual in cg_solve")

    best_x, best_res = x.copy(), float(np.sqrt(rs)) / b_norm
    if best_res <= tol:
        # A warm start may already satisfy the tolerance; no work to do.
        return x, SolveReport(iterations=0, final_residual=best_res)
    for it in range(1, max_iter + 1):
        Ap = mv(p)
        pAp = float(p @ Ap)
        if not np.isfinite(pAp) or pAp <= 0.0:
            raise NumericalBreakdown(
                f"cg_solve: curvature p^T A p = {pAp} at iteration {it}")
        alpha = rs / pAp
        x += alpha * p
        r -= alpha * Ap
        rs_new = float(r @ r)
        if not np.isfinite(rs_new):
            raise NumericalBreakdown(f"cg_solve: non-finite residual at iteration {it}")
        res = float(np.sqrt(rs_new)) / b_norm
        if res < best_res:
            best_x, best_res = x.copy(), res
        if res <= tol:
            # Recurrence can drift; accept only on the true residual.
            true_res = float(np.linalg.norm(b - mv(x))) / b_norm
            if true_res <= tol:
                return x, SolveReport(iterations=it, final_residual=true_res)
            r = b - mv(x)
            rs = float(r @ r)
            p = r.copy()
            continue
        p = r + (rs_new / rs) * p
        rs = rs_new
    raise NonConvergence(
        f"cg_solve: no convergence to {tol} within {max_iter} iterations "
        f"(best residual {best_res:.3e})",
        best_x=best_x, residual=best_res, iterations=max_iter)


def smallest_eigenpair(A: SparseMatrix, tol: float = 1e-8,
                       max_iter: int = 10_000, cg_tol: float = 1e-10,
                       cell_volume: float = 1.0) -> EigenResult:
    """Smallest eigenpair of B = -A by inverse power iteration.

    ``A`` is the assembled (negative definite, symmetric) operator, so B is
    SPD and its smallest eigenvalue is the discrete Rayleigh minimum
    grushin_energy(u)/l2_norm_sq(u).  Starts from the all-ones vector,
    converges on the eigen-residual ||B v - lambda v|| <= tol * lambda for
    unit v, and normalizes the output so l2_norm_sq(phi1) == 1 under the
    rectangle rule with the given ``cell_volume``.
    """
    if not A.symmetric:
        raise ValueError("smallest_eigenpair expects a symmetric operator")
    B = A.negated()
    N = B.n
    v = np.ones(N) / np.sqrt(N)
    Bv = B.apply(v)
    lam = float(v @ Bv)
    for it in range(1, max_iter + 1):
        z, _ = cg_solve(B, v, tol=cg_tol, x0=v / lam)
        v = z / float(np.linalg.norm(z))
        Bv = B.apply(v)
        lam = float(v @ Bv)
        if not np.isfinite(lam) or lam <= 0.0:
            raise NumericalBreakdown(f"inverse iteration: Rayleigh quotient {lam}")
        residual = float(np.linalg.norm(Bv - lam * v))
        if residual <= tol * lam:
            if v[int(np.argmax(np.abs(v)))] < 0.0:
                v = -v
            phi = v / np.sqrt(cell_volume)
            return EigenResult(lambda1=lam, phi1=phi, residual=residual,
                               iterations=it)
    raise NonConvergence(
        f"inverse iteration: eigen-residual above {tol}*lambda after {max_iter} "
        f"iterations (last residual {residual:.3e}, lambda {lam:.6e})",
        best_x=v, residual=residual, iterations=max_iter)
