"""Dense two-phase primal simplex with Bland's anti-cycling rule.

Solves ``min c.v  s.t.  A v (<=, =, >=) b,  lower <= v <= upper`` for the
desk-scale programs built by :mod:`capplan.model`. Lower bounds must be
finite; upper bounds may be infinite.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

__all__ = ["Status", "StandardFormLP", "SolveResult", "SolverOptions", "solve"]

SENSES = ("<=", ">=", "=")
_NOISE = 1e-14


class Status(str, enum.Enum):
    OPTIMAL = "OPTIMAL"
    INFEASIBLE = "INFEASIBLE"
    UNBOUNDED = "UNBOUNDED"
    # pivots exhausted or iteration cap hit; not a statement about the LP
    SOLVER_FAILURE = "SOLVER_FAILURE"


@dataclass(frozen=True)
class SolverOptions:
    feasibility_tol: float = 1e-7
    reduced_cost_tol: float = 1e-9
    pivot_tol: float = 1e-11
    max_iterations: Optional[int] = None


@dataclass(frozen=True, eq=False)
class StandardFormLP:
    c: np.ndarray
    A: np.ndarray
    senses: tuple[str, ...]
    b: np.ndarray
    lower: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float).reshape(-1)
        n = c.size
        A = np.asarray(self.A, dtype=float).reshape(-1, n) if n else np.zeros((len(self.b), 0))
        b = np.asarray(self.b, dtype=float).reshape(-1)
        lower = np.asarray(self.lower, dtype=float).reshape(-1)
        upper = np.asarray(self.upper, dtype=float).reshape(-1)
        senses = tuple(self.senses)
        if A.shape[0] != b.size or len(senses) != b.size:
            raise ValueError(f"row count mismatch: A {A.shape}, b {b.size}, senses {len(senses)}")
        if lower.size != n or upper.size != n:
            raise ValueError("bounds must have one entry per column")
        if bad := [s for s in senses if s not in SENSES]:
            raise ValueError(f"unknown constraint senses {bad}")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(A)) and np.all(np.isfinite(b))):
            raise ValueError("costs, matrix and right-hand side must be finite")
        if not np.all(np.isfinite(lower)):
            raise ValueError("lower bounds must be finite")
        if np.any(np.isnan(upper)) or np.any(upper < lower):
            raise ValueError("upper bounds must be >= lower bounds")
        for name, value in (("c", c), ("A", A), ("b", b), ("lower", lower), ("upper", upper)):
            value.setflags(write=False)
            object.__setattr__(self, name, value)
        object.__setattr__(self, "senses", senses)

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape

    def residuals(self, v: np.ndarray) -> np.ndarray:
        """Constraint violation per row (0 when satisfied)."""
        lhs = self.A @ v
        out = np.zeros_like(lhs)
        for i, s in enumerate(self.senses):
            d = lhs[i] - self.b[i]
            if s == "<=":
                out[i] = max(d, 0.0)
            elif s == ">=":
                out[i] = max(-d, 0.0)
            else:
                out[i] = abs(d)
        return out


@dataclass(frozen=True, eq=False)
class SolveResult:
    status: Status
    x: np.ndarray
    objective: float
    iterations: int
    basis: tuple[int, ...] = field(default=())

    @property
    def optimal(self) -> bool:
        return self.status is Status.OPTIMAL


class _Tableau:
    """Row-reduced tableau; last row holds reduced costs, last column the rhs."""

    def __init__(self, T: np.ndarray, basis: list[int], opts: SolverOptions):
        self.T = T
        self.basis = basis
        self.opts = opts
        self.iterations = 0

    def pivot(self, row: int, col: int) -> None:
        T = self.T
        T[row] /= T[row, col]
        colv = T[:, col].copy()
        colv[row] = 0.0
        nz = np.nonzero(colv)[0]
        if nz.size:
            T[nz] -= np.outer(colv[nz], T[row])
        # flush round-off so sign tests on constraint rows stay meaningful
        body = T[:-1, :-1]
        body[np.abs(body) < _NOISE] = 0.0
        self.basis[row] = col
        self.iterations += 1

    def _ratio_row(self, col: int) -> Optional[int]:
        T = self.T
        colv = T[:-1, col]
        rows = np.nonzero(colv > self.opts.pivot_tol)[0]
        if rows.size == 0:
            return None
        ratios = T[rows, -1] / colv[rows]
        best = ratios.min()
        ties = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        # Bland: among tied rows leave the smallest basic index
        return int(min(ties, key=lambda r: self.basis[r]))

    def run(self, active: np.ndarray, limit: int) -> Status:
        T = self.T
        tol = self.opts.reduced_cost_tol
        while True:
            if self.iterations >= limit:
                return Status.SOLVER_FAILURE
            d = T[-1, :-1]
            eligible = np.nonzero(active & (d < -tol))[0]
            if eligible.size == 0:
                return Status.OPTIMAL
            for col in eligible:
                row = self._ratio_row(col)
                if row is not None:
                    self.pivot(row, int(col))
                    break
                if not np.any(T[:-1, col] > 0.0):
                    return Status.UNBOUNDED
                # only numerically tiny pivots in this column; try the next one
            else:
                return Status.SOLVER_FAILURE


def _to_equality_form(lp: StandardFormLP):
    """Shift to ``y = v - lower >= 0``, add upper-bound rows, make rhs >= 0."""
    m, n = lp.shape
    A = np.array(lp.A, dtype=float)
    b = np.array(lp.b, dtype=float) - A @ lp.lower
    senses = list(lp.senses)
    finite = np.nonzero(np.isfinite(lp.upper))[0]
    if finite.size:
        U = np.zeros((finite.size, n))
        U[np.arange(finite.size), finite] = 1.0
        A = np.vstack([A, U])
        b = np.concatenate([b, lp.upper[finite] - lp.lower[finite]])
        senses += ["<="] * finite.size
    for i in range(A.shape[0]):
        if b[i] < 0:
            A[i] = -A[i]
            b[i] = -b[i]
            senses[i] = {"<=": ">=", ">=": "<=", "=": "="}[senses[i]]
    return A, b, senses


def solve(lp: StandardFormLP, options: Optional[SolverOptions] = None) -> SolveResult:
    """Minimise ``lp`` with the two-phase simplex method."""
    opts = options or SolverOptions()
    n = lp.shape[1]
    A, b, senses = _to_equality_form(lp)
    m = A.shape[0]

    n_slack = sum(s != "=" for s in senses)
    n_art = sum(s != "<=" for s in senses)
    n_struct = n + n_slack
    N = n_struct + n_art
    T = np.zeros((m + 1, N + 1))
    T[:m, :n] = A
    T[:m, -1] = b
    basis = []
    k_slack, k_art = n, n_struct
    for i, s in enumerate(senses):
        if s == "<=":
            T[i, k_slack] = 1.0
            basis.append(k_slack)
            k_slack += 1
        elif s == ">=":
            T[i, k_slack] = -1.0
            k_slack += 1
            T[i, k_art] = 1.0
            basis.append(k_art)
            k_art += 1
        else:
            T[i, k_art] = 1.0
            basis.append(k_art)
            k_art += 1

    limit = opts.max_iterations or 50 * (m + N) + 1000
    tab = _Tableau(T, basis, opts)
    active = np.ones(N, dtype=bool)

    if n_art:
        T[-1, n_struct:N] = 1.0
        for i, col in enumerate(basis):
            if col >= n_struct:
                T[-1] -= T[i]
        if tab.run(active, limit) is not Status.OPTIMAL:
            return _failed(lp, Status.SOLVER_FAILURE, tab.iterations)
        if -T[-1, -1] > opts.feasibility_tol:
            return _failed(lp, Status.INFEASIBLE, tab.iterations)
        # drive zero-level artificials out of the basis, drop redundant rows
        keep = []
        for i in range(m):
            if tab.basis[i] >= n_struct:
                row = T[i, :n_struct]
                cand = np.nonzero(np.abs(row) > opts.pivot_tol)[0]
                if cand.size:
                    tab.pivot(i, int(cand[0]))
                    keep.append(i)
            else:
                keep.append(i)
        if len(keep) < m:
            rows = keep + [m]
            tab.T = T = T[rows]
            tab.basis = [tab.basis[i] for i in keep]
        active[n_struct:] = False
        T[:, n_struct:N] = 0.0

    cost = np.zeros(N)
    cost[:n] = lp.c
    T[-1, :] = 0.0
    T[-1, :N] = cost
    for i, col in enumerate(tab.basis):
        if cost[col] != 0.0:
            T[-1] -= cost[col] * T[i]
    status = tab.run(active, limit)
    if status is not Status.OPTIMAL:
        return _failed(lp, status, tab.iterations)

    y = np.zeros(N)
    for i, col in enumerate(tab.basis):
        y[col] = T[i, -1]
    y = _polish(A, b, senses, n, tab.basis, y)
    v = np.clip(lp.lower + y[:n], lp.lower, lp.upper)
    basic = tuple(sorted(c for c in tab.basis if c < n))
    return SolveResult(Status.OPTIMAL, v, float(lp.c @ v), tab.iterations, basic)


def _polish(A, b, senses, n, basis, y):
    """Recompute basic values from the original data to shed tableau drift."""
    m = A.shape[0]
    k = n
    full = np.zeros((m, n + sum(s != "=" for s in senses)))
    full[:, :n] = A
    for i, s in enumerate(senses):
        if s == "<=":
            full[i, k] = 1.0
            k += 1
        elif s == ">=":
            full[i, k] = -1.0
            k += 1
    cols = [c for c in basis if c < full.shape[1]]
    if len(cols) != len(basis):
        return np.maximum(y, 0.0)
    B = full[:, cols]
    if B.shape[0] != B.shape[1]:
        # redundant rows were dropped; solve in the least-squares sense
        sol, *_ = np.linalg.lstsq(B, b, rcond=None)
    else:
        try:
            sol = np.linalg.solve(B, b)
        except np.linalg.LinAlgError:
            return np.maximum(y, 0.0)
    out = np.zeros_like(y)
    out[cols] = sol
    if np.max(np.abs(out - y)) > 1e-6 * max(1.0, np.max(np.abs(y))):
        return np.maximum(y, 0.0)
    return np.maximum(out, 0.0)


def _failed(lp: StandardFormLP, status: Status, iterations: int) -> SolveResult:
    n = lp.shape[1]
    return SolveResult(status, np.full(n, np.nan), float("nan"), iterations)

