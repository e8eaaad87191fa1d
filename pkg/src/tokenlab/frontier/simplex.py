"""Dense two-phase simplex solver for the DEA envelopment programs.

Minimizes c @ x subject to A_ub @ x <= b_ub, A_eq @ x = b_eq, x >= 0.
Bland's rule (lowest-index entering and leaving variables) prevents cycling;
the tableau is dense numpy, which is fine at the few-hundred-column scale of
the programs solved here. Deterministic: identical inputs always produce the
identical pivot sequence.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..errors import SolverError

DEFAULT_TOLERANCE = 1e-9

_MAX_ITERATIONS = 20000


@dataclass(frozen=True)
class SimplexResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    objective: float | None


def solve_lp(
    c: np.ndarray,
    A_ub: np.ndarray | None = None,
    b_ub: np.ndarray | None = None,
    A_eq: np.ndarray | None = None,
    b_eq: np.ndarray | None = None,
    tol: float = DEFAULT_TOLERANCE,
) -> SimplexResult:
    """Solve the linear program; see module docstring for the problem form."""
    c = np.asarray(c, dtype=float)
    n = c.size

    rows: list[np.ndarray] = []
    rhs: list[float] = []
    n_ub = 0
    if A_ub is not None:
        A_ub = np.atleast_2d(np.asarray(A_ub, dtype=float))
        b_ub = np.atleast_1d(np.asarray(b_ub, dtype=float))
        n_ub = A_ub.shape[0]
        rows.extend(A_ub)
        rhs.extend(b_ub)
    if A_eq is not None:
        A_eq = np.atleast_2d(np.asarray(A_eq, dtype=float))
        b_eq = np.atleast_1d(np.asarray(b_eq, dtype=float))
        rows.extend(A_eq)
        rhs.extend(b_eq)
    m = len(rows)
    if m == 0:
        raise SolverError("no constraints supplied")

    # Equality standard form: one slack per inequality row, then flip rows to
    # make every right-hand side non-negative.
    A = np.zeros((m, n + n_ub))
    b = np.array(rhs, dtype=float)
    for i, row in enumerate(rows):
        A[i, :n] = row
        if i < n_ub:
            A[i, n + i] = 1.0
    for i in range(m):
        if b[i] < 0:
            A[i] *= -1.0
            b[i] *= -1.0

    # A slack column survives as the initial basis of its row only if the row
    # was not flipped; all other rows get an artificial variable.
    basis = np.full(m, -1, dtype=int)
    needs_artificial = []
    for i in range(m):
        if i < n_ub and A[i, n + i] == 1.0:
            basis[i] = n + i
        else:
            needs_artificial.append(i)

    n_total = n + n_ub + len(needs_artificial)
    T = np.zeros((m, n_total + 1))
    T[:, : n + n_ub] = A
    T[:, -1] = b
    for j, i in enumerate(needs_artificial):
        col = n + n_ub + j
        T[i, col] = 1.0
        basis[i] = col

    if needs_artificial:
        # Phase 1: minimize the artificial sum, expressed through reduced costs.
        z = np.zeros(n_total + 1)
        z[n + n_ub :] = 1.0
        z[-1] = 0.0
        for i in needs_artificial:
            z -= T[i]
        status = _iterate(T, z, basis, tol)
        if status != "optimal":
            raise SolverError(f"phase 1 ended with status {status}")
        if -z[-1] > tol:
            return SimplexResult("infeasible", None, None)
        _drive_out_artificials(T, basis, n + n_ub, tol)

    # Phase 2 on the original objective over structural + slack columns.
    z = np.zeros(n_total + 1)
    z[:n] = c
    for i in range(T.shape[0]):
        if z[basis[i]] != 0.0:
            z -= z[basis[i]] * T[i]
    z[n + n_ub : n_total] = np.inf  # artificials may never re-enter
    status = _iterate(T, z, basis, tol, blocked_from=n + n_ub)
    if status == "unbounded":
        return SimplexResult("unbounded", None, None)
    if status != "optimal":
        raise SolverError(f"phase 2 ended with status {status}")

    x = np.zeros(n)
    for i, var in enumerate(basis):
        if var < n:
            x[var] = T[i, -1]
    return SimplexResult("optimal", x, float(c @ x))


def _iterate(
    T: np.ndarray,
    z: np.ndarray,
    basis: np.ndarray,
    tol: float,
    blocked_from: int | None = None,
) -> str:
    m, width = T.shape
    n_cols = width - 1
    limit = n_cols if blocked_from is None else blocked_from
    for _ in range(_MAX_ITERATIONS):
        entering = -1
        for j in range(limit):
            if z[j] < -tol:
                entering = j
                break
        if entering < 0:
            return "optimal"

        leaving = -1
        best_ratio = np.inf
        for i in range(m):
            a = T[i, entering]
            if a > tol:
                ratio = T[i, -1] / a
                # Bland: strict improvement, or equal ratio with a lower
                # basis index, keeps the pivot sequence cycle-free.
                if ratio < best_ratio - 1e-12 or (
                    abs(ratio - best_ratio) <= 1e-12
                    and (leaving < 0 or basis[i] < basis[leaving])
                ):
                    best_ratio = ratio
                    leaving = i
        if leaving < 0:
            return "unbounded"

        _pivot(T, z, leaving, entering)
        basis[leaving] = entering
    raise SolverError(f"iteration limit {_MAX_ITERATIONS} reached")


def _pivot(T: np.ndarray, z: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factor = T[:, col].copy()
    factor[row] = 0.0
    T -= np.outer(factor, T[row])
    if np.isfinite(z[col]) and z[col] != 0.0:
        z -= z[col] * T[row]


def _drive_out_artificials(
    T: np.ndarray, basis: np.ndarray, first_artificial: int, tol: float
) -> None:
    """Pivot basic artificials onto structural columns where possible.

    A zero-valued artificial whose row has no usable structural coefficient
    marks a redundant constraint; it stays basic at zero, which is harmless
    because artificials are barred from re-entering in phase 2.
    """
    for i in range(T.shape[0]):
        if basis[i] < first_artificial:
            continue
        for j in range(first_artificial):
            if abs(T[i, j]) > tol:
                dummy = np.zeros(T.shape[1])
                _pivot(T, dummy, i, j)
                basis[i] = j
                break
