"""Exact linear solving for feasibility systems over non-negative unknowns.

A dense two-phase simplex on Fractions with Bland's rule, so runs terminate
and answers are exact.  An infeasible system yields a separating certificate:
multipliers u, one per row (normalization row last when present), with
u . column <= 0 for every unknown's column while u . rhs equals a strictly
positive margin.  Certificates and solutions are re-verified before being
returned.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from .errors import InfeasibleSystem
from .geometry import LinearSystem

ZERO = Fraction(0)
ONE = Fraction(1)


@dataclass(frozen=True)
class FeasibilityCertificate:
    """Either a non-negative normalized solution or a priced refutation."""

    feasible: bool
    solution: Optional[tuple] = None
    dual: Optional[tuple] = None
    margin: Optional[Fraction] = None


@dataclass(frozen=True)
class OptimizationResult:
    value: Optional[Fraction]
    solution: Optional[tuple]
    bounded: bool = True


def _expanded(system: LinearSystem):
    if not system.non_negativity:
        raise ValueError("solver requires non-negative unknowns")
    rows = [[Fraction(v) for v in row] for row in system.equalities]
    rhs = [Fraction(b) for b in system.rhs]
    if system.normalization:
        rows.append([ONE] * system.n_unknowns)
        rhs.append(ONE)
    return rows, rhs


class _Simplex:
    """Tableau with unknown columns first, one artificial per row, rhs last."""

    def __init__(self, rows, rhs):
        self.m = len(rows[0]) if rows else 0
        self.k = len(rows)
        self.flip = [-1 if b < 0 else 1 for b in rhs]
        self.T = []
        for r in range(self.k):
            f = self.flip[r]
            row = [f * v for v in rows[r]] + [ZERO] * self.k + [f * rhs[r]]
            row[self.m + r] = ONE
            self.T.append(row)
        self.basis = [self.m + r for r in range(self.k)]

    def _pivot(self, r, c):
        T = self.T
        d = T[r][c]
        T[r] = [v / d for v in T[r]]
        row_r = T[r]
        for i in range(self.k):
            if i != r and T[i][c] != 0:
                f = T[i][c]
                T[i] = [v - f * w for v, w in zip(T[i], row_r)]
        self.basis[r] = c

    def _maximize(self, costs, allowed):
        """Bland's rule throughout; True at optimum, False when unbounded."""
        while True:
            basic = set(self.basis)
            cb = [costs[b] for b in self.basis]
            entering = None
            for j in allowed:
                if j in basic:
                    continue
                reduced = costs[j]
                for r in range(self.k):
                    if cb[r] != 0 and self.T[r][j] != 0:
                        reduced -= cb[r] * self.T[r][j]
                if reduced > 0:
                    entering = j
                    break
            if entering is None:
                return True
            leaving, best = None, None
            for r in range(self.k):
                a = self.T[r][entering]
                if a > 0:
                    ratio = self.T[r][-1] / a
                    if (
                        best is None
                        or ratio < best
                        or (ratio == best and self.basis[r] < self.basis[leaving])
                    ):
                        best, leaving = ratio, r
            if leaving is None:
                return False
            self._pivot(leaving, entering)

    def phase1(self) -> Fraction:
        """Drive the artificials toward zero; returns their residual sum."""
        costs = [ZERO] * self.m + [Fraction(-1)] * self.k
        self._maximize(costs, range(self.m))
        return sum(
            self.T[r][-1] for r in range(self.k) if self.basis[r] >= self.m
        )

    def drive_out_artificials(self):
        for r in range(self.k):
            if self.basis[r] < self.m:
                continue
            c = next((j for j in range(self.m) if self.T[r][j] != 0), None)
            if c is not None:
                self._pivot(r, c)
            # rows with no unknown left are redundant and stay inert

    def maximize_objective(self, objective) -> bool:
        costs = list(objective) + [ZERO] * self.k
        return self._maximize(costs, range(self.m))

    def solution(self) -> tuple:
        x = [ZERO] * self.m
        for r in range(self.k):
            if self.basis[r] < self.m:
                x[self.basis[r]] = self.T[r][-1]
        return tuple(x)

    def refutation(self) -> tuple:
        """Row multipliers v with v . column <= 0 and v . rhs > 0."""
        art_rows = [r for r in range(self.k) if self.basis[r] >= self.m]
        return tuple(
            self.flip[r] * sum(self.T[i][self.m + r] for i in art_rows)
            for r in range(self.k)
        )


def _verify_certificate(rows, rhs, cert: FeasibilityCertificate, system: LinearSystem):
    if cert.feasible:
        if not system.check_solution(cert.solution):
            raise RuntimeError("solver produced a non-solution")
        return
    if cert.margin is None or cert.margin <= 0:
        raise RuntimeError("refutation lacks a positive margin")
    m = len(rows[0]) if rows else 0
    for j in range(m):
        if sum(u * row[j] for u, row in zip(cert.dual, rows)) > 0:
            raise RuntimeError("refutation prices a column positively")
    if sum(u * b for u, b in zip(cert.dual, rhs)) != cert.margin:
        raise RuntimeError("refutation margin mismatch")


def solve_feasibility(system: LinearSystem) -> FeasibilityCertificate:
    """Decide {equalities, non-negativity, normalization} exactly."""
    rows, rhs = _expanded(system)
    simplex = _Simplex(rows, rhs)
    residual = simplex.phase1()
    if residual == 0:
        cert = FeasibilityCertificate(True, solution=simplex.solution())
    else:
        cert = FeasibilityCertificate(
            False, dual=simplex.refutation(), margin=residual
        )
    _verify_certificate(rows, rhs, cert, system)
    return cert


def maximize_linear(system: LinearSystem, objective: Sequence) -> OptimizationResult:
    """Exact max of objective . x over the system; raises when infeasible."""
    objective = [Fraction(c) for c in objective]
    if len(objective) != system.n_unknowns:
        raise ValueError("objective length must match the unknown count")
    rows, rhs = _expanded(system)
    simplex = _Simplex(rows, rhs)
    if simplex.phase1() != 0:
        raise InfeasibleSystem("system has no non-negative solution")
    simplex.drive_out_artificials()
    if not simplex.maximize_objective(objective):
        return OptimizationResult(None, None, bounded=False)
    x = simplex.solution()
    if not system.check_solution(x):
        raise RuntimeError("optimizer produced a non-solution")
    return OptimizationResult(sum(c * v for c, v in zip(objective, x)), x)


def maximize_component_sum(system: LinearSystem, index_set) -> OptimizationResult:
    """Exact max of the unknown-sum over index_set; raises when infeasible."""
    indices = set(index_set)
    if any(not 0 <= j < system.n_unknowns for j in indices):
        raise ValueError("index out of range")
    objective = [ONE if j in indices else ZERO for j in range(system.n_unknowns)]
    return maximize_linear(system, objective)
