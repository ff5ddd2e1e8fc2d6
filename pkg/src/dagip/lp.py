"""Self-contained linear programming: maximise over box-bounded variables.

Dense bounded-variable simplex, two builds of the same method:

* a float build on numpy with Dantzig pricing (switching to Bland's rule
  after a long degenerate streak) used by the branch-and-cut driver;
* an exact build over ``fractions.Fraction`` with Bland's rule throughout,
  used as an oracle for the float build and wherever rounding is banned.

Rows may be added incrementally; a previous basis can be offered as a warm
start and is used when it is still primal feasible, otherwise the solve
falls back to a fresh phase one with artificials.  A model and its solve
session belong to one thread; distinct sessions are independent.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

FEASIBILITY_TOL = 1e-7
PIVOT_TOL = 1e-10
DEGENERATE_SWITCH = 1000

LE, GE, EQ = "<=", ">=", "="


class LpError(Exception):
    pass


class LpIterationLimit(LpError):
    """Pivot count exceeded; signals numerical trouble to the caller."""


@dataclass
class LpModel:
    """Columns with bounds and objective, sparse rows with sense and rhs."""

    lower: list[float] = field(default_factory=list)
    upper: list[float] = field(default_factory=list)
    objective: list[float] = field(default_factory=list)
    rows: list[tuple[tuple[tuple[int, float], ...], str, float]] = field(default_factory=list)

    @property
    def ncols(self) -> int:
        return len(self.lower)

    @property
    def nrows(self) -> int:
        return len(self.rows)

    def add_column(self, lower: float = 0.0, upper: float = 1.0, objective: float = 0.0) -> int:
        if lower > upper:
            raise LpError("lower bound above upper bound")
        self.lower.append(float(lower))
        self.upper.append(float(upper))
        self.objective.append(float(objective))
        return self.ncols - 1

    def add_row(self, coeffs: Iterable[tuple[int, float]], sense: str, rhs: float) -> int:
        if sense not in (LE, GE, EQ):
            raise LpError("unknown sense %r" % sense)
        cs = tuple((int(c), float(v)) for c, v in coeffs)
        for c, _ in cs:
            if not 0 <= c < self.ncols:
                raise LpError("row references invalid column %d" % c)
        self.rows.append((cs, sense, float(rhs)))
        return self.nrows - 1

    def add_rows(self, rows) -> None:
        for coeffs, sense, rhs in rows:
            self.add_row(coeffs, sense, rhs)

    def set_bounds(self, col: int, lower: float, upper: float) -> None:
        if lower > upper:
            raise LpError("lower bound above upper bound")
        self.lower[col] = float(lower)
        self.upper[col] = float(upper)

    def copy(self) -> "LpModel":
        return LpModel(list(self.lower), list(self.upper), list(self.objective),
                       list(self.rows))


@dataclass
class LpSolution:
    status: str                      # "optimal" | "infeasible"
    x: np.ndarray | None
    objective: float | None
    basis: tuple | None = None       # (basic columns, columns at upper)

    @property
    def optimal(self) -> bool:
        return self.status == "optimal"


def _expanded(model: LpModel):
    """Standard-form arrays: structurals then one slack per row (Ax + s = b)."""
    n, m = model.ncols, model.nrows
    total = n + m
    A = np.zeros((m, total))
    b = np.zeros(m)
    lo = np.empty(total)
    hi = np.empty(total)
    lo[:n] = model.lower
    hi[:n] = model.upper
    for r, (coeffs, sense, rhs) in enumerate(model.rows):
        for c, v in coeffs:
            A[r, c] += v
        A[r, n + r] = 1.0
        b[r] = rhs
        if sense == LE:
            lo[n + r], hi[n + r] = 0.0, np.inf
        elif sense == GE:
            lo[n + r], hi[n + r] = -np.inf, 0.0
        else:
            lo[n + r], hi[n + r] = 0.0, 0.0
    return A, b, lo, hi


class _Simplex:
    """One float solve session over the expanded arrays."""

    def __init__(self, A, b, lo, hi, max_iter):
        self.A, self.b, self.lo, self.hi = A, b, lo, hi
        self.m, self.total = A.shape
        self.max_iter = max_iter
        self.at_upper = np.zeros(self.total, dtype=bool)
        self.basic_mask = np.zeros(self.total, dtype=bool)
        self.basis: list[int] = []
        self.xB = np.zeros(self.m)
        self.degenerate_streak = 0
        self.pivots = 0

    def nonbasic_values(self):
        v = np.where(self.at_upper, self.hi, self.lo)
        v[self.basic_mask] = 0.0
        # A variable with an infinite "resting" bound sits at zero instead.
        return np.where(np.isfinite(v), v, 0.0)

    def set_basis(self, basis: Sequence[int], at_upper: Iterable[int]):
        self.basis = list(basis)
        self.basic_mask[:] = False
        self.basic_mask[self.basis] = True
        self.at_upper[:] = False
        for c in at_upper:
            if not self.basic_mask[c] and np.isfinite(self.hi[c]):
                self.at_upper[c] = True
        # A nonbasic variable must rest at a finite bound; those without a
        # finite lower bound are pushed to their upper one.
        homeless = ~self.basic_mask & ~self.at_upper & ~np.isfinite(self.lo)
        self.at_upper |= homeless & np.isfinite(self.hi)
        self.refresh_xB()

    def refresh_xB(self):
        if not self.basis:
            return
        xN = self.nonbasic_values()
        rhs = self.b - self.A @ xN
        self.xB = np.linalg.solve(self.A[:, self.basis], rhs)

    def primal_feasible(self, tol=FEASIBILITY_TOL) -> bool:
        lo = self.lo[self.basis]
        hi = self.hi[self.basis]
        return bool(np.all(self.xB >= lo - tol) and np.all(self.xB <= hi + tol))

    def full_solution(self):
        x = self.nonbasic_values()
        x[self.basis] = self.xB
        return x

    def optimise(self, cost: np.ndarray, frozen: np.ndarray) -> None:
        """Run primal pivots until no eligible entering column remains.

        ``frozen`` marks columns barred from entering (artificials in
        phase two).  Raises :class:`LpIterationLimit` on stall.
        """
        m = self.m
        while True:
            self.pivots += 1
            if self.pivots > self.max_iter:
                raise LpIterationLimit("simplex exceeded %d pivots" % self.max_iter)
            B = self.A[:, self.basis]
            if self.basis:
                pi = np.linalg.solve(B.T, cost[self.basis])
                d = cost - pi @ self.A
            else:
                d = cost.copy()
            d[self.basic_mask] = 0.0
            d[frozen] = 0.0
            up_ok = (d > PIVOT_TOL) & ~self.at_upper
            down_ok = (d < -PIVOT_TOL) & self.at_upper
            eligible = np.flatnonzero(up_ok | down_ok)
            if eligible.size == 0:
                return
            if self.degenerate_streak >= DEGENERATE_SWITCH:
                enter = int(eligible[0])                      # Bland
            else:
                enter = int(eligible[np.argmax(np.abs(d[eligible]))])
            direction = -1.0 if self.at_upper[enter] else 1.0

            if self.basis:
                w = np.linalg.solve(B, self.A[:, enter])
            else:
                w = np.zeros(0)
            # Entering moves by t >= 0; basics move by -direction * t * w.
            t_best = self.hi[enter] - self.lo[enter]
            leave_pos = -1
            leave_to_upper = False
            for i in range(m):
                step = direction * w[i]
                if step > PIVOT_TOL:
                    room = self.xB[i] - self.lo[self.basis[i]]
                    t = room / step
                    hit_upper = False
                elif step < -PIVOT_TOL:
                    room = self.xB[i] - self.hi[self.basis[i]]
                    t = room / step
                    hit_upper = True
                else:
                    continue
                if t < t_best - 1e-12:
                    t_best, leave_pos, leave_to_upper = t, i, hit_upper
                elif t < t_best + 1e-12 and leave_pos >= 0:
                    # Lowest column index breaks ties (anti-cycling friendly).
                    if self.basis[i] < self.basis[leave_pos]:
                        leave_pos, leave_to_upper = i, hit_upper
            if not np.isfinite(t_best):
                raise LpError("unbounded direction; model bounds are broken")
            t_best = max(t_best, 0.0)
            self.degenerate_streak = self.degenerate_streak + 1 if t_best <= 1e-12 else 0

            self.xB -= direction * t_best * w
            if leave_pos < 0:
                # Bound flip: entering jumps to its other bound.
                self.at_upper[enter] = not self.at_upper[enter]
            else:
                leaving = self.basis[leave_pos]
                self.basis[leave_pos] = enter
                self.basic_mask[leaving] = False
                self.basic_mask[enter] = True
                self.at_upper[enter] = False
                self.at_upper[leaving] = leave_to_upper and np.isfinite(self.hi[leaving])
                self.xB[leave_pos] = (self.lo[enter] if direction > 0 else self.hi[enter]) \
                    + direction * t_best
            self.refresh_xB()


def lp_solve(model: LpModel, warm: tuple | None = None, exact: bool = False,
             max_iter: int | None = None) -> LpSolution:
    """Maximise the model objective; return an optimal basic solution.

    Args:
        model: well-formed box-bounded model.
        warm: ``(basic columns, columns at upper)`` from a previous solve of
            a row-extension of the same model; used when still feasible.
        exact: solve in exact rational arithmetic instead (Bland's rule).
        max_iter: pivot limit override.

    Raises:
        LpIterationLimit: if the pivot limit is hit.
    """
    if exact:
        return _solve_exact(model, max_iter)
    n, m = model.ncols, model.nrows
    if max_iter is None:
        max_iter = 5000 + 200 * (n + m)
    A, b, lo, hi = _expanded(model)
    sx = _Simplex(A, b, lo, hi, max_iter)
    cost = np.zeros(n + m)
    cost[:n] = model.objective

    started = False
    if warm is not None:
        basic, at_upper = warm
        basicset = set(c for c in basic if c < n + m)
        if len(basicset) == len(basic) and len(basicset) <= m:
            # Newly appended rows get their slacks basic; newest rows first.
            fill = [n + r for r in range(m - 1, -1, -1) if n + r not in basicset]
            trial = list(basic) + fill[:m - len(basicset)]
            if len(trial) == m:
                try:
                    sx.set_basis(trial, [c for c in at_upper if c < n + m])
                    started = sx.primal_feasible()
                except np.linalg.LinAlgError:
                    started = False
    if not started:
        feasible = _phase_one(sx, model, n, m)
        if not feasible:
            return LpSolution("infeasible", None, None)

    frozen = np.zeros(sx.total, dtype=bool)
    frozen[n + m:] = True
    sx.optimise(np.concatenate([cost, np.zeros(sx.total - (n + m))]), frozen)
    x = sx.full_solution()
    obj = float(cost @ x[:n + m])
    basis = (tuple(c for c in sx.basis), frozenset(int(c) for c in np.flatnonzero(sx.at_upper)))
    return LpSolution("optimal", x[:n].copy(), obj, basis)


def _phase_one(sx: _Simplex, model: LpModel, n: int, m: int) -> bool:
    """Install a feasible basis, adding artificial columns where needed."""
    xN = np.where(np.isfinite(sx.lo), sx.lo,
                  np.where(np.isfinite(sx.hi), sx.hi, 0.0))
    residual = sx.b - sx.A[:, :n] @ xN[:n]
    basis = []
    art_cols = []
    for r in range(m):
        s = n + r
        v = residual[r]
        if sx.lo[s] - FEASIBILITY_TOL <= v <= sx.hi[s] + FEASIBILITY_TOL:
            basis.append(s)
        else:
            rest = min(max(v, sx.lo[s]), sx.hi[s])
            sign = 1.0 if v - rest > 0 else -1.0
            art_cols.append((r, sign, rest, s))
    if not art_cols:
        sx.set_basis(basis, [])
        return True

    k = len(art_cols)
    A2 = np.zeros((m, sx.total + k))
    A2[:, :sx.total] = sx.A
    lo2 = np.concatenate([sx.lo, np.zeros(k)])
    hi2 = np.concatenate([sx.hi, np.full(k, np.inf)])
    slack_rest = {}
    for j, (r, sign, rest, s) in enumerate(art_cols):
        A2[r, sx.total + j] = sign
        slack_rest[s] = rest
        basis.append(sx.total + j)
    sx.A, sx.lo, sx.hi = A2, lo2, hi2
    sx.total += k
    sx.at_upper = np.zeros(sx.total, dtype=bool)
    sx.basic_mask = np.zeros(sx.total, dtype=bool)
    # Slacks displaced by artificials rest at the bound nearest their value.
    at_upper = [s for s, rest in slack_rest.items()
                if np.isfinite(sx.hi[s]) and rest == sx.hi[s] and sx.hi[s] != sx.lo[s]]
    sx.set_basis(sorted(basis), at_upper)

    cost1 = np.zeros(sx.total)
    cost1[sx.total - k:] = -1.0
    frozen = np.zeros(sx.total, dtype=bool)
    sx.optimise(cost1, frozen)
    infeas = float(cost1 @ sx.full_solution())
    if infeas < -FEASIBILITY_TOL:
        return False
    # Pin artificials to zero for phase two.
    sx.lo[sx.total - k:] = 0.0
    sx.hi[sx.total - k:] = 0.0
    sx.refresh_xB()
    return True


def verify_solution(model: LpModel, x: Sequence[float], tol: float = FEASIBILITY_TOL) -> float:
    """Largest bound/row violation of a structural point (for invariants)."""
    worst = 0.0
    for c in range(model.ncols):
        worst = max(worst, model.lower[c] - x[c], x[c] - model.upper[c])
    for coeffs, sense, rhs in model.rows:
        lhs = sum(v * x[c] for c, v in coeffs)
        if sense == LE:
            worst = max(worst, lhs - rhs)
        elif sense == GE:
            worst = max(worst, rhs - lhs)
        else:
            worst = max(worst, abs(lhs - rhs))
    return worst


# ---------------------------------------------------------------------------
# Exact rational build (used as oracle, and wherever rounding is forbidden).

def _solve_exact(model: LpModel, max_iter: int | None) -> LpSolution:
    n, m = model.ncols, model.nrows
    if max_iter is None:
        max_iter = 20000 + 400 * (n + m)
    INF = None  # represent infinite bounds as None

    def frac(v):
        return Fraction(v) if v not in (np.inf, -np.inf) else None

    total = n + m
    A = [[Fraction(0)] * total for _ in range(m)]
    b = [Fraction(0)] * m
    lo: list[Fraction | None] = [frac(v) for v in model.lower]
    hi: list[Fraction | None] = [frac(v) for v in model.upper]
    for r, (coeffs, sense, rhs) in enumerate(model.rows):
        for c, v in coeffs:
            A[r][c] += Fraction(v)
        A[r][n + r] = Fraction(1)
        b[r] = Fraction(rhs)
        if sense == LE:
            lo.append(Fraction(0)); hi.append(INF)
        elif sense == GE:
            lo.append(INF); hi.append(Fraction(0))
        else:
            lo.append(Fraction(0)); hi.append(Fraction(0))
    cost = [Fraction(v) for v in model.objective] + [Fraction(0)] * m

    art = []
    basis = []
    at_upper = set()
    x = [l if l is not None else (h if h is not None else Fraction(0))
         for l, h in zip(lo[:n], hi[:n])]
    for r in range(m):
        v = b[r] - sum(A[r][c] * x[c] for c in range(n) if A[r][c])
        s = n + r
        slo, shi = lo[s], hi[s]
        if (slo is None or v >= slo) and (shi is None or v <= shi):
            basis.append(s)
        else:
            rest = slo if (slo is not None and v < slo) else shi
            sign = Fraction(1) if v - rest > 0 else Fraction(-1)
            col = [Fraction(0)] * m
            col[r] = sign
            for row in range(m):
                A[row].append(col[row])
            lo.append(Fraction(0)); hi.append(INF)
            cost.append(Fraction(0))
            art.append(total)
            basis.append(total)
            if rest == shi and shi is not None and shi != slo:
                at_upper.add(s)
            total += 1

    state = _ExactState(A, b, lo, hi, basis, at_upper, m, total, max_iter)
    if art:
        phase1 = [Fraction(0)] * total
        for c in art:
            phase1[c] = Fraction(-1)
        state.optimise(phase1, frozenset())
        if state.objective(phase1) < 0:
            return LpSolution("infeasible", None, None)
        for c in art:
            state.lo[c] = Fraction(0)
            state.hi[c] = Fraction(0)
        state.refresh()
    state.optimise(cost, frozenset(art))
    xs = state.solution()
    obj = sum(cost[c] * xs[c] for c in range(n) if cost[c])
    return LpSolution("optimal", np.array([float(v) for v in xs[:n]]),
                      float(obj), (tuple(state.basis), frozenset(state.at_upper)))


class _ExactState:
    """Bland-rule bounded simplex over Fractions (no tolerances at all)."""

    def __init__(self, A, b, lo, hi, basis, at_upper, m, total, max_iter):
        self.A, self.b, self.lo, self.hi = A, b, lo, hi
        self.m, self.total, self.max_iter = m, total, max_iter
        self.basis = list(basis)
        self.at_upper = set(at_upper)
        self.refresh()

    def _nonbasic_value(self, c):
        if c in self.at_upper:
            return self.hi[c]
        return self.lo[c] if self.lo[c] is not None else Fraction(0)

    def refresh(self):
        basic = set(self.basis)
        rhs = []
        for r in range(self.m):
            v = self.b[r]
            for c in range(self.total):
                if c not in basic and self.A[r][c]:
                    v -= self.A[r][c] * self._nonbasic_value(c)
            rhs.append(v)
        self.xB = _gauss_solve([[self.A[r][c] for c in self.basis] for r in range(self.m)], rhs)

    def solution(self):
        xs = [self._nonbasic_value(c) for c in range(self.total)]
        for pos, c in enumerate(self.basis):
            xs[c] = self.xB[pos]
        return xs

    def objective(self, cost):
        xs = self.solution()
        return sum(cost[c] * xs[c] for c in range(self.total) if cost[c])

    def optimise(self, cost, frozen):
        pivots = 0
        while True:
            pivots += 1
            if pivots > self.max_iter:
                raise LpIterationLimit("exact simplex exceeded %d pivots" % self.max_iter)
            basic = set(self.basis)
            Bt = [[self.A[r][c] for r in range(self.m)] for c in self.basis]
            pi = _gauss_solve(Bt, [cost[c] for c in self.basis]) if self.basis else []
            enter = -1
            direction = 1
            for c in range(self.total):
                if c in basic or c in frozen:
                    continue
                d = cost[c] - sum(pi[r] * self.A[r][c] for r in range(self.m) if self.A[r][c])
                if d > 0 and c not in self.at_upper and (
                        self.hi[c] is None or self.lo[c] is None or self.hi[c] > self.lo[c]):
                    enter, direction = c, 1
                    break
                if d < 0 and c in self.at_upper:
                    enter, direction = c, -1
                    break
            if enter < 0:
                return
            w = _gauss_solve([[self.A[r][c] for c in self.basis] for r in range(self.m)],
                             [self.A[r][enter] for r in range(self.m)]) if self.basis else []
            t_best = None
            if self.lo[enter] is not None and self.hi[enter] is not None:
                t_best = self.hi[enter] - self.lo[enter]
            leave_pos = -1
            leave_upper = False
            for i in range(self.m):
                step = direction * w[i]
                if step > 0 and self.lo[self.basis[i]] is not None:
                    t = (self.xB[i] - self.lo[self.basis[i]]) / step
                    up = False
                elif step < 0 and self.hi[self.basis[i]] is not None:
                    t = (self.xB[i] - self.hi[self.basis[i]]) / step
                    up = True
                else:
                    continue
                better = t_best is None or t < t_best or (
                    t == t_best and leave_pos >= 0 and self.basis[i] < self.basis[leave_pos])
                if better:
                    t_best, leave_pos, leave_upper = t, i, up
            if t_best is None:
                raise LpError("unbounded direction in exact simplex")
            if t_best < 0:
                t_best = Fraction(0)
            if leave_pos < 0:
                if direction > 0:
                    self.at_upper.add(enter)
                else:
                    self.at_upper.discard(enter)
            else:
                leaving = self.basis[leave_pos]
                self.basis[leave_pos] = enter
                if leave_upper:
                    self.at_upper.add(leaving)
                else:
                    self.at_upper.discard(leaving)
                self.at_upper.discard(enter)
            self.refresh()


def _gauss_solve(M, rhs):
    """Exact dense solve by elimination with partial (first-nonzero) pivoting."""
    m = len(M)
    if m == 0:
        return []
    M = [row[:] + [rhs[r]] for r, row in enumerate(M)]
    for col in range(m):
        piv = next((r for r in range(col, m) if M[r][col] != 0), None)
        if piv is None:
            raise LpError("singular basis matrix")
        M[col], M[piv] = M[piv], M[col]
        inv = M[col][col]
        for r in range(m):
            if r != col and M[r][col]:
                f = M[r][col] / inv
                Mr, Mc = M[r], M[col]
                for c in range(col, m + 1):
                    Mr[c] -= f * Mc[c]
    return [M[r][m] / M[r][r] for r in range(m)]
