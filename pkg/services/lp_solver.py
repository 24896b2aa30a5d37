"""
LP Subsolver
Bounded revised simplex (primal for cold starts, dual for warm restarts)
with an editable model that supports checkpoint/revert for tree search
"""

import logging
from dataclasses import dataclass, field
from enum import Enum, IntEnum
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linprog

from config.settings import TOL_FEAS, TOL_OPT
from utils.errors import InvalidMark, NumericalFailure

logger = logging.getLogger(__name__)

PRIMAL_TOL = 1e-9
DUAL_TOL = TOL_OPT
PIVOT_TOL = 1e-9
RATIO_TIE_TOL = 1e-12
REFACTOR_INTERVAL = 50
MAX_CONDITION = 1e12


class LpStatus(str, Enum):
    OPTIMAL = 'OPTIMAL'
    INFEASIBLE = 'INFEASIBLE'
    UNBOUNDED = 'UNBOUNDED'
    ITER_LIMIT = 'ITER_LIMIT'


class VarStatus(IntEnum):
    BASIC = 0
    AT_LOWER = 1
    AT_UPPER = 2
    FREE = 3


VarKey = Tuple[str, int]


@dataclass(frozen=True)
class BasisToken:
    """Warm-start hint keyed by variable identity so it survives row edits"""
    basic: Tuple[VarKey, ...]
    at_upper: FrozenSet[VarKey]
    known: FrozenSet[VarKey]


@dataclass
class LpRow:
    key: int
    coeffs: Dict[int, float]
    sense: str
    rhs: float
    name: str


@dataclass
class LpResult:
    status: LpStatus
    objective: float = float('nan')
    primal: np.ndarray = field(default_factory=lambda: np.zeros(0))
    duals: np.ndarray = field(default_factory=lambda: np.zeros(0))
    reduced_costs: np.ndarray = field(default_factory=lambda: np.zeros(0))
    row_activity: np.ndarray = field(default_factory=lambda: np.zeros(0))
    basis: Optional[BasisToken] = None
    iterations: int = 0
    method: str = 'primal'

    @property
    def optimal(self) -> bool:
        return self.status is LpStatus.OPTIMAL


def _tol(values: np.ndarray) -> np.ndarray:
    scale = np.where(np.isfinite(values), np.abs(values), 0.0)
    return PRIMAL_TOL * np.maximum(1.0, scale)


class LpModel:
    """
    min c^T x subject to rows (<=, =, >=) and variable bounds.

    Bound changes and row additions are journaled; checkpoint() returns a
    mark and revert(mark) undoes every edit made after it.
    """

    def __init__(self, name: str = 'lp'):
        self.name = name
        self._lower: List[float] = []
        self._upper: List[float] = []
        self._cost: List[float] = []
        self._var_names: List[str] = []
        self._rows: List[LpRow] = []
        self._log: List[tuple] = []
        self._marks = {0}
        self._next_key = 0
        self._matrix: Optional[np.ndarray] = None

    # --- structure -------------------------------------------------------
    def add_variable(self, lower: float = 0.0, upper: float = np.inf,
                     cost: float = 0.0, name: Optional[str] = None) -> int:
        if self._log:
            raise ValueError('variables must be added before any journaled edit')
        self._lower.append(float(lower))
        self._upper.append(float(upper))
        self._cost.append(float(cost))
        self._var_names.append(name or f'C{len(self._var_names)}')
        self._matrix = None
        return len(self._lower) - 1

    @property
    def num_vars(self) -> int:
        return len(self._lower)

    @property
    def num_rows(self) -> int:
        return len(self._rows)

    @property
    def lower(self) -> np.ndarray:
        return np.array(self._lower, dtype=float)

    @property
    def upper(self) -> np.ndarray:
        return np.array(self._upper, dtype=float)

    @property
    def cost(self) -> np.ndarray:
        return np.array(self._cost, dtype=float)

    @property
    def rows(self) -> List[LpRow]:
        return list(self._rows)

    def var_name(self, var: int) -> str:
        return self._var_names[var]

    # --- journaled edits -------------------------------------------------
    def add_row(self, coeffs: Union[Mapping[int, float], Sequence[float]], sense: str,
                rhs: float, name: Optional[str] = None) -> int:
        if sense not in ('<=', '=', '>='):
            raise ValueError(f'unknown sense {sense!r}')
        if isinstance(coeffs, Mapping):
            entries = {int(j): float(a) for j, a in coeffs.items() if a != 0}
        else:
            entries = {j: float(a) for j, a in enumerate(coeffs) if a != 0}
        if any(j < 0 or j >= self.num_vars for j in entries):
            raise IndexError('row references an unknown variable')
        key = self._next_key
        self._next_key += 1
        self._rows.append(LpRow(key, entries, sense, float(rhs), name or f'R{key}'))
        self._log.append(('row', key))
        self._matrix = None
        return len(self._rows) - 1

    def change_bounds(self, var: int, lo: float, hi: float) -> None:
        self._log.append(('bounds', var, self._lower[var], self._upper[var]))
        self._lower[var] = float(lo)
        self._upper[var] = float(hi)

    def checkpoint(self) -> int:
        mark = len(self._log)
        self._marks.add(mark)
        return mark

    def revert(self, mark: int) -> None:
        if mark not in self._marks or mark > len(self._log):
            raise InvalidMark(f'unknown checkpoint {mark}')
        while len(self._log) > mark:
            entry = self._log.pop()
            if entry[0] == 'bounds':
                _, var, lo, hi = entry
                self._lower[var] = lo
                self._upper[var] = hi
            else:
                removed = self._rows.pop()
                assert removed.key == entry[1]
                self._matrix = None
        self._marks = {m for m in self._marks if m <= mark}

    # --- views -----------------------------------------------------------
    def dense_matrix(self) -> np.ndarray:
        if self._matrix is None:
            A = np.zeros((len(self._rows), self.num_vars))
            for r, row in enumerate(self._rows):
                for j, a in row.coeffs.items():
                    A[r, j] = a
            self._matrix = A
        return self._matrix

    def rhs(self) -> np.ndarray:
        return np.array([row.rhs for row in self._rows], dtype=float)

    def senses(self) -> List[str]:
        return [row.sense for row in self._rows]

    def to_mps(self) -> str:
        """Fixed-layout MPS text of the current model (bounds included)"""
        tag = {'<=': 'L', '=': 'E', '>=': 'G'}
        lines = [f'NAME          {self.name}', 'ROWS', ' N  OBJ']
        for row in self._rows:
            lines.append(f' {tag[row.sense]}  {row.name}')
        lines.append('COLUMNS')
        for j in range(self.num_vars):
            col = self._var_names[j]
            if self._cost[j] != 0:
                lines.append(f'    {col:<8}  {"OBJ":<8}  {self._cost[j]!r}')
            for row in self._rows:
                if j in row.coeffs:
                    lines.append(f'    {col:<8}  {row.name:<8}  {row.coeffs[j]!r}')
        lines.append('RHS')
        for row in self._rows:
            if row.rhs != 0:
                lines.append(f'    {"RHS":<8}  {row.name:<8}  {row.rhs!r}')
        lines.append('BOUNDS')
        for j in range(self.num_vars):
            col, lo, hi = self._var_names[j], self._lower[j], self._upper[j]
            if lo == hi:
                lines.append(f' FX {"BND":<8}  {col:<8}  {lo!r}')
                continue
            if np.isinf(lo) and np.isinf(hi):
                lines.append(f' FR {"BND":<8}  {col:<8}')
                continue
            if np.isinf(lo):
                lines.append(f' MI {"BND":<8}  {col:<8}')
            elif lo != 0:
                lines.append(f' LO {"BND":<8}  {col:<8}  {lo!r}')
            if not np.isinf(hi):
                lines.append(f' UP {"BND":<8}  {col:<8}  {hi!r}')
        lines.append('ENDATA')
        return '\n'.join(lines) + '\n'


class _SimplexRun:
    """Working state of one simplex solve over [A | I] with logical slacks"""

    def __init__(self, model: LpModel, iteration_limit: Optional[int]):
        A = model.dense_matrix()
        self.R, self.n = A.shape
        self.N = self.n + self.R
        self.M = np.hstack([A, np.eye(self.R)])
        self.b = model.rhs()
        slack_lo = np.array([0.0 if s != '>=' else -np.inf for s in model.senses()])
        slack_hi = np.array([np.inf if s == '<=' else 0.0 for s in model.senses()])
        self.L = np.concatenate([model.lower, slack_lo])
        self.U = np.concatenate([model.upper, slack_hi])
        self.C = np.concatenate([model.cost, np.zeros(self.R)])
        self.keys: List[VarKey] = [('x', j) for j in range(self.n)] + [('r', row.key) for row in model.rows]
        self.status = np.full(self.N, VarStatus.AT_LOWER, dtype=int)
        self.basis = np.arange(self.n, self.N)
        self.Binv = np.eye(self.R)
        self.iterations = 0
        self.limit = iteration_limit or max(100, 50 * (self.n + self.R))
        self.bland = False
        self._since_refactor = 0
        self._fixed = (self.U - self.L) <= _tol(self.U)

    # --- basis handling ----------------------------------------------------
    def _default_status(self, j: int) -> int:
        if np.isfinite(self.L[j]):
            return VarStatus.AT_LOWER
        if np.isfinite(self.U[j]):
            return VarStatus.AT_UPPER
        return VarStatus.FREE

    def cold_start(self) -> None:
        self.basis = np.arange(self.n, self.N)
        for j in range(self.n):
            self.status[j] = self._default_status(j)
        self.status[self.basis] = VarStatus.BASIC
        self.Binv = np.eye(self.R)
        self._since_refactor = 0

    def warm_start(self, token: BasisToken) -> bool:
        index = {key: j for j, key in enumerate(self.keys)}
        basic = [index[key] for key in token.basic if key in index]
        basic += [j for j, key in enumerate(self.keys) if key[0] == 'r' and key not in token.known]
        if len(basic) != self.R or len(set(basic)) != self.R:
            return False
        basis = np.array(basic, dtype=int)
        if self.R:
            B = self.M[:, basis]
            try:
                if np.linalg.cond(B) > MAX_CONDITION:
                    return False
                Binv = np.linalg.inv(B)
            except np.linalg.LinAlgError:
                return False
        else:
            Binv = np.eye(0)
        self.basis, self.Binv = basis, Binv
        for j in range(self.N):
            key = self.keys[j]
            if key in token.at_upper and np.isfinite(self.U[j]):
                self.status[j] = VarStatus.AT_UPPER
            else:
                self.status[j] = self._default_status(j)
        self.status[self.basis] = VarStatus.BASIC
        self._since_refactor = 0
        return True

    def refactor(self) -> None:
        if not self.R:
            return
        try:
            self.Binv = np.linalg.inv(self.M[:, self.basis])
        except np.linalg.LinAlgError as e:
            raise NumericalFailure('singular basis at refactorization') from e
        if not np.all(np.isfinite(self.Binv)):
            raise NumericalFailure('non-finite basis inverse')
        self._since_refactor = 0

    def pivot(self, r: int, q: int, alpha: np.ndarray, leaving_status: int) -> None:
        piv = alpha[r]
        if abs(piv) < PIVOT_TOL:
            raise NumericalFailure(f'pivot element {piv:g} too small')
        row = self.Binv[r] / piv
        self.Binv -= np.outer(alpha, row)
        self.Binv[r] = row
        leaving = self.basis[r]
        self.status[leaving] = leaving_status
        self.basis[r] = q
        self.status[q] = VarStatus.BASIC
        self._since_refactor += 1
        if self._since_refactor >= REFACTOR_INTERVAL:
            self.refactor()

    def values(self) -> np.ndarray:
        x = np.zeros(self.N)
        st = self.status
        x[st == VarStatus.AT_LOWER] = self.L[st == VarStatus.AT_LOWER]
        x[st == VarStatus.AT_UPPER] = self.U[st == VarStatus.AT_UPPER]
        if self.R:
            x[self.basis] = 0.0
            x[self.basis] = self.Binv @ (self.b - self.M @ x)
        return x

    def reduced_costs(self, cost_basic: np.ndarray, cost: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        y = cost_basic @ self.Binv if self.R else np.zeros(0)
        d = cost - y @ self.M if self.R else cost.copy()
        d[self.basis] = 0.0
        return y, d

    def _track_stall(self, objective: float, state: dict) -> None:
        best = state.get('best', np.inf)
        if objective < best - 1e-12 * (1.0 + abs(best) if np.isfinite(best) else 1.0):
            state['best'] = objective
            state['stall'] = 0
        else:
            state['stall'] = state.get('stall', 0) + 1
            if state['stall'] > 2 * (self.n + self.R) and not self.bland:
                logger.debug('cycling guard tripped after %d iterations, switching to Bland', self.iterations)
                self.bland = True

    # --- primal simplex ------------------------------------------------------
    def primal(self) -> LpStatus:
        stall: dict = {}
        phase_was = None
        while True:
            if self.iterations >= self.limit:
                return LpStatus.ITER_LIMIT
            x = self.values()
            xB = x[self.basis]
            LB, UB = self.L[self.basis], self.U[self.basis]
            below = xB < LB - _tol(LB)
            above = xB > UB + _tol(UB)
            phase1 = bool(below.any() or above.any())
            if phase1:
                cost_basic = np.where(below, -1.0, np.where(above, 1.0, 0.0))
                cost = np.zeros(self.N)
                objective = float(np.sum(LB[below] - xB[below]) + np.sum(xB[above] - UB[above]))
            else:
                cost_basic = self.C[self.basis]
                cost = self.C
                objective = float(self.C @ x)
            if phase_was is not phase1:
                stall = {}
                phase_was = phase1
            self._track_stall(objective, stall)

            _, d = self.reduced_costs(cost_basic, cost)
            q, direction = self._entering(d)
            if q is None:
                return LpStatus.INFEASIBLE if phase1 else LpStatus.OPTIMAL

            alpha = self.Binv @ self.M[:, q] if self.R else np.zeros(0)
            rate = -direction * alpha
            r, t_pivot, target = self._primal_ratio(xB, LB, UB, rate)
            t_flip = self.U[q] - self.L[q] if np.isfinite(self.L[q]) and np.isfinite(self.U[q]) else np.inf
            self.iterations += 1
            if t_flip <= t_pivot:
                if not np.isfinite(t_flip):
                    if phase1:
                        raise NumericalFailure('unbounded ray during phase 1')
                    return LpStatus.UNBOUNDED
                self.status[q] = VarStatus.AT_LOWER if self.status[q] == VarStatus.AT_UPPER else VarStatus.AT_UPPER
                continue
            self.pivot(r, q, alpha, target)

    def _entering(self, d: np.ndarray) -> Tuple[Optional[int], int]:
        st = self.status
        movable = ~self._fixed & (st != VarStatus.BASIC)
        up = movable & ((st == VarStatus.AT_LOWER) | (st == VarStatus.FREE)) & (d < -DUAL_TOL)
        down = movable & ((st == VarStatus.AT_UPPER) | (st == VarStatus.FREE)) & (d > DUAL_TOL)
        candidates = up | down
        if not candidates.any():
            return None, 0
        if self.bland:
            q = int(np.flatnonzero(candidates)[0])
        else:
            q = int(np.argmax(np.where(candidates, np.abs(d), -1.0)))
        return q, (1 if up[q] else -1)

    def _primal_ratio(self, xB, LB, UB, rate) -> Tuple[int, float, int]:
        if not self.R:
            return -1, np.inf, VarStatus.AT_LOWER
        t = np.full(self.R, np.inf)
        target = np.full(self.R, VarStatus.AT_LOWER, dtype=int)
        below = xB < LB - _tol(LB)
        above = xB > UB + _tol(UB)
        dec = rate < -PIVOT_TOL
        inc = rate > PIVOT_TOL
        with np.errstate(divide='ignore', invalid='ignore'):
            m = dec & above
            t[m] = (xB[m] - UB[m]) / -rate[m]
            target[m] = VarStatus.AT_UPPER
            m = dec & ~above & ~below & np.isfinite(LB)
            t[m] = (xB[m] - LB[m]) / -rate[m]
            target[m] = VarStatus.AT_LOWER
            m = inc & below
            t[m] = (LB[m] - xB[m]) / rate[m]
            target[m] = VarStatus.AT_LOWER
            m = inc & ~below & ~above & np.isfinite(UB)
            t[m] = (UB[m] - xB[m]) / rate[m]
            target[m] = VarStatus.AT_UPPER
        t = np.maximum(t, 0.0)
        t_min = float(t.min())
        if not np.isfinite(t_min):
            return -1, np.inf, VarStatus.AT_LOWER
        ties = np.flatnonzero(t <= t_min + RATIO_TIE_TOL * (1.0 + t_min))
        if self.bland:
            r = int(ties[np.argmin(self.basis[ties])])
        else:
            r = int(ties[np.argmax(np.abs(rate[ties]))])
        return r, t_min, int(target[r])

    # --- dual simplex --------------------------------------------------------
    def make_dual_feasible(self, d: np.ndarray) -> bool:
        st = self.status
        free_to_move = ~self._fixed & (st != VarStatus.BASIC)
        flip_up = free_to_move & (st == VarStatus.AT_LOWER) & (d < -DUAL_TOL) & np.isfinite(self.U)
        flip_down = free_to_move & (st == VarStatus.AT_UPPER) & (d > DUAL_TOL) & np.isfinite(self.L)
        st[flip_up] = VarStatus.AT_UPPER
        st[flip_down] = VarStatus.AT_LOWER
        return self.dual_feasible(d)

    def dual_feasible(self, d: np.ndarray) -> bool:
        st = self.status
        active = ~self._fixed & (st != VarStatus.BASIC)
        bad = active & (
            ((st == VarStatus.AT_LOWER) & (d < -DUAL_TOL))
            | ((st == VarStatus.AT_UPPER) & (d > DUAL_TOL))
            | ((st == VarStatus.FREE) & (np.abs(d) > DUAL_TOL))
        )
        return not bad.any()

    def dual(self) -> Optional[LpStatus]:
        """Dual simplex; None means dual feasibility was lost and primal must finish"""
        stall: dict = {}
        while True:
            if self.iterations >= self.limit:
                return LpStatus.ITER_LIMIT
            x = self.values()
            _, d = self.reduced_costs(self.C[self.basis], self.C)
            if not self.dual_feasible(d):
                return None
            if not self.R:
                return LpStatus.OPTIMAL
            xB = x[self.basis]
            LB, UB = self.L[self.basis], self.U[self.basis]
            short = np.where(xB < LB - _tol(LB), LB - xB, 0.0)
            over = np.where(xB > UB + _tol(UB), xB - UB, 0.0)
            amount = np.maximum(short, over)
            if not (amount > 0).any():
                return LpStatus.OPTIMAL
            # dual objective is nondecreasing; stalls mean degeneracy
            self._track_stall(-float(self.C @ x), stall)
            if self.bland:
                infeasible = np.flatnonzero(amount > 0)
                r = int(infeasible[np.argmin(self.basis[infeasible])])
            else:
                r = int(np.argmax(amount))
            increase = short[r] > 0

            alpha_row = self.Binv[r] @ self.M
            st = self.status
            movable = ~self._fixed & (st != VarStatus.BASIC)
            if increase:
                eligible = ((st == VarStatus.AT_LOWER) & (alpha_row < -PIVOT_TOL)) \
                    | ((st == VarStatus.AT_UPPER) & (alpha_row > PIVOT_TOL))
            else:
                eligible = ((st == VarStatus.AT_LOWER) & (alpha_row > PIVOT_TOL)) \
                    | ((st == VarStatus.AT_UPPER) & (alpha_row < -PIVOT_TOL))
            eligible |= (st == VarStatus.FREE) & (np.abs(alpha_row) > PIVOT_TOL)
            eligible &= movable
            if not eligible.any():
                return LpStatus.INFEASIBLE
            with np.errstate(divide='ignore', invalid='ignore'):
                ratios = np.where(eligible, np.abs(d) / np.abs(alpha_row), np.inf)
            t_min = float(ratios.min())
            ties = np.flatnonzero(ratios <= t_min + RATIO_TIE_TOL * (1.0 + t_min))
            if self.bland:
                q = int(ties[0])
            else:
                q = int(ties[np.argmax(np.abs(alpha_row[ties]))])
            alpha = self.Binv @ self.M[:, q]
            self.iterations += 1
            self.pivot(r, q, alpha, VarStatus.AT_LOWER if increase else VarStatus.AT_UPPER)

    # --- results -------------------------------------------------------------
    def result(self, status: LpStatus, method: str) -> LpResult:
        token = BasisToken(
            basic=tuple(self.keys[j] for j in self.basis),
            at_upper=frozenset(self.keys[j] for j in np.flatnonzero(self.status == VarStatus.AT_UPPER)),
            known=frozenset(self.keys),
        )
        if status is not LpStatus.OPTIMAL:
            return LpResult(status=status, basis=token, iterations=self.iterations, method=method)
        x = self.values()
        residual = self.M @ x - self.b if self.R else np.zeros(0)
        scale = 1.0 + (np.abs(self.b).max() if self.R else 0.0)
        if self.R and np.abs(residual).max() > TOL_FEAS * scale:
            raise NumericalFailure(f'row residual {np.abs(residual).max():g} after {method} simplex')
        y, d = self.reduced_costs(self.C[self.basis], self.C)
        structural = x[:self.n]
        return LpResult(
            status=status,
            objective=float(self.C[:self.n] @ structural),
            primal=structural.copy(),
            duals=y,
            reduced_costs=d[:self.n].copy(),
            row_activity=(self.M[:, :self.n] @ structural) if self.R else np.zeros(0),
            basis=token,
            iterations=self.iterations,
            method=method,
        )


class LpSolver:
    """Simplex front end with cold-restart and HiGHS fallbacks"""

    def solve(self, model: LpModel, warm_start: Optional[BasisToken] = None, *,
              allow_fallback: bool = True, iteration_limit: Optional[int] = None) -> LpResult:
        lower, upper = model.lower, model.upper
        if np.any(lower > upper + _tol(upper)):
            return LpResult(status=LpStatus.INFEASIBLE)
        try:
            result = self._simplex(model, warm_start, iteration_limit)
            if result.status is LpStatus.ITER_LIMIT and allow_fallback:
                raise NumericalFailure('simplex iteration limit reached')
            return result
        except NumericalFailure as e:
            if not allow_fallback:
                raise
            logger.warning('LP %s: %s; retrying', model.name, e)
        if warm_start is not None:
            try:
                result = self._simplex(model, None, iteration_limit)
                if result.status is not LpStatus.ITER_LIMIT:
                    return result
            except NumericalFailure as e:
                logger.warning('LP %s: cold restart failed (%s)', model.name, e)
        return self.solve_highs(model)

    def _simplex(self, model: LpModel, warm_start: Optional[BasisToken],
                 iteration_limit: Optional[int]) -> LpResult:
        run = _SimplexRun(model, iteration_limit)
        if warm_start is not None and run.warm_start(warm_start):
            _, d = run.reduced_costs(run.C[run.basis], run.C)
            if run.make_dual_feasible(d):
                status = run.dual()
                if status is not None:
                    return run.result(status, 'dual')
            status = run.primal()
            return run.result(status, 'primal')
        run.cold_start()
        return run.result(run.primal(), 'primal')

    def solve_highs(self, model: LpModel) -> LpResult:
        """Last-resort solve through scipy's HiGHS interface"""
        A = model.dense_matrix()
        b = model.rhs()
        senses = model.senses()
        ub_rows = [r for r, s in enumerate(senses) if s != '=']
        eq_rows = [r for r, s in enumerate(senses) if s == '=']
        sign = np.array([1.0 if senses[r] == '<=' else -1.0 for r in ub_rows])
        A_ub = A[ub_rows] * sign[:, None] if ub_rows else None
        b_ub = b[ub_rows] * sign if ub_rows else None
        bounds = [
            (None if np.isinf(lo) else lo, None if np.isinf(hi) else hi)
            for lo, hi in zip(model.lower, model.upper)
        ]
        res = linprog(
            model.cost, A_ub=A_ub, b_ub=b_ub,
            A_eq=A[eq_rows] if eq_rows else None, b_eq=b[eq_rows] if eq_rows else None,
            bounds=bounds, method='highs',
        )
        status_map = {0: LpStatus.OPTIMAL, 1: LpStatus.ITER_LIMIT, 2: LpStatus.INFEASIBLE, 3: LpStatus.UNBOUNDED}
        if res.status not in status_map:
            raise NumericalFailure(f'HiGHS failed: {res.message}')
        status = status_map[res.status]
        if status is not LpStatus.OPTIMAL:
            return LpResult(status=status, iterations=int(getattr(res, 'nit', 0)), method='highs')
        y = np.zeros(len(senses))
        if ub_rows:
            y[ub_rows] = np.asarray(res.ineqlin.marginals) * sign
        if eq_rows:
            y[eq_rows] = np.asarray(res.eqlin.marginals)
        x = np.asarray(res.x, dtype=float)
        return LpResult(
            status=status,
            objective=float(res.fun),
            primal=x,
            duals=y,
            reduced_costs=model.cost - (y @ A if len(senses) else 0.0),
            row_activity=A @ x if len(senses) else np.zeros(0),
            iterations=int(getattr(res, 'nit', 0)),
            method='highs',
        )


# Global instance
lp_solver = LpSolver()
