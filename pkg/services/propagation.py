"""
Overlap-Oriented Propagation
Node pruning and variable fixing for the if-then view of the chance
constraint: an approximate polynomial fixed-point procedure and an exact
mode that decides set nonemptiness through small 0-1 programs
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, List, Optional, Tuple

import numpy as np

from config.settings import TOL_FEAS, get_settings
from models.ccp_instance import CcpInstance, NodeState
from services.binary_bnb import solve_binary_program
from services.lp_solver import LpModel
from services.preprocess import residual_quantiles
from utils.errors import BudgetExceeded, SizeLimit

logger = logging.getLogger(__name__)

ORACLE_MAX_FREE = 20


@dataclass
class ReductionResult:
    pruned: bool
    r0: FrozenSet[int]
    r1: FrozenSet[int]
    bounds: np.ndarray
    iterations: int
    mode: str
    cause: Optional[str] = None
    history: List[np.ndarray] = field(default_factory=list)
    unknown: int = 0

    def to_dict(self) -> Dict:
        return {
            'pruned': self.pruned,
            'cause': self.cause,
            'r0': sorted(self.r0),
            'r1': sorted(self.r1),
            'bounds': [float(b) for b in self.bounds],
            'iterations': self.iterations,
            'mode': self.mode,
            'history': [[float(b) for b in h] for h in self.history],
            'unknown': self.unknown,
        }


def _check_sets(n0: FrozenSet[int], n1: FrozenSet[int]) -> None:
    if n0 & n1:
        raise ValueError(f'scenarios fixed both ways: {sorted(n0 & n1)}')


def node_lower_bounds(inst: CcpInstance, xi: np.ndarray, n0: Iterable[int], n1: Iterable[int]) -> np.ndarray:
    """Componentwise max of the N0 floor and the residual-budget quantile over free scenarios"""
    n0, n1 = frozenset(n0), frozenset(n1)
    floor = xi[sorted(n0)].max(axis=0) if n0 else np.zeros(inst.m)
    free = [i for i in range(inst.n) if i not in n0 and i not in n1]
    residual = inst.epsilon - inst.mass(n1)
    quantile, _, _ = residual_quantiles(xi, inst.probs, free, residual)
    return np.maximum(floor, quantile)


def propagate_approx(inst: CcpInstance, xi: np.ndarray, node: NodeState,
                     tol: float = TOL_FEAS) -> ReductionResult:
    """Iterate bound tightening, prune tests and R0/R1 fixings until nothing changes"""
    n0, n1 = set(node.n0), set(node.n1)
    _check_sets(node.n0, node.n1)
    free = sorted(set(range(inst.n)) - n0 - n1)
    history: List[np.ndarray] = []
    iterations = 0
    bounds = np.zeros(inst.m)

    def pruned(cause: str) -> ReductionResult:
        return ReductionResult(True, frozenset(), frozenset(), bounds, iterations, 'approx', cause, history)

    while True:
        residual = inst.epsilon - inst.mass(n1)
        if residual < 0:
            return pruned('knapsack')
        floor = xi[sorted(n0)].max(axis=0) if n0 else np.zeros(inst.m)
        quantile, _, _ = residual_quantiles(xi, inst.probs, free, residual)
        bounds = np.maximum(floor, quantile)
        history.append(bounds.copy())

        ones = sorted(n1)
        if ones and np.any(np.all(xi[ones] <= bounds + tol, axis=1)):
            return pruned('covered')

        free_arr = np.array(free, dtype=int)
        r1 = set()
        if free_arr.size:
            for j in ones:
                exceed = xi[j] > bounds + tol
                reaches = np.all(xi[np.ix_(free_arr, np.flatnonzero(exceed))] >= xi[j, exceed] - tol, axis=1)
                r1.update(int(i) for i in free_arr[reaches])

        remaining = inst.epsilon - inst.mass(n1 | r1)
        r0 = set()
        for i in free:
            if i in r1:
                continue
            if inst.probs[i] > remaining or np.all(xi[i] <= bounds + tol):
                r0.add(i)

        if not r0 and not r1:
            break
        iterations += 1
        n0 |= r0
        n1 |= r1
        free = [i for i in free if i not in r0 and i not in r1]

    return ReductionResult(
        pruned=False,
        r0=frozenset(n0 - node.n0),
        r1=frozenset(n1 - node.n1),
        bounds=bounds,
        iterations=iterations,
        mode='approx',
        history=history,
    )


@dataclass
class ExactFeasModel:
    """
    Selector program: pick one row w_jk per j in N1 where xi^j exceeds the
    N0 floor; every free i that reaches xi^j on the chosen row must be 1.
    """
    n0: FrozenSet[int]
    n1: FrozenSet[int]
    free: Tuple[int, ...]
    residual: Fraction
    m_sets: Dict[int, Tuple[int, ...]]
    m_pairs: Dict[Tuple[int, int], Tuple[int, ...]]

    @property
    def trivially_empty(self) -> bool:
        return self.residual < 0 or any(not ks for ks in self.m_sets.values())

    def build_lp(self, inst: CcpInstance) -> Tuple[LpModel, Dict[Tuple[int, int], int], Dict[int, int]]:
        lp = LpModel('overlap-selector')
        w_index = {
            (j, k): lp.add_variable(0.0, 1.0, 0.0, f'W{j}_{k}')
            for j in sorted(self.m_sets) for k in self.m_sets[j]
        }
        z_index = {i: lp.add_variable(0.0, 1.0, float(inst.probs[i]), f'Z{i}') for i in self.free}
        for j in sorted(self.m_sets):
            lp.add_row({w_index[(j, k)]: 1.0 for k in self.m_sets[j]}, '=', 1.0, f'PICK{j}')
        for (j, i), ks in sorted(self.m_pairs.items()):
            coeffs = {w_index[(j, k)]: 1.0 for k in ks}
            coeffs[z_index[i]] = -1.0
            lp.add_row(coeffs, '<=', 0.0, f'REACH{j}_{i}')
        return lp, w_index, z_index


def exact_feasibility_model(inst: CcpInstance, xi: np.ndarray, n0: Iterable[int], n1: Iterable[int],
                            tol: float = TOL_FEAS) -> ExactFeasModel:
    n0, n1 = frozenset(n0), frozenset(n1)
    _check_sets(n0, n1)
    free = tuple(i for i in range(inst.n) if i not in n0 and i not in n1)
    floor = xi[sorted(n0)].max(axis=0) if n0 else np.zeros(inst.m)
    m_sets = {j: tuple(int(k) for k in np.flatnonzero(xi[j] > floor + tol)) for j in sorted(n1)}
    m_pairs = {}
    for j, ks in m_sets.items():
        for i in free:
            reach = tuple(k for k in ks if xi[j, k] <= xi[i, k] + tol)
            if reach:
                m_pairs[(j, i)] = reach
    return ExactFeasModel(n0, n1, free, inst.epsilon - inst.mass(n1), m_sets, m_pairs)


def exact_auxiliary_optimum(inst: CcpInstance, xi: np.ndarray, n0: Iterable[int], n1: Iterable[int],
                            node_budget: Optional[int] = None) -> Optional[Fraction]:
    """Optimal mass of free scenarios forced to 1; None when no selector exists"""
    model = exact_feasibility_model(inst, xi, n0, n1)
    if any(not ks for ks in model.m_sets.values()):
        return None
    if not model.m_sets:
        return Fraction(0)
    budget = node_budget or get_settings().exact_node_budget
    lp, _, z_index = model.build_lp(inst)
    result = solve_binary_program(lp, list(range(lp.num_vars)), budget)
    if result.status == 'BUDGET':
        raise BudgetExceeded(f'selector program exceeded {budget} nodes')
    if result.status == 'INFEASIBLE':
        return None
    return inst.mass(i for i, col in z_index.items() if result.solution[col] > 0.5)


def exact_nonempty(inst: CcpInstance, xi: np.ndarray, node: NodeState,
                   node_budget: Optional[int] = None) -> bool:
    """True iff some (v, z) respects the node fixings, the knapsack and every if-then constraint"""
    model = exact_feasibility_model(inst, xi, node.n0, node.n1)
    if model.trivially_empty:
        return False
    if not model.m_sets:
        return True
    budget = node_budget or get_settings().exact_node_budget
    lp, _, z_index = model.build_lp(inst)
    result = solve_binary_program(lp, list(range(lp.num_vars)), budget,
                                  stop_at=float(model.residual) + 1e-9)
    if result.solution is not None:
        mass = inst.mass(i for i, col in z_index.items() if result.solution[col] > 0.5)
        if mass <= model.residual:
            return True
        if result.stopped_early:
            # float slack let a solution through that the exact test rejects
            optimum = exact_auxiliary_optimum(inst, xi, node.n0, node.n1, budget)
            return optimum is not None and optimum <= model.residual
    if result.status == 'BUDGET':
        raise BudgetExceeded(f'selector program exceeded {budget} nodes')
    return False


def exact_fixings(inst: CcpInstance, xi: np.ndarray, node: NodeState,
                  node_budget: Optional[int] = None) -> ReductionResult:
    """Maximal fixings: i -> 0 when forcing it to 1 empties the set, and the converse"""
    n0, n1 = frozenset(node.n0), frozenset(node.n1)
    unknown = 0

    def nonempty(a: FrozenSet[int], b: FrozenSet[int]) -> bool:
        nonlocal unknown
        try:
            return exact_nonempty(inst, xi, NodeState(id=node.id, n0=a, n1=b), node_budget)
        except BudgetExceeded:
            unknown += 1
            logger.warning('exact propagation budget hit at node %s; keeping it open', node.id)
            return True

    if not nonempty(n0, n1):
        bounds = np.zeros(inst.m)
        return ReductionResult(True, frozenset(), frozenset(), bounds, 1, 'exact', 'empty', unknown=unknown)

    free = [i for i in range(inst.n) if i not in n0 and i not in n1]
    r0 = frozenset(i for i in free if not nonempty(n0, n1 | {i}))
    r1 = frozenset(i for i in free if not nonempty(n0 | {i}, n1))
    both = r0 & r1
    if both:
        logger.warning('exact fixings conflict on %s at node %s', sorted(both), node.id)
        r0, r1 = r0 - both, r1 - both
    bounds = node_lower_bounds(inst, xi, n0 | r0, n1 | r1)
    return ReductionResult(False, r0, r1, bounds, 1, 'exact', unknown=unknown)


def oracle_nonempty(inst: CcpInstance, xi: np.ndarray, node: NodeState, tol: float = TOL_FEAS) -> bool:
    """Enumerate every completion of the free variables (independent check)"""
    n0, n1 = frozenset(node.n0), frozenset(node.n1)
    _check_sets(n0, n1)
    free = [i for i in range(inst.n) if i not in n0 and i not in n1]
    if len(free) > ORACLE_MAX_FREE:
        raise SizeLimit(f'{len(free)} free scenarios exceed the oracle limit of {ORACLE_MAX_FREE}')
    base_mass = inst.mass(n1)
    if base_mass > inst.epsilon:
        return False
    for mask in range(1 << len(free)):
        ones = [free[b] for b in range(len(free)) if mask >> b & 1]
        if base_mass + inst.mass(ones) > inst.epsilon:
            continue
        zeros = sorted(n0 | {free[b] for b in range(len(free)) if not mask >> b & 1})
        v = xi[zeros].max(axis=0) if zeros else np.zeros(inst.m)
        ones_all = sorted(n1 | set(ones))
        if not ones_all or np.all(np.any(v[None, :] < xi[ones_all] - tol, axis=1)):
            return True
    return False
