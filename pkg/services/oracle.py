"""
Brute-Force Oracle
Enumerates every knapsack-feasible scenario support of a small instance and
solves the recourse LP on the maximal ones; used as ground truth
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, Optional, Tuple

import numpy as np

from config.settings import TOL_FEAS
from models.ccp_instance import CandidateSolution, CcpInstance, check_feasible, violated_scenarios
from services.formulation import build_master_problem, build_recourse_problem
from services.lp_solver import LpStatus, lp_solver
from services.preprocess import DominanceGraph, build_dominance_graph, quantile_bounds
from utils.errors import SizeLimit

logger = logging.getLogger(__name__)

ORACLE_MAX_N = 20


@dataclass
class OracleResult:
    status: str                                # OPTIMAL, INFEASIBLE or UNBOUNDED
    objective: Optional[float]
    support: Tuple[int, ...] = ()              # scenarios kept (z_i = 0) at the optimum
    feasible_supports: int = 0
    maximal_supports: int = 0
    lp_solves: int = 0
    solution: Optional[CandidateSolution] = None

    def to_dict(self) -> Dict:
        return {
            'status': self.status,
            'objective': self.objective,
            'support': list(self.support),
            'feasible_supports': self.feasible_supports,
            'maximal_supports': self.maximal_supports,
            'lp_solves': self.lp_solves,
            'solution': self.solution.to_dict() if self.solution is not None else None,
        }


def _integer_weights(inst: CcpInstance) -> Tuple[np.ndarray, int]:
    """Probabilities and epsilon scaled to integers over a common denominator"""
    denominator = 1
    for p in inst.probs:
        denominator = math.lcm(denominator, p.denominator)
    weights = np.array([int(p * denominator) for p in inst.probs], dtype=np.int64)
    capacity = math.floor(inst.epsilon * denominator)
    return weights, capacity


def brute_force_optimum(inst: CcpInstance, tol: float = TOL_FEAS) -> OracleResult:
    n = inst.n
    if n > ORACLE_MAX_N:
        raise SizeLimit(f'oracle enumerates 2^n supports; n = {n} exceeds {ORACLE_MAX_N}')
    weights, capacity = _integer_weights(inst)

    # Gray-code order keeps consecutive supports one scenario apart
    k = np.arange(1 << n, dtype=np.int64)
    masks = k ^ (k >> 1)
    bits = ((masks[:, None] >> np.arange(n, dtype=np.int64)) & 1).astype(bool)
    mass = bits.astype(np.int64) @ weights
    feasible = mass <= capacity
    lightest_zero = np.where(bits, np.iinfo(np.int64).max, weights[None, :]).min(axis=1)
    maximal = feasible & (lightest_zero > capacity - mass)

    recourse = build_recourse_problem(inst)
    cache: Dict[Tuple[float, ...], Tuple[LpStatus, float, Optional[np.ndarray]]] = {}
    basis = None
    best = None
    for row in np.flatnonzero(maximal):
        zeros = np.flatnonzero(~bits[row])
        target = inst.scenarios[zeros].max(axis=0)
        key = tuple(target.tolist())
        if key not in cache:
            mark = recourse.lp.checkpoint()
            recourse.set_target(target)
            result = lp_solver.solve(recourse.lp, basis)
            recourse.lp.revert(mark)
            if result.optimal:
                basis = result.basis
                cache[key] = (result.status, result.objective, result.primal[recourse.x_index].copy())
            else:
                cache[key] = (result.status, math.inf if result.status is LpStatus.INFEASIBLE else -math.inf, None)
        status, objective, x = cache[key]
        support = tuple(int(i) for i in zeros)
        if best is None or objective < best[0] - 1e-9 or (abs(objective - best[0]) <= 1e-9 and support < best[1]):
            best = (objective, support, x, status)

    counts = dict(feasible_supports=int(feasible.sum()), maximal_supports=int(maximal.sum()), lp_solves=len(cache))
    if best is None or best[3] is LpStatus.INFEASIBLE:
        return OracleResult('INFEASIBLE', None, **counts)
    if best[3] is LpStatus.UNBOUNDED or best[2] is None:
        return OracleResult('UNBOUNDED', None, best[1], **counts)

    objective, support, x, _ = best
    v = inst.T @ x
    z = np.zeros(n)
    z[violated_scenarios(inst, v, tol)] = 1.0
    cand = CandidateSolution(x, v, z, float(inst.c @ x))
    feasible_point, diagnostics = check_feasible(inst, cand, tol)
    if not feasible_point:
        logger.warning('oracle optimum failed re-evaluation: %s', '; '.join(diagnostics))
    return OracleResult('OPTIMAL', float(objective), support, solution=cand, **counts)


def lp_equivalence_probe(inst: CcpInstance, g: Optional[DominanceGraph] = None,
                         formulation: str = 'strengthened') -> Tuple[float, float]:
    """Root LP optimum without and with the dominance rows z_i <= z_j of g"""
    qb = quantile_bounds(inst)
    if g is None:
        g = build_dominance_graph(inst, qb)
    pairs = g.reduced if g.reduced is not None else g.oriented
    plain = lp_solver.solve(build_master_problem(inst, qb, formulation).lp)
    with_rows = lp_solver.solve(build_master_problem(inst, qb, formulation, pairs).lp)
    return plain.objective, with_rows.objective
