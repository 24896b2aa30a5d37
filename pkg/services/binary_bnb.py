"""
Binary Branch-and-Bound
Small depth-first 0-1 solver on top of the LP subsolver, used for the
auxiliary feasibility programs of exact propagation
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from config.settings import TOL_INT, TOL_PRUNE
from services.lp_solver import BasisToken, LpModel, LpStatus, lp_solver

logger = logging.getLogger(__name__)


@dataclass
class BinaryProgramResult:
    status: str                       # OPTIMAL, INFEASIBLE or BUDGET
    objective: float = float('inf')
    solution: Optional[np.ndarray] = None
    nodes: int = 0
    stopped_early: bool = False


@dataclass
class _Frame:
    fixings: Tuple[Tuple[int, float], ...] = ()
    basis: Optional[BasisToken] = None
    bound: float = -np.inf


def solve_binary_program(lp: LpModel, binaries: Sequence[int], node_budget: int,
                         stop_at: Optional[float] = None) -> BinaryProgramResult:
    """
    Minimize the LP objective with the listed columns restricted to {0, 1}.

    With stop_at set, the search ends at the first incumbent whose objective
    is <= stop_at (a feasibility certificate is all the caller needs).
    """
    binaries = [int(b) for b in binaries]
    best_obj, best_sol = np.inf, None
    stack: List[_Frame] = [_Frame()]
    nodes = 0
    base = lp.checkpoint()

    while stack:
        if nodes >= node_budget:
            lp.revert(base)
            status = 'OPTIMAL' if best_sol is not None and stop_at is not None and best_obj <= stop_at else 'BUDGET'
            return BinaryProgramResult(status, best_obj, best_sol, nodes)
        frame = stack.pop()
        if frame.bound >= best_obj - TOL_PRUNE:
            continue
        nodes += 1
        lp.revert(base)
        for var, value in frame.fixings:
            lp.change_bounds(var, value, value)
        result = lp_solver.solve(lp, frame.basis)
        if result.status is not LpStatus.OPTIMAL or result.objective >= best_obj - TOL_PRUNE:
            continue

        values = result.primal[binaries]
        frac = np.abs(values - np.round(values))
        if np.all(frac <= TOL_INT):
            best_obj = result.objective
            best_sol = result.primal.copy()
            best_sol[binaries] = np.round(values)
            if stop_at is not None and best_obj <= stop_at:
                lp.revert(base)
                return BinaryProgramResult('OPTIMAL', best_obj, best_sol, nodes, stopped_early=True)
            continue

        pick = int(np.argmin(np.where(frac > TOL_INT, np.abs(values - 0.5), np.inf)))
        var = binaries[pick]
        # push the up branch first so the down branch is explored first
        for value in (1.0, 0.0):
            stack.append(_Frame(frame.fixings + ((var, value),), result.basis, result.objective))

    lp.revert(base)
    if best_sol is None:
        return BinaryProgramResult('INFEASIBLE', nodes=nodes)
    return BinaryProgramResult('OPTIMAL', best_obj, best_sol, nodes)
