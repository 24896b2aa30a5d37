"""
CCP Formulations
Builds the big-M master LP (raw or strengthened) and the recourse LP over x
"""

from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np

from models.ccp_instance import CcpInstance
from services.lp_solver import LpModel
from services.preprocess import QuantileBounds, quantile_bounds, strengthen_coefficients

FORMULATIONS = ('strengthened', 'raw')


@dataclass
class MasterProblem:
    """
    Columns are ordered x, v, z. v_floor holds the global lower bounds of v
    (xi0 for the strengthened model, 0 for the raw one).
    """
    lp: LpModel
    x_index: np.ndarray
    v_index: np.ndarray
    z_index: np.ndarray
    v_floor: np.ndarray
    formulation: str
    dominance_rows: Tuple[Tuple[int, int], ...] = ()


def _add_x_columns(lp: LpModel, inst: CcpInstance) -> np.ndarray:
    return np.array([
        lp.add_variable(inst.lower[j], inst.upper[j], inst.c[j], f'X{j}') for j in range(inst.d)
    ], dtype=int)


def _add_link_rows(lp: LpModel, inst: CcpInstance, x_index: np.ndarray, v_index: np.ndarray) -> None:
    for k in range(inst.m):
        coeffs = {int(x_index[j]): float(inst.T[k, j]) for j in range(inst.d) if inst.T[k, j] != 0}
        coeffs[int(v_index[k])] = -1.0
        lp.add_row(coeffs, '=', 0.0, f'T{k}')
    for r, con in enumerate(inst.constraints):
        coeffs = {int(x_index[j]): float(a) for j, a in enumerate(con.coeffs) if a != 0}
        lp.add_row(coeffs, con.sense, con.rhs, f'P{r}')


def build_master_problem(inst: CcpInstance, qb: Optional[QuantileBounds] = None,
                         formulation: str = 'strengthened',
                         dominance_pairs: Iterable[Tuple[int, int]] = ()) -> MasterProblem:
    """LP relaxation of the big-M model, optionally with rows z_i <= z_j for dominance pairs"""
    if formulation not in FORMULATIONS:
        raise ValueError(f'unknown formulation {formulation!r}')
    if qb is None:
        qb = quantile_bounds(inst)
    lp = LpModel(f'{inst.name}-{formulation}')
    x_index = _add_x_columns(lp, inst)
    v_floor = np.array(qb.xi0, dtype=float) if formulation == 'strengthened' else np.zeros(inst.m)
    v_index = np.array([lp.add_variable(v_floor[k], np.inf, 0.0, f'V{k}') for k in range(inst.m)], dtype=int)
    z_index = np.array([lp.add_variable(0.0, 1.0, 0.0, f'Z{i}') for i in range(inst.n)], dtype=int)
    _add_link_rows(lp, inst, x_index, v_index)

    if formulation == 'strengthened':
        for row in strengthen_coefficients(inst, qb).rows:
            lp.add_row({int(v_index[row.row]): 1.0, int(z_index[row.scenario]): row.coef},
                       '>=', row.rhs, f'B{row.scenario}_{row.row}')
    else:
        xi = inst.scenarios
        for i in range(inst.n):
            for k in range(inst.m):
                if xi[i, k] > 0:
                    lp.add_row({int(v_index[k]): 1.0, int(z_index[i]): float(xi[i, k])},
                               '>=', float(xi[i, k]), f'B{i}_{k}')

    lp.add_row({int(z_index[i]): float(inst.probs[i]) for i in range(inst.n)},
               '<=', float(inst.epsilon), 'KNAP')

    pairs = tuple(sorted(dominance_pairs))
    for i, j in pairs:
        lp.add_row({int(z_index[i]): 1.0, int(z_index[j]): -1.0}, '<=', 0.0, f'D{i}_{j}')

    return MasterProblem(lp=lp, x_index=x_index, v_index=v_index, z_index=z_index,
                         v_floor=v_floor, formulation=formulation, dominance_rows=pairs)


@dataclass
class RecourseProblem:
    """min c^T x s.t. Tx = v, v >= target, x in X; targets are set through v bounds"""
    lp: LpModel
    x_index: np.ndarray
    v_index: np.ndarray

    def set_target(self, target: np.ndarray) -> None:
        for k, idx in enumerate(self.v_index):
            self.lp.change_bounds(int(idx), float(target[k]), np.inf)


def build_recourse_problem(inst: CcpInstance) -> RecourseProblem:
    lp = LpModel(f'{inst.name}-recourse')
    x_index = _add_x_columns(lp, inst)
    v_index = np.array([lp.add_variable(0.0, np.inf, 0.0, f'V{k}') for k in range(inst.m)], dtype=int)
    _add_link_rows(lp, inst, x_index, v_index)
    return RecourseProblem(lp=lp, x_index=x_index, v_index=v_index)
