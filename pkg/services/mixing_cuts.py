"""
Mixing Cuts
Separation of mixing (star) inequalities for the single-row sets
v_k >= xi_bar^i_k (1 - z_i), plus a cut pool and an enumeration validator
"""

from dataclasses import dataclass
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import TOL_FEAS
from models.ccp_instance import CcpInstance
from services.preprocess import quantile_bounds, strengthened_matrix
from utils.errors import SizeLimit

VIOLATION_TOL = 1e-6
VALIDATE_MAX_N = 14


@dataclass(frozen=True)
class MixingCut:
    """v_k + sum_j coef_j z_{t_j} >= rhs"""
    row: int
    sequence: Tuple[int, ...]
    coefficients: Tuple[float, ...]
    rhs: float
    violation: float = 0.0

    @property
    def key(self) -> Tuple[int, Tuple[int, ...]]:
        return self.row, self.sequence

    def lhs(self, v: Sequence[float], z: Sequence[float]) -> float:
        return float(v[self.row]) + sum(a * float(z[i]) for a, i in zip(self.coefficients, self.sequence))

    def as_row(self, v_index: Sequence[int], z_index: Sequence[int]) -> Dict[int, float]:
        coeffs = {int(v_index[self.row]): 1.0}
        for a, i in zip(self.coefficients, self.sequence):
            coeffs[int(z_index[i])] = coeffs.get(int(z_index[i]), 0.0) + a
        return coeffs

    def describe(self) -> str:
        terms = ' + '.join(f'{a:g} z{i}' for a, i in zip(self.coefficients, self.sequence))
        return f'v{self.row}' + (f' + {terms}' if terms else '') + f' >= {self.rhs:g}'


def mixing_cut(xi_bar: np.ndarray, xi0: np.ndarray, k: int, sequence: Sequence[int]) -> MixingCut:
    """Coefficients for a sequence with strictly decreasing xi_bar[:, k] above xi0[k]"""
    heights = [float(xi_bar[i, k]) for i in sequence] + [float(xi0[k])]
    if any(heights[j] <= heights[j + 1] for j in range(len(sequence))):
        raise ValueError(f'sequence {tuple(sequence)} is not strictly decreasing above xi0 on row {k}')
    coefficients = tuple(heights[j] - heights[j + 1] for j in range(len(sequence)))
    return MixingCut(k, tuple(int(i) for i in sequence), coefficients, heights[0])


def separate_mixing(xi_bar: np.ndarray, xi0: np.ndarray, v: Sequence[float], z: Sequence[float],
                    max_cuts: Optional[int] = None, tol: float = TOL_FEAS) -> List[MixingCut]:
    """Most violated mixing cut per row, found greedily from the tallest scenario down"""
    n, m = xi_bar.shape
    v = np.asarray(v, dtype=float)
    z = np.asarray(z, dtype=float)
    cuts: List[MixingCut] = []
    for k in range(m):
        relevant = [i for i in range(n) if xi_bar[i, k] > xi0[k] + tol]
        if len(relevant) < 2:
            continue
        relevant.sort(key=lambda i: (-xi_bar[i, k], z[i], i))
        sequence = [relevant[0]]
        for i in relevant[1:]:
            last = sequence[-1]
            if xi_bar[i, k] < xi_bar[last, k] - tol and z[i] < z[last] - 1e-9:
                sequence.append(i)
        if len(sequence) < 2:
            continue
        cut = mixing_cut(xi_bar, xi0, k, sequence)
        violation = cut.rhs - cut.lhs(v, z)
        if violation > VIOLATION_TOL:
            cuts.append(MixingCut(cut.row, cut.sequence, cut.coefficients, cut.rhs, violation))
    cuts.sort(key=lambda c: (-c.violation, c.row))
    limit = 2 * m if max_cuts is None else max_cuts
    return cuts[:limit]


class CutPool:
    """Cuts added so far, deduplicated by (row, sequence)"""

    def __init__(self):
        self._cuts: Dict[Tuple[int, Tuple[int, ...]], MixingCut] = {}

    def add(self, cuts: Iterable[MixingCut]) -> List[MixingCut]:
        fresh = []
        for cut in cuts:
            if cut.key not in self._cuts:
                self._cuts[cut.key] = cut
                fresh.append(cut)
        return fresh

    def __len__(self) -> int:
        return len(self._cuts)

    def cuts(self) -> List[MixingCut]:
        return list(self._cuts.values())


def validate_cut(inst: CcpInstance, cut: MixingCut, xi_bar: Optional[np.ndarray] = None,
                 tol: float = TOL_FEAS) -> bool:
    """Check the cut at every knapsack-feasible z with its smallest covering v"""
    if inst.n > VALIDATE_MAX_N:
        raise SizeLimit(f'cut validation enumerates 2^n points; n = {inst.n} exceeds {VALIDATE_MAX_N}')
    if xi_bar is None:
        xi_bar = strengthened_matrix(inst, quantile_bounds(inst))
    n = inst.n
    for mask in range(1 << n):
        ones = [i for i in range(n) if mask >> i & 1]
        if inst.mass(ones) > inst.epsilon:
            continue
        zeros = [i for i in range(n) if not mask >> i & 1]
        v = xi_bar[zeros].max(axis=0)
        z = np.array([mask >> i & 1 for i in range(n)], dtype=float)
        if cut.lhs(v, z) < cut.rhs - tol:
            return False
    return True
