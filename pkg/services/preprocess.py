"""
Scenario Preprocessing
Quantile lower bounds, big-M coefficient strengthening and the scenario
dominance graph with its transitive reduction
"""

import logging
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from config.settings import TOL_FEAS
from models.ccp_instance import CcpInstance

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class QuantileBounds:
    xi0: np.ndarray
    tau: Tuple[int, ...]
    perm: Tuple[np.ndarray, ...]


def descending_order(column: np.ndarray, candidates: Sequence[int]) -> np.ndarray:
    """Candidates sorted by column value descending, ties by lower index first"""
    cand = np.asarray(sorted(candidates), dtype=int)
    if cand.size == 0:
        return cand
    return cand[np.argsort(-column[cand], kind='stable')]


def residual_quantiles(xi: np.ndarray, probs: Sequence[Fraction], candidates: Iterable[int],
                       budget: Fraction) -> Tuple[np.ndarray, List[int], List[np.ndarray]]:
    """
    Per row k, the value at the first sorted position where the cumulative
    probability of the candidates strictly exceeds the budget.

    Rows where the candidates never exceed the budget get value 0 and tau 0;
    with nonnegative scenarios that is the neutral element of the max taken
    by callers.
    """
    cand = list(candidates)
    m = xi.shape[1]
    values = np.zeros(m)
    taus: List[int] = []
    perms: List[np.ndarray] = []
    for k in range(m):
        order = descending_order(xi[:, k], cand)
        perms.append(order)
        total = Fraction(0)
        tau = 0
        for pos, i in enumerate(order, start=1):
            total += probs[i]
            if total > budget:
                tau = pos
                values[k] = xi[i, k]
                break
        taus.append(tau)
    return values, taus, perms


def quantile_bounds(inst: CcpInstance) -> QuantileBounds:
    """Valid lower bounds xi0 on v from the (1 - epsilon) quantile of each row"""
    values, taus, perms = residual_quantiles(inst.scenarios, inst.probs, range(inst.n), inst.epsilon)
    assert all(t >= 1 for t in taus), 'epsilon < 1 guarantees a quantile position'
    values.setflags(write=False)
    return QuantileBounds(xi0=values, tau=tuple(taus), perm=tuple(perms))


@dataclass(frozen=True)
class StrengthenedRow:
    scenario: int
    row: int
    rhs: float
    coef: float


@dataclass(frozen=True, eq=False)
class StrengthenedModel:
    """Rows v_k + coef * z_i >= rhs kept after strengthening, plus v >= xi0"""
    xi0: np.ndarray
    xi_bar: np.ndarray
    rows: Tuple[StrengthenedRow, ...]
    dropped: FrozenSet[Tuple[int, int]]


def strengthen_coefficients(inst: CcpInstance, qb: QuantileBounds) -> StrengthenedModel:
    xi, xi0 = inst.scenarios, qb.xi0
    rows: List[StrengthenedRow] = []
    dropped = set()
    for i in range(inst.n):
        for k in range(inst.m):
            if xi[i, k] <= xi0[k]:
                dropped.add((i, k))
            else:
                rows.append(StrengthenedRow(i, k, float(xi[i, k]), float(xi[i, k] - xi0[k])))
    xi_bar = np.maximum(xi, xi0[None, :])
    xi_bar.setflags(write=False)
    logger.debug('strengthening kept %d rows, dropped %d', len(rows), len(dropped))
    return StrengthenedModel(xi0=xi0, xi_bar=xi_bar, rows=tuple(rows), dropped=frozenset(dropped))


def strengthened_matrix(inst: CcpInstance, qb: QuantileBounds) -> np.ndarray:
    xi_bar = np.maximum(inst.scenarios, qb.xi0[None, :])
    xi_bar.setflags(write=False)
    return xi_bar


@dataclass(frozen=True, eq=False)
class DominanceGraph:
    """
    pairs holds every ordered (i, j), i != j, with matrix[i] <= matrix[j];
    identical scenarios appear in both orientations. oriented breaks those
    ties by index (lower index dominated) and is the strict order that
    reduced is the transitive reduction of.
    """
    matrix: np.ndarray
    use_bar: bool
    pairs: FrozenSet[Tuple[int, int]]
    oriented: FrozenSet[Tuple[int, int]]
    below_sets: Tuple[FrozenSet[int], ...]
    above_sets: Tuple[FrozenSet[int], ...]
    reduced: Optional[FrozenSet[Tuple[int, int]]] = None

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    def below(self, j: int) -> FrozenSet[int]:
        return self.below_sets[j]

    def above(self, j: int) -> FrozenSet[int]:
        return self.above_sets[j]

    def equal_groups(self) -> List[List[int]]:
        groups, seen = [], set()
        for j in range(self.n):
            if j in seen:
                continue
            group = sorted(i for i in self.below_sets[j] if i in self.above_sets[j])
            seen.update(group)
            groups.append(group)
        return groups

    def as_digraph(self, reduced: bool = False) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.n))
        edges = self.reduced if reduced else self.oriented
        if edges is None:
            raise ValueError('transitive reduction not computed')
        graph.add_edges_from(edges)
        return graph


def _leq_matrix(matrix: np.ndarray, tol: float) -> np.ndarray:
    n = matrix.shape[0]
    leq = np.zeros((n, n), dtype=bool)
    for i in range(n):
        leq[i] = np.all(matrix[i][None, :] <= matrix + tol, axis=1)
    return leq


def build_dominance_graph(inst: CcpInstance, qb: Optional[QuantileBounds] = None,
                          use_bar: bool = True, reduce: bool = True,
                          tol: float = TOL_FEAS) -> DominanceGraph:
    if use_bar:
        if qb is None:
            qb = quantile_bounds(inst)
        matrix = strengthened_matrix(inst, qb)
    else:
        matrix = inst.scenarios
    n = inst.n
    leq = _leq_matrix(matrix, tol)
    np.fill_diagonal(leq, False)
    equal = leq & leq.T
    index = np.arange(n)
    oriented_mask = leq & (~equal | (index[:, None] < index[None, :]))

    pairs = frozenset((int(i), int(j)) for i, j in zip(*np.nonzero(leq)))
    oriented = frozenset((int(i), int(j)) for i, j in zip(*np.nonzero(oriented_mask)))
    below_sets = tuple(frozenset(np.flatnonzero(leq[:, j]).tolist()) | {j} for j in range(n))
    above_sets = tuple(frozenset(np.flatnonzero(leq[j, :]).tolist()) | {j} for j in range(n))
    graph = DominanceGraph(
        matrix=matrix, use_bar=use_bar, pairs=pairs, oriented=oriented,
        below_sets=below_sets, above_sets=above_sets,
    )
    logger.debug('dominance graph (%s): %d pairs', 'bar' if use_bar else 'raw', len(pairs))
    return transitive_reduction(graph) if reduce else graph


def transitive_reduction(g: DominanceGraph) -> DominanceGraph:
    """Drop (i, j) whenever some middle s has i < s < j in the index-oriented order"""
    n = g.n
    P = np.zeros((n, n), dtype=np.float32)
    for i, j in g.oriented:
        P[i, j] = 1.0
    has_middle = (P @ P) > 0.5
    reduced = frozenset((i, j) for i, j in g.oriented if not has_middle[i, j])
    return replace(g, reduced=reduced)


def dominance_statistics(g: DominanceGraph) -> dict:
    """%DP and %NDI relative to the n(n-1)/2 possible pairs"""
    n = g.n
    possible = n * (n - 1) / 2
    n_pairs = len(g.oriented)
    n_reduced = len(g.reduced) if g.reduced is not None else 0
    return {
        'pairs': n_pairs,
        'reduced_pairs': n_reduced,
        'pct_dp': 100.0 * n_pairs / possible if possible else 0.0,
        'pct_ndi': 100.0 * n_reduced / possible if possible else 0.0,
        'longest_chain': int(nx.dag_longest_path_length(g.as_digraph(reduced=g.reduced is not None))),
        'equal_groups': sum(1 for group in g.equal_groups() if len(group) > 1),
    }


def dump_dominance(g: DominanceGraph) -> str:
    """Edge list 'i -> j' (0-based) followed by the pair statistics"""
    stats = dominance_statistics(g)
    edges = sorted(g.oriented)
    lines = [f'{i} -> {j}' for i, j in edges]
    lines.append(f'# %DP = {stats["pct_dp"]:.2f}')
    lines.append(f'# %NDI = {stats["pct_ndi"]:.2f}')
    return '\n'.join(lines) + '\n'
