"""
Branch-and-Cut Engine
Node tree search over the big-M relaxation with classic or dominance-based
branching, overlap-oriented propagation, mixing cuts and incumbent updates
"""

import heapq
import logging
import time
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import TOL_FEAS, TOL_INT, TOL_OPT, TOL_PRUNE
from models.ccp_instance import CandidateSolution, CcpInstance, NodeState, check_feasible, violated_scenarios
from models.solver_config import NodeTraceEntry, SolveReport, SolveStatus, SolverConfig
from services.formulation import RecourseProblem, build_master_problem, build_recourse_problem
from services.lp_solver import BasisToken, LpResult, LpStatus, lp_solver
from services.mixing_cuts import CutPool, separate_mixing
from services.preprocess import DominanceGraph, build_dominance_graph, quantile_bounds, strengthened_matrix
from services.propagation import ReductionResult, exact_fixings, propagate_approx
from utils.errors import NoFractional, ValidationError
from utils.helpers import relative_gap

logger = logging.getLogger(__name__)

PRUNE_CAUSES = ('bound', 'infeasible', 'overlap')


class PseudocostTracker:
    """Per-variable averages of objective gain per unit of fractionality"""

    def __init__(self, n: int):
        self.sums = np.zeros((n, 2))
        self.counts = np.zeros((n, 2), dtype=int)

    def update(self, var: int, side: int, gain: float, fractionality: float) -> None:
        if fractionality <= TOL_INT:
            return
        self.sums[var, side] += max(gain, 0.0) / fractionality
        self.counts[var, side] += 1

    def estimate(self, var: int, side: int) -> float:
        if self.counts[var, side]:
            return self.sums[var, side] / self.counts[var, side]
        seen = self.counts[:, side] > 0
        if seen.any():
            return float(self.sums[seen, side].sum() / self.counts[seen, side].sum())
        return 1.0

    def score(self, var: int, value: float) -> float:
        down = self.estimate(var, 0) * value
        up = self.estimate(var, 1) * (1.0 - value)
        return max(down, 1e-6) * max(up, 1e-6)


def select_branch_var(z: Sequence[float], node: NodeState, rule: str = 'most-infeasible',
                      pseudocosts: Optional[PseudocostTracker] = None) -> int:
    """Free fractional z_i closest to 0.5 (or best pseudocost score), ties to the lowest index"""
    z = np.asarray(z, dtype=float)
    fixed = node.n0 | node.n1
    candidates = [
        i for i in range(z.shape[0])
        if i not in fixed and abs(z[i] - round(z[i])) > TOL_INT
    ]
    if not candidates:
        raise NoFractional(f'node {node.id} has no free fractional variable')
    if rule == 'pseudocost' and pseudocosts is not None:
        return min(candidates, key=lambda i: (-round(pseudocosts.score(i, z[i]), 12), abs(z[i] - 0.5), i))
    return min(candidates, key=lambda i: (abs(z[i] - 0.5), i))


def make_children(node: NodeState, j: int, g: Optional[DominanceGraph], mode: str,
                  ids: Tuple[int, int]) -> Tuple[NodeState, NodeState]:
    """Left child fixes z_j (and everything below it) to 0, right child z_j (and above) to 1"""
    if j in node.n0 or j in node.n1:
        raise ValueError(f'z{j} is already fixed at node {node.id}')
    if mode == 'dominance':
        if g is None:
            raise ValueError('dominance branching needs a dominance graph')
        down, up = g.below(j), g.above(j)
    else:
        down, up = frozenset([j]), frozenset([j])

    def child(node_id: int, side: int, extra: frozenset) -> NodeState:
        n0 = node.n0 | extra if side == 0 else node.n0
        n1 = node.n1 | extra if side == 1 else node.n1
        return NodeState(
            id=node_id, parent=node.id,
            b0=node.b0 | {j} if side == 0 else node.b0,
            b1=node.b1 | {j} if side == 1 else node.b1,
            n0=n0, n1=n1, depth=node.depth + 1,
            dual_bound=node.dual_bound, local_lower=node.local_lower,
            basis_hint=node.basis_hint,
            branch_var=j, branch_side=side,
            infeasible=bool(n0 & n1),
        )

    return child(ids[0], 0, down), child(ids[1], 1, up)


def incumbent_heuristic(inst: CcpInstance, z: Sequence[float], xi_bar: np.ndarray,
                        recourse: Optional[RecourseProblem] = None,
                        x: Optional[Sequence[float]] = None,
                        v: Optional[Sequence[float]] = None) -> Optional[CandidateSolution]:
    """
    Round an LP point: z_i = 1 in decreasing LP value while the knapsack
    allows, cover the rest, then re-optimize x for that coverage target.
    """
    z = np.asarray(z, dtype=float)
    if x is not None and v is not None and np.all(np.abs(z - np.round(z)) <= TOL_INT):
        cand = CandidateSolution(np.asarray(x, dtype=float), np.asarray(v, dtype=float),
                                 np.round(z), float(inst.c @ np.asarray(x, dtype=float)))
        if check_feasible(inst, cand)[0]:
            return cand

    ones, used = [], 0
    for i in sorted(range(inst.n), key=lambda i: (-z[i], i)):
        if used + inst.probs[i] <= inst.epsilon:
            ones.append(i)
            used += inst.probs[i]
    one_set = set(ones)
    zeros = [i for i in range(inst.n) if i not in one_set]
    target = xi_bar[zeros].max(axis=0)

    if recourse is None:
        recourse = build_recourse_problem(inst)
    mark = recourse.lp.checkpoint()
    recourse.set_target(target)
    result = lp_solver.solve(recourse.lp)
    recourse.lp.revert(mark)
    if not result.optimal:
        return None

    x_new = result.primal[recourse.x_index]
    v_new = inst.T @ x_new
    z_new = np.zeros(inst.n)
    z_new[violated_scenarios(inst, v_new)] = 1.0
    cand = CandidateSolution(x_new, v_new, z_new, float(inst.c @ x_new))
    feasible, diagnostics = check_feasible(inst, cand)
    if not feasible:
        logger.debug('heuristic candidate rejected: %s', '; '.join(diagnostics))
        return None
    return cand


class BranchAndCutSolver:
    """One solve of one instance; holds the master LP, cut pool and tree"""

    def __init__(self, inst: CcpInstance, cfg: SolverConfig):
        self.inst = inst
        self.cfg = cfg.validate()
        self.qb = quantile_bounds(inst)
        self.xi_bar = strengthened_matrix(inst, self.qb)
        self.graph = build_dominance_graph(inst, self.qb, use_bar=cfg.use_bar)
        self.prop_matrix = self.graph.matrix
        self.master = build_master_problem(inst, self.qb, cfg.formulation, self._dominance_pairs())
        self.recourse = build_recourse_problem(inst)
        self.pool = CutPool()
        self.pseudocosts = PseudocostTracker(inst.n)

        self.incumbent: Optional[CandidateSolution] = None
        self.primal_bound = np.inf if cfg.initial_incumbent is None else float(cfg.initial_incumbent)
        self.nodes_explored = 0
        self.nodes_pruned: Dict[str, int] = {cause: 0 for cause in PRUNE_CAUSES}
        self.total_fixings = 0
        self.rc_fixings = 0
        self.propagation_time = 0.0
        self.lp_iterations = 0
        self.root_bound: Optional[float] = None
        self.trace: List[NodeTraceEntry] = []
        self._next_id = 1
        self._open: list = []
        self._started = 0.0

    def _dominance_pairs(self) -> frozenset:
        if self.cfg.dominance_rows == 'none':
            return frozenset()
        if self.cfg.dominance_rows == 'bar' and self.cfg.use_bar:
            return self.graph.reduced
        return build_dominance_graph(self.inst, self.qb, use_bar=self.cfg.dominance_rows == 'bar').reduced

    # --- open node queue -------------------------------------------------
    def _push(self, node: NodeState) -> None:
        if self.cfg.node_select == 'dfs':
            self._open.append(node)
        else:
            heapq.heappush(self._open, (node.dual_bound, node.id, node))

    def _pop(self) -> NodeState:
        if self.cfg.node_select == 'dfs':
            return self._open.pop()
        return heapq.heappop(self._open)[2]

    def _open_nodes(self) -> List[NodeState]:
        if self.cfg.node_select == 'dfs':
            return list(self._open)
        return [entry[2] for entry in self._open]

    def _global_dual_bound(self) -> float:
        bounds = [node.dual_bound for node in self._open_nodes()]
        if not bounds:
            return self.primal_bound
        return min(min(bounds), self.primal_bound)

    # --- main loop -------------------------------------------------------
    def solve(self) -> SolveReport:
        self._started = time.perf_counter()
        logger.info('solving %s (n=%d, m=%d, d=%d) with %s', self.inst.name, self.inst.n,
                    self.inst.m, self.inst.d, self.cfg.label)
        self._push(NodeState(id=0))
        status = None
        while self._open:
            if time.perf_counter() - self._started >= self.cfg.time_limit:
                status = SolveStatus.TIME_LIMIT
                break
            if self.nodes_explored >= self.cfg.node_limit:
                status = SolveStatus.NODE_LIMIT
                break
            if (self.cfg.gap_limit > 0 and np.isfinite(self.primal_bound)
                    and relative_gap(self.primal_bound, self._global_dual_bound()) <= self.cfg.gap_limit):
                status = SolveStatus.GAP_LIMIT
                break
            node = self._pop()
            self.nodes_explored += 1
            self._process(node)

        if status is None:
            status = SolveStatus.OPTIMAL if np.isfinite(self.primal_bound) else SolveStatus.INFEASIBLE
            dual_bound = self.primal_bound
        else:
            dual_bound = self._global_dual_bound()
        report = SolveReport(
            status=status,
            primal_bound=float(self.primal_bound),
            dual_bound=float(dual_bound),
            incumbent=self.incumbent,
            nodes_explored=self.nodes_explored,
            fixings_per_node=self.total_fixings / max(self.nodes_explored, 1),
            nodes_pruned=dict(self.nodes_pruned),
            wall_time=time.perf_counter() - self._started,
            propagation_time=self.propagation_time,
            lp_iterations=self.lp_iterations,
            cuts_added=len(self.pool),
            reduced_cost_fixings=self.rc_fixings,
            root_bound=self.root_bound,
            gap=relative_gap(float(self.primal_bound), float(dual_bound)),
            config_label=self.cfg.label,
            trace=self.trace,
        )
        logger.info('%s: %s obj=%s nodes=%d time=%.3fs', self.inst.name, status.value,
                    report.primal_bound, report.nodes_explored, report.wall_time)
        return report

    def _record(self, node: NodeState, n0, n1, lp: Optional[LpResult], action: str) -> None:
        if action.startswith('pruned-'):
            cause = action.split('-', 1)[1]
            self.nodes_pruned[cause] = self.nodes_pruned.get(cause, 0) + 1
        if not self.cfg.trace and not logger.isEnabledFor(logging.DEBUG):
            return
        branch = None
        if node.branch_var is not None:
            branch = f'z{node.branch_var}={node.branch_side}'
        objective = lp.objective if lp is not None and lp.optimal else None
        entry = NodeTraceEntry(
            node=node.id, parent=node.parent, branch=branch, n0=len(n0), n1=len(n1),
            lp_status=lp.status.value if lp is not None else 'NONE',
            lp_objective=objective, action=action,
            dual_bound=node.dual_bound if objective is None else max(node.dual_bound, objective),
        )
        logger.debug('node %s', entry.format())
        if self.cfg.trace:
            self.trace.append(entry)

    def _solve_node_lp(self, n0, n1, lower: Optional[np.ndarray], basis: Optional[BasisToken]) -> LpResult:
        lp, master = self.master.lp, self.master
        mark = lp.checkpoint()
        for i in n0:
            lp.change_bounds(int(master.z_index[i]), 0.0, 0.0)
        for i in n1:
            lp.change_bounds(int(master.z_index[i]), 1.0, 1.0)
        if lower is not None and self.cfg.propagation_bounds:
            for k in range(self.inst.m):
                if lower[k] > master.v_floor[k] + TOL_FEAS:
                    lp.change_bounds(int(master.v_index[k]), float(lower[k]), np.inf)
        result = lp_solver.solve(lp, basis)
        lp.revert(mark)
        self.lp_iterations += result.iterations
        return result

    def _propagate(self, node: NodeState, n0, n1) -> ReductionResult:
        started = time.perf_counter()
        probe = NodeState(id=node.id, n0=n0, n1=n1)
        if self.cfg.propagation == 'exact':
            result = exact_fixings(self.inst, self.prop_matrix, probe, self.cfg.exact_node_budget)
        else:
            result = propagate_approx(self.inst, self.prop_matrix, probe)
        self.propagation_time += time.perf_counter() - started
        return result

    def _reduced_cost_fixings(self, lp: LpResult, n0, n1) -> Tuple[set, set]:
        r0, r1 = set(), set()
        if not np.isfinite(self.primal_bound):
            return r0, r1
        z = lp.primal[self.master.z_index]
        d = lp.reduced_costs[self.master.z_index]
        cutoff = self.primal_bound - TOL_PRUNE
        for i in range(self.inst.n):
            if i in n0 or i in n1:
                continue
            if z[i] <= TOL_INT and d[i] > TOL_OPT and lp.objective + d[i] >= cutoff:
                r0.add(i)
            elif z[i] >= 1 - TOL_INT and d[i] < -TOL_OPT and lp.objective - d[i] >= cutoff:
                r1.add(i)
        return r0, r1

    def _update_incumbent(self, cand: Optional[CandidateSolution], source: str) -> bool:
        if cand is None or cand.objective >= self.primal_bound - TOL_PRUNE:
            return False
        self.incumbent = cand
        self.primal_bound = cand.objective
        logger.debug('new incumbent %.6g from %s', cand.objective, source)
        return True

    def _process(self, node: NodeState) -> None:
        if node.infeasible:
            self._record(node, node.n0, node.n1, None, 'pruned-infeasible')
            return
        if node.dual_bound >= self.primal_bound - TOL_PRUNE:
            self._record(node, node.n0, node.n1, None, 'pruned-bound')
            return

        n0, n1 = set(node.n0), set(node.n1)
        lower = node.local_lower
        basis = node.basis_hint
        cut_rounds = self.cfg.root_cut_rounds if node.id == 0 else self.cfg.node_cut_rounds
        if self.cfg.cuts == 'off':
            cut_rounds = 0
        stale = True
        first_solve = True
        lp = None

        while True:
            if stale and self.cfg.propagation != 'off':
                reduction = self._propagate(node, frozenset(n0), frozenset(n1))
                if reduction.pruned:
                    self._record(node, n0, n1, lp, 'pruned-overlap')
                    return
                n0 |= reduction.r0
                n1 |= reduction.r1
                self.total_fixings += len(reduction.r0) + len(reduction.r1)
                lower = reduction.bounds
            stale = False

            lp = self._solve_node_lp(n0, n1, lower, basis)
            if lp.status is LpStatus.UNBOUNDED:
                raise ValidationError('LP relaxation is unbounded; the x-region must bound c^T x')
            if not lp.optimal:
                self._record(node, n0, n1, lp, 'pruned-infeasible')
                return
            basis = lp.basis
            if first_solve:
                first_solve = False
                if node.id == 0:
                    self.root_bound = lp.objective
                self._update_pseudocost(node, lp)
            if lp.objective >= self.primal_bound - TOL_PRUNE:
                self._record(node, n0, n1, lp, 'pruned-bound')
                return

            z = lp.primal[self.master.z_index]
            fractional = np.any(np.abs(z - np.round(z)) > TOL_INT)
            if cut_rounds > 0 and fractional:
                cut_rounds -= 1
                cuts = separate_mixing(
                    self.xi_bar, self.qb.xi0, lp.primal[self.master.v_index], z,
                    max_cuts=self.cfg.max_cuts_per_round,
                )
                fresh = self.pool.add(cuts)
                for cut in fresh:
                    self.master.lp.add_row(cut.as_row(self.master.v_index, self.master.z_index), '>=',
                                           cut.rhs, f'MIX{cut.row}_{len(self.pool)}')
                if fresh:
                    logger.debug('node %d: added %d mixing cuts', node.id, len(fresh))
                    continue

            if self.cfg.reduced_cost_fixing:
                r0, r1 = self._reduced_cost_fixings(lp, n0, n1)
                if r0 or r1:
                    n0 |= r0
                    n1 |= r1
                    self.rc_fixings += len(r0) + len(r1)
                    stale = True
                    continue
            break

        x = lp.primal[self.master.x_index]
        v = lp.primal[self.master.v_index]
        if not fractional:
            cand = incumbent_heuristic(self.inst, z, self.xi_bar, self.recourse, x, v)
            self._update_incumbent(cand, f'node {node.id}')
            self._record(node, n0, n1, lp, 'integer-feasible')
            return

        if self.cfg.heuristic and (node.id == 0 or self.nodes_explored % self.cfg.heuristic_frequency == 0):
            self._update_incumbent(incumbent_heuristic(self.inst, z, self.xi_bar, self.recourse), 'rounding')
            if lp.objective >= self.primal_bound - TOL_PRUNE:
                self._record(node, n0, n1, lp, 'pruned-bound')
                return

        fixed = NodeState(
            id=node.id, parent=node.parent, b0=node.b0, b1=node.b1,
            n0=frozenset(n0), n1=frozenset(n1), local_lower=lower,
            dual_bound=max(node.dual_bound, lp.objective), basis_hint=basis, depth=node.depth,
        )
        j = select_branch_var(z, fixed, self.cfg.branch_rule, self.pseudocosts)
        left, right = make_children(fixed, j, self.graph, self.cfg.branching, (self._next_id, self._next_id + 1))
        self._next_id += 2
        left.branch_value = right.branch_value = float(z[j])
        self._record(node, n0, n1, lp, 'branched')
        if self.cfg.node_select == 'dfs':
            self._push(right)
            self._push(left)
        else:
            self._push(left)
            self._push(right)

    def _update_pseudocost(self, node: NodeState, lp: LpResult) -> None:
        if node.branch_var is None or node.branch_value is None or not np.isfinite(node.dual_bound):
            return
        value = node.branch_value
        fractionality = value if node.branch_side == 0 else 1.0 - value
        self.pseudocosts.update(node.branch_var, node.branch_side, lp.objective - node.dual_bound, fractionality)


def solve(inst: CcpInstance, cfg: Optional[SolverConfig] = None) -> SolveReport:
    return BranchAndCutSolver(inst, cfg or SolverConfig()).solve()
