"""
Solver Configuration and Reports
Branch-and-cut settings, named presets and the report returned by a solve
"""

import math
from dataclasses import asdict, dataclass, field, fields
from enum import Enum
from typing import Any, Dict, List, Optional

from config.settings import get_settings
from models.ccp_instance import CandidateSolution
from utils.errors import ValidationError

BRANCHING = ('classic', 'dominance')
PROPAGATION = ('off', 'approx', 'exact')
CUTS = ('off', 'mixing')
NODE_SELECT = ('best-bound', 'dfs')
BRANCH_RULES = ('most-infeasible', 'pseudocost')
FORMULATIONS = ('strengthened', 'raw')
DOMINANCE_ROWS = ('none', 'raw', 'bar')


def _default_time_limit() -> float:
    return get_settings().time_limit


def _default_node_limit() -> int:
    return get_settings().node_limit


def _default_gap_limit() -> float:
    return get_settings().gap_limit


def _default_exact_budget() -> int:
    return get_settings().exact_node_budget


@dataclass(frozen=True)
class SolverConfig:
    branching: str = 'dominance'
    propagation: str = 'approx'
    cuts: str = 'mixing'
    node_select: str = 'best-bound'
    branch_rule: str = 'most-infeasible'
    time_limit: float = field(default_factory=_default_time_limit)
    node_limit: int = field(default_factory=_default_node_limit)
    gap_limit: float = field(default_factory=_default_gap_limit)   # percent, 0 disables
    rng_seed: int = 0
    formulation: str = 'strengthened'
    dominance_rows: str = 'none'
    use_bar: bool = True
    reduced_cost_fixing: bool = True
    heuristic: bool = True
    heuristic_frequency: int = 10
    propagation_bounds: bool = True
    initial_incumbent: Optional[float] = None
    max_cuts_per_round: Optional[int] = None
    root_cut_rounds: int = 10
    node_cut_rounds: int = 2
    exact_node_budget: int = field(default_factory=_default_exact_budget)
    trace: bool = False
    label: str = 'custom'

    def validate(self) -> 'SolverConfig':
        choices = {
            'branching': BRANCHING, 'propagation': PROPAGATION, 'cuts': CUTS,
            'node_select': NODE_SELECT, 'branch_rule': BRANCH_RULES,
            'formulation': FORMULATIONS, 'dominance_rows': DOMINANCE_ROWS,
        }
        for name, allowed in choices.items():
            if getattr(self, name) not in allowed:
                raise ValidationError(f'{name} must be one of {", ".join(allowed)}; got {getattr(self, name)!r}')
        if not self.time_limit > 0:
            raise ValidationError('time_limit must be positive')
        if self.node_limit <= 0:
            raise ValidationError('node_limit must be positive')
        if self.gap_limit < 0:
            raise ValidationError('gap_limit must be nonnegative')
        if self.heuristic_frequency <= 0 or self.exact_node_budget <= 0:
            raise ValidationError('heuristic_frequency and exact_node_budget must be positive')
        if self.root_cut_rounds < 0 or self.node_cut_rounds < 0:
            raise ValidationError('cut rounds must be nonnegative')
        if self.max_cuts_per_round is not None and self.max_cuts_per_round <= 0:
            raise ValidationError('max_cuts_per_round must be positive')
        return self

    @classmethod
    def from_dict(cls, data: Optional[Dict[str, Any]]) -> 'SolverConfig':
        """Build from a JSON body; a 'preset' key selects the starting point"""
        data = dict(data or {})
        preset_name = data.pop('preset', None)
        known = {f.name for f in fields(cls)}
        overrides = {}
        for key, value in data.items():
            name = key.replace('-', '_')
            if name not in known:
                raise ValidationError(f'unknown solver option {key!r}')
            overrides[name] = value
        if preset_name is not None:
            return preset(preset_name, **overrides)
        return cls(**overrides).validate()

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


PRESETS: Dict[str, Dict[str, Any]] = {
    'bc+mix': dict(branching='classic', propagation='off', cuts='mixing'),
    'bc+mix+di': dict(branching='classic', propagation='off', cuts='mixing', dominance_rows='raw'),
    'bc+mix+sdi': dict(branching='classic', propagation='off', cuts='mixing', dominance_rows='bar'),
    'db': dict(branching='dominance', propagation='off', cuts='mixing'),
    'db+opf': dict(branching='dominance', propagation='approx', cuts='mixing'),
    'db+opf-exact': dict(branching='dominance', propagation='exact', cuts='mixing'),
}

# Illustrative-tree settings: depth-first, left child first, lowest-index ties,
# unstrengthened LP, no cuts or heuristics, known optimum injected at the root.
# The propagated tree also pushes the implied v bounds into the node LP.
REPLAY_BASE = dict(
    cuts='off', node_select='dfs', branch_rule='most-infeasible', formulation='raw',
    reduced_cost_fixing=False, heuristic=False, propagation_bounds=False,
)
REPLAY_FIGURES: Dict[int, Dict[str, Any]] = {
    1: dict(branching='classic', propagation='off'),
    2: dict(branching='dominance', propagation='off'),
    3: dict(branching='dominance', propagation='exact', propagation_bounds=True),
}


def preset_names() -> List[str]:
    return list(PRESETS) + [f'replay-{k}' for k in REPLAY_FIGURES]


def preset(name: str, **overrides) -> SolverConfig:
    if name.startswith('replay-'):
        try:
            figure = int(name.split('-', 1)[1])
        except ValueError:
            raise ValidationError(f'unknown preset {name!r}') from None
        return replay(figure, overrides.pop('initial_incumbent', None), **overrides)
    if name not in PRESETS:
        raise ValidationError(f'unknown preset {name!r}; choose from {", ".join(preset_names())}')
    options = {**PRESETS[name], 'label': name, **overrides}
    return SolverConfig(**options).validate()


def replay(figure: int, incumbent: Optional[float] = None, **overrides) -> SolverConfig:
    if figure not in REPLAY_FIGURES:
        raise ValidationError(f'replay figure must be one of {sorted(REPLAY_FIGURES)}')
    options = {**REPLAY_BASE, **REPLAY_FIGURES[figure], 'label': f'replay-{figure}',
               'initial_incumbent': incumbent, **overrides}
    return SolverConfig(**options).validate()


class SolveStatus(str, Enum):
    OPTIMAL = 'OPTIMAL'
    INFEASIBLE = 'INFEASIBLE'
    TIME_LIMIT = 'TIME_LIMIT'
    NODE_LIMIT = 'NODE_LIMIT'
    GAP_LIMIT = 'GAP_LIMIT'


@dataclass(frozen=True)
class NodeTraceEntry:
    node: int
    parent: Optional[int]
    branch: Optional[str]
    n0: int
    n1: int
    lp_status: str
    lp_objective: Optional[float]
    action: str
    dual_bound: float = -math.inf   # node bound after its LP, inherited by the children

    def format(self) -> str:
        objective = '-' if self.lp_objective is None else f'{self.lp_objective:.6g}'
        return (f'{self.node} parent={"-" if self.parent is None else self.parent} '
                f'branch={self.branch or "-"} |N0|={self.n0} |N1|={self.n1} '
                f'lp={self.lp_status}:{objective} action={self.action}')


def _json_float(value: Optional[float]) -> Optional[float]:
    if value is None or math.isnan(value):
        return None
    if math.isinf(value):
        return value if value < 0 else None
    return float(value)


@dataclass
class SolveReport:
    status: SolveStatus
    primal_bound: float
    dual_bound: float
    incumbent: Optional[CandidateSolution]
    nodes_explored: int
    fixings_per_node: float
    nodes_pruned: Dict[str, int]
    wall_time: float
    propagation_time: float = 0.0
    lp_iterations: int = 0
    cuts_added: int = 0
    reduced_cost_fixings: int = 0
    root_bound: Optional[float] = None
    gap: float = math.inf
    config_label: str = 'custom'
    trace: List[NodeTraceEntry] = field(default_factory=list)

    @property
    def objective(self) -> float:
        return self.primal_bound

    def trace_lines(self) -> List[str]:
        return [entry.format() for entry in self.trace]

    def to_dict(self, include_trace: bool = False) -> Dict[str, Any]:
        data = {
            'status': self.status.value,
            'primal_bound': _json_float(self.primal_bound),
            'dual_bound': _json_float(self.dual_bound),
            'incumbent': self.incumbent.to_dict() if self.incumbent is not None else None,
            'nodes_explored': self.nodes_explored,
            'fixings_per_node': self.fixings_per_node,
            'nodes_pruned': dict(self.nodes_pruned),
            'wall_time': self.wall_time,
            'propagation_time': self.propagation_time,
            'lp_iterations': self.lp_iterations,
            'cuts_added': self.cuts_added,
            'reduced_cost_fixings': self.reduced_cost_fixings,
            'root_bound': _json_float(self.root_bound) if self.root_bound is not None else None,
            'gap': _json_float(self.gap),
            'config_label': self.config_label,
        }
        if include_trace:
            data['trace'] = self.trace_lines()
        return data
