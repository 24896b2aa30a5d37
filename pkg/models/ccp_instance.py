"""
Chance-Constrained Program Model
Instance data, tree node state and candidate solutions for CCPs with a
random right-hand side under a finite discrete distribution
"""

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import TOL_FEAS, TOL_INT
from utils.errors import DimensionError, ValidationError

Rational = Fraction

SENSES = ('<=', '=', '>=')
SENSE_ALIASES = {
    '<=': '<=', '≤': '<=', 'le': '<=', 'L': '<=',
    '=': '=', '==': '=', 'eq': '=', 'E': '=',
    '>=': '>=', '≥': '>=', 'ge': '>=', 'G': '>=',
}


def to_rational(value: Any) -> Fraction:
    """Parse {num, den}, 'a/b', int or Fraction into an exact rational"""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, dict):
        if 'num' not in value or 'den' not in value:
            raise ValidationError(f'rational needs num and den: {value!r}')
        den = int(value['den'])
        if den <= 0:
            raise ValidationError(f'rational denominator must be positive: {value!r}')
        return Fraction(int(value['num']), den)
    if isinstance(value, bool):
        raise ValidationError(f'not a rational: {value!r}')
    if isinstance(value, (int, str)):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as e:
            raise ValidationError(f'not a rational: {value!r}') from e
    if isinstance(value, float):
        # floats are accepted only when they carry a short exact decimal
        return Fraction(repr(value))
    raise ValidationError(f'not a rational: {value!r}')


def normalize_sense(sense: str) -> str:
    if sense not in SENSE_ALIASES:
        raise ValidationError(f'unknown constraint sense {sense!r}')
    return SENSE_ALIASES[sense]


@dataclass(frozen=True, eq=False)
class LinearConstraint:
    coeffs: np.ndarray
    sense: str
    rhs: float

    def __post_init__(self):
        coeffs = np.array(self.coeffs, dtype=float)
        coeffs.setflags(write=False)
        object.__setattr__(self, 'coeffs', coeffs)
        object.__setattr__(self, 'sense', normalize_sense(self.sense))
        object.__setattr__(self, 'rhs', float(self.rhs))

    def slack(self, x: np.ndarray) -> float:
        """Signed satisfaction margin; negative means violated"""
        activity = float(self.coeffs @ x)
        if self.sense == '<=':
            return self.rhs - activity
        if self.sense == '>=':
            return activity - self.rhs
        return -abs(activity - self.rhs)


@dataclass(frozen=True, eq=False)
class CcpInstance:
    """
    min c^T x  s.t.  P{Tx >= xi} >= 1 - epsilon,  x in X

    Scenario rows are xi^i (length m) with exact rational probabilities.
    Arrays are frozen after construction so instances can be shared freely.
    """
    name: str
    c: np.ndarray
    T: np.ndarray
    scenarios: np.ndarray
    probs: Tuple[Fraction, ...]
    epsilon: Fraction
    constraints: Tuple[LinearConstraint, ...] = ()
    lower: Optional[np.ndarray] = None
    upper: Optional[np.ndarray] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        c = np.array(self.c, dtype=float).reshape(-1)
        d = c.shape[0]
        T = np.array(self.T, dtype=float)
        if T.ndim != 2 or T.shape[1] != d:
            raise DimensionError(f'T must be m x {d}, got shape {T.shape}')
        m = T.shape[0]
        xi = np.array(self.scenarios, dtype=float)
        if xi.ndim != 2 or xi.shape[1] != m or xi.shape[0] == 0:
            raise DimensionError(f'scenarios must be n x {m}, got shape {xi.shape}')
        n = xi.shape[0]
        probs = tuple(to_rational(p) for p in self.probs)
        if len(probs) != n:
            raise DimensionError(f'expected {n} probabilities, got {len(probs)}')
        lower = np.zeros(d) if self.lower is None else np.array(self.lower, dtype=float).reshape(-1)
        upper = np.full(d, np.inf) if self.upper is None else np.array(self.upper, dtype=float).reshape(-1)
        if lower.shape[0] != d or upper.shape[0] != d:
            raise DimensionError('bounds must have one entry per x-variable')
        constraints = tuple(
            con if isinstance(con, LinearConstraint) else LinearConstraint(*con)
            for con in self.constraints
        )
        for con in constraints:
            if con.coeffs.shape[0] != d:
                raise DimensionError(f'constraint has {con.coeffs.shape[0]} coefficients, expected {d}')

        if not np.all(np.isfinite(xi)):
            raise ValidationError('scenario entries must be finite')
        if np.any(xi < 0):
            raise ValidationError('scenario entries must be nonnegative')
        if any(p < 0 for p in probs):
            raise ValidationError('probabilities must be nonnegative')
        if sum(probs, Fraction(0)) != 1:
            raise ValidationError(f'probabilities sum to {sum(probs, Fraction(0))}, expected 1')
        epsilon = to_rational(self.epsilon)
        if not (0 < epsilon < 1):
            raise ValidationError(f'epsilon must lie in (0,1), got {epsilon}')

        for arr in (c, T, xi, lower, upper):
            arr.setflags(write=False)
        object.__setattr__(self, 'c', c)
        object.__setattr__(self, 'T', T)
        object.__setattr__(self, 'scenarios', xi)
        object.__setattr__(self, 'probs', probs)
        object.__setattr__(self, 'epsilon', epsilon)
        object.__setattr__(self, 'constraints', constraints)
        object.__setattr__(self, 'lower', lower)
        object.__setattr__(self, 'upper', upper)
        object.__setattr__(self, 'metadata', dict(self.metadata))

    @property
    def d(self) -> int:
        return self.c.shape[0]

    @property
    def m(self) -> int:
        return self.T.shape[0]

    @property
    def n(self) -> int:
        return self.scenarios.shape[0]

    def mass(self, indices) -> Fraction:
        """Exact probability mass of a set of scenarios"""
        return sum((self.probs[i] for i in indices), Fraction(0))


@dataclass
class NodeState:
    """
    One branch-and-bound node.

    b0/b1 hold the variables branched on, n0/n1 every variable fixed at
    0/1 (branching, dominance and propagation fixings). A child whose
    dominance sets collide is created with infeasible=True and is never
    handed to the LP.
    """
    id: int
    parent: Optional[int] = None
    b0: FrozenSet[int] = frozenset()
    b1: FrozenSet[int] = frozenset()
    n0: FrozenSet[int] = frozenset()
    n1: FrozenSet[int] = frozenset()
    local_lower: Optional[np.ndarray] = None
    dual_bound: float = -np.inf
    basis_hint: Any = None
    depth: int = 0
    branch_var: Optional[int] = None
    branch_side: Optional[int] = None
    branch_value: Optional[float] = None
    infeasible: bool = False

    def __post_init__(self):
        self.b0, self.b1 = frozenset(self.b0), frozenset(self.b1)
        self.n0, self.n1 = frozenset(self.n0), frozenset(self.n1)
        assert self.b0 <= self.n0 and self.b1 <= self.n1, 'branched sets must be fixed'
        if not self.infeasible:
            assert not (self.n0 & self.n1), 'a variable cannot be fixed at both 0 and 1'

    def free_indices(self, n: int) -> List[int]:
        fixed = self.n0 | self.n1
        return [i for i in range(n) if i not in fixed]


@dataclass
class CandidateSolution:
    x: np.ndarray
    v: np.ndarray
    z: np.ndarray
    objective: float

    def zero_support(self) -> Tuple[int, ...]:
        return tuple(int(i) for i in np.flatnonzero(self.z < 0.5))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'x': [float(t) for t in self.x],
            'v': [float(t) for t in self.v],
            'z': [int(round(t)) for t in self.z],
            'objective': float(self.objective),
        }


def _as_vector(values: Sequence[float], length: int, label: str) -> np.ndarray:
    arr = np.asarray(values, dtype=float).reshape(-1)
    if arr.shape[0] != length:
        raise DimensionError(f'{label} has length {arr.shape[0]}, expected {length}')
    return arr


def violated_scenarios(inst: CcpInstance, v: Sequence[float], tol: float = TOL_FEAS) -> List[int]:
    """Scenarios i with v not covering xi^i, i.e. v_k < xi^i_k - tol for some k"""
    v = _as_vector(v, inst.m, 'v')
    uncovered = np.any(v[None, :] < inst.scenarios - tol, axis=1)
    return [int(i) for i in np.flatnonzero(uncovered)]


def chance_violation(inst: CcpInstance, v: Sequence[float], tol: float = TOL_FEAS) -> Fraction:
    """Exact probability that Tx = v fails to cover the random right-hand side"""
    return inst.mass(violated_scenarios(inst, v, tol))


def check_feasible(inst: CcpInstance, cand: CandidateSolution,
                   tol: float = TOL_FEAS) -> Tuple[bool, List[str]]:
    """Re-evaluate the big-M formulation literally; returns (feasible, diagnostics)"""
    x = _as_vector(cand.x, inst.d, 'x')
    v = _as_vector(cand.v, inst.m, 'v')
    z = _as_vector(cand.z, inst.n, 'z')
    diagnostics: List[str] = []

    for j in np.flatnonzero(x < inst.lower - tol):
        diagnostics.append(f'x[{j}] = {x[j]:g} below lower bound {inst.lower[j]:g}')
    for j in np.flatnonzero(x > inst.upper + tol):
        diagnostics.append(f'x[{j}] = {x[j]:g} above upper bound {inst.upper[j]:g}')
    for r, con in enumerate(inst.constraints):
        if con.slack(x) < -tol:
            diagnostics.append(f'polyhedral row {r} violated by {-con.slack(x):g}')

    tx = inst.T @ x
    for k in np.flatnonzero(np.abs(tx - v) > tol):
        diagnostics.append(f'v[{k}] = {v[k]:g} differs from (Tx)[{k}] = {tx[k]:g}')

    if np.any(np.abs(z - np.round(z)) > TOL_INT) or np.any((z < -TOL_INT) | (z > 1 + TOL_INT)):
        diagnostics.append('z is not binary')
    zb = np.round(z).astype(int)
    for i in range(inst.n):
        if zb[i] == 0:
            short = np.flatnonzero(v < inst.scenarios[i] - tol)
            if short.size:
                k = int(short[0])
                diagnostics.append(
                    f'scenario {i} not covered: v[{k}] = {v[k]:g} < {inst.scenarios[i, k]:g} with z[{i}] = 0'
                )

    used = inst.mass(i for i in range(inst.n) if zb[i] == 1)
    if used > inst.epsilon:
        diagnostics.append(f'knapsack violated: sum p_i z_i = {used} > epsilon = {inst.epsilon}')

    objective = float(inst.c @ x)
    if abs(objective - cand.objective) > tol * (1.0 + abs(objective)):
        diagnostics.append(f'reported objective {cand.objective:g} differs from c^T x = {objective:g}')

    return not diagnostics, diagnostics
