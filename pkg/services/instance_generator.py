"""
Benchmark Instance Generator
Seeded random instances of chance-constrained resource planning (CCRP),
multiperiod power planning (CCMPP) and lot sizing (CCLS)
"""

import logging
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable, Dict, Optional, Tuple

import numpy as np

from models.ccp_instance import CcpInstance, LinearConstraint, to_rational
from utils.errors import ParamError, ValidationError

logger = logging.getLogger(__name__)

FAMILIES = ('ccrp', 'ccmpp', 'ccls')
CCRP_SIZES = ((20, 30), (40, 50), (50, 100))
MAX_SCENARIOS = 5000


@dataclass(frozen=True)
class GenSpec:
    family: str
    n: int
    epsilon: Fraction
    seed: int = 0
    periods: Optional[int] = None                 # T for ccmpp / ccls
    resources: Optional[int] = None               # |I| for ccrp
    customers: Optional[int] = None               # |J| for ccrp
    nuclear_fraction: float = 0.2
    coal_life: int = 15
    nuclear_life: int = 10
    extra: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        try:
            object.__setattr__(self, 'epsilon', to_rational(self.epsilon))
        except ValidationError as e:
            raise ParamError(str(e)) from e

    def validate(self) -> 'GenSpec':
        if self.family not in FAMILIES:
            raise ParamError(f'unknown family {self.family!r}; choose from {", ".join(FAMILIES)}')
        if not 1 <= self.n <= MAX_SCENARIOS:
            raise ParamError(f'n must lie in 1..{MAX_SCENARIOS}')
        if not 0 < self.epsilon < 1:
            raise ParamError('epsilon must lie in (0,1)')
        if self.seed < 0:
            raise ParamError('seed must be nonnegative')
        if self.family == 'ccmpp':
            if self.periods is None or not 1 <= self.periods <= 150:
                raise ParamError('ccmpp needs periods T in 1..150')
            if not 0 < self.nuclear_fraction <= 1:
                raise ParamError('nuclear_fraction must lie in (0,1]')
            if self.coal_life < 1 or self.nuclear_life < 1:
                raise ParamError('plant lifespans must be positive')
        elif self.family == 'ccls':
            if self.periods is None or not 1 <= self.periods <= 20:
                raise ParamError('ccls needs periods T in 1..20')
        else:
            if self.resources is None or self.customers is None:
                raise ParamError('ccrp needs resources and customers')
            if not (1 <= self.resources <= 50 and 1 <= self.customers <= 100):
                raise ParamError('ccrp sizes must satisfy 1 <= |I| <= 50 and 1 <= |J| <= 100')
        return self

    @property
    def name(self) -> str:
        eps = f'{self.epsilon.numerator}_{self.epsilon.denominator}'
        if self.family == 'ccrp':
            size = f'I{self.resources}J{self.customers}'
        else:
            size = f'T{self.periods}'
        return f'{self.family}-{size}-n{self.n}-eps{eps}-s{self.seed}'

    @classmethod
    def from_dict(cls, family: str, data: Dict[str, Any]) -> 'GenSpec':
        data = dict(data or {})
        try:
            return cls(
                family=family,
                n=int(data.pop('n')),
                epsilon=data.pop('epsilon', data.pop('eps', None)),
                seed=int(data.pop('seed', 0)),
                periods=_optional_int(data.pop('periods', data.pop('T', None))),
                resources=_optional_int(data.pop('resources', None)),
                customers=_optional_int(data.pop('customers', None)),
                nuclear_fraction=float(data.pop('nuclear_fraction', 0.2)),
                coal_life=int(data.pop('coal_life', 15)),
                nuclear_life=int(data.pop('nuclear_life', 10)),
                extra=data,
            ).validate()
        except KeyError as e:
            raise ParamError(f'missing generator parameter {e.args[0]!r}') from e
        except (TypeError, ValueError) as e:
            raise ParamError(f'bad generator parameter: {e}') from e


def _optional_int(value: Any) -> Optional[int]:
    return None if value is None else int(value)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def _uniform_probs(n: int) -> Tuple[Fraction, ...]:
    return tuple(Fraction(1, n) for _ in range(n))


def gen_ccmpp(spec: GenSpec) -> CcpInstance:
    """
    Coal (x_t) and nuclear (y_t) capacity brought online per period.
    Live capacity in period t sums builds since tau(t) = max(1, t - life + 1);
    existing capacity e_t moves into the right-hand side, floored at 0.
    """
    spec.validate()
    rng = _rng(spec.seed)
    T, n = spec.periods, spec.n
    demand = rng.integers(300, 701, size=(n, T))
    coal_cost = rng.integers(100, 301, size=T)
    nuclear_cost = rng.integers(100, 201, size=T)
    e1 = int(rng.integers(100, 501))
    ratio = float(rng.uniform(0.7, 1.0))
    existing = e1 * ratio ** np.arange(T)

    live_coal = np.zeros((T, T))
    live_nuclear = np.zeros((T, T))
    for t in range(T):
        live_coal[t, max(0, t - spec.coal_life + 1):t + 1] = 1.0
        live_nuclear[t, max(0, t - spec.nuclear_life + 1):t + 1] = 1.0
    tech = np.hstack([live_coal, live_nuclear])

    f = spec.nuclear_fraction
    constraints = tuple(
        LinearConstraint(np.concatenate([-f * live_coal[t], (1 - f) * live_nuclear[t]]), '<=', f * existing[t])
        for t in range(T)
    )
    scenarios = np.maximum(demand - existing[None, :], 0.0)
    return CcpInstance(
        name=spec.name,
        c=np.concatenate([coal_cost, nuclear_cost]).astype(float),
        T=tech,
        scenarios=scenarios,
        probs=_uniform_probs(n),
        epsilon=spec.epsilon,
        constraints=constraints,
        metadata={
            'family': 'ccmpp', 'seed': spec.seed, 'periods': T,
            'existing_capacity': [float(e) for e in existing],
            'growth_ratio': ratio, 'nuclear_fraction': f,
            'coal_life': spec.coal_life, 'nuclear_life': spec.nuclear_life,
        },
    )


def gen_ccrp(spec: GenSpec) -> CcpInstance:
    """Columns are x_i followed by y_ij (row-major); chance rows are customers"""
    spec.validate()
    rng = _rng(spec.seed)
    I, J, n = spec.resources, spec.customers, spec.n
    cost = rng.uniform(1.0, 10.0, size=I)
    yield_rate = 1.0 - rng.uniform(0.0, 0.2, size=I)
    service = rng.uniform(0.5, 2.0, size=(I, J))
    demand = rng.uniform(10.0, 100.0, size=(n, J))

    d = I + I * J
    tech = np.zeros((J, d))
    for i in range(I):
        tech[:, I + i * J:I + (i + 1) * J] = np.diag(service[i])
    constraints = []
    for i in range(I):
        row = np.zeros(d)
        row[I + i * J:I + (i + 1) * J] = 1.0
        row[i] = -yield_rate[i]
        constraints.append(LinearConstraint(row, '<=', 0.0))
    return CcpInstance(
        name=spec.name,
        c=np.concatenate([cost, np.zeros(I * J)]),
        T=tech,
        scenarios=demand,
        probs=_uniform_probs(n),
        epsilon=spec.epsilon,
        constraints=tuple(constraints),
        metadata={
            'family': 'ccrp', 'seed': spec.seed, 'resources': I, 'customers': J,
            'yield': [float(r) for r in yield_rate],
        },
    )


def gen_ccls(spec: GenSpec) -> CcpInstance:
    """
    Uncapacitated linear-cost lot sizing in cumulative form: u = L y covers
    cumulative demand. Setup costs are generated but not modeled and the
    expected holding cost is replaced by its linear part sum_t h_t u_t.
    """
    spec.validate()
    rng = _rng(spec.seed)
    T, n = spec.periods, spec.n
    demand = rng.uniform(1.0, 100.0, size=(n, T))
    setup = rng.uniform(1.0, 1000.0, size=T)
    unit = rng.uniform(1.0, 10.0, size=T)
    holding = rng.uniform(1.0, 5.0, size=T)

    cumulative = np.cumsum(demand, axis=1)
    lower_tri = np.tril(np.ones((T, T)))
    # sum_t h_t u_t = sum_j y_j sum_{t >= j} h_t
    cost = unit + np.cumsum(holding[::-1])[::-1]
    expected_cumulative = cumulative.mean(axis=0)
    return CcpInstance(
        name=spec.name,
        c=cost,
        T=lower_tri,
        scenarios=cumulative,
        probs=_uniform_probs(n),
        epsilon=spec.epsilon,
        metadata={
            'family': 'ccls', 'seed': spec.seed, 'periods': T,
            'setup_cost': [float(s) for s in setup],
            'holding_cost': [float(h) for h in holding],
            'objective_offset': -float(holding @ expected_cumulative),
        },
    )


class InstanceGenerator:
    """Dispatches a GenSpec to its family generator"""

    def __init__(self):
        self.generators: Dict[str, Callable[[GenSpec], CcpInstance]] = {
            'ccrp': gen_ccrp,
            'ccmpp': gen_ccmpp,
            'ccls': gen_ccls,
        }

    def generate(self, spec: GenSpec) -> CcpInstance:
        if spec.family not in self.generators:
            raise ParamError(f'unknown family {spec.family!r}')
        inst = self.generators[spec.family](spec)
        logger.info('generated %s (n=%d, m=%d, d=%d)', inst.name, inst.n, inst.m, inst.d)
        return inst


# Global instance
instance_generator = InstanceGenerator()
