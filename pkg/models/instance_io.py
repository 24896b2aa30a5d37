"""
Instance Documents
JSON reader and writer for CCP instances
"""

import json
import math
from fractions import Fraction
from pathlib import Path
from typing import Any, Dict, List, Union

import numpy as np

from models.ccp_instance import CcpInstance, LinearConstraint, to_rational
from utils.errors import SchemaError, ValidationError

REQUIRED_FIELDS = ('name', 'd', 'm', 'n', 'c', 'T', 'scenarios', 'probs', 'epsilon')

Source = Union[str, Path, Dict[str, Any]]


def _parse_bound(value: Any, field_name: str) -> float:
    if isinstance(value, str):
        token = value.strip().lower()
        if token in ('inf', '+inf', 'infinity'):
            return math.inf
        if token in ('-inf', '-infinity'):
            return -math.inf
    try:
        return float(value)
    except (TypeError, ValueError) as e:
        raise SchemaError(f'{field_name}: bad bound {value!r}') from e


def _numeric_rows(value: Any, field_name: str) -> np.ndarray:
    try:
        arr = np.array(value, dtype=float)
    except (TypeError, ValueError) as e:
        raise SchemaError(f'{field_name} must be numeric') from e
    return arr


def _read_document(source: Source) -> Dict[str, Any]:
    if isinstance(source, dict):
        return source
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith('{')):
        try:
            text = Path(source).read_text(encoding='utf-8')
        except OSError as e:
            raise SchemaError(f'cannot read instance file {source}: {e}') from e
    else:
        text = source
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SchemaError(f'instance document is not valid JSON: {e}') from e
    if not isinstance(doc, dict):
        raise SchemaError('instance document must be a JSON object')
    return doc


def load_instance(source: Source) -> CcpInstance:
    """Parse and validate an instance document (path, JSON text or dict)"""
    doc = _read_document(source)
    missing = [key for key in REQUIRED_FIELDS if key not in doc]
    if missing:
        raise SchemaError(f'instance document is missing fields: {", ".join(missing)}')

    try:
        d, m, n = int(doc['d']), int(doc['m']), int(doc['n'])
    except (TypeError, ValueError) as e:
        raise SchemaError('d, m and n must be integers') from e

    c = _numeric_rows(doc['c'], 'c').reshape(-1)
    T = _numeric_rows(doc['T'], 'T')
    xi = _numeric_rows(doc['scenarios'], 'scenarios')
    if c.shape != (d,):
        raise SchemaError(f'c has {c.size} entries, document declares d = {d}')
    if T.shape != (m, d):
        raise SchemaError(f'T has shape {T.shape}, expected ({m}, {d})')
    if xi.shape != (n, m):
        raise SchemaError(f'scenarios have shape {xi.shape}, expected ({n}, {m})')
    if not isinstance(doc['probs'], list) or len(doc['probs']) != n:
        raise SchemaError(f'probs must be a list of {n} rationals')

    try:
        probs = [to_rational(p) for p in doc['probs']]
        epsilon = to_rational(doc['epsilon'])
    except ValidationError as e:
        raise SchemaError(str(e)) from e

    constraints: List[LinearConstraint] = []
    for r, row in enumerate(doc.get('polyX', []) or []):
        if not isinstance(row, dict) or not {'coeffs', 'sense', 'rhs'} <= row.keys():
            raise SchemaError(f'polyX[{r}] needs coeffs, sense and rhs')
        coeffs = _numeric_rows(row['coeffs'], f'polyX[{r}].coeffs').reshape(-1)
        if coeffs.shape != (d,):
            raise SchemaError(f'polyX[{r}] has {coeffs.size} coefficients, expected {d}')
        try:
            constraints.append(LinearConstraint(coeffs, row['sense'], float(row['rhs'])))
        except ValidationError as e:
            raise SchemaError(f'polyX[{r}]: {e}') from e

    bounds = doc.get('bounds') or {}
    lower = [_parse_bound(b, 'bounds.lower') for b in bounds.get('lower', [0.0] * d)]
    upper = [_parse_bound(b, 'bounds.upper') for b in bounds.get('upper', ['inf'] * d)]
    if len(lower) != d or len(upper) != d:
        raise SchemaError(f'bounds must list {d} lower and upper values')

    return CcpInstance(
        name=str(doc['name']),
        c=c, T=T, scenarios=xi, probs=tuple(probs), epsilon=epsilon,
        constraints=tuple(constraints),
        lower=np.array(lower), upper=np.array(upper),
        metadata=dict(doc.get('metadata') or {}),
    )


def _rational_doc(value: Fraction) -> Dict[str, int]:
    return {'num': value.numerator, 'den': value.denominator}


def _bound_doc(value: float) -> Any:
    if math.isinf(value):
        return 'inf' if value > 0 else '-inf'
    return float(value)


def instance_to_document(inst: CcpInstance) -> Dict[str, Any]:
    return {
        'name': inst.name,
        'd': inst.d,
        'm': inst.m,
        'n': inst.n,
        'c': inst.c.tolist(),
        'T': inst.T.tolist(),
        'polyX': [
            {'coeffs': con.coeffs.tolist(), 'sense': con.sense, 'rhs': con.rhs}
            for con in inst.constraints
        ],
        'bounds': {
            'lower': [_bound_doc(b) for b in inst.lower],
            'upper': [_bound_doc(b) for b in inst.upper],
        },
        'scenarios': inst.scenarios.tolist(),
        'probs': [_rational_doc(p) for p in inst.probs],
        'epsilon': _rational_doc(inst.epsilon),
        'metadata': inst.metadata,
    }


def dumps_instance(inst: CcpInstance) -> str:
    """Canonical JSON text; identical instances give identical bytes"""
    return json.dumps(instance_to_document(inst), sort_keys=True, indent=1)


def save_instance(inst: CcpInstance, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps_instance(inst), encoding='utf-8')
    return path
