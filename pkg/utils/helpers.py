"""
Common Utility Functions
Helper functions used across the application
"""

import math
from fractions import Fraction
from typing import Any, Iterable, List, Sequence

import numpy as np
from scipy.stats import gmean


def safe_json_response(data: Any, status_code: int = 200) -> tuple:
    """Safely create JSON response with error handling"""
    try:
        if isinstance(data, str):
            data = {'message': data}
        return to_jsonable(data), status_code
    except Exception as e:
        return {'error': f'Response formatting error: {str(e)}'}, 500


def to_jsonable(value: Any) -> Any:
    """Convert numpy scalars/arrays, fractions, sets and non-finite floats"""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [to_jsonable(v) for v in items]
    if isinstance(value, np.ndarray):
        return [to_jsonable(v) for v in value.tolist()]
    if isinstance(value, Fraction):
        return {'num': value.numerator, 'den': value.denominator}
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, (float, np.floating)):
        value = float(value)
        return value if math.isfinite(value) else None
    return value


def parse_index_list(values: Iterable[Any], n: int, label: str) -> List[int]:
    """0-based scenario indices from a JSON list, checked against n"""
    indices = []
    for value in values or []:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ValueError(f'{label} entries must be integers, got {value!r}')
        if not 0 <= value < n:
            raise ValueError(f'{label} index {value} out of range 0..{n - 1}')
        indices.append(value)
    return sorted(set(indices))


def relative_gap(primal: float, dual: float) -> float:
    """(UB - LB) / min(|UB|, |LB|) in percent; 0 when equal, inf when signs differ"""
    if math.isinf(primal) or math.isinf(dual):
        return math.inf
    if abs(primal - dual) <= 1e-9 * max(1.0, abs(primal)):
        return 0.0
    if primal * dual > 0:
        return 100.0 * (primal - dual) / min(abs(primal), abs(dual))
    return math.inf


def shifted_geometric_mean(values: Sequence[float], shift: float) -> float:
    """(prod (x_k + s))^(1/n) - s"""
    arr = np.asarray(list(values), dtype=float)
    if arr.size == 0:
        return math.nan
    return float(gmean(arr + shift)) - shift
