from fractions import Fraction

import numpy as np
import pytest

from models.ccp_instance import (CandidateSolution, CcpInstance, NodeState, chance_violation, check_feasible,
                                 to_rational, violated_scenarios)
from models.instance_io import dumps_instance, instance_to_document, load_instance, save_instance
from utils.errors import DimensionError, SchemaError, ValidationError


def test_example1_loads(example1):
    assert (example1.n, example1.m, example1.d) == (7, 3, 3)
    assert example1.epsilon == Fraction(4, 7)
    assert all(p == Fraction(1, 7) for p in example1.probs)
    with pytest.raises(ValueError):
        example1.scenarios[0, 0] = 99.0


def test_chance_violation_of_optimal_point(example1):
    assert violated_scenarios(example1, (6, 2, 7)) == [0, 1, 5, 6]
    assert chance_violation(example1, (6, 2, 7)) == Fraction(4, 7)
    assert chance_violation(example1, (12, 2, 12)) == 0


def test_check_feasible_accepts_optimum(example1):
    cand = CandidateSolution(np.array([6.0, 2.0, 7.0]), np.array([6.0, 2.0, 7.0]),
                             np.array([1, 1, 0, 0, 0, 1, 1], dtype=float), 59.0)
    feasible, diagnostics = check_feasible(example1, cand)
    assert feasible, diagnostics
    assert cand.zero_support() == (2, 3, 4)


def test_check_feasible_reports_knapsack_and_coverage(example1):
    cand = CandidateSolution(np.array([6.0, 2.0, 7.0]), np.array([6.0, 2.0, 7.0]),
                             np.array([1, 1, 1, 0, 0, 1, 1], dtype=float), 59.0)
    feasible, diagnostics = check_feasible(example1, cand)
    assert not feasible
    assert any('knapsack' in d for d in diagnostics)

    short = CandidateSolution(np.array([5.0, 2.0, 7.0]), np.array([5.0, 2.0, 7.0]),
                              np.array([1, 1, 0, 0, 0, 1, 1], dtype=float), 53.0)
    feasible, diagnostics = check_feasible(example1, short)
    assert not feasible
    assert any('scenario 4 not covered' in d for d in diagnostics)


def test_probabilities_must_sum_to_one():
    with pytest.raises(ValidationError):
        CcpInstance('bad', c=[1.0], T=[[1.0]], scenarios=[[1.0], [2.0]],
                    probs=(Fraction(1, 2), Fraction(1, 3)), epsilon=Fraction(1, 2))


def test_negative_scenarios_rejected():
    with pytest.raises(ValidationError):
        CcpInstance('bad', c=[1.0], T=[[1.0]], scenarios=[[-1.0], [2.0]],
                    probs=(Fraction(1, 2), Fraction(1, 2)), epsilon=Fraction(1, 2))


def test_dimension_mismatch():
    with pytest.raises(DimensionError):
        CcpInstance('bad', c=[1.0, 2.0], T=[[1.0]], scenarios=[[1.0]],
                    probs=(Fraction(1),), epsilon=Fraction(1, 2))


def test_to_rational_forms():
    assert to_rational({'num': 3, 'den': 6}) == Fraction(1, 2)
    assert to_rational('4/7') == Fraction(4, 7)
    assert to_rational(0.1) == Fraction(1, 10)
    with pytest.raises(ValidationError):
        to_rational({'num': 1, 'den': 0})


def test_node_state_rejects_double_fixing():
    with pytest.raises(AssertionError):
        NodeState(id=1, n0=frozenset({1}), n1=frozenset({1}))
    node = NodeState(id=1, n0={1}, n1={2}, infeasible=False)
    assert node.free_indices(4) == [0, 3]
    assert NodeState(id=2, n0={0, 1}, n1={2, 3}).free_indices(4) == []


def test_document_round_trip_is_canonical(example1, tmp_path):
    path = save_instance(example1, tmp_path / 'copy.json')
    again = load_instance(path)
    assert dumps_instance(again) == dumps_instance(example1)
    assert instance_to_document(again)['bounds']['upper'] == ['inf', 'inf', 'inf']


def test_missing_field_is_schema_error(example1):
    doc = instance_to_document(example1)
    del doc['epsilon']
    with pytest.raises(SchemaError):
        load_instance(doc)


def test_shape_mismatch_is_schema_error(example1):
    doc = instance_to_document(example1)
    doc['n'] = 8
    with pytest.raises(SchemaError):
        load_instance(doc)
