from fractions import Fraction

import numpy as np
import pytest

from models.instance_io import dumps_instance, load_instance
from services.instance_generator import GenSpec, instance_generator
from utils.errors import ParamError


def test_ccmpp_shapes_and_rows():
    inst = instance_generator.generate(GenSpec('ccmpp', n=100, epsilon=Fraction(1, 10), seed=3, periods=10))
    assert (inst.n, inst.m, inst.d) == (100, 10, 20)
    assert np.all(inst.scenarios >= 0)
    assert len(inst.constraints) == 10
    # coal lifespan exceeds the horizon, so every coal build stays live
    assert np.allclose(inst.T[:, :10], np.tril(np.ones((10, 10))))
    assert inst.name == 'ccmpp-T10-n100-eps1_10-s3'


def test_ccmpp_plants_retire_after_their_lifespan():
    inst = instance_generator.generate(GenSpec('ccmpp', n=5, epsilon=Fraction(1, 5), periods=12))
    assert inst.T[11, 0] == 1.0
    assert inst.T[11, 12] == 0.0
    assert inst.T[11, 14] == 1.0


def test_ccrp_dimensions():
    inst = instance_generator.generate(
        GenSpec('ccrp', n=50, epsilon=Fraction(1, 20), seed=1, resources=20, customers=30))
    assert (inst.m, inst.d) == (30, 20 + 20 * 30)
    assert len(inst.constraints) == 20
    assert np.all(inst.c[20:] == 0.0)
    assert inst.metadata['family'] == 'ccrp'


def test_ccls_cumulative_demand():
    inst = instance_generator.generate(GenSpec('ccls', n=40, epsilon=Fraction(1, 5), periods=5))
    assert (inst.m, inst.d) == (5, 5)
    assert np.all(np.diff(inst.scenarios, axis=1) > 0)
    assert np.allclose(inst.T, np.tril(np.ones((5, 5))))
    assert 'objective_offset' in inst.metadata


def test_same_seed_same_instance():
    spec = GenSpec('ccls', n=20, epsilon=Fraction(1, 10), seed=42, periods=4)
    first = instance_generator.generate(spec)
    second = instance_generator.generate(spec)
    assert np.array_equal(first.scenarios, second.scenarios)
    assert np.array_equal(first.c, second.c)
    other = instance_generator.generate(GenSpec('ccls', n=20, epsilon=Fraction(1, 10), seed=43, periods=4))
    assert not np.array_equal(first.scenarios, other.scenarios)


def test_generated_instance_survives_io():
    inst = instance_generator.generate(GenSpec('ccmpp', n=8, epsilon=Fraction(1, 4), seed=0, periods=3))
    again = load_instance(dumps_instance(inst))
    assert again.epsilon == Fraction(1, 4)
    assert len(again.constraints) == 3
    assert np.allclose(again.scenarios, inst.scenarios)


@pytest.mark.parametrize('family,data', [
    ('ccmpp', {'n': 10, 'epsilon': '1/10', 'periods': 0}),
    ('ccls', {'n': 10, 'epsilon': '1/10', 'periods': 21}),
    ('ccrp', {'n': 10, 'epsilon': '1/10', 'resources': 60, 'customers': 10}),
    ('ccrp', {'n': 10, 'epsilon': '1/10'}),
    ('ccls', {'n': 0, 'epsilon': '1/10', 'periods': 3}),
    ('ccls', {'n': 10, 'epsilon': '3/2', 'periods': 3}),
    ('ccls', {'epsilon': '1/10', 'periods': 3}),
    ('ccls', {'n': 10, 'periods': 3}),
    ('knapsack', {'n': 10, 'epsilon': '1/10'}),
])
def test_bad_parameters(family, data):
    with pytest.raises(ParamError):
        GenSpec.from_dict(family, data)
