import numpy as np
import pytest

from services.mixing_cuts import CutPool, MixingCut, mixing_cut, separate_mixing, validate_cut
from services.preprocess import quantile_bounds, strengthened_matrix
from utils.errors import SizeLimit


@pytest.fixture
def bounds(example1):
    qb = quantile_bounds(example1)
    return strengthened_matrix(example1, qb), qb.xi0


def test_cut_coefficients_telescope(example1, bounds):
    xi_bar, xi0 = bounds
    cut = mixing_cut(xi_bar, xi0, 0, [6, 5, 4])
    assert cut.coefficients == (5.0, 1.0, 2.0)
    assert cut.rhs == 12.0
    assert cut.describe() == 'v0 + 5 z6 + 1 z5 + 2 z4 >= 12'
    assert validate_cut(example1, cut, xi_bar)


def test_corrupted_cut_fails_validation(example1, bounds):
    xi_bar, xi0 = bounds
    cut = mixing_cut(xi_bar, xi0, 0, [6, 5, 4])
    broken = MixingCut(cut.row, cut.sequence, cut.coefficients, cut.rhs + 1.0)
    assert not validate_cut(example1, broken, xi_bar)


def test_empty_sequence_is_the_quantile_bound(example1, bounds):
    xi_bar, xi0 = bounds
    cut = mixing_cut(xi_bar, xi0, 2, [])
    assert cut.rhs == 6.0
    assert validate_cut(example1, cut, xi_bar)


def test_sequence_must_decrease(bounds):
    xi_bar, xi0 = bounds
    with pytest.raises(ValueError):
        mixing_cut(xi_bar, xi0, 0, [4, 6])


def test_separation_finds_most_violated_sequence(example1, bounds):
    xi_bar, xi0 = bounds
    z = np.array([0, 0, 0, 0, 0, 0.5, 0.5])
    cuts = separate_mixing(xi_bar, xi0, xi0, z)
    assert len(cuts) == 1
    cut = cuts[0]
    assert (cut.row, cut.sequence) == (0, (6, 4))
    assert cut.coefficients == (6.0, 2.0)
    assert cut.violation == pytest.approx(5.0)
    assert validate_cut(example1, cut, xi_bar)


def test_no_cut_at_integer_feasible_point(bounds):
    xi_bar, xi0 = bounds
    z = np.array([1, 1, 0, 0, 0, 1, 1], dtype=float)
    v = np.array([6.0, 2.0, 7.0])
    assert separate_mixing(xi_bar, xi0, v, z) == []


def test_separated_cuts_are_valid_on_random_points(make_random_instance):
    rng = np.random.default_rng(11)
    for seed in range(8):
        inst = make_random_instance(seed)
        qb = quantile_bounds(inst)
        xi_bar = strengthened_matrix(inst, qb)
        for _ in range(5):
            z = rng.uniform(0, 1, size=inst.n)
            v = qb.xi0 + rng.uniform(0, 2, size=inst.m)
            for cut in separate_mixing(xi_bar, qb.xi0, v, z):
                assert len(cut.sequence) >= 2
                assert cut.violation > 1e-6
                assert validate_cut(inst, cut, xi_bar)


def test_pool_deduplicates(bounds):
    xi_bar, xi0 = bounds
    cut = mixing_cut(xi_bar, xi0, 0, [6, 4])
    pool = CutPool()
    assert pool.add([cut, cut]) == [cut]
    assert pool.add([cut]) == []
    assert len(pool) == 1 and pool.cuts() == [cut]


def test_validation_size_limit():
    from fractions import Fraction
    from models.ccp_instance import CcpInstance

    inst = CcpInstance('big', c=[1.0], T=[[1.0]], scenarios=[[float(i)] for i in range(15)],
                       probs=(Fraction(1, 15),) * 15, epsilon=Fraction(1, 5))
    cut = MixingCut(0, (), (), 0.0)
    with pytest.raises(SizeLimit):
        validate_cut(inst, cut)
