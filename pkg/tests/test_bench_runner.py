import csv
import math
from fractions import Fraction

import numpy as np
import pytest

from models.instance_io import save_instance
from services.bench_runner import BenchRow, run_bench, summarize
from services.instance_generator import GenSpec, instance_generator
from utils.helpers import parse_index_list, relative_gap, shifted_geometric_mean, to_jsonable


def test_shifted_geometric_mean():
    assert shifted_geometric_mean([0, 0], 100) == pytest.approx(0.0)
    assert shifted_geometric_mean([1, 9], 1) == pytest.approx(math.sqrt(20) - 1)
    assert math.isnan(shifted_geometric_mean([], 1))


def test_relative_gap():
    assert relative_gap(59.0, 59.0) == 0.0
    assert relative_gap(110.0, 100.0) == pytest.approx(10.0)
    assert relative_gap(1.0, -1.0) == math.inf
    assert relative_gap(math.inf, 3.0) == math.inf


def test_to_jsonable_handles_solver_values():
    payload = to_jsonable({'eps': Fraction(4, 7), 'bound': np.inf, 'set': {3, 1}, 'v': np.array([6.0, 2.0])})
    assert payload == {'eps': {'num': 4, 'den': 7}, 'bound': None, 'set': [1, 3], 'v': [6.0, 2.0]}


def test_parse_index_list():
    assert parse_index_list([3, 1, 3], 7, 'n0') == [1, 3]
    with pytest.raises(ValueError):
        parse_index_list([7], 7, 'n0')
    with pytest.raises(ValueError):
        parse_index_list([True], 7, 'n1')


def test_summary_skips_errors_in_means():
    rows = [
        BenchRow('a', 'db', 'OPTIMAL', time=1.0, nodes=0),
        BenchRow('b', 'db', 'NODE_LIMIT', time=9.0, nodes=0),
        BenchRow('c', 'db', 'ERROR', error='boom'),
    ]
    (entry,) = summarize(rows)
    assert (entry.instances, entry.solved) == (3, 1)
    assert entry.time_sgm == pytest.approx(math.sqrt(20) - 1)
    assert entry.nodes_sgm == pytest.approx(0.0)


def test_run_bench_writes_rows_and_summary(tmp_path):
    for seed in range(2):
        inst = instance_generator.generate(GenSpec('ccls', n=10, epsilon=Fraction(1, 5), seed=seed, periods=2))
        save_instance(inst, tmp_path / f'{inst.name}.json')
    (tmp_path / 'broken.json').write_text('{"name": "broken"}')
    out = tmp_path / 'results' / 'bench.csv'

    rows, summary = run_bench(tmp_path, ['db', 'bc+mix'], time_limit=60, node_limit=10_000, workers=1, out=out)
    assert len(rows) == 6
    errors = [r for r in rows if r.status == 'ERROR']
    assert len(errors) == 2 and all(r.instance == 'broken' for r in errors)
    solved = [r for r in rows if r.status != 'ERROR']
    assert all(r.solved for r in solved)
    by_instance = {}
    for r in solved:
        by_instance.setdefault(r.instance, []).append(r.objective)
    for objectives in by_instance.values():
        assert objectives[0] == pytest.approx(objectives[1], rel=1e-6)

    with out.open() as handle:
        written = list(csv.DictReader(handle))
    assert len(written) == 6
    assert {'instance', 'config', 'status', 'nodes', 'pruned_overlap', 'pct_dp'} <= set(written[0])
    assert 'pruned' not in written[0]
    with (tmp_path / 'results' / 'bench_summary.csv').open() as handle:
        assert [line['config'] for line in csv.DictReader(handle)] == ['db', 'bc+mix']
    assert [entry.solved for entry in summary] == [2, 2]


@pytest.mark.slow
def test_presets_agree_on_generated_families(tmp_path):
    specs = [
        GenSpec('ccls', n=60, epsilon=Fraction(1, 10), seed=5, periods=5),
        GenSpec('ccmpp', n=40, epsilon=Fraction(1, 10), seed=5, periods=4),
        GenSpec('ccrp', n=30, epsilon=Fraction(1, 10), seed=5, resources=3, customers=4),
    ]
    for spec in specs:
        save_instance(instance_generator.generate(spec), tmp_path / f'{spec.name}.json')
    configs = ['bc+mix', 'bc+mix+sdi', 'db', 'db+opf', 'db+opf-exact']
    rows, summary = run_bench(tmp_path, configs, time_limit=600, node_limit=200_000)
    assert all(r.solved for r in rows)
    by_instance = {}
    for r in rows:
        by_instance.setdefault(r.instance, []).append(r.objective)
    for objectives in by_instance.values():
        assert max(objectives) - min(objectives) <= 1e-6 * max(1.0, abs(objectives[0]))
    assert [entry.solved for entry in summary] == [3] * len(configs)


@pytest.mark.slow
@pytest.mark.parametrize('family,shape', [
    ('ccls', {'periods': 10}),
    ('ccmpp', {'periods': 10}),
    ('ccrp', {'resources': 5, 'customers': 10}),
])
def test_dominance_and_propagation_shrink_trees(tmp_path, family, shape):
    for n in (100, 200):
        for seed in range(2):
            inst = instance_generator.generate(GenSpec(family, n=n, epsilon=Fraction(1, 10), seed=seed, **shape))
            save_instance(inst, tmp_path / f'{inst.name}.json')
    rows, summary = run_bench(tmp_path, ['bc+mix', 'db', 'db+opf'], time_limit=600, node_limit=200_000)
    assert all(r.solved for r in rows)
    nodes = {entry.config: entry.nodes_sgm for entry in summary}
    assert nodes['db+opf'] <= nodes['db'] <= nodes['bc+mix']
    if family == 'ccls':
        assert nodes['db+opf'] <= 0.8 * nodes['bc+mix']
