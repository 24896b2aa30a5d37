import json

import pytest
from click.testing import CliRunner

from cli import EXIT_INPUT, EXIT_LIMIT, ccp_cli


@pytest.fixture
def runner():
    return CliRunner()


def test_solve_prints_report(runner, example1_path):
    result = runner.invoke(ccp_cli, ['solve', str(example1_path)])
    assert result.exit_code == 0, result.output
    assert 'OPTIMAL' in result.output
    assert 'objective   59' in result.output
    assert 'violated    0 1 5 6' in result.output


def test_solve_json_with_preset(runner, example1_path):
    result = runner.invoke(ccp_cli, ['--log-level', 'WARNING', 'solve', str(example1_path), '--preset', 'bc+mix',
                                     '--json'])
    assert result.exit_code == 0
    report = json.loads(result.output)
    assert report['config_label'] == 'bc+mix'
    assert report['primal_bound'] == pytest.approx(59.0)


def test_replay_writes_trace(runner, example1_path, tmp_path):
    trace = tmp_path / 'tree.txt'
    result = runner.invoke(ccp_cli, ['solve', str(example1_path), '--replay-figure', '3', '--trace', str(trace)])
    assert result.exit_code == 0, result.output
    lines = trace.read_text().splitlines()
    assert lines
    assert lines[0].startswith('0 parent=- branch=-')


def test_solve_dumps_root_lp(runner, example1_path, tmp_path):
    lp_file = tmp_path / 'root.mps'
    result = runner.invoke(ccp_cli, ['solve', str(example1_path), '--formulation', 'raw', '--dump-lp', str(lp_file)])
    assert result.exit_code == 0, result.output
    text = lp_file.read_text()
    assert text.startswith('NAME') and text.split()[1].endswith('-raw')
    assert ' L  KNAP' in text
    assert any(line.split()[:1] == ['Z6'] for line in text.splitlines())
    assert text.rstrip().endswith('ENDATA')


def test_node_limit_exit_code(runner, example1_path):
    result = runner.invoke(ccp_cli, ['solve', str(example1_path), '--replay-figure', '1', '--incumbent', '1000',
                                     '--node-limit', '1'])
    assert result.exit_code == EXIT_LIMIT


def test_bad_instance_file(runner, tmp_path):
    broken = tmp_path / 'broken.json'
    broken.write_text('{"name": "broken"}')
    result = runner.invoke(ccp_cli, ['solve', str(broken)])
    assert result.exit_code == EXIT_INPUT
    assert 'missing fields' in result.output


def test_oracle_command(runner, example1_path):
    result = runner.invoke(ccp_cli, ['oracle', str(example1_path)])
    assert result.exit_code == 0
    assert 'support     2 3 4' in result.output


def test_gen_then_solve(runner, tmp_path):
    out = tmp_path / 'ccls.json'
    result = runner.invoke(ccp_cli, ['gen', 'ccls', '--n', '8', '--eps', '1/4', '-T', '2', '-o', str(out)])
    assert result.exit_code == 0, result.output
    assert out.exists()
    assert runner.invoke(ccp_cli, ['solve', str(out), '--preset', 'db+opf-exact']).exit_code == 0


def test_gen_rejects_bad_parameters(runner, tmp_path):
    result = runner.invoke(ccp_cli, ['gen', 'ccls', '--n', '8', '--eps', '1/4', '-T', '40',
                                     '-o', str(tmp_path / 'x.json')])
    assert result.exit_code == EXIT_INPUT


def test_dominance_command(runner, example1_path):
    result = runner.invoke(ccp_cli, ['dominance', str(example1_path)])
    assert result.exit_code == 0
    assert result.output.splitlines()[:3] == ['1 -> 0', '3 -> 4', '5 -> 6']
    raw = runner.invoke(ccp_cli, ['dominance', str(example1_path), '--raw'])
    assert raw.output.splitlines()[0] == '3 -> 4'


def test_bench_command(runner, tmp_path):
    data = tmp_path / 'instances'
    runner.invoke(ccp_cli, ['gen', 'ccls', '--n', '6', '--eps', '1/3', '-T', '2', '-o', str(data / 'a.json')])
    out = tmp_path / 'bench.csv'
    result = runner.invoke(ccp_cli, ['bench', str(data), '--configs', 'db,db+opf', '--out', str(out)])
    assert result.exit_code == 0, result.output
    assert 'solved 1/1' in result.output
    assert out.exists()
    bad = runner.invoke(ccp_cli, ['bench', str(data), '--configs', 'nope', '--out', str(out)])
    assert bad.exit_code == EXIT_INPUT
