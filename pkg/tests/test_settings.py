import pytest

from config.settings import get_settings
from models.solver_config import SolverConfig, preset, preset_names, replay
from utils.errors import ValidationError


@pytest.fixture
def fresh_settings():
    get_settings.cache_clear()
    yield get_settings
    get_settings.cache_clear()


def test_environment_overrides(fresh_settings, monkeypatch):
    monkeypatch.setenv('CCP_TIME_LIMIT', '12.5')
    monkeypatch.setenv('CCP_NODE_LIMIT', '400')
    monkeypatch.setenv('CCP_LOG_LEVEL', 'debug')
    settings = fresh_settings()
    assert settings.time_limit == 12.5
    assert settings.node_limit == 400
    assert settings.log_level == 'DEBUG'
    assert SolverConfig().node_limit == 400


def test_bad_numbers_fall_back(fresh_settings, monkeypatch):
    monkeypatch.setenv('CCP_GAP_LIMIT', 'lots')
    monkeypatch.setenv('CCP_BENCH_WORKERS', '0')
    settings = fresh_settings()
    assert settings.gap_limit == 0.0
    assert settings.bench_workers == 1


def test_from_dict_accepts_presets_and_dashes():
    cfg = SolverConfig.from_dict({'preset': 'db+opf-exact', 'node-select': 'dfs'})
    assert cfg.propagation == 'exact'
    assert cfg.node_select == 'dfs'
    assert cfg.label == 'db+opf-exact'


@pytest.mark.parametrize('data', [
    {'branching': 'sideways'},
    {'time_limit': 0},
    {'max_cuts_per_round': 0},
    {'preset': 'nope'},
    {'colour': 'red'},
])
def test_from_dict_rejects(data):
    with pytest.raises(ValidationError):
        SolverConfig.from_dict(data)


def test_replay_presets():
    names = preset_names()
    assert names[-3:] == ['replay-1', 'replay-2', 'replay-3']
    cfg = preset('replay-3', initial_incumbent=59.0)
    assert (cfg.branching, cfg.propagation, cfg.cuts, cfg.node_select) == ('dominance', 'exact', 'off', 'dfs')
    assert cfg.initial_incumbent == 59.0
    assert not cfg.heuristic and not cfg.reduced_cost_fixing
    with pytest.raises(ValidationError):
        replay(4)
