import json

import pytest


@pytest.fixture
def example1_doc(example1_path):
    return json.loads(example1_path.read_text())


def test_health(client):
    response = client.get('/health')
    assert response.status_code == 200
    assert response.get_json()['status'] == 'healthy'


def test_root_lists_endpoints(client):
    endpoints = client.get('/').get_json()['endpoints']
    assert endpoints['solver']['solve'] == '/api/solver/solve'
    assert endpoints['oracle'] == '/api/oracle/optimum'


def test_unknown_route_is_json_404(client):
    response = client.get('/api/nowhere')
    assert response.status_code == 404
    assert response.get_json()['error'] == 'Endpoint not found'


def test_solve_example1(client, example1_doc):
    response = client.post('/api/solver/solve', json={'instance': example1_doc, 'config': {'preset': 'db+opf'}})
    assert response.status_code == 200
    body = response.get_json()
    assert body['success'] is True
    report = body['report']
    assert report['status'] == 'OPTIMAL'
    assert report['primal_bound'] == pytest.approx(59.0)
    assert report['incumbent']['z'] == [1, 1, 0, 0, 0, 1, 1]
    assert body['config']['label'] == 'db+opf'


def test_solve_replay_with_trace(client, example1_doc):
    config = {'preset': 'replay-2', 'initial_incumbent': 59, 'trace': True}
    body = client.post('/api/solver/solve', json={'instance': example1_doc, 'config': config}).get_json()
    assert body['report']['incumbent'] is None
    assert len(body['report']['trace']) == body['report']['nodes_explored']


def test_solve_rejects_bad_config(client, example1_doc):
    response = client.post('/api/solver/solve', json={'instance': example1_doc, 'config': {'branching': 'sideways'}})
    assert response.status_code == 400
    response = client.post('/api/solver/solve', json={'instance': example1_doc, 'config': {'colour': 'red'}})
    assert response.status_code == 400


@pytest.mark.parametrize('body', [
    None,
    {},
    {'instance': 'data/instances/example1.json'},
    {'instance': {'name': 'broken', 'c': [1]}},
])
def test_instance_guard(client, body):
    response = client.post('/api/solver/solve', json=body)
    assert response.status_code == 400
    assert 'error' in response.get_json()


def test_presets(client):
    presets = client.get('/api/solver/presets').get_json()['presets']
    assert presets['db+opf-exact']['propagation'] == 'exact'
    assert presets['replay-1']['branching'] == 'classic'
    assert presets['bc+mix']['branching'] == 'classic'


def test_propagate_node(client, example1_doc):
    body = client.post('/api/solver/propagate',
                       json={'instance': example1_doc, 'n0': [3], 'n1': [4]}).get_json()
    result = body['result']
    assert result['r0'] == [1, 2]
    assert result['r1'] == [5, 6]
    assert result['bounds'] == [5.0, 2.0, 10.0]
    exact = client.post('/api/solver/propagate',
                        json={'instance': example1_doc, 'n0': [3], 'n1': [4], 'mode': 'exact'}).get_json()
    assert exact['result']['r0'] == [1, 2]


def test_propagate_rejects_bad_sets(client, example1_doc):
    overlap = client.post('/api/solver/propagate', json={'instance': example1_doc, 'n0': [3], 'n1': [3]})
    assert overlap.status_code == 400
    out_of_range = client.post('/api/solver/propagate', json={'instance': example1_doc, 'n0': [9]})
    assert out_of_range.status_code == 400
    bad_mode = client.post('/api/solver/propagate', json={'instance': example1_doc, 'mode': 'fast'})
    assert bad_mode.status_code == 400


def test_dominance(client, example1_doc):
    body = client.post('/api/solver/dominance', json={'instance': example1_doc}).get_json()
    assert body['pairs'] == [[1, 0], [3, 4], [5, 6]]
    assert body['statistics']['pct_dp'] == pytest.approx(100 * 3 / 21)
    raw = client.post('/api/solver/dominance', json={'instance': example1_doc, 'use_bar': False}).get_json()
    assert raw['pairs'] == [[3, 4]]


def test_oracle(client, example1_doc):
    body = client.post('/api/oracle/optimum', json={'instance': example1_doc}).get_json()
    assert body['result']['objective'] == pytest.approx(59.0)
    assert body['result']['support'] == [2, 3, 4]


def test_generator(client):
    response = client.post('/api/generator/ccls', json={'n': 6, 'epsilon': '1/3', 'periods': 3, 'seed': 2})
    assert response.status_code == 200
    doc = response.get_json()['instance']
    assert doc['n'] == 6 and doc['m'] == 3
    assert client.post('/api/generator/ccls', json={'n': 6, 'epsilon': '1/3'}).status_code == 400
    assert client.post('/api/generator/unknown', json={'n': 6}).status_code == 404


def test_generated_instance_solves_over_http(client):
    doc = client.post('/api/generator/ccls', json={'n': 6, 'epsilon': '1/3', 'periods': 2}).get_json()['instance']
    solved = client.post('/api/solver/solve', json={'instance': doc}).get_json()
    truth = client.post('/api/oracle/optimum', json={'instance': doc}).get_json()
    assert solved['report']['primal_bound'] == pytest.approx(truth['result']['objective'], rel=1e-6)
