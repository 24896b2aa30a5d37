"""
Solver API - Branch-and-Cut for Chance-Constrained Programs
Solves instances, lists presets and exposes propagation and dominance probes
"""

from flask import Blueprint, jsonify, request
from flask_limiter import Limiter
from flask_limiter.util import get_remote_address

from config.settings import get_settings
from models.ccp_instance import NodeState
from models.solver_config import SolverConfig, preset, preset_names
from services.bc_engine import BranchAndCutSolver
from services.preprocess import build_dominance_graph, dominance_statistics, dump_dominance, quantile_bounds
from services.propagation import exact_fixings, propagate_approx
from utils.errors import CcpError
from utils.helpers import parse_index_list, safe_json_response
from utils.request_guards import require_instance

solver_bp = Blueprint('solver', __name__)

# Create a limiter instance (attached to the app in main.create_app)
limiter = Limiter(key_func=get_remote_address)


@solver_bp.route('/solve', methods=['POST'])
@limiter.limit(lambda: get_settings().rate_limit)
@require_instance
def solve_instance():
    """Run branch-and-cut on the posted instance"""
    try:
        cfg = SolverConfig.from_dict(request.payload.get('config'))
    except CcpError as e:
        return jsonify({'error': 'Invalid solver configuration', 'details': str(e)}), 400
    except TypeError as e:
        return jsonify({'error': 'Invalid solver configuration', 'details': str(e)}), 400

    try:
        report = BranchAndCutSolver(request.instance, cfg).solve()
        return safe_json_response({
            'success': True,
            'instance': request.instance.name,
            'config': cfg.to_dict(),
            'report': report.to_dict(include_trace=cfg.trace),
        })
    except CcpError as e:
        return jsonify({'error': 'Solve failed', 'details': str(e)}), 400
    except Exception as e:
        return jsonify({'error': 'Solver crashed', 'details': str(e)}), 500


@solver_bp.route('/presets', methods=['GET'])
def list_presets():
    """Named configurations for benchmarks and tree replays"""
    try:
        presets = {name: preset(name).to_dict() for name in preset_names()}
        return safe_json_response({'success': True, 'presets': presets})
    except Exception as e:
        return jsonify({'error': 'Could not build presets', 'details': str(e)}), 500


@solver_bp.route('/propagate', methods=['POST'])
@require_instance
def propagate_node():
    """Overlap-oriented pruning and fixing at a node given by n0/n1 (0-based)"""
    inst = request.instance
    data = request.payload
    mode = data.get('mode', 'approx')
    if mode not in ('approx', 'exact'):
        return jsonify({'error': "mode must be 'approx' or 'exact'"}), 400

    try:
        n0 = parse_index_list(data.get('n0', []), inst.n, 'n0')
        n1 = parse_index_list(data.get('n1', []), inst.n, 'n1')
    except ValueError as e:
        return jsonify({'error': 'Invalid node fixings', 'details': str(e)}), 400
    if set(n0) & set(n1):
        return jsonify({'error': 'n0 and n1 must be disjoint'}), 400

    try:
        graph = build_dominance_graph(inst, quantile_bounds(inst), use_bar=bool(data.get('use_bar', True)),
                                      reduce=False)
        node = NodeState(id=0, n0=n0, n1=n1)
        if mode == 'exact':
            result = exact_fixings(inst, graph.matrix, node)
        else:
            result = propagate_approx(inst, graph.matrix, node)
        return safe_json_response({'success': True, 'result': result.to_dict()})
    except CcpError as e:
        return jsonify({'error': 'Propagation failed', 'details': str(e)}), 400
    except Exception as e:
        return jsonify({'error': 'Propagation crashed', 'details': str(e)}), 500


@solver_bp.route('/dominance', methods=['POST'])
@require_instance
def dominance_report():
    """Dominance pairs, transitive reduction and pair statistics"""
    try:
        inst = request.instance
        graph = build_dominance_graph(inst, use_bar=bool(request.payload.get('use_bar', True)))
        return safe_json_response({
            'success': True,
            'pairs': sorted(list(p) for p in graph.pairs),
            'reduced_pairs': sorted(list(p) for p in graph.reduced),
            'statistics': dominance_statistics(graph),
            'dump': dump_dominance(graph),
        })
    except Exception as e:
        return jsonify({'error': 'Dominance analysis failed', 'details': str(e)}), 500
