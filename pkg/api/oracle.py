"""
Oracle API - Brute-Force Ground Truth
Exact optimum of small instances by support enumeration
"""

from flask import Blueprint, jsonify, request

from api.solver import limiter
from config.settings import get_settings
from services.oracle import brute_force_optimum
from utils.errors import CcpError
from utils.helpers import safe_json_response
from utils.request_guards import require_instance

oracle_bp = Blueprint('oracle', __name__)


@oracle_bp.route('/optimum', methods=['POST'])
@limiter.limit(lambda: get_settings().rate_limit)
@require_instance
def oracle_optimum():
    """Enumerate supports of an instance with at most 20 scenarios"""
    try:
        result = brute_force_optimum(request.instance)
        return safe_json_response({'success': True, 'instance': request.instance.name, 'result': result.to_dict()})
    except CcpError as e:
        return jsonify({'error': 'Oracle refused the instance', 'details': str(e)}), 400
    except Exception as e:
        return jsonify({'error': 'Oracle failed', 'details': str(e)}), 500
