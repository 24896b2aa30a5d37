"""
Generator API - Benchmark Instances
Builds seeded CCRP, CCMPP and CCLS instances and returns their documents
"""

from flask import Blueprint, jsonify, request

from models.instance_io import instance_to_document
from services.instance_generator import FAMILIES, GenSpec, instance_generator
from utils.errors import CcpError
from utils.helpers import safe_json_response

generator_bp = Blueprint('generator', __name__)


@generator_bp.route('/<family>', methods=['POST'])
def generate_instance(family):
    """Generate one instance of the requested family"""
    if family not in FAMILIES:
        return jsonify({'error': f'Unknown family {family}', 'families': list(FAMILIES)}), 404

    data = request.get_json(silent=True)
    if not data:
        return jsonify({'error': 'Generator parameters are required'}), 400

    try:
        spec = GenSpec.from_dict(family, data)
        inst = instance_generator.generate(spec)
        return safe_json_response({'success': True, 'instance': instance_to_document(inst)})
    except CcpError as e:
        return jsonify({'error': 'Invalid generator parameters', 'details': str(e)}), 400
    except Exception as e:
        return jsonify({'error': 'Generation failed', 'details': str(e)}), 500
