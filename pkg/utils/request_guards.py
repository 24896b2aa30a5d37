"""
Request Guards
Decorators that parse and validate instance payloads before a route runs
"""

import functools

from flask import jsonify, request

from models.instance_io import load_instance
from utils.errors import CcpError


def require_instance(f):
    """Decorator to require a valid instance document under the 'instance' key"""
    @functools.wraps(f)
    def decorated_function(*args, **kwargs):
        data = request.get_json(silent=True)

        if not data or 'instance' not in data:
            return jsonify({'error': 'Request body must contain an instance document'}), 400

        # Only inline documents; never read server-side paths
        if not isinstance(data['instance'], dict):
            return jsonify({'error': 'instance must be a JSON object'}), 400

        try:
            instance = load_instance(data['instance'])
        except CcpError as e:
            return jsonify({'error': 'Invalid instance', 'details': str(e)}), 400

        # Add parsed instance and body to request context
        request.instance = instance
        request.payload = data
        return f(*args, **kwargs)

    return decorated_function
