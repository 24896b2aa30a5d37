#!/usr/bin/env python3
"""
CCP Branch-and-Cut Service - Main Application Entry Point
HTTP front end for the chance-constrained program solver
"""

from flask import Flask, jsonify
from flask_cors import CORS

from config.logging_config import configure_logging
from config.settings import get_settings

# Import blueprints
from api.solver import solver_bp, limiter
from api.oracle import oracle_bp
from api.generator import generator_bp
from cli import ccp_cli
from utils.errors import CcpError


def create_app(overrides=None):
    """Flask application factory"""
    settings = get_settings()
    configure_logging(settings.log_level)
    app = Flask(__name__)

    # Configuration
    app.config['SECRET_KEY'] = settings.secret_key
    app.config['DEBUG'] = settings.debug
    app.config.update(overrides or {})

    CORS(app, origins=settings.cors_origins.split(','), allow_headers=["Content-Type"],
         methods=["GET", "POST", "OPTIONS"])
    limiter.init_app(app)

    # Register blueprints
    app.register_blueprint(solver_bp, url_prefix='/api/solver')
    app.register_blueprint(oracle_bp, url_prefix='/api/oracle')
    app.register_blueprint(generator_bp, url_prefix='/api/generator')

    # `flask ccp solve ...` and friends
    app.cli.add_command(ccp_cli)

    # Health check endpoint
    @app.route('/health')
    def health_check():
        return jsonify({
            'status': 'healthy',
            'message': 'CCP solver is running',
            'version': '1.0.0'
        })

    # Root endpoint
    @app.route('/')
    def root():
        return jsonify({
            'message': 'Branch-and-cut for chance-constrained programs with finite scenarios',
            'endpoints': {
                'solver': {
                    'solve': '/api/solver/solve',
                    'presets': '/api/solver/presets',
                    'propagate': '/api/solver/propagate',
                    'dominance': '/api/solver/dominance',
                },
                'oracle': '/api/oracle/optimum',
                'generator': '/api/generator/<ccrp|ccmpp|ccls>',
            }
        })

    # Global error handlers
    @app.errorhandler(CcpError)
    def solver_error(error):
        return jsonify({'error': type(error).__name__, 'details': str(error)}), 400

    @app.errorhandler(404)
    def not_found(error):
        return jsonify({'error': 'Endpoint not found'}), 404

    @app.errorhandler(429)
    def rate_limited(error):
        return jsonify({'error': 'Rate limit exceeded', 'details': str(error.description)}), 429

    @app.errorhandler(500)
    def internal_error(error):
        return jsonify({'error': 'Internal solver error'}), 500

    return app


# Create module-level app for WSGI servers like Gunicorn
app = create_app()

if __name__ == '__main__':
    settings = get_settings()
    app.run(host='0.0.0.0', port=settings.port, debug=app.config['DEBUG'])
