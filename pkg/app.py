"""
==============================================
  LAXBETHE — Densité spectrale de la matrice de Lax
  API Flask (JSON + exports CSV)
==============================================
Pour lancer : python cli.py serve
Puis ouvrir http://localhost:5000/api/health
"""

import logging
import traceback

from flask import Flask, jsonify, request

from errors import ConfigError, DomainError, LaxBetheError
from routes import register_blueprints

_log = logging.getLogger(__name__)


# ============================================================
#  CRÉATION DE L'APPLICATION
# ============================================================

def create_app(testing=False):
    """Construit l'application Flask et enregistre les blueprints."""
    app = Flask(__name__)
    app.config['TESTING'] = testing
    app.json.sort_keys = False

    # ============================================================
    #  SÉCURITÉ : HEADERS
    # ============================================================

    @app.after_request
    def _set_security_headers(response):
        """Ajoute les headers de sécurité à chaque réponse."""
        response.headers['X-Content-Type-Options'] = 'nosniff'
        response.headers['X-Frame-Options'] = 'SAMEORIGIN'
        response.headers['Referrer-Policy'] = 'strict-origin-when-cross-origin'
        response.headers['Content-Security-Policy'] = "default-src 'none'; frame-ancestors 'none'"
        return response

    # ============================================================
    #  ERREURS → JSON
    # ============================================================

    @app.errorhandler(ConfigError)
    @app.errorhandler(DomainError)
    def _bad_request(e):
        _log.info("requête refusée %s %s : %s", request.method, request.path, e)
        return jsonify({'error': str(e), 'type': type(e).__name__}), 400

    @app.errorhandler(LaxBetheError)
    def _computation_failed(e):
        _log.warning("calcul en échec %s %s : %s", request.method, request.path, e)
        return jsonify({'error': str(e), 'type': type(e).__name__}), 422

    @app.errorhandler(404)
    def _not_found(e):
        return jsonify({'error': 'ressource introuvable'}), 404

    @app.errorhandler(500)
    def _internal_error(e):
        _log.error("[LAXBETHE 500] %s %s\n%s", request.method, request.path, traceback.format_exc())
        return jsonify({'error': 'erreur interne'}), 500

    register_blueprints(app)
    return app
