"""LaxBethe — Blueprint : api (JSON)"""
from flask import Blueprint, jsonify

from cli import band_edge_document
from routes import config_from_request
from verify import run_verification

bp = Blueprint('api', __name__)


@bp.route('/api/health')
def api_health():
    return jsonify({'status': 'ok'})


@bp.route('/api/band-edge')
def api_band_edge():
    """Bord de bande {a, q, k, K, E, phi_min, omega0}."""
    return jsonify(band_edge_document(config_from_request()))


@bp.route('/api/verify')
def api_verify():
    """Rapport de comparaison ; un échec de vérification reste un 200 avec pass=false."""
    config = config_from_request()
    report = run_verification(config.a, config)
    return jsonify(report.to_dict())
