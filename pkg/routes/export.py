"""LaxBethe — Blueprint : export (CSV en pièce jointe)"""
from flask import Blueprint, request

from cli import LAX_MODES, cmd_bethe, cmd_exact_density, cmd_lax
from errors import ConfigError
from routes import config_from_request
from utils import csv_response

bp = Blueprint('export', __name__)


@bp.route('/export/exact-density')
def export_exact_density():
    return csv_response(cmd_exact_density(config_from_request()), 'laxbethe_sigma_exacte')


@bp.route('/export/bethe')
def export_bethe():
    return csv_response(cmd_bethe(config_from_request()), 'laxbethe_bethe')


@bp.route('/export/lax')
def export_lax():
    """Spectre de Lax ; ?mode=asymptotic pour la matrice asymptotique."""
    mode = request.args.get('mode', 'toeplitz')
    if mode not in LAX_MODES:
        raise ConfigError(f"mode inconnu : {mode!r}")
    return csv_response(cmd_lax(config_from_request(ignore=('mode',)), mode), f'laxbethe_lax_{mode}')
