"""
LaxBethe — Enregistrement des blueprints et lecture des paramètres de requête.
"""

import dataclasses

from flask import request

from config import RunConfig, parse_tolerance
from errors import ConfigError

# Paramètres de requête acceptés : nom → conversion
_QUERY_FIELDS = {
    'a': float, 'nodes': int, 'matrix_n': int, 'bins': int, 'boundary': str,
    'lam': float, 'omega_max': float, 'samples': int, 'series_epsilon': float,
    'grid': str, 'perturb_a': float, 'rho0_support_scale': float,
}


def config_from_request(ignore=()):
    """RunConfig validée depuis la query string (mêmes noms que la CLI, '-' → '_')."""
    values = {}
    for key, raw in request.args.items():
        name = key.replace('-', '_')
        if name == 'tolerance' or name in ignore:
            continue
        if name not in _QUERY_FIELDS:
            raise ConfigError(f"paramètre inconnu : {key!r}")
        try:
            values[name] = _QUERY_FIELDS[name](raw)
        except ValueError:
            raise ConfigError(f"valeur invalide pour {key} : {raw!r}")
    config = dataclasses.replace(RunConfig(), **values)
    overrides = dict(parse_tolerance(t) for t in request.args.getlist('tolerance'))
    return config.with_tolerances(overrides).validate()


def register_blueprints(app):
    """Importe et enregistre tous les blueprints auprès de l'application Flask."""
    from routes.api import bp as api_bp
    from routes.export import bp as export_bp

    app.register_blueprint(api_bp)
    app.register_blueprint(export_bp)
