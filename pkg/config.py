"""
LaxBethe — Configuration standardisée.

Même schéma que le reste de la suite :
- Priorité : valeur explicite (drapeau CLI / argument HTTP) > variable
  d'environnement > valeur par défaut
- Une seule variable d'environnement : LAXBETHE_THREADS (taille du pool
  utilisé pour les évaluations sur grille)

Usage :
    from config import RunConfig, parse_tolerance

    cfg = RunConfig(a=2.0, nodes=800).validate()
    key, value = parse_tolerance("sup_sigma_diff=1e-12")
"""

from __future__ import annotations

import dataclasses
import math
import os
from dataclasses import dataclass, field

from errors import ConfigError

ENV_PREFIX = "LAXBETHE_"

# Échelle de tolérances par défaut : normes sup de densités 1e-5,
# résidus analytiques 1e-6, distance de Kolmogorov à N fini 2e-2.
DEFAULT_TOLERANCES = {
    'sup_sigma_diff': 1e-5,
    'sup_rho_diff': 1e-5,
    'residual_eq12': 1e-6,
    'residual_eq13': 1e-6,
    'inverse_map_residual': 1e-5,
    'a_minus_omega0': 1e-6,
    'ks_distance_finite_n': 2e-2,
}

BOUNDARIES = ('open', 'periodic')
GRIDS = ('chebyshev', 'uniform')


def get_param(key, default=None, env_prefix=ENV_PREFIX):
    """Lit un paramètre : variable d'environnement {env_prefix}{KEY}, sinon défaut."""
    env_val = os.environ.get(f"{env_prefix}{key}".upper())
    if env_val is not None and env_val.strip():
        return env_val.strip()
    return default


def thread_count():
    """Nombre de threads du pool de grille (LAXBETHE_THREADS, défaut 1)."""
    raw = get_param('threads', '1')
    try:
        n = int(raw)
    except (TypeError, ValueError):
        raise ConfigError(f"LAXBETHE_THREADS invalide : {raw!r}")
    if n < 1:
        raise ConfigError(f"LAXBETHE_THREADS doit être ≥ 1 (reçu {n})")
    return n


def parse_tolerance(text):
    """Parse 'cle=valeur' (drapeau --tolerance répétable)."""
    if '=' not in text:
        raise ConfigError(f"tolérance mal formée (attendu cle=valeur) : {text!r}")
    key, raw = (part.strip() for part in text.split('=', 1))
    if key not in DEFAULT_TOLERANCES:
        raise ConfigError(f"tolérance inconnue : {key!r}")
    try:
        value = float(raw)
    except ValueError:
        raise ConfigError(f"valeur de tolérance non numérique : {raw!r}")
    if not (value > 0.0) or not math.isfinite(value):
        raise ConfigError(f"tolérance {key} doit être > 0 (reçu {raw!r})")
    return key, value


@dataclass(frozen=True)
class RunConfig:
    """Configuration d'une exécution (CLI, HTTP ou bibliothèque)."""
    a: float = 1.0
    nodes: int = 400
    matrix_n: int = 1000
    bins: int = 101
    boundary: str = 'open'
    lam: float = 1.0
    omega_max: float = 5.0
    samples: int = 201
    series_epsilon: float = 1e-16
    grid: str = 'chebyshev'
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))
    out: str | None = None
    perturb_a: float = 1.0
    rho0_support_scale: float = 1.0

    def with_tolerances(self, overrides):
        """Copie avec certaines tolérances remplacées."""
        merged = dict(self.tolerances)
        merged.update(overrides)
        return dataclasses.replace(self, tolerances=merged)

    def validate(self):
        """Vérifie les invariants ; renvoie self pour le chaînage."""
        positive = {
            'a': self.a, 'lam': self.lam, 'omega_max': self.omega_max,
            'series_epsilon': self.series_epsilon, 'perturb_a': self.perturb_a,
            'rho0_support_scale': self.rho0_support_scale,
        }
        for name, value in positive.items():
            if not isinstance(value, (int, float)) or not math.isfinite(value) or value <= 0:
                raise ConfigError(f"{name} doit être un réel > 0 (reçu {value!r})")
        minimums = {'nodes': 16, 'matrix_n': 2, 'bins': 2, 'samples': 1}
        for name, low in minimums.items():
            value = getattr(self, name)
            if not isinstance(value, int) or value < low:
                raise ConfigError(f"{name} doit être un entier ≥ {low} (reçu {value!r})")
        if self.boundary not in BOUNDARIES:
            raise ConfigError(f"bord inconnu : {self.boundary!r} (attendu open|periodic)")
        if self.grid not in GRIDS:
            raise ConfigError(f"grille inconnue : {self.grid!r} (attendu chebyshev|uniform)")
        missing = set(DEFAULT_TOLERANCES) - set(self.tolerances)
        unknown = set(self.tolerances) - set(DEFAULT_TOLERANCES)
        if missing or unknown:
            raise ConfigError(f"tolérances incomplètes (manquantes={sorted(missing)}, inconnues={sorted(unknown)})")
        for key, value in self.tolerances.items():
            if not (value > 0.0):
                raise ConfigError(f"tolérance {key} doit être > 0")
        return self
