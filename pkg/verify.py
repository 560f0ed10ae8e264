"""
LaxBethe — Vérifications croisées et rapport de comparaison.

Enchaîne : module elliptique → bord de bande → solution de Bethe →
densité de coupure ρ₀ → résidus et distances → ComparisonReport.

Chaque quantité est comparée à une tolérance de RunConfig.tolerances ;
le verdict est journalisé sur le logger d'audit 'laxbethe.audit'.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from bethe import apply_kernel, sigma_bethe, solve_for_a
from config import DEFAULT_TOLERANCES, RunConfig
from elliptic import modulus_from_a
from errors import ConfigError, CutError, DomainError
from exact_spectrum import (
    DensityOnGrid, domega_dphi, find_band_edge, omega_of_phi,
    phi_of_omega_real, rho0_at, rho0_extract, sigma_exact,
)
from lax import LaxMatrixSpec, build_lax, eigenvalues_hermitian, kolmogorov_distance

_log = logging.getLogger(__name__)
_audit = logging.getLogger('laxbethe.audit')

TWO_PI = 2.0 * math.pi
CUT_TOLERANCE = 1e-14
SIGMA_POINTS = 401
EQ12_POINTS = 41
EQ13_POINTS = 81
REAL_INVERSE_POINTS = 12
COMPLEX_INVERSE_POINTS = 8

# Ordre stable des champs du rapport JSON
REPORT_FIELDS = (
    'a', 'bigA', 'omega0', 'sup_sigma_diff', 'sup_rho_diff', 'residual_eq12',
    'residual_eq13', 'inverse_map_residual', 'ks_distance_finite_n',
    'a_minus_omega0', 'tolerances', 'pass',
)


# ============================================================
#  RAPPORT
# ============================================================

@dataclass(frozen=True)
class ComparisonReport:
    a: float
    bigA: float
    omega0: float
    sup_sigma_diff: float
    sup_rho_diff: float
    residual_eq12: float
    residual_eq13: float
    inverse_map_residual: float
    ks_distance_finite_n: float
    a_minus_omega0: float
    tolerances: dict = field(default_factory=lambda: dict(DEFAULT_TOLERANCES))

    @property
    def checked(self):
        """{clé de tolérance: valeur mesurée}."""
        return {key: getattr(self, key) for key in DEFAULT_TOLERANCES}

    @property
    def passed(self):
        """Vrai ssi chaque quantité est finie et ≤ son seuil."""
        return all(
            math.isfinite(value) and value <= self.tolerances[key]
            for key, value in self.checked.items()
        )

    def failures(self):
        return sorted(k for k, v in self.checked.items()
                      if not (math.isfinite(v) and v <= self.tolerances[k]))

    def worst_ratio(self):
        return max(value / self.tolerances[key] for key, value in self.checked.items())

    def to_dict(self):
        out = {}
        for name in REPORT_FIELDS:
            if name == 'pass':
                out[name] = self.passed
            elif name == 'tolerances':
                out[name] = {k: self.tolerances[k] for k in DEFAULT_TOLERANCES}
            else:
                out[name] = float(getattr(self, name))
        return out


# ============================================================
#  APPLICATION INVERSE φ(ω)
# ============================================================

def wrap_angle(d):
    """Ramène une différence d'angles dans (−π, π]."""
    r = np.remainder(np.asarray(d, dtype=float) + math.pi, TWO_PI) - math.pi
    r = np.where(r == -math.pi, math.pi, r)
    return r.item() if np.ndim(d) == 0 else r


def phi_of_omega(omega, rho0):
    """φ(ω) = ∫ρ₀(x)(1/i)[ln(ω−x−i/2) − ln(ω−x+i/2)]dx (défini modulo 2π).

    CutError sur les coupures |Re ω| ≤ support, Im ω = ±1/2.
    """
    w = np.atleast_1d(np.asarray(omega, dtype=complex))
    on_cut = (np.abs(np.abs(w.imag) - 0.5) <= CUT_TOLERANCE) & (np.abs(w.real) <= rho0.support)
    if np.any(on_cut):
        raise CutError("ω sur une coupure de φ(ω)")
    d = w[:, None] - rho0.nodes[None, :]
    kernel = (np.log(d - 0.5j) - np.log(d + 0.5j)) / 1j
    phi = kernel @ (rho0.weights * rho0.values)
    return phi.item() if np.ndim(omega) == 0 else phi


def inverse_map_residual(params, rho0):
    """max |φ(ω(λ)) − λ| (mod 2π) sur 12 λ réels et 8 λ avec Im λ = ±a/2."""
    real_points = np.linspace(0.5, TWO_PI - 0.5, REAL_INVERSE_POINTS)
    half = COMPLEX_INVERSE_POINTS // 2
    t = np.linspace(0.6, TWO_PI - 0.6, half)
    complex_points = np.concatenate([t + 0.5j * params.a, t - 0.5j * params.a])
    lam = np.concatenate([real_points.astype(complex), complex_points])
    phi = np.asarray(phi_of_omega(omega_of_phi(lam, params), rho0))
    diff = phi - lam
    return float(np.max(np.abs(wrap_angle(diff.real) + 1j * diff.imag)))


# ============================================================
#  RÉSIDUS
# ============================================================

def residual_eq12(rho, a, points=EQ12_POINTS):
    """max |a − (1/2)∫ρ(x)γ(ω−x)dx| sur une grille intérieure au support."""
    omega = rho.support * np.linspace(-0.95, 0.95, points)
    return float(np.max(np.abs(a - 0.5 * apply_kernel(rho, omega))))


def residual_eq13(params, rho0, omega=None, omega0=None):
    """max |1/(dω/dφ)(φ(ω)) − ∫ρ₀(x)/((ω−x)²+1/4)dx| sur une grille réelle."""
    if omega is None:
        reach = 2.0 * (omega0 if omega0 is not None else rho0.support) + 2.0
        omega = np.linspace(-reach, reach, EQ13_POINTS)
    omega = np.atleast_1d(np.asarray(omega, dtype=float))
    lhs = TWO_PI * np.asarray(sigma_exact(omega, params))
    d = omega[:, None] - rho0.nodes[None, :]
    rhs = (rho0.weights * rho0.values / (d * d + 0.25)).sum(axis=1)
    return float(np.max(np.abs(lhs - rhs)))


def residual_eq13_at_zero(params, rho0):
    """Côté gauche fermé en ω = 0 : π²/(K·E) contre la quadrature."""
    lhs = math.pi ** 2 / (params.bigK * params.bigE)
    rhs = float(np.sum(rho0.weights * rho0.values / (rho0.nodes ** 2 + 0.25)))
    return abs(lhs - rhs)


def inverse_slope_check(params, omega):
    """1/(dω/dφ)(φ(ω)) par les deux formes (θ et sn) : écart maximal."""
    phi = phi_of_omega_real(omega, params)
    theta = np.real(domega_dphi(phi, params, method='theta'))
    sn = np.asarray(domega_dphi(phi, params, method='sn'))
    return float(np.max(np.abs(1.0 / theta - 1.0 / sn)))


def compress_density(rho0, scale):
    """ρ₀ comprimée sur scale·support en conservant la masse (contrôle négatif)."""
    if not scale > 0:
        raise DomainError(f"facteur d'échelle {scale!r} doit être > 0")
    if scale == 1.0:
        return rho0
    return DensityOnGrid(
        support=rho0.support * scale, nodes=rho0.nodes * scale,
        weights=rho0.weights * scale, values=rho0.values / scale, grid=rho0.grid,
    )


# ============================================================
#  ORCHESTRATION
# ============================================================

def _continuum_checks(params, edge, sol, rho0, config):
    reach = 4.0 * edge.omega0 + 2.0
    omega = np.linspace(-reach, reach, SIGMA_POINTS)
    sup_sigma = float(np.max(np.abs(sigma_bethe(omega, sol) - sigma_exact(omega, params))))

    reduced = sol.rho.reduced_nodes()
    sup_rho = float(np.max(np.abs(sol.rho.values - rho0_at(reduced * edge.omega0, params, edge))))

    return {
        'sup_sigma_diff': sup_sigma,
        'sup_rho_diff': sup_rho,
        'residual_eq12': residual_eq12(compress_density(rho0, config.rho0_support_scale), params.a),
        'residual_eq13': residual_eq13(params, rho0, omega0=edge.omega0),
        'inverse_map_residual': inverse_map_residual(params, rho0),
        'a_minus_omega0': abs(sol.bigA - edge.omega0),
    }


def _config_for(a, config):
    """Configuration de la constante a ; ConfigError si config.a diffère."""
    if config is None:
        return RunConfig(a=a)
    if float(config.a) != float(a):
        raise ConfigError(f"a={a} ne correspond pas à la configuration (a={config.a})")
    return config


def run_verification(a, config=None):
    """Exécute toute la chaîne de vérification pour la constante a."""
    config = _config_for(a, config).validate()
    params = modulus_from_a(a, config.series_epsilon)
    edge = find_band_edge(params)
    _log.info("a=%s : k=%.6g, Ω₀=%.17g", a, params.k, edge.omega0)
    sol = solve_for_a(a * config.perturb_a, config.nodes, config.grid)
    _log.info("côté Bethe (%s, n=%d) : A=%.17g", config.grid, config.nodes, sol.bigA)
    rho0 = rho0_extract(params, config.nodes, edge)
    checks = _continuum_checks(params, edge, sol, rho0, config)

    spec = LaxMatrixSpec(n=config.matrix_n, a=a, lam=config.lam, boundary=config.boundary)
    spectrum = eigenvalues_hermitian(build_lax(spec), spec=spec)
    ks = kolmogorov_distance(spectrum, params)
    _log.info("matrice de Lax N=%d (%s) : distance KS=%.3e", config.matrix_n, config.boundary, ks)

    report = ComparisonReport(
        a=float(a), bigA=sol.bigA, omega0=edge.omega0,
        ks_distance_finite_n=ks, tolerances=dict(config.tolerances), **checks,
    )
    _audit.info("vérification a=%s nodes=%d N=%d : pass=%s pire ratio=%.3e échecs=%s",
                a, config.nodes, config.matrix_n, report.passed, report.worst_ratio(), report.failures())
    return report


@dataclass(frozen=True)
class RefinementStudy:
    """Résidus à plusieurs tailles de grille (ordre croissant)."""
    a: float
    nodes: tuple
    rows: tuple

    def decreasing(self, key):
        values = [row[key] for row in self.rows]
        return all(v2 < v1 for v1, v2 in zip(values, values[1:]))


def refinement_study(a, nodes_list, config=None, keys=None):
    """Relance les vérifications continues pour chaque n de nodes_list."""
    config = _config_for(a, config)
    params = modulus_from_a(a, config.series_epsilon)
    edge = find_band_edge(params)
    nodes = tuple(sorted(int(n) for n in nodes_list))
    rows = []
    for n in nodes:
        sol = solve_for_a(a, n, config.grid)
        rho0 = rho0_extract(params, n, edge)
        checks = _continuum_checks(params, edge, sol, rho0, config)
        rows.append({k: checks[k] for k in (keys or checks)})
        _log.info("raffinement a=%s n=%d : %s", a, n, rows[-1])
    return RefinementStudy(a=float(a), nodes=nodes, rows=tuple(rows))
