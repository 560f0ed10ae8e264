"""
LaxBethe — Interface en ligne de commande.

Commandes :
    exact-density   σ(ω) exacte sur une grille uniforme       (CSV omega,sigma)
    bethe           densité ρ(x) de la solution de Bethe       (CSV x,rho + # A= # a=)
    lax             spectre de la matrice de Lax (÷ 2λ)         (CSV index,eigenvalue)
    verify          rapport de comparaison complet              (JSON, code de sortie)
    band-edge       bord de bande φ_min, Ω₀                     (JSON)
    serve           API HTTP (waitress)

Codes de sortie : 0 succès / vérification réussie, 1 échec de calcul ou
de vérification, 2 erreur d'usage, de configuration ou d'écriture.

Usage :
    python cli.py verify --a 1 --nodes 800
    python cli.py exact-density --a 2 --samples 401 --out sigma.csv
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

import numpy as np

from bethe import solve_for_a
from config import BOUNDARIES, DEFAULT_TOLERANCES, GRIDS, RunConfig, parse_tolerance
from elliptic import modulus_from_a
from errors import ConfigError, LaxBetheError
from exact_spectrum import find_band_edge, sigma_exact
from lax import (
    LaxMatrixSpec, asymptotic_eigenvalues, build_lax, circulant_spectrum, eigenvalues_hermitian,
    empirical_density,
)
from utils import csv_text
from verify import run_verification

_log = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
LAX_MODES = ('toeplitz', 'asymptotic', 'histogram')


# ============================================================
#  DOCUMENTS (partagés avec les routes HTTP)
# ============================================================

def symmetric_grid(omega_max, samples):
    """Grille uniforme de [−omega_max, omega_max], antisymétrique au bit près."""
    if samples == 1:
        return np.zeros(1)
    grid = np.linspace(-omega_max, omega_max, samples)
    return 0.5 * (grid - grid[::-1])


def cmd_exact_density(config):
    """CSV omega,sigma de la densité exacte."""
    params = modulus_from_a(config.a, config.series_epsilon)
    omega = symmetric_grid(config.omega_max, config.samples)
    # σ est paire : on l'évalue sur |ω| pour une colonne palindromique
    sigma = np.atleast_1d(sigma_exact(np.abs(omega), params))
    return csv_text(['omega', 'sigma'], zip(omega, sigma))


def cmd_bethe(config):
    """CSV x,rho de la solution de Bethe, pied de page A et a."""
    sol = solve_for_a(config.a, config.nodes, config.grid)
    footer = [('A', sol.bigA), ('a', sol.a), ('nodes', str(sol.nodes_n)), ('grid', config.grid)]
    return csv_text(['x', 'rho'], sol.to_rows(), footer)


def lax_spectrum(config):
    """Spectre de la matrice de Lax (ouverte ou circulante) décrite par config."""
    spec = LaxMatrixSpec(n=config.matrix_n, a=config.a, lam=config.lam, boundary=config.boundary)
    if config.boundary == 'periodic':
        return circulant_spectrum(spec)
    return eigenvalues_hermitian(build_lax(spec), spec=spec)


def lax_eigenvalues(config, mode='toeplitz'):
    """Valeurs propres triées écrites par cmd_lax.

    'toeplitz' : matrice de Lax (ouverte ou circulante), divisées par 2λ ;
    'asymptotic' : matrice asymptotique à k_j = 0, valeurs brutes.
    """
    if mode == 'asymptotic':
        return asymptotic_eigenvalues(np.zeros(config.matrix_n), config.lam)
    if mode != 'toeplitz':
        raise ConfigError(f"mode inconnu : {mode!r}")
    return lax_spectrum(config).rescaled()


def cmd_lax(config, mode='toeplitz'):
    """CSV index,eigenvalue trié croissant ; mode 'histogram' : CSV omega,density."""
    if mode == 'histogram':
        density = empirical_density(lax_spectrum(config), config.bins, config.omega_max).histogram
        footer = [('bins', str(config.bins)), ('matrix_n', str(config.matrix_n)), ('boundary', config.boundary)]
        return csv_text(['omega', 'density'], zip(density.nodes, density.values), footer)
    values = lax_eigenvalues(config, mode)
    return csv_text(['index', 'eigenvalue'], ((str(i), v) for i, v in enumerate(values)))


def cmd_verify(config):
    """(document JSON, verdict) du rapport de comparaison."""
    report = run_verification(config.a, config)
    return json.dumps(report.to_dict(), indent=2, allow_nan=False) + '\n', report.passed


def band_edge_document(config):
    params = modulus_from_a(config.a, config.series_epsilon)
    edge = find_band_edge(params)
    doc = dict(params.to_dict())
    doc.pop('Kprime', None)
    doc.update(phi_min=edge.phi_min, omega0=edge.omega0)
    return doc


def cmd_band_edge(config):
    doc = band_edge_document(config)
    return json.dumps(doc, indent=2, allow_nan=False) + '\n'


# ============================================================
#  ARGUMENTS
# ============================================================

def _common_arguments():
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument('--a', type=float, default=1.0, help="constante de réseau a (q = e^{-a})")
    parent.add_argument('--nodes', type=int, default=400, help="nœuds de la grille de Nyström")
    parent.add_argument('--matrix-n', type=int, default=1000, help="taille N de la matrice de Lax")
    parent.add_argument('--bins', type=int, default=101, help="cellules de l'histogramme (lax --mode histogram)")
    parent.add_argument('--boundary', choices=BOUNDARIES, default='open')
    parent.add_argument('--lam', type=float, default=1.0, help="couplage λ")
    parent.add_argument('--omega-max', type=float, default=5.0)
    parent.add_argument('--samples', type=int, default=201)
    parent.add_argument('--series-epsilon', type=float, default=1e-16)
    parent.add_argument('--grid', choices=GRIDS, default='chebyshev')
    parent.add_argument('--tolerance', action='append', default=[], metavar='CLE=VALEUR',
                        help=f"seuil (répétable) parmi : {', '.join(DEFAULT_TOLERANCES)}")
    parent.add_argument('--perturb-a', type=float, default=1.0,
                        help="facteur appliqué à a côté Bethe seulement (contrôle négatif)")
    parent.add_argument('--rho0-support-scale', type=float, default=1.0,
                        help="compression du support de ρ₀ (contrôle négatif)")
    parent.add_argument('--out', default=None, help="fichier de sortie (défaut : stdout)")
    parent.add_argument('-v', '--verbose', action='store_true')
    return parent


def build_parser():
    parent = _common_arguments()
    parser = argparse.ArgumentParser(prog='laxbethe', description="Densité spectrale de Lax : Bethe vs θ-fonctions")
    sub = parser.add_subparsers(dest='command', required=True)
    sub.add_parser('exact-density', parents=[parent], help="σ(ω) exacte")
    sub.add_parser('bethe', parents=[parent], help="solution de l'équation de Bethe")
    lax_parser = sub.add_parser('lax', parents=[parent], help="spectre de la matrice de Lax")
    lax_parser.add_argument('--mode', choices=LAX_MODES, default='toeplitz')
    sub.add_parser('verify', parents=[parent], help="vérification complète")
    sub.add_parser('band-edge', parents=[parent], help="bord de bande Ω₀")
    serve = sub.add_parser('serve', parents=[parent], help="API HTTP")
    serve.add_argument('--host', default='127.0.0.1')
    serve.add_argument('--port', type=int, default=5000)
    serve.add_argument('--threads', type=int, default=4)
    return parser


def config_from_args(args):
    """RunConfig validée depuis les arguments ; ConfigError si invalide."""
    overrides = dict(parse_tolerance(t) for t in args.tolerance)
    config = RunConfig(
        a=args.a, nodes=args.nodes, matrix_n=args.matrix_n, bins=args.bins,
        boundary=args.boundary, lam=args.lam, omega_max=args.omega_max,
        samples=args.samples, series_epsilon=args.series_epsilon, grid=args.grid,
        out=args.out, perturb_a=args.perturb_a, rho0_support_scale=args.rho0_support_scale,
    )
    return config.with_tolerances(overrides).validate()


# ============================================================
#  POINT D'ENTRÉE
# ============================================================

def _write(text, path):
    if path is None:
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, 'w', encoding='utf-8', newline='\n') as f:
        f.write(text)


def _serve(args):
    from waitress import serve
    from app import create_app

    _log.info("API LaxBethe sur http://%s:%d (%d threads)", args.host, args.port, args.threads)
    serve(create_app(), host=args.host, port=args.port, threads=args.threads)
    return EXIT_OK


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_USAGE if e.code else EXIT_OK

    logging.basicConfig(
        stream=sys.stderr,
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format='%(asctime)s %(levelname)s %(name)s : %(message)s',
    )

    try:
        config = config_from_args(args)
    except ConfigError as e:
        print(f"laxbethe: erreur de configuration : {e}", file=sys.stderr)
        return EXIT_USAGE

    if args.command == 'serve':
        return _serve(args)

    status = EXIT_OK
    try:
        if args.command == 'exact-density':
            text = cmd_exact_density(config)
        elif args.command == 'bethe':
            text = cmd_bethe(config)
        elif args.command == 'lax':
            text = cmd_lax(config, args.mode)
        elif args.command == 'band-edge':
            text = cmd_band_edge(config)
        else:
            text, passed = cmd_verify(config)
            status = EXIT_OK if passed else EXIT_FAIL
    except ConfigError as e:
        print(f"laxbethe: erreur de configuration : {e}", file=sys.stderr)
        return EXIT_USAGE
    except LaxBetheError as e:
        _log.error("échec de %s : %s", args.command, e)
        print(f"laxbethe: {args.command} : {type(e).__name__} : {e}", file=sys.stderr)
        return EXIT_FAIL

    try:
        _write(text, config.out)
    except OSError as e:
        print(f"laxbethe: écriture impossible ({config.out}) : {e}", file=sys.stderr)
        return EXIT_USAGE
    return status


if __name__ == '__main__':
    sys.exit(main())
