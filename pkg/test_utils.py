"""Tests unitaires pour les fonctions utilitaires et la configuration de LaxBethe."""
import math
import os
import sys
sys.path.insert(0, '.')

import numpy as np

errors = []
ok = 0


def check(name, result, expected):
    global ok
    if result == expected:
        ok += 1
    else:
        errors.append(f'{name}: got {result!r}, expected {expected!r}')


def check_raises(name, exc_type, fn, *args, **kwargs):
    global ok
    try:
        fn(*args, **kwargs)
    except exc_type:
        ok += 1
    except Exception as e:
        errors.append(f'{name}: got {type(e).__name__}({e}), expected {exc_type.__name__}')
    else:
        errors.append(f'{name}: no exception, expected {exc_type.__name__}')


print('=' * 60)
print('  LaxBethe — Tests unitaires utilitaires')
print('=' * 60)

# ═══════════════════════════════════════════════════════
#  1. chebyshev_nodes / uniform_nodes
# ═══════════════════════════════════════════════════════
print('\n[1] Grilles de quadrature...')
from utils import chebyshev_nodes, uniform_nodes

s, w = chebyshev_nodes(16)
check('16 nœuds', s.size, 16)
check('nœuds croissants', bool(np.all(np.diff(s) > 0)), True)
check('nœuds intérieurs', bool(np.all(np.abs(s) < 1)), True)
check('nœuds symétriques', float(np.max(np.abs(s + s[::-1]))) < 1e-15, True)
check('poids π/n', w, math.pi / 16)
# ∫ s² ds/√(1−s²) = π/2, exact pour Gauss–Tchebychev
check('moment 2 exact', abs(w * float(np.sum(s * s)) - math.pi / 2) < 1e-14, True)

x, h = uniform_nodes(2.0, 7)
check('pas', h, 0.5)
check('premier nœud', x[0], -1.5)
check('dernier nœud', x[-1], 1.5)
check('nœud central', x[3], 0.0)

# ═══════════════════════════════════════════════════════
#  2. format_float / csv_text
# ═══════════════════════════════════════════════════════
print('[2] Formatage CSV...')
from utils import csv_text, format_float

check('format 0.1', format_float(0.1), '0.10000000000000001')
check('format 1', format_float(1), '1')
check('format -0.5', format_float(-0.5), '-0.5')

doc = csv_text(['x', 'rho'], [(0.5, 1.0), (-0.25, 2.0)], [('A', 0.75), ('grid', 'chebyshev')])
lines = doc.splitlines()
check('en-tête', lines[0], 'x,rho')
check('ligne 1', lines[1], '0.5,1')
check('ligne 2', lines[2], '-0.25,2')
check('pied A', lines[3], '# A=0.75')
check('pied texte', lines[4], '# grid=chebyshev')
check('fin de ligne', doc.endswith('\n'), True)
check('colonne texte conservée', csv_text(['index', 'v'], [('3', 1.5)]).splitlines()[1], '3,1.5')

# ═══════════════════════════════════════════════════════
#  3. Pool de threads
# ═══════════════════════════════════════════════════════
print('[3] parallel_map / split_indices...')
from config import thread_count
from errors import ConfigError
from utils import parallel_map, split_indices

parts = split_indices(10, 3)
check('3 tranches', len(parts), 3)
check('couverture complète', np.concatenate(parts).tolist(), list(range(10)))
check('plus de tranches que d\'éléments', len(split_indices(2, 5)), 2)

os.environ.pop('LAXBETHE_THREADS', None)
check('threads par défaut', thread_count(), 1)
check('séquentiel', parallel_map(lambda c: c * 2, [1, 2, 3]), [2, 4, 6])

os.environ['LAXBETHE_THREADS'] = '3'
check('threads depuis l\'env', thread_count(), 3)
check('ordre conservé en parallèle', parallel_map(lambda c: c * c, range(8)), [c * c for c in range(8)])
os.environ['LAXBETHE_THREADS'] = 'beaucoup'
check_raises('threads non numérique', ConfigError, thread_count)
os.environ['LAXBETHE_THREADS'] = '0'
check_raises('threads = 0', ConfigError, thread_count)
os.environ.pop('LAXBETHE_THREADS', None)

# ═══════════════════════════════════════════════════════
#  4. parse_tolerance / RunConfig
# ═══════════════════════════════════════════════════════
print('[4] Configuration...')
from config import DEFAULT_TOLERANCES, RunConfig, get_param, parse_tolerance

check('parse tolérance', parse_tolerance('sup_sigma_diff=1e-12'), ('sup_sigma_diff', 1e-12))
check('parse avec espaces', parse_tolerance(' residual_eq12 = 2e-6 '), ('residual_eq12', 2e-6))
check_raises('sans =', ConfigError, parse_tolerance, 'sup_sigma_diff')
check_raises('clé inconnue', ConfigError, parse_tolerance, 'foo=1')
check_raises('valeur non numérique', ConfigError, parse_tolerance, 'sup_rho_diff=abc')
check_raises('valeur négative', ConfigError, parse_tolerance, 'sup_rho_diff=-1')
check_raises('valeur nan', ConfigError, parse_tolerance, 'sup_rho_diff=nan')

cfg = RunConfig()
check('défauts valides', cfg.validate() is cfg, True)
check('défaut nodes', cfg.nodes, 400)
check('défaut matrix_n', cfg.matrix_n, 1000)
check('défaut bins', cfg.bins, 101)
check('tolérances complètes', sorted(cfg.tolerances), sorted(DEFAULT_TOLERANCES))

tight = cfg.with_tolerances({'sup_sigma_diff': 1e-12})
check('surcharge appliquée', tight.tolerances['sup_sigma_diff'], 1e-12)
check('original intact', cfg.tolerances['sup_sigma_diff'], DEFAULT_TOLERANCES['sup_sigma_diff'])

check_raises('a négatif', ConfigError, RunConfig(a=-1.0).validate)
check_raises('a infini', ConfigError, RunConfig(a=math.inf).validate)
check_raises('nodes trop petit', ConfigError, RunConfig(nodes=8).validate)
check_raises('bins = 1', ConfigError, RunConfig(bins=1).validate)
check_raises('bord inconnu', ConfigError, RunConfig(boundary='twisted').validate)
check_raises('grille inconnue', ConfigError, RunConfig(grid='gauss').validate)
check_raises('tolérance manquante', ConfigError, RunConfig(tolerances={'sup_sigma_diff': 1e-5}).validate)

os.environ['LAXBETHE_SOMETHING'] = ' 42 '
check('get_param env', get_param('something', '0'), '42')
os.environ.pop('LAXBETHE_SOMETHING')
check('get_param défaut', get_param('something', '0'), '0')

# ═══════════════════════════════════════════════════════
#  5. csv_response
# ═══════════════════════════════════════════════════════
print('[5] csv_response...')
from app import create_app
from utils import csv_response

with create_app(testing=True).app_context():
    resp = csv_response('x,rho\n', 'laxbethe_test')
    check('mimetype CSV', resp.mimetype, 'text/csv')
    disposition = resp.headers['Content-Disposition']
    check('pièce jointe', disposition.startswith('attachment; filename=laxbethe_test_'), True)
    check('extension .csv', disposition.endswith('.csv'), True)

# ═══════════════════════════════════════════════════════
#  RÉSULTATS
# ═══════════════════════════════════════════════════════
total = ok + len(errors)
print(f'\n{"=" * 60}')
print(f'  RÉSULTAT : {ok}/{total} OK, {len(errors)} ERREUR(S)')
print(f'{"=" * 60}')
for e in errors:
    print(f'  FAIL: {e}')
if not errors:
    print('  OK - Tous les tests passent !')
sys.exit(1 if errors else 0)
