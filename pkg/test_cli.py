"""Tests de la ligne de commande laxbethe (main(argv), sorties et codes de retour)."""
import io
import json
import math
import os
import sys
import tempfile
from contextlib import redirect_stderr, redirect_stdout
sys.path.insert(0, '.')

errors = []
ok = 0


def check(name, result, expected):
    global ok
    if result == expected:
        ok += 1
    else:
        errors.append(f'{name}: got {result!r}, expected {expected!r}')


def check_close(name, result, expected, tol):
    global ok
    if abs(result - expected) <= tol:
        ok += 1
    else:
        errors.append(f'{name}: got {result!r}, expected {expected!r} (±{tol:g})')


def run(*argv):
    """(code, stdout, stderr) d'un appel à main."""
    out, err = io.StringIO(), io.StringIO()
    with redirect_stdout(out), redirect_stderr(err):
        code = main(list(argv))
    return code, out.getvalue(), err.getvalue()


print('=' * 60)
print('  LaxBethe — Tests de la ligne de commande')
print('=' * 60)

from cli import EXIT_FAIL, EXIT_OK, EXIT_USAGE, main, symmetric_grid
from elliptic import modulus_from_a

# ═══════════════════════════════════════════════════════
#  1. exact-density
# ═══════════════════════════════════════════════════════
print('\n[1] exact-density...')
code, out, err = run('exact-density', '--a', '1', '--samples', '3')
lines = out.splitlines()
check('code 0', code, EXIT_OK)
check('en-tête', lines[0], 'omega,sigma')
check('3 lignes', len(lines), 4)
check('ω extrêmes', [lines[1].split(',')[0], lines[3].split(',')[0]], ['-5', '5'])
check('ω central', lines[2].split(',')[0], '0')
p = modulus_from_a(1.0)
check_close('σ(0) = π/(2KE)', float(lines[2].split(',')[1]), math.pi / (2 * p.bigK * p.bigE), 1e-10)
check('colonne σ palindromique', lines[1].split(',')[1], lines[3].split(',')[1])

code, out, _ = run('exact-density', '--samples', '1')
check('samples=1 : ω = 0', out.splitlines()[1].split(',')[0], '0')
grid = symmetric_grid(2.0, 7)
check('grille antisymétrique', (grid + grid[::-1]).tolist(), [0.0] * 7)

# ═══════════════════════════════════════════════════════
#  2. lax / bethe / band-edge
# ═══════════════════════════════════════════════════════
print('[2] lax, bethe, band-edge...')
code, out, _ = run('lax', '--mode', 'asymptotic', '--matrix-n', '2')
lines = out.splitlines()
check('asymptotique : code 0', code, EXIT_OK)
check('asymptotique : en-tête', lines[0], 'index,eigenvalue')
check('asymptotique : indices', [line.split(',')[0] for line in lines[1:]], ['0', '1'])
check_close('asymptotique N=2 : −1', float(lines[1].split(',')[1]), -1.0, 1e-12)
check_close('asymptotique N=2 : +1', float(lines[2].split(',')[1]), 1.0, 1e-12)

code, out, _ = run('lax', '--matrix-n', '40', '--a', '0.8')
values = [float(line.split(',')[1]) for line in out.splitlines()[1:]]
check('Toeplitz : 40 valeurs', len(values), 40)
check('Toeplitz : triées', values == sorted(values), True)
check_close('Toeplitz : somme nulle', sum(values), 0.0, 1e-9)

code, out, _ = run('lax', '--matrix-n', '16', '--boundary', 'periodic')
check('périodique : code 0', code, EXIT_OK)
check_close('périodique : μ₀ = 0 présent', min(abs(float(l.split(',')[1])) for l in out.splitlines()[1:]), 0.0, 1e-15)

code, out, _ = run('lax', '--mode', 'histogram', '--matrix-n', '300', '--bins', '12', '--omega-max', '4')
lines = out.splitlines()
rows = [line.split(',') for line in lines[1:] if not line.startswith('#')]
check('histogramme : code 0', code, EXIT_OK)
check('histogramme : en-tête', lines[0], 'omega,density')
check('histogramme : 12 cellules', len(rows), 12)
check_close('histogramme : premier centre', float(rows[0][0]), -4.0 + 4.0 / 12, 1e-12)
check_close('histogramme : masse 1', sum(float(r[1]) for r in rows) * 8.0 / 12, 1.0, 1e-12)
footer = dict(line[2:].split('=', 1) for line in lines if line.startswith('# '))
check('histogramme : pied de page', footer, {'bins': '12', 'matrix_n': '300', 'boundary': 'open'})

# balayage des petites tailles (diagonalisation de Jacobi)
sweep_codes = {n: run('lax', '--matrix-n', str(n), '--a', '0.7')[0] for n in range(2, 65)}
check('Jacobi N = 2..64 : code 0 partout', [n for n, c in sweep_codes.items() if c != EXIT_OK], [])

code, out, _ = run('bethe', '--a', '1', '--nodes', '32')
lines = out.splitlines()
check('bethe : code 0', code, EXIT_OK)
check('bethe : en-tête', lines[0], 'x,rho')
footer = dict(line[2:].split('=', 1) for line in lines if line.startswith('# '))
check('bethe : pied de page', sorted(footer), ['A', 'a', 'grid', 'nodes'])
check_close('bethe : a retrouvé', float(footer['a']), 1.0, 1e-8)
check('bethe : 32 lignes', len([line for line in lines[1:] if not line.startswith('#')]), 32)

code, out, _ = run('band-edge', '--a', '2')
doc = json.loads(out)
check('band-edge : code 0', code, EXIT_OK)
check('band-edge : clés', list(doc), ['a', 'q', 'k', 'K', 'E', 'phi_min', 'omega0'])
check_close('band-edge : q = e^-a', doc['q'], math.exp(-2.0), 1e-16)

code, out, _ = run('band-edge', '--a', '0.1')
check('band-edge a=0.1 : code 0', code, EXIT_OK)
check('band-edge a=0.1 : Ω₀ > 0', json.loads(out)['omega0'] > 0, True)
code, out, err = run('band-edge', '--a', '13')
check('band-edge a=13 : code 1', code, EXIT_FAIL)
check('band-edge a=13 : DomainError', 'DomainError' in err, True)
code, out, err = run('band-edge', '--a', '0.001')
check('band-edge a=0.001 : code 1', code, EXIT_FAIL)
check('band-edge a=0.001 : plage citée', 'hors de la plage' in err, True)

# ═══════════════════════════════════════════════════════
#  3. verify
# ═══════════════════════════════════════════════════════
print('[3] verify...')
code, out, _ = run('verify', '--a', '1', '--nodes', '200', '--matrix-n', '1000')
doc = json.loads(out)
check('verify : code 0', code, EXIT_OK)
check('verify : pass', doc['pass'], True)
check('verify : ordre des clés', list(doc), [
    'a', 'bigA', 'omega0', 'sup_sigma_diff', 'sup_rho_diff', 'residual_eq12',
    'residual_eq13', 'inverse_map_residual', 'ks_distance_finite_n',
    'a_minus_omega0', 'tolerances', 'pass',
])

code, out, _ = run('verify', '--nodes', '200', '--matrix-n', '400', '--tolerance', 'ks_distance_finite_n=1e-12')
check('seuil serré : code 1', code, EXIT_FAIL)
check('seuil serré : pass=false', json.loads(out)['pass'], False)
check('seuil serré : tolérance reportée', json.loads(out)['tolerances']['ks_distance_finite_n'], 1e-12)

code, out, _ = run('verify', '--nodes', '200', '--matrix-n', '400', '--tolerance', 'sup_sigma_diff=1e-12')
check('σ serré : code 1', code, EXIT_FAIL)
check('σ serré : pass=false', json.loads(out)['pass'], False)

code, out, _ = run('verify', '--nodes', '200', '--matrix-n', '400', '--perturb-a', '1.01')
check('a perturbé : code 1', code, EXIT_FAIL)

# ═══════════════════════════════════════════════════════
#  4. Erreurs d'usage
# ═══════════════════════════════════════════════════════
print('[4] Erreurs d\'usage...')
for label, argv in [
    ('tolérance mal formée', ('verify', '--tolerance', 'sup_sigma_diff')),
    ('tolérance inconnue', ('verify', '--tolerance', 'foo=1')),
    ('a négatif', ('band-edge', '--a', '-1')),
    ('commande inconnue', ('frobnicate',)),
    ('mode inconnu', ('lax', '--mode', 'banded')),
    ('entier invalide', ('bethe', '--nodes', 'dix')),
]:
    code, out, err = run(*argv)
    check(f'{label} : code 2', code, EXIT_USAGE)
    check(f'{label} : stdout vide', out, '')
    check(f'{label} : message', err != '', True)

# ═══════════════════════════════════════════════════════
#  5. Fichier de sortie et déterminisme
# ═══════════════════════════════════════════════════════
print('[5] --out et déterminisme...')
with tempfile.TemporaryDirectory() as tmp:
    path = os.path.join(tmp, 'sigma.csv')
    code, out, _ = run('exact-density', '--samples', '11', '--out', path)
    check('--out : code 0', code, EXIT_OK)
    check('--out : stdout vide', out, '')
    with open(path, encoding='utf-8') as f:
        written = f.read()
    _, again, _ = run('exact-density', '--samples', '11')
    check('déterministe et identique au fichier', written, again)

    code, out, err = run('exact-density', '--samples', '3', '--out', os.path.join(tmp, 'absent', 'x.csv'))
    check('chemin non inscriptible : code 2', code, EXIT_USAGE)
    check('chemin non inscriptible : message', 'écriture impossible' in err, True)

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
