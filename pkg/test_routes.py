"""Test complet de toutes les routes LaxBethe (API JSON et exports CSV)."""
import sys
sys.path.insert(0, '.')
from app import create_app

app = create_app(testing=True)
c = app.test_client()
errors = []
ok = 0


def get(url, expect=200, label=None):
    """GET url ; compte l'appel si le code attendu est obtenu et retourne la réponse."""
    global ok
    label = label or f'GET {url}'
    try:
        r = c.get(url)
        if r.status_code != expect:
            errors.append(f'{label}: got {r.status_code}, expected {expect}')
        else:
            ok += 1
        return r
    except Exception as e:
        errors.append(f'{label}: EXCEPTION {e}')
        return None


def check(name, result, expected):
    global ok
    if result == expected:
        ok += 1
    else:
        errors.append(f'{name}: got {result!r}, expected {expected!r}')


print('=' * 60)
print('  LaxBethe — Test de toutes les routes')
print('=' * 60)

# ═══════════════════════════════════════════════════════
#  1. API JSON
# ═══════════════════════════════════════════════════════
print('\n[1] API JSON...')
r = get('/api/health')
check('health', r.get_json(), {'status': 'ok'})

r = get('/api/band-edge?a=2')
doc = r.get_json()
check('band-edge : clés ordonnées', list(doc), ['a', 'q', 'k', 'K', 'E', 'phi_min', 'omega0'])
check('band-edge : a', doc['a'], 2.0)

r = get('/api/verify?a=1&nodes=200&matrix_n=1000')
doc = r.get_json()
check('verify : pass', doc['pass'], True)
check('verify : dernière clé', list(doc)[-1], 'pass')

r = get('/api/verify?nodes=64&matrix-n=200&tolerance=ks_distance_finite_n%3D1e-12', label='verify en échec reste 200')
check('verify en échec : pass=false', r.get_json()['pass'], False)

# ═══════════════════════════════════════════════════════
#  2. Exports CSV
# ═══════════════════════════════════════════════════════
print('[2] Exports CSV...')
for url, header, prefix in [
    ('/export/exact-density?samples=5', 'omega,sigma', 'laxbethe_sigma_exacte_'),
    ('/export/bethe?nodes=32', 'x,rho', 'laxbethe_bethe_'),
    ('/export/lax?matrix_n=20', 'index,eigenvalue', 'laxbethe_lax_toeplitz_'),
    ('/export/lax?mode=asymptotic&matrix_n=2', 'index,eigenvalue', 'laxbethe_lax_asymptotic_'),
    ('/export/lax?mode=histogram&matrix_n=200&bins=10', 'omega,density', 'laxbethe_lax_histogram_'),
]:
    r = get(url)
    if r is None or r.status_code != 200:
        continue
    check(f'{url} : CSV', r.mimetype, 'text/csv')
    check(f'{url} : en-tête', r.get_data(as_text=True).splitlines()[0], header)
    disposition = r.headers.get('Content-Disposition', '')
    check(f'{url} : pièce jointe', disposition.startswith(f'attachment; filename={prefix}'), True)

r = get('/export/exact-density?samples=5')
check('exact-density : 5 lignes', len(r.get_data(as_text=True).splitlines()), 6)

r = get('/export/lax?mode=histogram&matrix_n=200&bins=10')
rows = [line for line in r.get_data(as_text=True).splitlines()[1:] if not line.startswith('#')]
check('histogramme : 10 cellules', len(rows), 10)

# ═══════════════════════════════════════════════════════
#  3. Paramètres invalides → 400 JSON
# ═══════════════════════════════════════════════════════
print('[3] Paramètres invalides...')
for url in [
    '/api/band-edge?a=-1',
    '/api/band-edge?a=abc',
    '/api/band-edge?bogus=1',
    '/api/verify?tolerance=sup_sigma_diff',
    '/api/verify?tolerance=foo%3D1',
    '/export/bethe?nodes=4',
    '/export/bethe?grid=gauss',
    '/export/lax?mode=banded',
    '/export/lax?boundary=twisted',
]:
    r = get(url, expect=400)
    if r is not None and r.status_code == 400:
        check(f'{url} : type d\'erreur', r.get_json()['type'], 'ConfigError')

# ═══════════════════════════════════════════════════════
#  4. Headers de sécurité et 404
# ═══════════════════════════════════════════════════════
print('[4] Headers et 404...')
r = get('/api/health')
check('nosniff', r.headers.get('X-Content-Type-Options'), 'nosniff')
check('X-Frame-Options', r.headers.get('X-Frame-Options'), 'SAMEORIGIN')
check('CSP', "default-src 'none'" in r.headers.get('Content-Security-Policy', ''), True)
r = get('/api/inexistant', expect=404)
check('404 en JSON', r.get_json(), {'error': 'ressource introuvable'})
get('/', expect=404, label='pas de page d\'accueil')

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
