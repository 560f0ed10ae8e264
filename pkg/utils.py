"""
LaxBethe — Fonctions utilitaires partagées (grilles, CSV, pool de threads).
"""

from __future__ import annotations

import io
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from datetime import datetime

import numpy as np

from config import thread_count

_log = logging.getLogger(__name__)


# ============================================================
#  GRILLES DE QUADRATURE
# ============================================================

def chebyshev_nodes(n):
    """Nœuds de Gauss–Tchebychev de première espèce, triés croissants.

    Retourne (s, poids) avec s_j = −cos((2j−1)π/2n) et le poids commun π/n :
    ∫_{−1}^{1} f(s) ds/√(1−s²) ≈ (π/n) Σ f(s_j).
    """
    j = np.arange(1, n + 1)
    s = -np.cos((2 * j - 1) * math.pi / (2 * n))
    return s, math.pi / n


def uniform_nodes(support, n):
    """n nœuds intérieurs équidistants de [−support, support] et leur pas."""
    h = 2.0 * support / (n + 1)
    return -support + h * (np.arange(n) + 1.0), h


# ============================================================
#  POOL DE THREADS
# ============================================================

def parallel_map(fn, chunks):
    """Applique fn à chaque morceau, en parallèle si LAXBETHE_THREADS > 1.

    L'ordre des résultats suit celui des morceaux.
    """
    chunks = list(chunks)
    workers = min(thread_count(), len(chunks)) if chunks else 1
    if workers <= 1:
        return [fn(c) for c in chunks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, chunks))


def split_indices(n, parts):
    """Découpe range(n) en `parts` tranches contiguës."""
    parts = max(1, min(parts, n))
    return [idx for idx in np.array_split(np.arange(n), parts) if idx.size]


# ============================================================
#  FORMATAGE CSV / JSON
# ============================================================

def format_float(x):
    """17 chiffres significatifs : sortie bit-reproductible."""
    return '%.17g' % float(x)


def csv_text(header, rows, footer=None):
    """Construit un document CSV (en-tête, lignes, commentaires '# ...')."""
    output = io.StringIO()
    output.write(','.join(header) + '\n')
    for row in rows:
        output.write(','.join(v if isinstance(v, str) else format_float(v) for v in row) + '\n')
    for key, value in (footer or []):
        rendered = value if isinstance(value, str) else format_float(value)
        output.write(f'# {key}={rendered}\n')
    return output.getvalue()


def csv_response(text, filename_prefix):
    """Helper Flask : Response CSV en pièce jointe."""
    from flask import Response
    return Response(
        text,
        mimetype='text/csv; charset=utf-8',
        headers={
            'Content-Disposition':
                f'attachment; filename={filename_prefix}_{datetime.now().strftime("%Y%m%d_%H%M%S")}.csv'
        }
    )
