"""
LaxBethe — Côté matriciel à N fini.

Matrice de Lax de Toeplitz L_jk = iλ·coth(a(j−k)), sa variante
périodique (circulante), la matrice asymptotique k_j δ_jk + iλ·sgn(j−k),
spectres, densités empiriques et distances de Kolmogorov à la densité
exacte (valeurs propres remises à l'échelle par 1/(2λ)).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.stats

from config import BOUNDARIES, thread_count
from errors import ConvergenceError, DomainError
from exact_spectrum import DensityOnGrid, cdf_exact
from utils import parallel_map, split_indices

_log = logging.getLogger(__name__)

JACOBI_MAX = 64
JACOBI_TOLERANCE = 1e-11
JACOBI_MAX_SWEEPS = 60
HERMITIAN_TOLERANCE = 1e-12


# ============================================================
#  TYPES
# ============================================================

@dataclass(frozen=True)
class LaxMatrixSpec:
    """Paramètres d'une matrice de Lax : N, a, λ, bord ('open' | 'periodic')."""
    n: int
    a: float
    lam: float = 1.0
    boundary: str = 'open'

    def validate(self):
        if not isinstance(self.n, (int, np.integer)) or self.n < 2:
            raise DomainError(f"N doit être un entier ≥ 2 (reçu {self.n!r})")
        if not (self.a > 0) or not math.isfinite(self.a):
            raise DomainError(f"a={self.a!r} doit être > 0")
        if not (self.lam > 0) or not math.isfinite(self.lam):
            raise DomainError(f"λ={self.lam!r} doit être > 0")
        if self.boundary not in BOUNDARIES:
            raise DomainError(f"bord inconnu : {self.boundary!r}")
        return self


@dataclass(frozen=True)
class Spectrum:
    """Valeurs propres triées (non remises à l'échelle) et leur matrice source."""
    eigenvalues: np.ndarray
    spec: LaxMatrixSpec | None = None

    @property
    def lam(self):
        return self.spec.lam if self.spec is not None else 1.0

    def rescaled(self):
        """Valeurs propres divisées par 2λ."""
        return self.eigenvalues / (2.0 * self.lam)

    def symmetry_residual(self):
        return float(np.max(np.abs(self.eigenvalues + self.eigenvalues[::-1])))


@dataclass(frozen=True)
class EmpiricalDensity:
    """Histogramme normalisé + fonction de répartition empirique."""
    histogram: DensityOnGrid
    sorted_values: np.ndarray
    levels: np.ndarray = field(repr=False)

    def cdf(self, omega):
        idx = np.searchsorted(self.sorted_values, np.asarray(omega, dtype=float), side='right')
        return idx / self.sorted_values.size


# ============================================================
#  CONSTRUCTION DES MATRICES
# ============================================================

def lax_coefficients(spec):
    """Coefficients réels antisymétriques c(d), d = 0..N−1 (c(0) = 0)."""
    spec.validate()
    n, a = spec.n, spec.a
    d = np.arange(1, n)
    c = np.zeros(n)
    if spec.boundary == 'open':
        c[1:] = 1.0 / np.tanh(a * d)
        return c
    # périodique : c(d) = coth(ad) − coth(a(N−d)) + 1 − 2d/N, moitié basse puis miroir
    half = np.arange(1, (n + 1) // 2)
    c[half] = 1.0 / np.tanh(a * half) - 1.0 / np.tanh(a * (n - half)) + 1.0 - 2.0 * half / n
    c[n - half] = -c[half]
    return c


def build_lax(spec):
    """Matrice de Lax hermitienne (Toeplitz ouverte ou circulante périodique)."""
    c = lax_coefficients(spec)
    if spec.boundary == 'open':
        column = 1j * spec.lam * c
        return scipy.linalg.toeplitz(column, -column)
    return scipy.linalg.circulant(1j * spec.lam * c)


def build_asymptotic_lax(k, lam=1.0):
    """(L_as)_jk = k_j δ_jk + iλ·sgn(j−k)."""
    k = np.asarray(k, dtype=float)
    if k.ndim != 1 or k.size < 1:
        raise DomainError("k doit être une suite non vide de réels")
    idx = np.arange(k.size)
    sign = np.sign(idx[:, None] - idx[None, :])
    return np.diag(k).astype(complex) + 1j * lam * sign


def asymptotic_eigenvalues(k, lam=1.0, tol=1e-14):
    """Valeurs propres de la matrice asymptotique par l'équation de comptage.

    (s + 1/2)π = Σ_j arctan2(λ, k_j − ω_s), branche dans (0, π), s = 0..N−1.
    """
    k = np.asarray(k, dtype=float)
    n = k.size
    if n < 1:
        raise DomainError("k doit être une suite non vide de réels")
    reach = 2.0 * n * lam + 1.0
    targets = (np.arange(n) + 0.5) * math.pi
    lo = np.full(n, k.min() - reach)
    hi = np.full(n, k.max() + reach)
    for _ in range(400):
        if np.max(hi - lo) <= tol * max(1.0, reach):
            break
        mid = 0.5 * (lo + hi)
        count = np.arctan2(lam, k[None, :] - mid[:, None]).sum(axis=1)
        below = count < targets
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    return np.sort(0.5 * (lo + hi))


# ============================================================
#  SOLVEUR DE JACOBI
# ============================================================

def _off_norm(m):
    """Norme de Frobenius de la partie hors diagonale, mesurée directement."""
    return float(np.linalg.norm(m - np.diag(np.diag(m))))


def jacobi_eigh(sym, tol=JACOBI_TOLERANCE, max_sweeps=JACOBI_MAX_SWEEPS):
    """Rotations de Jacobi cycliques sur une matrice réelle symétrique.

    Retourne (valeurs propres triées, vecteurs propres en colonnes).
    Travaille sur une copie privée.
    """
    a = np.array(sym, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DomainError("matrice carrée attendue")
    n = a.shape[0]
    v = np.eye(n)
    scale = max(float(np.linalg.norm(a)), np.finfo(float).tiny)

    for sweep in range(max_sweeps):
        if _off_norm(a) < tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.hypot(theta, 1.0))
                c = 1.0 / math.hypot(t, 1.0)
                s = t * c
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p], a[:, q] = c * col_p - s * col_q, s * col_p + c * col_q
                row_p, row_q = a[p, :].copy(), a[q, :].copy()
                a[p, :], a[q, :] = c * row_p - s * row_q, s * row_p + c * row_q
                a[p, q] = a[q, p] = 0.0
                vp, vq = v[:, p].copy(), v[:, q].copy()
                v[:, p], v[:, q] = c * vp - s * vq, s * vp + c * vq
    else:
        if _off_norm(a) >= tol * scale:
            raise ConvergenceError(f"Jacobi non convergé après {max_sweeps} balayages (n={n})")

    values = np.diag(a)
    order = np.argsort(values, kind='stable')
    _log.debug("Jacobi n=%d : %d balayages", n, sweep)
    return values[order], v[:, order]


def _check_hermitian(matrix):
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DomainError("matrice carrée attendue")
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    if m.size and float(np.max(np.abs(m - m.conj().T))) > HERMITIAN_TOLERANCE * scale:
        raise DomainError("matrice non hermitienne")
    return m


def _embedding(m):
    re, im = np.real(m), np.imag(m)
    return np.block([[re, -im], [im, re]])


def eigenvalues_hermitian(matrix, spec=None, jacobi_max=JACOBI_MAX):
    """Spectre réel trié : Jacobi sur le plongement réel jusqu'à jacobi_max, LAPACK au-delà."""
    m = _check_hermitian(matrix)
    n = m.shape[0]
    if n <= jacobi_max:
        doubled, _ = jacobi_eigh(_embedding(m))
        values = 0.5 * (doubled[0::2] + doubled[1::2])
    else:
        values = np.linalg.eigvalsh(m)
    return Spectrum(eigenvalues=np.sort(values), spec=spec)


def eigenpairs_hermitian(matrix, jacobi_max=JACOBI_MAX):
    """(valeurs propres, vecteurs propres complexes normés en colonnes)."""
    m = _check_hermitian(matrix)
    n = m.shape[0]
    if n > jacobi_max:
        return np.linalg.eigh(m)
    doubled, vectors = jacobi_eigh(_embedding(m))
    # chaque paire (u, v), (−v, u) donne le même vecteur complexe u + iv
    picked = vectors[:, 0::2]
    complex_vectors = picked[:n, :] + 1j * picked[n:, :]
    complex_vectors /= np.linalg.norm(complex_vectors, axis=0)
    return 0.5 * (doubled[0::2] + doubled[1::2]), complex_vectors


# ============================================================
#  SPECTRE CIRCULANT
# ============================================================

def circulant_modes(spec):
    """μ_s = −2λ Σ_{d < N/2} c(d)·sin(2πsd/N), indexé par s = 0..N−1."""
    if spec.boundary != 'periodic':
        raise DomainError("le spectre circulant exige un bord périodique")
    c = lax_coefficients(spec)
    n = spec.n
    d = np.arange(1, (n + 1) // 2)
    coeffs = c[d]

    def block(indices):
        phase = 2.0 * math.pi * np.outer(indices, d) / n
        return -2.0 * spec.lam * (np.sin(phase) @ coeffs)

    chunks = split_indices(n, thread_count())
    return np.concatenate(parallel_map(block, chunks))


def circulant_spectrum(spec):
    """Spectre trié de la circulante par somme de Fourier directe."""
    return Spectrum(eigenvalues=np.sort(circulant_modes(spec)), spec=spec)


# ============================================================
#  DENSITÉS EMPIRIQUES ET DISTANCES
# ============================================================

def empirical_density(spectrum, bins, omega_max=None):
    """Histogramme normalisé des valeurs propres remises à l'échelle.

    Les valeurs hors de [−omega_max, omega_max] sont rabattues dans les
    cellules extrêmes (masse totale 1).
    """
    if not isinstance(bins, (int, np.integer)) or bins < 2:
        raise DomainError(f"au moins 2 cellules requises (reçu {bins!r})")
    values = np.sort(spectrum.rescaled())
    if values.size < 2:
        raise DomainError("au moins 2 valeurs propres requises")
    if omega_max is None:
        omega_max = float(np.max(np.abs(values))) or 1.0
    edges = np.linspace(-omega_max, omega_max, bins + 1)
    width = edges[1] - edges[0]
    clipped = int(np.count_nonzero(np.abs(values) > omega_max))
    if clipped:
        _log.warning("%d valeurs propres hors de [−%g, %g] rabattues dans les cellules extrêmes", clipped, omega_max, omega_max)
    counts, _ = np.histogram(np.clip(values, -omega_max, omega_max), bins=edges)
    histogram = DensityOnGrid(
        support=float(omega_max),
        nodes=0.5 * (edges[:-1] + edges[1:]),
        weights=np.full(bins, width),
        values=counts / (values.size * width),
        grid='histogram',
    )
    levels = np.arange(1, values.size + 1) / values.size
    return EmpiricalDensity(histogram=histogram, sorted_values=values, levels=levels)


def kolmogorov_distance(spectrum, params):
    """sup |F_N − F| entre la répartition empirique et φ(ω)/2π (scipy.stats.kstest)."""
    result = scipy.stats.kstest(spectrum.rescaled(), lambda w: cdf_exact(w, params))
    return float(result.statistic)


def kolmogorov_two_sample(first, second):
    """Distance de Kolmogorov entre deux spectres remis à l'échelle."""
    return float(scipy.stats.ks_2samp(first.rescaled(), second.rescaled()).statistic)


def trace_identities(spectrum, matrix):
    """Résidus des moments 0 et 2 : Σμ = Tr L, Σμ² = Tr L² = Σ|L_jk|²."""
    m = np.asarray(matrix)
    mu = spectrum.eigenvalues
    trace = float(np.real(np.trace(m)))
    second = float(np.sum(np.abs(m) ** 2))
    return {
        'trace': abs(float(np.sum(mu)) - trace),
        'second_moment': abs(float(np.sum(mu * mu)) - second) / max(1.0, second),
    }
