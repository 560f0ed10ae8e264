"""
LaxBethe — Fonctions spéciales autonomes.

Série de θ₁ et ses dérivées, conversion nome ↔ module, intégrales
elliptiques complètes K et E par la moyenne arithmético-géométrique (AGM),
sinus de Jacobi sn par la récurrence descendante de l'AGM.

Toutes les fonctions sont pures ; les fonctions de x acceptent un scalaire
ou un tableau numpy (réel ou complexe) et renvoient la même forme.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from errors import ConvergenceError, DomainError, PoleError

_log = logging.getLogger(__name__)

# ============================================================
#  CONSTANTES
# ============================================================

SERIES_EPSILON = 1e-16
MAX_SERIES_TERMS = 400
AGM_TOLERANCE = 1e-15
AGM_MAX_ITER = 60
MODULUS_BRACKET = (-350.0, 350.0)  # bornes de y = ln(k/k′) ; e^{±2y} reste représentable


# ============================================================
#  TYPE : PARAMÈTRES DU NOME
# ============================================================

@dataclass(frozen=True)
class NomeParameters:
    """Enregistrement unique consommé par toutes les formules spectrales.

    a : constante de réseau (q = e^{-a})
    k, kprime : module elliptique et module complémentaire
    bigK, bigKprime, bigE, bigEprime : K(k), K(k′), E(k), E(k′)
    series_epsilon : seuil relatif de troncature de la série de θ₁
    """
    a: float
    q: float
    k: float
    kprime: float
    bigK: float
    bigKprime: float
    bigE: float
    bigEprime: float
    series_epsilon: float = SERIES_EPSILON

    def nome_residual(self):
        """|π·K′/K − a|."""
        return abs(math.pi * self.bigKprime / self.bigK - self.a)

    def legendre_residual(self):
        """|E·K′ + E′·K − K·K′ − π/2|."""
        lhs = self.bigE * self.bigKprime + self.bigEprime * self.bigK - self.bigK * self.bigKprime
        return abs(lhs - 0.5 * math.pi)

    def to_dict(self):
        return {
            'a': self.a, 'q': self.q, 'k': self.k,
            'K': self.bigK, 'Kprime': self.bigKprime, 'E': self.bigE,
        }


# ============================================================
#  OUTILS INTERNES
# ============================================================

def _as_result(x, value):
    """Rend un scalaire Python si l'entrée était scalaire."""
    if np.ndim(x) == 0:
        return value.item() if isinstance(value, np.ndarray) else value
    return value


def _check_nome(q):
    if not (0.0 < q < 1.0) or not math.isfinite(q):
        raise DomainError(f"nome q={q!r} hors de (0, 1)")


def _series_length(q, imag_max, eps):
    """Nombre de termes de la série de θ₁ pour |Im x| ≤ imag_max.

    La borne du terme n vaut q^{(n+1/2)²}·e^{(2n+1)|Im x|}. On s'arrête une
    fois passé le maximum de la borne, quand elle tombe sous eps fois ce
    maximum.
    """
    lnq = math.log(q)
    log_eps = math.log(eps)
    log_max = -math.inf
    peak = imag_max / -lnq - 0.5
    for n in range(MAX_SERIES_TERMS):
        log_bound = (n + 0.5) ** 2 * lnq + (2 * n + 1) * imag_max
        log_max = max(log_max, log_bound)
        if n > peak and log_bound < log_eps + log_max:
            return max(n, 1)
    raise ConvergenceError(
        f"série de θ₁ non tronquée après {MAX_SERIES_TERMS} termes (q={q}, Im x={imag_max})"
    )


def _on_theta_zero(x, q):
    """Masque des points du réseau des zéros de θ₁ : mπ + i·n·a."""
    a = -math.log(q)
    x = np.asarray(x)
    re = np.remainder(np.real(x), math.pi)
    d_re = np.minimum(re, math.pi - re)
    im = np.remainder(np.imag(x), a)
    d_im = np.minimum(im, a - im)
    scale = np.maximum(1.0, np.abs(x))
    return (d_re <= 1e-14 * scale) & (d_im <= 1e-14 * scale)


# ============================================================
#  SÉRIE DE θ₁
# ============================================================

def theta1_derivatives(x, q, eps=SERIES_EPSILON):
    """Renvoie (θ₁(x), θ₁′(x), θ₁″(x)) sommés terme à terme.

    θ₁(x) = 2 Σ (−1)ⁿ q^{(n+1/2)²} sin((2n+1)x)
    """
    _check_nome(q)
    xa = np.asarray(x)
    imag_max = float(np.max(np.abs(np.imag(xa)))) if xa.size else 0.0
    n_terms = _series_length(q, imag_max, eps)
    lnq = math.log(q)

    s0 = np.zeros_like(xa, dtype=complex if np.iscomplexobj(xa) else float)
    s1 = np.zeros_like(s0)
    s2 = np.zeros_like(s0)
    for n in range(n_terms):
        m = 2 * n + 1
        coef = (-1) ** n * math.exp((n + 0.5) ** 2 * lnq)
        sin_mx = np.sin(m * xa)
        s0 = s0 + coef * sin_mx
        s1 = s1 + coef * m * np.cos(m * xa)
        s2 = s2 - coef * m * m * sin_mx
    return (_as_result(x, 2.0 * s0), _as_result(x, 2.0 * s1), _as_result(x, 2.0 * s2))


def theta1(x, q, eps=SERIES_EPSILON):
    """θ₁(x) de nome q."""
    return theta1_derivatives(x, q, eps)[0]


def theta1_logderiv(x, q, eps=SERIES_EPSILON):
    """θ₁′(x)/θ₁(x) ; PoleError sur un zéro de θ₁."""
    _check_nome(q)
    if np.any(_on_theta_zero(x, q)):
        raise PoleError("dérivée logarithmique de θ₁ évaluée sur un zéro")
    th, dth, _ = theta1_derivatives(x, q, eps)
    if np.any(np.asarray(th) == 0):
        raise PoleError("θ₁ s'annule au point demandé")
    return _as_result(x, np.asarray(dth) / np.asarray(th))


def theta1_logderiv2(x, q, eps=SERIES_EPSILON):
    """(θ₁′/θ₁)′ = (θ₁″θ₁ − θ₁′²)/θ₁²."""
    _check_nome(q)
    if np.any(_on_theta_zero(x, q)):
        raise PoleError("dérivée seconde de ln θ₁ évaluée sur un zéro")
    th, dth, d2th = (np.asarray(v) for v in theta1_derivatives(x, q, eps))
    if np.any(th == 0):
        raise PoleError("θ₁ s'annule au point demandé")
    ld = dth / th
    return _as_result(x, d2th / th - ld * ld)


# ============================================================
#  INTÉGRALES ELLIPTIQUES COMPLÈTES (AGM)
# ============================================================

def elliptic_KE_pair(k, kprime):
    """K(k) et E(k) à partir de k et k′ (sans former 1 − k²)."""
    a, b, c = 1.0, float(kprime), float(k)
    weight = 0.5
    e_sum = weight * c * c
    for _ in range(AGM_MAX_ITER):
        if abs(c) <= AGM_TOLERANCE * a:
            break
        a, b, c = 0.5 * (a + b), math.sqrt(a * b), 0.5 * (a - b)
        weight *= 2.0
        e_sum += weight * c * c
    else:
        raise ConvergenceError(f"AGM non convergée pour k={k}")
    big_k = math.pi / (2.0 * a)
    return big_k, big_k * (1.0 - e_sum)


def elliptic_KE(k):
    """Intégrales elliptiques complètes (K(k), E(k)) pour 0 ≤ k < 1."""
    if not (0.0 <= k < 1.0) or not math.isfinite(k):
        raise DomainError(f"module k={k!r} hors de [0, 1)")
    return elliptic_KE_pair(k, math.sqrt((1.0 - k) * (1.0 + k)))


def _moduli_from_log_ratio(y):
    """(k, k′) tels que ln(k/k′) = y, tous deux en précision relative pleine."""
    return 1.0 / math.sqrt(1.0 + math.exp(-2.0 * y)), 1.0 / math.sqrt(1.0 + math.exp(2.0 * y))


def _a_of_log_ratio(y):
    k, kp = _moduli_from_log_ratio(y)
    big_k, _ = elliptic_KE_pair(k, kp)
    big_kp, _ = elliptic_KE_pair(kp, k)
    return math.pi * big_kp / big_k


@lru_cache(maxsize=1)
def modulus_a_range():
    """Plage (a_min, a_max) couverte par MODULUS_BRACKET."""
    lo, hi = MODULUS_BRACKET
    return _a_of_log_ratio(hi), _a_of_log_ratio(lo)


def modulus_from_a(a, series_epsilon=SERIES_EPSILON, tol=1e-14, max_iter=200):
    """Cherche k tel que π·K(k′)/K(k) = a et remplit NomeParameters.

    Bissection sur y = ln(k/k′) : a(y) est strictement décroissante.
    """
    if not (a > 0.0) or not math.isfinite(a):
        raise DomainError(f"constante de réseau a={a!r} doit être > 0")
    lo, hi = MODULUS_BRACKET
    a_min, a_max = modulus_a_range()
    if not (a_min <= a <= a_max):
        raise DomainError(f"a={a} hors de la plage [{a_min:.6g}, {a_max:.6g}] atteignable par le module")

    for it in range(max_iter):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid in (lo, hi):
            break
        if _a_of_log_ratio(mid) > a:
            lo = mid
        else:
            hi = mid
    else:
        raise ConvergenceError(f"bissection du module non convergée après {max_iter} itérations")

    y = 0.5 * (lo + hi)
    k, kp = _moduli_from_log_ratio(y)
    big_k, big_e = elliptic_KE_pair(k, kp)
    big_kp, big_ep = elliptic_KE_pair(kp, k)
    params = NomeParameters(
        a=float(a), q=math.exp(-a), k=k, kprime=kp,
        bigK=big_k, bigKprime=big_kp, bigE=big_e, bigEprime=big_ep,
        series_epsilon=series_epsilon,
    )
    if params.nome_residual() > 1e-10 * max(1.0, a):
        raise ConvergenceError(f"résidu du nome trop grand : {params.nome_residual():.3e}")
    _log.debug("module pour a=%s : k=%.17g (%d itérations)", a, k, it)
    return params


# ============================================================
#  SINUS DE JACOBI
# ============================================================

def jacobi_sn(u, k, kprime=None):
    """sn(u, k) réel par la récurrence descendante de l'AGM.

    kprime : module complémentaire, à fournir quand k est proche de 1
    (sinon reconstruit comme √((1−k)(1+k)) avec perte de chiffres).
    """
    if kprime is None:
        if not (0.0 <= k < 1.0) or not math.isfinite(k):
            raise DomainError(f"module k={k!r} hors de [0, 1)")
        kprime = math.sqrt((1.0 - k) * (1.0 + k))
    elif not (0.0 <= k <= 1.0 and 0.0 < kprime <= 1.0):
        raise DomainError(f"modules k={k!r}, k′={kprime!r} hors de [0, 1]")
    a_seq, c_seq = [1.0], [float(k)]
    b = float(kprime)
    while abs(c_seq[-1]) > AGM_TOLERANCE * a_seq[-1]:
        if len(a_seq) > AGM_MAX_ITER:
            raise ConvergenceError(f"AGM de sn non convergée pour k={k}")
        a = a_seq[-1]
        a_seq.append(0.5 * (a + b))
        c_seq.append(0.5 * (a - b))
        b = math.sqrt(a * b)

    n = len(a_seq) - 1
    phi = (2.0 ** n) * a_seq[n] * np.asarray(u, dtype=float)
    for j in range(n, 0, -1):
        phi = 0.5 * (phi + np.arcsin(c_seq[j] / a_seq[j] * np.sin(phi)))
    return _as_result(u, np.sin(phi))
