"""
LaxBethe — Côté exact : courbe spectrale ω(φ), sa dérivée, le bord de
bande (φ_min, Ω₀), la densité exacte σ et la densité de coupure ρ₀.

    ω(φ) = −θ₁′(φ/2) / (2 θ₁(φ/2)),   nome q = e^{−a}
    dω/dφ = −(K²/π²)·[(K−E)/K − 1/sn²(Kφ/π)]
    σ(ω) = (1/2π)·dφ/dω

Conventions de signe fixées par la limite q → 0 : ω ≈ −(1/2)cot(φ/2),
croissante sur (0, 2π).
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass

import numpy as np

from elliptic import NomeParameters, jacobi_sn, theta1_logderiv, theta1_logderiv2
from errors import DomainError, PoleError, StructureError
from utils import chebyshev_nodes

_log = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi
INVERSION_TOL = 1e-12
POLE_CUTOFF = 1e-6  # au-delà de ω(2π − POLE_CUTOFF) on utilise la forme asymptotique
BISECTION_MAX_ITER = 200
EDGE_SCAN_POINTS = 64
EDGE_NEAR_POLE_POINTS = 24
# Ω₀ ≈ 2e^{−a} : au-delà, ω_r sur la droite tombe sous la précision machine
BAND_EDGE_A_MAX = 12.0


# ============================================================
#  TYPES
# ============================================================

@dataclass(frozen=True)
class SpectralCurve:
    """Échantillons (φ, ω(φ)) de la courbe réelle, strictement croissants."""
    params: NomeParameters
    phis: np.ndarray
    omegas: np.ndarray

    def is_monotone(self):
        return bool(np.all(np.diff(self.phis) > 0) and np.all(np.diff(self.omegas) > 0))

    def antisymmetry_residual(self):
        """max |ω(2π−φ) + ω(φ)| sur les échantillons."""
        mirrored = np.real(omega_of_phi(TWO_PI - self.phis, self.params))
        return float(np.max(np.abs(mirrored + self.omegas)))


@dataclass(frozen=True)
class BandEdge:
    """Extremum de ω_r sur la droite Im φ = a : minimum en φ_min + ia."""
    phi_min: float
    omega0: float


@dataclass(frozen=True)
class DensityOnGrid:
    """Densité tabulée sur une grille symétrique de nœuds/poids.

    grid : 'chebyshev' (poids de Gauss–Tchebychev, bords en 1/√),
           'uniform' (cellules régulières) ou 'histogram'.
    """
    support: float
    nodes: np.ndarray
    weights: np.ndarray
    values: np.ndarray
    grid: str = 'chebyshev'

    def mass(self):
        return float(np.sum(self.weights * self.values))

    def evenness_residual(self):
        """max |ρ(−x) − ρ(x)| (nœuds supposés symétriques)."""
        return float(np.max(np.abs(self.values - self.values[::-1])))

    def reduced_nodes(self):
        return self.nodes / self.support

    def smooth_weight(self):
        """w(s) = ρ(x)·support·√(1−s²), régulière aux bords (grille Tchebychev)."""
        s = self.reduced_nodes()
        return self.values * self.support * np.sqrt((1.0 - s) * (1.0 + s))


# ============================================================
#  COURBE SPECTRALE
# ============================================================

def _check_real_pole(phi):
    phi = np.asarray(phi)
    real_axis = np.imag(phi) == 0
    r = np.remainder(np.real(phi), TWO_PI)
    dist = np.minimum(r, TWO_PI - r)
    if np.any(real_axis & (dist <= 1e-15 * np.maximum(1.0, np.abs(phi)))):
        raise PoleError("ω(φ) a un pôle en φ ≡ 0 mod 2π")


def omega_of_phi(phi, params):
    """Courbe spectrale ω(φ) = −θ₁′(φ/2)/(2θ₁(φ/2)) (complexe)."""
    _check_real_pole(phi)
    return -0.5 * theta1_logderiv(np.asarray(phi) / 2.0 if np.ndim(phi) else phi / 2.0,
                                  params.q, params.series_epsilon)


def _domega_theta(phi, params):
    return -0.25 * theta1_logderiv2(np.asarray(phi) / 2.0 if np.ndim(phi) else phi / 2.0,
                                    params.q, params.series_epsilon)


def _domega_sn(phi, params):
    if np.iscomplexobj(phi):
        raise DomainError("la forme en sn de dω/dφ n'est définie que pour φ réel")
    big_k, big_e = params.bigK, params.bigE
    sn = np.asarray(jacobi_sn(big_k * np.asarray(phi, dtype=float) / math.pi, params.k, params.kprime))
    if np.any(sn == 0):
        raise PoleError("sn(Kφ/π) = 0 : pôle de dω/dφ")
    value = -(big_k ** 2 / math.pi ** 2) * ((big_k - big_e) / big_k - 1.0 / (sn * sn))
    return value.item() if np.ndim(phi) == 0 else value


def domega_dphi(phi, params, method='theta'):
    """dω/dφ : 'theta' (série dérivée, φ complexe) ou 'sn' (φ réel)."""
    _check_real_pole(phi)
    if method == 'theta':
        return _domega_theta(phi, params)
    if method == 'sn':
        return _domega_sn(phi, params)
    raise DomainError(f"méthode inconnue : {method!r}")


def sample_curve(params, n=256):
    """Échantillonne la courbe réelle sur une grille régulière de (0, 2π)."""
    phis = TWO_PI * (np.arange(n) + 0.5) / n
    return SpectralCurve(params=params, phis=phis, omegas=np.real(omega_of_phi(phis, params)))


def quasiperiodicity_residuals(params, t):
    """Résidus des propriétés de quasi-périodicité sur les abscisses t ∈ (0, 2π).

    Retourne un dict : période 2π, période 2ia (ω + i), Im ω = 1/2 sur la
    droite décalée, zéros de ω_r en ±ia et 2π ± ia.
    """
    t = np.asarray(t, dtype=float)
    a = params.a
    base = omega_of_phi(t + 0.25j * a, params)
    shifted = omega_of_phi(t + 0.25j * a + 2j * a, params)
    wrapped = omega_of_phi(t + 0.25j * a + TWO_PI, params)
    line = omega_of_phi(t + 1j * a, params)
    zeros = np.real(omega_of_phi(np.array([1j * a, -1j * a, TWO_PI + 1j * a, TWO_PI - 1j * a]), params))
    return {
        'period_2pi': float(np.max(np.abs(wrapped - base))),
        'period_2ia': float(np.max(np.abs(shifted - base - 1j))),
        'imag_on_line': float(np.max(np.abs(np.imag(line) - 0.5))),
        'real_zeros': float(np.max(np.abs(zeros))),
    }


# ============================================================
#  BORD DE BANDE
# ============================================================

def _line_derivative(t, params):
    return np.real(domega_dphi(np.asarray(t, dtype=float) + 1j * params.a, params))


def _bisect_root(fn, lo, hi, tol=1e-14):
    """Racine scalaire de fn sur [lo, hi] avec fn(lo) < 0 < fn(hi)."""
    for _ in range(BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        if hi - lo <= tol or mid in (lo, hi):
            break
        if fn(mid) < 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def find_band_edge(params):
    """Minimum de ω_r sur Im φ = a : racine de dω/dφ en t ∈ (0, π).

    Pour a petit le minimum est en t ≈ a ; la grille de balayage est
    complétée par des points géométriques près du pôle.
    """
    if params.a > BAND_EDGE_A_MAX:
        raise DomainError(f"bord de bande calculé pour a ≤ {BAND_EDGE_A_MAX:g} seulement (reçu a={params.a})")
    uniform = math.pi * (np.arange(EDGE_SCAN_POINTS) + 0.5) / EDGE_SCAN_POINTS
    near = np.geomspace(1e-3 * min(params.a, 1.0), uniform[0], EDGE_NEAR_POLE_POINTS, endpoint=False)
    t = np.concatenate([near, uniform])
    deriv = _line_derivative(t, params)
    change = np.nonzero((deriv[:-1] < 0) & (deriv[1:] >= 0))[0]
    if change.size == 0:
        raise StructureError(f"aucun changement de signe de dω/dφ sur Im φ = a (a={params.a})")
    i = int(change[0])
    phi_min = _bisect_root(lambda x: float(_line_derivative(x, params)), float(t[i]), float(t[i + 1]))
    omega0 = float(np.real(omega_of_phi(TWO_PI - phi_min + 1j * params.a, params)))
    if not omega0 > 0:
        raise StructureError(f"Ω₀ non positif ({omega0}) pour a={params.a}")
    _log.debug("bord de bande a=%s : φ_min=%.17g Ω₀=%.17g", params.a, phi_min, omega0)
    return BandEdge(phi_min=phi_min, omega0=omega0)


# ============================================================
#  INVERSION DE LA COURBE RÉELLE ET DENSITÉ EXACTE
# ============================================================

def _pole_coefficient(params):
    """b = θ₁‴(0)/(6θ₁′(0)) : θ₁(y) = θ₁′(0)(y + b y³ + …)."""
    lnq = math.log(params.q)
    d1 = d3 = 0.0
    for n in range(64):
        m = 2 * n + 1
        c = (-1) ** n * math.exp((n + 0.5) ** 2 * lnq)
        d1 += c * m
        d3 -= c * m ** 3
        if abs(c) * m ** 3 < 1e-18 * abs(d1):
            break
    return d3 / (6.0 * d1)


def _pole_epsilon(abs_omega, b):
    """ε tel que 1/ε + bε/2 = |ω| au voisinage du pôle (|ω| grand)."""
    return 1.0 / abs_omega + 0.5 * b / abs_omega ** 3


def _invert_real(omega, params, tol):
    """φ ∈ (0, 2π) tel que ω(φ) = omega (tableau), hors zone asymptotique."""
    lo = np.full(omega.shape, POLE_CUTOFF)
    hi = np.full(omega.shape, TWO_PI - POLE_CUTOFF)
    for _ in range(BISECTION_MAX_ITER):
        if not omega.size or np.max(hi - lo) <= tol:
            break
        mid = 0.5 * (lo + hi)
        below = np.real(omega_of_phi(mid, params)) < omega
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    phi = 0.5 * (lo + hi)
    if omega.size:
        # un pas de Newton, borné par le crochet
        step = (np.real(omega_of_phi(phi, params)) - omega) / np.real(domega_dphi(phi, params))
        phi = np.clip(phi - step, lo, hi)
    return phi


def phi_of_omega_real(omega, params, tol=INVERSION_TOL):
    """Inverse réelle φ(ω) ∈ (0, 2π) de la courbe strictement croissante."""
    w = np.asarray(omega, dtype=float)
    flat = np.atleast_1d(w).ravel()
    w_cut = float(np.real(omega_of_phi(TWO_PI - POLE_CUTOFF, params)))
    far = np.abs(flat) >= w_cut
    phi = np.empty_like(flat)
    phi[~far] = _invert_real(flat[~far], params, tol)
    if np.any(far):
        eps = _pole_epsilon(np.abs(flat[far]), _pole_coefficient(params))
        phi[far] = np.where(flat[far] > 0, TWO_PI - eps, eps)
    phi = phi.reshape(np.shape(w))
    return phi.item() if np.ndim(omega) == 0 else phi


def sigma_exact(omega, params):
    """σ(ω) = 1/(2π·dω/dφ(φ(ω))) ; forme asymptotique près du pôle."""
    w = np.asarray(omega, dtype=float)
    flat = np.atleast_1d(w).ravel()
    w_cut = float(np.real(omega_of_phi(TWO_PI - POLE_CUTOFF, params)))
    far = np.abs(flat) >= w_cut
    slope = np.empty_like(flat)
    if np.any(~far):
        phi = _invert_real(flat[~far], params, INVERSION_TOL)
        slope[~far] = np.real(domega_dphi(phi, params))
    if np.any(far):
        b = _pole_coefficient(params)
        eps = _pole_epsilon(np.abs(flat[far]), b)
        slope[far] = 1.0 / eps ** 2 - 0.5 * b
    sigma = (1.0 / (TWO_PI * slope)).reshape(np.shape(w))
    return sigma.item() if np.ndim(omega) == 0 else sigma


def cdf_exact(omega, params):
    """Fonction de répartition exacte des valeurs propres : φ(ω)/2π."""
    return np.asarray(phi_of_omega_real(omega, params)) / TWO_PI


# ============================================================
#  DENSITÉ DE COUPURE ρ₀
# ============================================================

def _line_real(t, params):
    return np.real(omega_of_phi(np.asarray(t, dtype=float) + 1j * params.a, params))


def _check_branch(lo, hi, increasing, params):
    t = np.linspace(lo, hi, 65)[1:-1]
    diffs = np.diff(_line_real(t, params))
    ok = np.all(diffs > 0) if increasing else np.all(diffs < 0)
    if not ok:
        raise StructureError(f"branche de ω_r non monotone sur ({lo:.6g}, {hi:.6g}) pour a={params.a}")


def _invert_branch(x, lo, hi, increasing, params):
    """t ∈ (lo, hi) tel que ω_r(t + ia) = x, branche monotone."""
    t_lo = np.full(x.shape, lo)
    t_hi = np.full(x.shape, hi)
    for _ in range(BISECTION_MAX_ITER):
        if np.max(t_hi - t_lo) <= 1e-14:
            break
        mid = 0.5 * (t_lo + t_hi)
        value = _line_real(mid, params)
        move_lo = value < x if increasing else value > x
        t_lo = np.where(move_lo, mid, t_lo)
        t_hi = np.where(move_lo, t_hi, mid)
    return 0.5 * (t_lo + t_hi)


def rho0_at(x, params, edge):
    """ρ₀(x) = (1/2π)[1/ω_r′(t₁(x)) + 1/|ω_r′(t₂(x))|] pour |x| < Ω₀."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(x) >= edge.omega0):
        raise DomainError("ρ₀ n'est défini qu'à l'intérieur de (−Ω₀, Ω₀)")
    p = edge.phi_min
    t1 = _invert_branch(x, p, TWO_PI - p, True, params)
    t2 = _invert_branch(x, TWO_PI - p, TWO_PI + p, False, params)
    d1 = _line_derivative(t1, params)
    d2 = _line_derivative(t2, params)
    return (1.0 / d1 + 1.0 / np.abs(d2)) / TWO_PI


def rho0_extract(params, n, edge=None):
    """Tabule ρ₀ sur les nœuds de Gauss–Tchebychev de [−Ω₀, Ω₀]."""
    if n < 16:
        raise DomainError(f"au moins 16 nœuds requis (reçu {n})")
    if params.a > BAND_EDGE_A_MAX:
        raise DomainError(f"ρ₀ calculée pour a ≤ {BAND_EDGE_A_MAX:g} seulement (reçu a={params.a})")
    if edge is None:
        edge = find_band_edge(params)
    p = edge.phi_min
    _check_branch(p, TWO_PI - p, True, params)
    _check_branch(TWO_PI - p, TWO_PI + p, False, params)

    s, w = chebyshev_nodes(n)
    nodes = edge.omega0 * s
    values = rho0_at(nodes, params, edge)
    weights = edge.omega0 * w * np.sqrt((1.0 - s) * (1.0 + s))
    density = DensityOnGrid(support=edge.omega0, nodes=nodes, weights=weights, values=values)
    _log.debug("ρ₀ extraite (n=%d) : masse=%.17g", n, density.mass())
    return density
