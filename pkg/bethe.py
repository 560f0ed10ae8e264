"""
LaxBethe — Côté Bethe asymptotique : équation intégrale de la densité des
impulsions et transformée lorentzienne.

    ∫_{−A}^{A} γ(x−x′) ρ(x′) dx′ = 2a,   ∫ρ = 1,   γ(x) = ln(1 + 1/x²)
    σ(ω) = (1/2π) ∫ ρ(x) / ((x−ω)² + 1/4) dx

La densité a des singularités en 1/√ aux bords ±A. La grille par défaut
('chebyshev') résout donc pour w(s) = ρ(As)·A·√(1−s²), régulière, et
intègre −2 ln|u| exactement contre la base de Tchebychev. La grille
'uniform' (fonctions chapeau linéaires par morceaux sur des nœuds
équidistants, intégrales de ln|u| en forme close) reste disponible pour
les études de raffinement.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg
from numpy.polynomial.legendre import leggauss

from config import GRIDS, thread_count
from errors import ConvergenceError, DomainError, PoleError, SPDError, StructureError
from exact_spectrum import DensityOnGrid
from utils import chebyshev_nodes, parallel_map, split_indices, uniform_nodes

_log = logging.getLogger(__name__)

MIN_NODES = 16
CELL_GAUSS_POINTS = 8
A_TOLERANCE = 1e-10
EXPANSION_CAP = 60
BISECTION_MAX_ITER = 200
LORENTZ_HALF_WIDTH_SQ = 0.25
PIVOT_WARNING = 1e-8


# ============================================================
#  NOYAU
# ============================================================

def kernel_gamma(x):
    """γ(x) = ln(1 + 1/x²) = ln(1+x²) − 2 ln|x| ; PoleError en 0."""
    xa = np.asarray(x, dtype=float)
    if np.any(xa == 0):
        raise PoleError("γ(x) a une singularité logarithmique en x = 0")
    value = np.log1p(xa * xa) - 2.0 * np.log(np.abs(xa))
    return value.item() if np.ndim(x) == 0 else value


def _x_log_abs(u):
    """u·ln|u| − u, prolongée par 0 en u = 0."""
    u = np.asarray(u, dtype=float)
    safe = np.where(u == 0, 1.0, u)
    return np.where(u == 0, 0.0, u * np.log(np.abs(safe)) - u)


def log_cell_integral(lo, hi):
    """∫_{lo}^{hi} ln|u| du en forme close (vectorisé)."""
    value = _x_log_abs(hi) - _x_log_abs(lo)
    return value.item() if np.ndim(value) == 0 else value


def _x2_log_abs(u):
    """(u²/2)·ln|u| − u²/4, prolongée par 0 en u = 0."""
    u = np.asarray(u, dtype=float)
    safe = np.where(u == 0, 1.0, u)
    return np.where(u == 0, 0.0, 0.5 * u * u * np.log(np.abs(safe)) - 0.25 * u * u)


def hat_log_integral(d, h):
    """∫ ℓ(v) ln|d − v| dv pour le chapeau ℓ(v) = max(0, 1 − |v|/h) (vectorisé)."""
    d = np.asarray(d, dtype=float)
    right = ((h - d) * log_cell_integral(d - h, d) + _x2_log_abs(d) - _x2_log_abs(d - h)) / h
    left = ((h + d) * log_cell_integral(d, d + h) - _x2_log_abs(d + h) + _x2_log_abs(d)) / h
    value = np.asarray(left + right)
    return value.item() if value.ndim == 0 else value


# ============================================================
#  GRILLE DE NYSTRÖM
# ============================================================

@dataclass(frozen=True)
class NystromGrid:
    """Grille de collocation sur [−A, A].

    family : 'chebyshev' (nœuds de Gauss–Tchebychev) ou 'uniform'
             (n nœuds intérieurs de pas h, base chapeau)
    """
    family: str
    bigA: float
    n: int
    nodes: np.ndarray
    reduced: np.ndarray
    cell_width: float = 0.0

    @classmethod
    def build(cls, bigA, n, family='chebyshev'):
        if not (bigA > 0) or not math.isfinite(bigA):
            raise DomainError(f"demi-largeur A={bigA!r} doit être > 0")
        if not isinstance(n, (int, np.integer)) or n < MIN_NODES:
            raise DomainError(f"au moins {MIN_NODES} nœuds requis (reçu {n!r})")
        if family not in GRIDS:
            raise DomainError(f"famille de grille inconnue : {family!r}")
        if family == 'chebyshev':
            s, _ = chebyshev_nodes(int(n))
            grid = cls(family, float(bigA), int(n), bigA * s, s)
        else:
            x, h = uniform_nodes(bigA, int(n))
            grid = cls(family, float(bigA), int(n), x, x / bigA, cell_width=h)
        if np.any(np.diff(grid.nodes) <= 0):
            raise DomainError("grille dégénérée : nœuds répétés")
        return grid

    def weights(self):
        """Poids de quadrature associés aux valeurs ponctuelles de ρ."""
        if self.family == 'chebyshev':
            s = self.reduced
            return self.bigA * (math.pi / self.n) * np.sqrt((1.0 - s) * (1.0 + s))
        return np.full(self.n, self.cell_width)


# ------------------------------------------------------------
#  Famille Tchebychev
# ------------------------------------------------------------

def _chebyshev_angles(s):
    return np.arccos(np.clip(s, -1.0, 1.0))


@lru_cache(maxsize=16)
def _chebyshev_log_operator(n):
    """S_ij = ∫ ln|s_i − s′| ℓ_j(s′)/√(1−s′²) ds′ (interpolant de Tchebychev).

    Ne dépend que de n ; mis en cache en lecture seule.
    """
    s, _ = chebyshev_nodes(n)
    m = np.arange(n)
    basis = np.cos(np.outer(_chebyshev_angles(s), m))
    eigen = np.empty(n)
    eigen[0] = -math.pi * math.log(2.0)
    eigen[1:] = -math.pi / m[1:]
    scale = np.where(m == 0, 1.0, 2.0) / n
    op = (basis * (eigen * scale)) @ basis.T
    op = 0.5 * (op + op.T)
    op.setflags(write=False)
    return op


def _chebyshev_smooth_rows(rows, s, bigA):
    """Bloc (π/n)·ln(1 + A²(s_i − s_j)²) pour les lignes demandées."""
    diff = bigA * (s[rows, None] - s[None, :])
    return (math.pi / s.size) * np.log1p(diff * diff)


def _assemble_chebyshev(grid):
    n, s = grid.n, grid.reduced
    chunks = split_indices(n, thread_count())
    smooth = np.vstack(parallel_map(lambda rows: _chebyshev_smooth_rows(rows, s, grid.bigA), chunks))
    smooth = 0.5 * (smooth + smooth.T)
    constant = -2.0 * math.log(grid.bigA) * (math.pi / n)
    return smooth + constant - 2.0 * _chebyshev_log_operator(n)


def _chebyshev_apply(density, x):
    s_nodes = density.reduced_nodes()
    n = s_nodes.size
    w = density.smooth_weight()
    m = np.arange(n)
    basis = np.cos(np.outer(_chebyshev_angles(s_nodes), m))
    coeffs = (np.where(m == 0, 1.0, 2.0) / n) * (basis.T @ w)

    s = x / density.support
    eval_basis = np.cos(np.outer(_chebyshev_angles(s), m))
    eigen = np.empty(n)
    eigen[0] = -math.pi * math.log(2.0)
    eigen[1:] = -math.pi / m[1:]
    singular = eval_basis @ (eigen * coeffs)

    diff = density.support * (s[:, None] - s_nodes[None, :])
    smooth = (math.pi / n) * (np.log1p(diff * diff) @ w)
    constant = -2.0 * math.log(density.support) * (math.pi / n) * np.sum(w)
    return smooth + constant - 2.0 * singular


# ------------------------------------------------------------
#  Famille uniforme
# ------------------------------------------------------------

def _uniform_block(x_eval, nodes, h):
    """∫ γ(x_i − u) ℓ_j(u) du : ln|u| en forme close, ln(1+u²) par Gauss–Legendre sur chaque demi-chapeau."""
    g_nodes, g_weights = leggauss(CELL_GAUSS_POINTS)
    v = np.concatenate([0.5 * h * (g_nodes - 1.0), 0.5 * h * (g_nodes + 1.0)])
    vw = np.concatenate([g_weights, g_weights]) * 0.5 * h * (1.0 - np.abs(v) / h)
    d = x_eval[:, None] - nodes[None, :]
    singular = -2.0 * np.asarray(hat_log_integral(d, h))
    u = d[:, :, None] - v[None, None, :]
    smooth = np.sum(vw * np.log1p(u * u), axis=-1)
    return smooth + singular


def _assemble_uniform(grid):
    # Toeplitz symétrique : une seule colonne suffit
    column = _uniform_block(grid.nodes, grid.nodes[:1], grid.cell_width)[:, 0]
    return scipy.linalg.toeplitz(column)


def _uniform_apply(density, x):
    h = 2.0 * density.support / (density.nodes.size + 1)
    return _uniform_block(x, density.nodes, h) @ density.values


# ============================================================
#  ASSEMBLAGE ET APPLICATION
# ============================================================

def assemble_kernel(grid):
    """Matrice de Nyström symétrique (produit d'intégration) sur la grille."""
    if grid.family == 'chebyshev':
        return _assemble_chebyshev(grid)
    return _assemble_uniform(grid)


def apply_kernel(density, x):
    """∫ γ(x − x′) ρ(x′) dx′ aux points x (|x| ≤ support), pour les deux familles."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(np.abs(x) > density.support * (1.0 + 1e-12)):
        raise DomainError("apply_kernel n'est évalué qu'à l'intérieur du support")
    if density.grid == 'chebyshev':
        return _chebyshev_apply(density, x)
    if density.grid == 'uniform':
        return _uniform_apply(density, x)
    raise DomainError(f"grille non supportée par apply_kernel : {density.grid!r}")


# ============================================================
#  SOLUTIONS
# ============================================================

@dataclass(frozen=True)
class BetheSolution:
    """Solution de l'équation intégrale : support A, constante a, densité ρ."""
    bigA: float
    a: float
    rho: DensityOnGrid
    nodes_n: int
    min_pivot: float

    def residual(self):
        """max |2a − ∫γ(x_i−x′)ρ(x′)dx′| sur les points de collocation."""
        return float(np.max(np.abs(2.0 * self.a - apply_kernel(self.rho, self.rho.nodes))))

    def to_rows(self):
        return list(zip(self.rho.nodes.tolist(), self.rho.values.tolist()))


def solve_for_A(bigA, n, grid='chebyshev'):
    """Résout pour A fixé : second membre unité, puis mise à l'échelle.

    ρ̃ solution de ∫γρ̃ = 1, a = 1/(2∫ρ̃), ρ = 2a·ρ̃.
    """
    nodes = NystromGrid.build(bigA, n, grid)
    matrix = assemble_kernel(nodes)
    try:
        factor = scipy.linalg.cho_factor(matrix, lower=True, check_finite=True)
    except np.linalg.LinAlgError as e:
        raise SPDError(f"matrice de Nyström non définie positive (A={bigA}, n={n}) : {e}")
    min_pivot = float(np.min(np.diag(factor[0])))
    if min_pivot < PIVOT_WARNING * math.sqrt(float(np.max(np.diag(matrix)))):
        _log.warning("pivot de Cholesky faible (%.3e) pour A=%s, n=%d", min_pivot, bigA, n)
    unknown = scipy.linalg.cho_solve(factor, np.ones(nodes.n))

    weights = nodes.weights()
    if grid == 'chebyshev':
        # inconnue w̃ = ρ̃·A·√(1−s²)
        mass = (math.pi / nodes.n) * float(np.sum(unknown))
        s = nodes.reduced
        values = unknown / (bigA * np.sqrt((1.0 - s) * (1.0 + s)))
    else:
        mass = float(np.sum(weights * unknown))
        values = unknown
    if not mass > 0:
        raise StructureError(f"masse non positive pour A={bigA} (masse={mass})")

    a = 1.0 / (2.0 * mass)
    rho = DensityOnGrid(support=float(bigA), nodes=nodes.nodes, weights=weights,
                        values=2.0 * a * values, grid=grid)
    return BetheSolution(bigA=float(bigA), a=a, rho=rho, nodes_n=nodes.n, min_pivot=min_pivot)


def solve_for_a(a, n, grid='chebyshev', tol=A_TOLERANCE):
    """Bissection sur ln A pour que solve_for_A(A, n).a = a.

    a(A) est décroissante ; la monotonie est vérifiée sur tous les points
    évalués.
    """
    if not (a > 0) or not math.isfinite(a):
        raise DomainError(f"constante de réseau a={a!r} doit être > 0")
    seen = {}

    def evaluate(log_a_big):
        sol = solve_for_A(math.exp(log_a_big), n, grid)
        seen[log_a_big] = sol.a
        return sol

    lo = hi = 0.0
    sol = evaluate(0.0)
    if sol.a > a:
        # a trop grand : il faut élargir le support
        for _ in range(EXPANSION_CAP):
            hi += math.log(2.0)
            if evaluate(hi).a <= a:
                break
            lo = hi
        else:
            raise ConvergenceError(f"aucun encadrement de A trouvé pour a={a}")
    else:
        for _ in range(EXPANSION_CAP):
            lo -= math.log(2.0)
            if evaluate(lo).a >= a:
                break
            hi = lo
        else:
            raise ConvergenceError(f"aucun encadrement de A trouvé pour a={a}")

    best = None
    for _ in range(BISECTION_MAX_ITER):
        mid = 0.5 * (lo + hi)
        best = evaluate(mid)
        if abs(best.a - a) <= tol * max(1.0, a) or mid in (lo, hi):
            break
        if best.a > a:
            lo = mid
        else:
            hi = mid
    else:
        raise ConvergenceError(f"bissection sur A non convergée pour a={a}")

    keys = sorted(seen)
    values = [seen[k] for k in keys]
    if any(v2 >= v1 for v1, v2 in zip(values, values[1:])):
        raise StructureError(f"A ↦ a(A) non strictement décroissante (a={a}, n={n})")
    _log.debug("Bethe a=%s : A=%.17g (%d résolutions)", a, best.bigA, len(seen))
    return best


def sigma_bethe(omega, sol):
    """σ(ω) = (1/2π) Σ poids·ρ / ((x−ω)² + 1/4)."""
    w = np.asarray(omega, dtype=float)
    flat = np.atleast_1d(w).ravel()
    rho = sol.rho
    d = flat[:, None] - rho.nodes[None, :]
    sigma = ((rho.weights * rho.values) / (d * d + LORENTZ_HALF_WIDTH_SQ)).sum(axis=1) / (2.0 * math.pi)
    sigma = sigma.reshape(np.shape(w))
    return sigma.item() if np.ndim(omega) == 0 else sigma
