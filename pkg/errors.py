"""
LaxBethe — Exceptions communes.

Toutes les erreurs levées par la bibliothèque dérivent de LaxBetheError,
ce qui permet à la CLI et aux routes HTTP de les traduire en codes de
sortie / statuts HTTP sans attraper les erreurs Python génériques.
"""


class LaxBetheError(Exception):
    """Erreur de base de LaxBethe."""


class DomainError(LaxBetheError, ValueError):
    """Argument hors du domaine de définition (q ∉ (0,1), k ≥ 1, N < 2...)."""


class PoleError(LaxBetheError, ZeroDivisionError):
    """Évaluation sur un pôle (zéro de θ₁, φ ≡ 0 mod 2π, γ(0))."""


class ConvergenceError(LaxBetheError):
    """Itération non convergée (bissection, série, balayages de Jacobi)."""


class StructureError(LaxBetheError):
    """Propriété structurelle violée (changement de signe absent, monotonie)."""


class SPDError(LaxBetheError):
    """Matrice de Nyström non définie positive (échec de Cholesky)."""


class CutError(LaxBetheError):
    """Point ω situé sur une coupure de φ(ω)."""


class ConfigError(LaxBetheError):
    """Configuration invalide (drapeau mal formé, tolérance inconnue...)."""
