"""One-way quantum deficit and discord of symmetric XXZ two-qubit X states.

The package evaluates the measurement-dependent entropies in closed form,
optimizes over the measurement angle, classifies the optimal branch, traces
the critical lines that separate the branches and renders phase diagrams.
"""
from .correlations import (DeficitResult, PhaseLabel, deficit, deficit_at, discord,
                           discord_at, optimize_many)
from .errors import (BracketError, ConvergenceError, DeficitAtlasError, DomainError,
                     EmptyCurve, IoError, NoInteriorMinimum, NotFound, SingularInput)
from .state import BellMixWeights, XxzState, from_bell_mixture, to_bell_mixture, validate

__all__ = [
    "BellMixWeights", "BracketError", "ConvergenceError", "DeficitAtlasError",
    "DeficitResult", "DomainError", "EmptyCurve", "IoError", "NoInteriorMinimum",
    "NotFound", "PhaseLabel", "SingularInput", "XxzState", "deficit", "deficit_at",
    "discord", "discord_at", "from_bell_mixture", "optimize_many", "to_bell_mixture",
    "validate",
]
