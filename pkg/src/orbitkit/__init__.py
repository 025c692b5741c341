"""Spectral profiles, symmetric norms and orbit analysis for normal operators."""

__version__ = "0.1.0"

from .errors import OrbitkitError
from .spectral_core import (
    INFINITE,
    ProjectionFamily,
    SpectralProfile,
    materialize,
    profile_of,
    singular_values,
    validate_profile,
)
from .symmetric_norms import NormSpec, ideal_norm, ky_fan_majorizes, maximal_norm, norm_of
from .expectations import commutant_check, conditional_expectation
from .commutator_analysis import (
    closed_range_witnesses,
    delta,
    solve_commutator,
    tangent_split,
)
from .orbit_analysis import (
    construct_intertwiner,
    epsilon_partition,
    finite_rank_unitary_sequence,
    lagrange_spectral_projector,
    orbit_verdict,
)
from .counterexamples import isclosed_escape, nonseparable_demo, shift_topology_demo

__all__ = [
    "INFINITE",
    "NormSpec",
    "OrbitkitError",
    "ProjectionFamily",
    "SpectralProfile",
    "closed_range_witnesses",
    "commutant_check",
    "conditional_expectation",
    "construct_intertwiner",
    "delta",
    "epsilon_partition",
    "finite_rank_unitary_sequence",
    "ideal_norm",
    "isclosed_escape",
    "ky_fan_majorizes",
    "lagrange_spectral_projector",
    "materialize",
    "maximal_norm",
    "nonseparable_demo",
    "norm_of",
    "orbit_verdict",
    "profile_of",
    "shift_topology_demo",
    "singular_values",
    "solve_commutator",
    "tangent_split",
    "validate_profile",
]
