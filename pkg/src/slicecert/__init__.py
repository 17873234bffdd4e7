"""Stability certification for relative equilibria of symmetric Hamiltonian systems."""

from . import errors
from .phase_space import Poly, SymplecticSpace, canonical_omega
from .symmetry import (
    LieAlgebraBasis,
    Subalgebra,
    compactness_certificate,
    derive_structure_constants,
    group_exp,
    isotropy_algebra,
    normalizer_algebra,
)
from .momentum import (
    MomentumMap,
    ad_star,
    invariance_residual,
    momentum_isotropy_algebra,
    quadratic_momentum,
)
from .witt_artin import (
    WittArtinFrame,
    descent_residual,
    slice_momentum_map,
    slice_symplectic_form,
    witt_artin_frame,
)
from .certify import (
    DEFINITENESS_TOL,
    StabilityCertificate,
    VelocityFamily,
    definiteness_search,
    orthogonal_velocity,
    restricted_hessian,
    solve_velocities,
    velocity_residual,
)
from .dynamics import (
    ProbeReport,
    hamiltonian_vector_field,
    integrate,
    orbit_distance,
    stability_probe,
)
from .cli import SystemDefinition, bundled_system, load_system, serialize_system

__version__ = "0.1.0"

__all__ = [
    "Poly",
    "SymplecticSpace",
    "canonical_omega",
    "LieAlgebraBasis",
    "Subalgebra",
    "derive_structure_constants",
    "isotropy_algebra",
    "normalizer_algebra",
    "compactness_certificate",
    "group_exp",
    "MomentumMap",
    "quadratic_momentum",
    "ad_star",
    "momentum_isotropy_algebra",
    "invariance_residual",
    "WittArtinFrame",
    "witt_artin_frame",
    "slice_symplectic_form",
    "slice_momentum_map",
    "descent_residual",
    "VelocityFamily",
    "StabilityCertificate",
    "solve_velocities",
    "velocity_residual",
    "restricted_hessian",
    "definiteness_search",
    "orthogonal_velocity",
    "DEFINITENESS_TOL",
    "ProbeReport",
    "hamiltonian_vector_field",
    "integrate",
    "orbit_distance",
    "stability_probe",
    "SystemDefinition",
    "load_system",
    "serialize_system",
    "bundled_system",
    "errors",
]
