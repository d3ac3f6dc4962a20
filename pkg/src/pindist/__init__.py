"""Exact verification of pinned distance bounds over finite fields F_q^d."""

from .errors import PindistError
from .field import FieldSpec, make_field
from .generators import generate, parse, render
from .geometry import (bisector_count, bisector_count_charsum, character, distance, norm, sphere,
                       sphere_sizes)
from .pinned import (PinProfile, SweepResult, distance_set, pin_profile, pinned_distance_set, sweep,
                     sweep_second_moments, total_second_moment)
from .points import PointSet
from .verify import (RationalParam, VerificationReport, corollary_check, cs_lower_bound, good_pin_set,
                     main_theorem_check, pigeonhole_audit)

__version__ = "0.1.0"

__all__ = [
    "FieldSpec", "PinProfile", "PindistError", "PointSet", "RationalParam", "SweepResult",
    "VerificationReport", "bisector_count", "bisector_count_charsum", "character", "corollary_check",
    "cs_lower_bound", "distance", "distance_set", "generate", "good_pin_set", "main_theorem_check",
    "make_field", "norm", "parse", "pigeonhole_audit", "pin_profile", "pinned_distance_set", "render",
    "sphere", "sphere_sizes", "sweep", "sweep_second_moments", "total_second_moment",
]
