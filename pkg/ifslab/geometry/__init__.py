"""Circle geometry and circle homeomorphisms."""

from .circle import Arc, CirclePoint, arc_contains, arc_length, circ_dist, wrap
from .homeo import (
    Arnold,
    Homeo,
    InverseHomeo,
    PiecewiseLinear,
    Rotation,
    ValidationReport,
    Word,
    apply,
    apply_inverse,
    compose_word,
    homeo_from_record,
    image_arc,
    validate_homeo,
)

__all__ = [
    "Arc", "CirclePoint", "arc_contains", "arc_length", "circ_dist", "wrap",
    "Arnold", "Homeo", "InverseHomeo", "PiecewiseLinear", "Rotation",
    "ValidationReport", "Word", "apply", "apply_inverse", "compose_word",
    "homeo_from_record", "image_arc", "validate_homeo",
]
