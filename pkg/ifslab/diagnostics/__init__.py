"""Empirical checks of the structural hypotheses: equicontinuity, synchronization, minimality, stability."""

from .contraction import (
    ContractionCertificate,
    HittingParameters,
    contraction_certificate,
    default_arcs,
    hitting_parameters,
    with_hitting,
)
from .eprop import ProfileRow, cesaro_profile, e_property_profile
from .evidence import (
    cesaro_convergence,
    minimality_evidence,
    stability_gap,
    uniqueness_evidence,
)

__all__ = [
    "ContractionCertificate", "HittingParameters", "contraction_certificate", "default_arcs",
    "hitting_parameters", "with_hitting",
    "ProfileRow", "cesaro_profile", "e_property_profile",
    "cesaro_convergence", "minimality_evidence", "stability_gap", "uniqueness_evidence",
]
