from .betac import BetacEstimate, CrossingError, ScalingReport, estimate_betac, locate_crossing, scaling_report
from .diagnostics import AnnulusDiagnostic, InequalityCheck, annulus_diagnostic, max_cluster_checks
from .stats import EstimateRecord, z_score
from .susceptibility import (
    PhiEstimate,
    SusceptibilityEstimate,
    TypicalMax,
    betac_lower_bound,
    compute_phi,
    estimate_susceptibility,
    estimate_typical_max,
)
from .tail import DeltaFit, TailCurve, curve_from_sizes, estimate_tail, fit_delta
from .two_point import RESTRICTED, UNRESTRICTED, RadialTwoPoint, TriangleSum, estimate_radial_two_point, triangle_sum

__all__ = [
    "AnnulusDiagnostic",
    "BetacEstimate",
    "CrossingError",
    "DeltaFit",
    "EstimateRecord",
    "InequalityCheck",
    "PhiEstimate",
    "RESTRICTED",
    "RadialTwoPoint",
    "ScalingReport",
    "SusceptibilityEstimate",
    "TailCurve",
    "TriangleSum",
    "TypicalMax",
    "UNRESTRICTED",
    "annulus_diagnostic",
    "betac_lower_bound",
    "compute_phi",
    "curve_from_sizes",
    "estimate_betac",
    "estimate_radial_two_point",
    "estimate_susceptibility",
    "estimate_tail",
    "estimate_typical_max",
    "fit_delta",
    "locate_crossing",
    "max_cluster_checks",
    "scaling_report",
    "triangle_sum",
    "z_score",
]
