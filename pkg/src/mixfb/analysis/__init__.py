"""Dominance certificates, equilibria, dominance maps and robustness margins."""
from mixfb.analysis.dominance import (
    CircleFailure,
    DominanceCertificate,
    RegionLabel,
    circle_criterion,
    k0,
    k2,
)
from mixfb.analysis.dominance_map import DominanceMap, default_grids, dominance_map
from mixfb.analysis.equilibria import (
    Equilibrium,
    classify_equilibrium,
    classify_region,
    find_equilibria,
)
from mixfb.analysis.robustness import (
    InstabilityGain,
    RobustnessReport,
    dominance_margin,
    instability_gain,
    perturbed_certificate,
    perturbed_equilibria,
    robustness_report,
    uncertainty_weight,
)
from mixfb.analysis.root_locus import RootLocus, root_locus

__all__ = [
    "CircleFailure",
    "DominanceCertificate",
    "DominanceMap",
    "Equilibrium",
    "InstabilityGain",
    "RegionLabel",
    "RobustnessReport",
    "RootLocus",
    "circle_criterion",
    "classify_equilibrium",
    "classify_region",
    "default_grids",
    "dominance_map",
    "dominance_margin",
    "find_equilibria",
    "instability_gain",
    "k0",
    "k2",
    "perturbed_certificate",
    "perturbed_equilibria",
    "robustness_report",
    "root_locus",
    "uncertainty_weight",
]
