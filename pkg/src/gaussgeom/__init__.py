"""Invariant-measure geometry and typical correlations of mixed Gaussian states."""

from .core import (
    BONA_FIDE_TOL,
    DomainError,
    InvariantCoords,
    NonPhysicalWarning,
    StdForm,
    cm_from_invariants,
    energy,
    invariants,
    is_bona_fide,
    purity,
    random_covmat,
    random_local_symplectic,
    random_symplectic,
    read_covmat,
    standard_form,
    symplectic_form,
    symplectic_spectrum,
    thermal,
    two_mode_squeezed,
    vacuum,
    write_covmat,
)
from .measures import (
    FISHER_RAO,
    HILBERT_SCHMIDT,
    REDUCED_PURE,
    MeasureKind,
    TangentDirection,
    density,
    density_fr,
    density_hs,
    density_ratio,
    density_reduced_pure,
    fixed_purity,
    hs_density_invariant_coords,
    hs_density_std_form,
    line_element_fr,
    line_element_hs,
    numeric_metric_density,
    numeric_std_form_density,
)
from .correlations import (
    PptSpectrum,
    RegionClass,
    classify_region,
    delta_bounds,
    delta_threshold,
    log_negativity,
    partial_transpose,
    ppt_spectrum,
    steerability,
    steerability_a_to_b,
    steerability_b_to_a,
)
from .mcint import (
    AdaptiveGrid,
    IntegrationError,
    McEstimate,
    plain_integrate,
    vegas_integrate,
)
from .typicality import (
    EnergyEnsemble,
    EnergyStats,
    LocalSympSample,
    McConfig,
    PureEndpoint,
    assemble_covmat,
    energy_constrained_ratio,
    energy_constrained_stats,
    energy_weight,
    mean_logneg_fixed_purities,
    pure_state_endpoint,
    purity_cut,
    sample_energy_constrained,
    scan_purity_plane,
)

__version__ = "0.1.0"
