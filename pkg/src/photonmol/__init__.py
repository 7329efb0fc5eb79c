"""
Photonic-molecule photon-pair source modelling.

Transfer-matrix spectra of a two-ring device with an AMZI loss channel,
SFWM joint spectra and Schmidt purity, coupling sweeps, directional-coupler
design maps, and re-analysis of counting data.
"""

from .coupler import (
    CouplerGeometry,
    CouplerMetrics,
    CouplerScan,
    CouplingCoefficientModel,
    coupler_matrix,
    coupler_metrics,
    coupler_transmittance,
    design_space_scan,
)
from .design import SweepCell, SweepGrid, SweepSpec, max_purity_over_pump, select_design, sweep
from .errors import (
    DataError,
    DomainError,
    FitError,
    PhotonmolError,
    SingularityError,
    UsageError,
)
from .molecule import (
    FieldSolution,
    MoleculeParams,
    ResonanceInfo,
    escape_efficiency,
    field_enhancement,
    fields_at_frequency,
    find_resonances,
    primary_linewidth_pm,
    solve_fields,
    transmission_spectrum,
)
from .sfwm import (
    JointSpectrum,
    PumpPulse,
    SchmidtResult,
    build_jsa,
    design_grids,
    jsi_purity_gap,
    pump_envelope,
    relative_brightness,
    schmidt_purity,
)
from .spectral import (
    ComplexSpectrum,
    WaveguideModel,
    WavelengthGrid,
    frequency_to_wavelength,
    loss_transmission,
    propagation_constant,
    wavelength_to_frequency,
)

__version__ = "0.1.0"

__all__ = [
    "ComplexSpectrum", "CouplerGeometry", "CouplerMetrics", "CouplerScan",
    "CouplingCoefficientModel", "DataError", "DomainError", "FieldSolution", "FitError",
    "JointSpectrum", "MoleculeParams", "PhotonmolError", "PumpPulse", "ResonanceInfo",
    "SchmidtResult", "SingularityError", "SweepCell", "SweepGrid", "SweepSpec",
    "UsageError", "WaveguideModel", "WavelengthGrid", "build_jsa", "coupler_matrix",
    "coupler_metrics", "coupler_transmittance", "design_grids", "design_space_scan",
    "escape_efficiency", "field_enhancement", "fields_at_frequency", "find_resonances",
    "frequency_to_wavelength", "jsi_purity_gap", "loss_transmission", "max_purity_over_pump",
    "primary_linewidth_pm", "propagation_constant", "pump_envelope", "relative_brightness",
    "schmidt_purity", "select_design", "solve_fields", "sweep", "transmission_spectrum",
    "wavelength_to_frequency",
]
