"""Frequency-domain design toolkit for impedance-matched Josephson
parametric amplifiers.

The library models the amplifier as a one-port reflection device: a
flux-pumped SQUID (small-signal two-branch admittance) terminated by an
engineered environment (Ruthroff coupled-line transformer, matching
elements, shunt capacitance).  On top of the model sit gain metrics
and profile classification, hot/cold noise calibration, and bounded
derivative-free design optimization.  The ``jpa-forge`` console script
exposes the same layers as subcommands.
"""

from .errors import (
    ConfigError,
    DegenerateBiasError,
    DegenerateFitError,
    DivergenceError,
    DomainError,
    JpaForgeError,
    NoBandwidthError,
    OscillationThresholdError,
    PoleError,
    SingularOperatingPointError,
    SingularValueError,
    UsageError,
)
from .gain import (
    AmplifierConfig,
    GainCurve,
    GainFault,
    GainMetrics,
    GainPoint,
    classify_profile,
    gain_metrics,
    gain_sweep,
    gbw_product,
    reflection_gain,
)
from .network import (
    AbcdMatrix,
    CoupledLineSpec,
    EnvironmentChain,
    RatioPoint,
    RuthroffTransformer,
    SeriesCapacitor,
    SeriesInductor,
    SeriesTunedReactance,
    ShuntCapacitor,
    TransmissionLine,
    cascade,
    electrical_angle,
    environment_admittance,
    environment_admittance_values,
    environment_impedance,
    reactance_slope,
    ruthroff_impedance,
    ruthroff_impedance_values,
    ruthroff_pole_angle,
    tline_abcd,
    transformation_ratio,
)
from .noise import (
    NoiseDataset,
    NoiseFitResult,
    added_photons,
    fit_noise,
    noise_forward,
    planck_occupancy_temperature,
    sql_temperature,
)
from .optimizer import (
    Objective,
    ObjectiveResult,
    OptimizeResult,
    ParameterSpace,
    SweepRow,
    TraceEntry,
    apply_parameters,
    grid_search,
    optimize,
    sweep,
)
from .pumpistor import (
    OperatingPoint,
    PumpistorElements,
    SquidSpec,
    bare_resonance,
    pumpistor_admittance,
    pumpistor_admittance_values,
    pumpistor_elements,
    squid_inductance,
)
from .quantities import (
    BOLTZMANN,
    CONSTANTS,
    FLUX_QUANTUM,
    HBAR,
    Immittance,
    ImmittanceKind,
    PhysicalConstants,
    admittance,
    admittance_value,
    immittance_invert,
    impedance,
    to_angular,
    to_cyclic,
)
from .reference import (
    reference_amplifier,
    reference_band,
    reference_environment,
    reference_grid,
    reference_operating_point,
    reference_squid,
    reference_transformer,
)

__version__ = "0.1.0"
