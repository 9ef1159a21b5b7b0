"""Photon pulses in linear optical circuits over mode-labelled bosonic Fock states."""

from .errors import (
    ConfigError,
    GridMismatch,
    NonCommensurateShift,
    NotNormalized,
    PulseFockError,
    RailMismatch,
    SupportOutOfBounds,
    TruncationError,
    ZeroMode,
)
from .grid_modes import Envelope, Grid, Mode, PulseSpec, make_pulse, normalize, scalar_product, shift
from .propagation import (
    BeamSplitter,
    Circuit,
    Dispersion,
    FrequencyOperator1D,
    Rail,
    RailMode,
    evolve,
    inner,
    run_circuit,
    scatter,
    two_port_circuit,
)
from .fock import (
    FockState,
    Monomial,
    annihilate,
    commutator_BBdag,
    create,
    energy_expectation,
    evolve_fock_state,
    inner_product,
    monomial_state,
    permanent,
    vacuum,
    vacuum_expectation_oracle,
)
from .spectral_iso import SpectralCoefficients, appendix_b_equivalence, from_reciprocal, to_reciprocal
from .detection import (
    DetectionReport,
    DetectorObservable,
    classical_particle_baseline,
    classical_wave_baseline,
    expectation,
    hom_sweep,
    rail_sector_decompose,
)

__version__ = "0.1.0"
