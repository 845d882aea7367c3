"""Optomechanically tunable nuclear x-ray/VUV absorption spectra.

A lever-mounted Moessbauer layer inside a driven optical cavity picks up
phonon sidebands set by the Lamb-Dicke parameter and, with the laser on,
transparency dips at every line center. This package computes the derived
optomechanical parameters, the steady-state absorption spectra, and runs an
independent truncated-basis solver against the closed-form steady state.
"""

from .errors import (
    ConvergenceError,
    DomainError,
    InputError,
    NuclideFormatError,
    StepSizeError,
    UnknownNuclideError,
)
from .franck_condon import Validity, franck_condon, franck_condon_log, validity
from .nuclides import (
    NuclideTransition,
    PhononBounds,
    builtin_nuclides,
    get_nuclide,
    lamb_dicke,
    load_nuclides,
    phonon_bounds,
)
from .optomech import (
    DerivedOptomech,
    OptomechConfig,
    cavity_photon_number,
    cavity_shifts,
    damping_shift,
    derive,
    ringdown,
    spring_shift,
    vacuum_coupling,
    zero_point_fluctuation,
)
from .oracle import (
    DECOHERENCE_MODEL_ID,
    OracleParams,
    TruncatedBasis,
    build_hamiltonian,
    compare_with_analytic,
    steady_state_solve,
    time_evolve,
)
from .spectrum import (
    CoherenceSet,
    DipMetrics,
    LineParams,
    Spectrum,
    absorption,
    coherence_set,
    compute_spectrum,
    default_grid,
    dip_metrics,
    dressed_states,
    find_peaks,
    peak_positions,
    spectrum_for,
    steady_state_coherence,
)
from .units import (
    CONSTANTS,
    PhysicalConstants,
    energy_to_angular_frequency,
    energy_to_wavevector,
    frequency_to_angular,
)
from .validation import ValidationReport, run_validation

__version__ = "0.1.0"
