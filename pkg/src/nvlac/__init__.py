"""Spin-level anti-crossing dynamics for a single solid-state spin system.

The package models an electron spin-1 coupled to two nuclear spins, locates
the magnetic-field angle where a pair of its levels anti-crosses, reduces
that pair to an effective two-level system, and propagates the driven
dynamics exactly, with no rotating-wave approximation. Pulse-sequence
simulations and Fourier analysis reproduce the standard experimental views:
level diagrams, Bloch trajectories, Rabi traces and their spectra, and
detuned free-evolution fringes.

Units: energies and frequencies in MHz, times in microseconds, magnetic
field in gauss, angles in degrees for field orientation and radians for
drive and pulse phases.
"""
from .errors import InvalidArgumentError, InvalidStateError, NotFoundError
from .operators import basis_ket, embed, is_hermitian, spin_operators
from .system import (DIM, DIMS, FieldSpec, SpinSystemParams, build_hamiltonian,
                     field_vector, params_from_items, params_to_items)
from .spectra import (EigenSystem, LevelCurves, TlsDescriptor, eigensystem,
                      find_lac, pair_indices, reference_pair_states,
                      tls_extract, track_levels, transition_moments)
from .dynamics import (BlochTrace, DriveParams, StateTrajectory, bloch_coords,
                       corotating_components, drive_batch, phase_average,
                       propagate, rotating_frame, splitmix64, step_propagator,
                       tls_hamiltonian)
from .fourier import (Peak, PeakList, SpectrumData, TimeTrace, dft, find_peaks,
                      normalize_axis)
from .experiments import (ExperimentTrace, PulseSequence, RamseyConfig,
                          brightest_pair_transition, mw_pulse_operator,
                          number_operator, parse_angle, parse_sequence,
                          polarize, rabi_experiment, ramsey_experiment,
                          readout, run_sequence, transition_table)

__version__ = "0.1.0"

__all__ = [
    "InvalidArgumentError", "InvalidStateError", "NotFoundError",
    "basis_ket", "embed", "is_hermitian", "spin_operators",
    "DIM", "DIMS", "FieldSpec", "SpinSystemParams", "build_hamiltonian",
    "field_vector", "params_from_items", "params_to_items",
    "EigenSystem", "LevelCurves", "TlsDescriptor", "eigensystem", "find_lac",
    "pair_indices", "reference_pair_states", "tls_extract", "track_levels",
    "transition_moments",
    "BlochTrace", "DriveParams", "StateTrajectory", "bloch_coords",
    "corotating_components", "drive_batch", "phase_average", "propagate",
    "rotating_frame", "splitmix64", "step_propagator", "tls_hamiltonian",
    "Peak", "PeakList", "SpectrumData", "TimeTrace", "dft", "find_peaks",
    "normalize_axis",
    "ExperimentTrace", "PulseSequence", "RamseyConfig",
    "brightest_pair_transition", "mw_pulse_operator", "number_operator",
    "parse_angle", "parse_sequence", "polarize", "rabi_experiment",
    "ramsey_experiment", "readout", "run_sequence", "transition_table",
]
