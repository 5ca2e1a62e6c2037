"""Finite-dimensional quantum channels as relaxation dynamics."""
from .channel import (Channel, ChoiMatrix, KingRuskaiForm, PauliTransferMatrix, amplitude_damping,
                      apply, channel_fidelity, channel_from_json, compose, degenerate, depolarizing,
                      identity, king_ruskai_decompose, pauli_transfer, phase_damping, tensor_channels,
                      tensor_power, thermalizing, two_pauli, unitary_channel)
from .contractivity import (ContractivityReport, FixedPointReport, commutant, fixed_point,
                            knill_laflamme_check, mixing_rate, modulus, modulus_estimate,
                            modulus_qubit, spectral_gap, strictify, transfer_spectrum)
from .distance import fidelity, fvdg_bounds, hs_distance, optimal_binary_detection, trace_norm_distance
from .dynamics import (NoisyCircuit, OrbitRecord, n_max_operations, n_max_report, nmr_case_study,
                       required_precision, simulate_circuit, simulate_register, threshold_error_rate,
                       threshold_table)
from .enterg import (EntropyEnergyParams, GibbsSystem, effective_pure_state, entropy_gain_bound,
                     fannes_bound, free_energy, gibbs_state, mixture_entropy_bound, n_max_entropy,
                     n_max_weak_noise, spatial_free_energy_check, verify_eps)
from .errors import QChanError
from .qstate import (DensityMatrix, PureState, make_density, make_pure, partial_trace, purify,
                     relative_entropy, schmidt, von_neumann_entropy)
from .toric import build_lattice, check_commutation, ground_space_degeneracy_bruteforce, protected_dimension

__version__ = "0.1.0"

__all__ = [
    "Channel", "ChoiMatrix", "KingRuskaiForm", "PauliTransferMatrix", "amplitude_damping", "apply",
    "channel_fidelity", "channel_from_json", "compose", "degenerate", "depolarizing", "identity",
    "king_ruskai_decompose", "pauli_transfer", "phase_damping", "tensor_channels", "tensor_power",
    "thermalizing", "two_pauli", "unitary_channel", "ContractivityReport", "FixedPointReport",
    "commutant", "fixed_point", "knill_laflamme_check", "mixing_rate", "modulus",
    "modulus_estimate", "modulus_qubit", "spectral_gap", "strictify", "transfer_spectrum",
    "fidelity", "fvdg_bounds", "hs_distance", "optimal_binary_detection", "trace_norm_distance",
    "NoisyCircuit", "OrbitRecord", "n_max_operations", "n_max_report", "nmr_case_study",
    "required_precision", "simulate_circuit", "simulate_register", "threshold_error_rate",
    "threshold_table", "EntropyEnergyParams", "GibbsSystem", "effective_pure_state",
    "entropy_gain_bound", "fannes_bound", "free_energy", "gibbs_state", "mixture_entropy_bound",
    "n_max_entropy", "n_max_weak_noise", "spatial_free_energy_check", "verify_eps", "QChanError",
    "DensityMatrix", "PureState", "make_density", "make_pure", "partial_trace", "purify",
    "relative_entropy", "schmidt", "von_neumann_entropy", "build_lattice", "check_commutation",
    "ground_space_degeneracy_bruteforce", "protected_dimension",
]
