"""Automatic quantum error correction: Lindblad models whose cooled ancillas
undo errors continuously, the conditions that make this work, and a
three-spin/cavity design study."""

from .conditions import CONDITION_IDS, ConditionReport, run_checks
from .core_ops import HilbertSpace, basis_ket, embed_product, projector, single_site_op
from .jump_sim import jump_expand, phase_matching_factor, reduce_to_system
from .liouville import (
    build_generator,
    evolve_via_spectrum,
    propagate,
    settling_time,
    spectral_decompose,
)
from .metrics import codeword_coherence, codeword_populations, linear_entropy
from .models import (
    AqecModel,
    OverlapMatrix,
    corrupted_state,
    default_psi,
    load_model,
    load_overlaps,
    toy_model_direct,
    toy_model_flip,
    two_codeword_model,
)
from .spin_cavity import SpinSystem, cavity_modes, design_report, dipole_spectrum, spin_hamiltonian

__version__ = "0.1.0"
