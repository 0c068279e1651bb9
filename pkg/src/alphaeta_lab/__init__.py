"""
alphaeta lab
============

Simulator and attack lab for the alpha-eta (Y-00) coherent-state cipher.

Features:
- LFSR key expansion with an optional nonlinear output filter
- Exact 2M-phase mapper and coherent-state measurement statistics
- Keyed homodyne receiver with Monte Carlo bit-error rates
- Eavesdropper attacks: ciphertext-only guessing, wedge-assisted brute force,
  correlation attack, joint square-root measurement
- Deliberate signal randomisation and its scaling experiment
- Seeded, reproducible CLI runs with CSV/JSON results and run manifests

Quick Start:
    # Python API
    >>> from alphaeta_lab import SystemParams, gamma_analytic
    >>> gamma_analytic(SystemParams(M=2000, S=40000))
    3.183098861837907

    # CLI
    $ alphaeta-lab gamma --preset paper_operating_point

License: MIT
"""

__version__ = "1.0.0"
__license__ = "MIT"

from .constellation import SystemParams, map_angle, demap_bit, pol, constellation_table
from .keystream import (
    FilteredLfsrExpander,
    LfsrExpander,
    LfsrSpec,
    SeedKey,
    advance_state,
    chunk_symbols,
    lfsr_expand,
    nonlinear_filter,
    rewind_state,
    symbol_linear_forms,
)
from .measurement import (
    QuadratureSample,
    heterodyne_sample,
    homodyne_sample,
    phase_error_quantile,
    phase_estimate,
)
from .receiver import bob_ber_analytic, bob_decide, encrypt, roundtrip_ber
from .adversary import (
    AttackReport,
    WedgePolicy,
    WedgeSet,
    assisted_bruteforce,
    complexity_estimate,
    correlation_attack,
    eve_ciphertext_only_bit,
    gamma_analytic,
    gamma_empirical,
    wedge_candidates,
)
from .dsr import DsrPolicy, bob_penalty, dsr_apply, dsr_scaling_experiment
from .jointattack import GramMatrix, build_gram, pe_vs_n, srm_error
from .config import ExperimentConfig, load_config
from .presets import PRESETS, get_preset, list_presets
from .errors import AlphaEtaError, ConfigError, GuardViolation, NumericalError
from .runner import ExperimentRunner, RunManifest, batch_run, run
from .cli import main as cli_main

__all__ = [
    # Core
    "SystemParams",
    "map_angle",
    "demap_bit",
    "pol",
    "constellation_table",
    "LfsrSpec",
    "SeedKey",
    "LfsrExpander",
    "FilteredLfsrExpander",
    "lfsr_expand",
    "advance_state",
    "rewind_state",
    "chunk_symbols",
    "nonlinear_filter",
    "symbol_linear_forms",
    "QuadratureSample",
    "heterodyne_sample",
    "homodyne_sample",
    "phase_estimate",
    "phase_error_quantile",
    "encrypt",
    "bob_decide",
    "bob_ber_analytic",
    "roundtrip_ber",
    # Attacks
    "AttackReport",
    "WedgePolicy",
    "WedgeSet",
    "wedge_candidates",
    "gamma_analytic",
    "gamma_empirical",
    "complexity_estimate",
    "eve_ciphertext_only_bit",
    "assisted_bruteforce",
    "correlation_attack",
    "DsrPolicy",
    "dsr_apply",
    "bob_penalty",
    "dsr_scaling_experiment",
    "GramMatrix",
    "build_gram",
    "srm_error",
    "pe_vs_n",
    # Configuration
    "ExperimentConfig",
    "load_config",
    "PRESETS",
    "get_preset",
    "list_presets",
    "AlphaEtaError",
    "ConfigError",
    "GuardViolation",
    "NumericalError",
    # Interfaces
    "ExperimentRunner",
    "RunManifest",
    "batch_run",
    "run",
    "cli_main",
    # Metadata
    "__version__",
    "__license__",
]
