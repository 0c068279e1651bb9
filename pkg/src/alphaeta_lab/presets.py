"""
Preset configurations for the standard experiments.

Includes the published operating point and desk-scale setups for every attack.
"""

import copy
from typing import Dict

from .config import (
    AttackConfig,
    DsrConfig,
    ExpanderConfig,
    ExperimentConfig,
    JointConfig,
    RunConfig,
    SystemConfig,
)


# ============================================================================
# EXPERIMENT PRESETS
# ============================================================================

PRESETS: Dict[str, ExperimentConfig] = {
    "paper_operating_point": ExperimentConfig(
        system=SystemConfig(M=2000, S=40000.0),
        attack=AttackConfig(gamma_trials=10000),
        run=RunConfig(trials=100000),
    ),
    "paper_keystream": ExperimentConfig(
        system=SystemConfig(M=2048, S=40000.0),
        expander=ExpanderConfig(key_bits=16),
        run=RunConfig(trials=1000000),
    ),
    "receiver_calibration": ExperimentConfig(
        system=SystemConfig(M=16, S=1.0),
        expander=ExpanderConfig(key_bits=16),
        run=RunConfig(trials=100000),
    ),
    "bruteforce_desk": ExperimentConfig(
        system=SystemConfig(M=16, S=25.0),
        expander=ExpanderConfig(key_bits=16),
        attack=AttackConfig(
            wedge_policy="exact",
            confidence=0.9999,
            n_values=[16, 32, 64],
            runs=100,
        ),
    ),
    "correlation_desk": ExperimentConfig(
        system=SystemConfig(M=64, S=400.0),
        expander=ExpanderConfig(key_bits=16),
        attack=AttackConfig(n_slots=256, msb_count=1, runs=50),
    ),
    "correlation_desk_filtered": ExperimentConfig(
        system=SystemConfig(M=64, S=400.0),
        expander=ExpanderConfig(key_bits=16, nonlinear_filter=True),
        attack=AttackConfig(n_slots=256, msb_count=1, runs=50),
    ),
    "joint_desk": ExperimentConfig(
        system=SystemConfig(M=16, S=4.0),
        expander=ExpanderConfig(key_bits=8),
        joint=JointConfig(n_values=[0, 1, 2, 4, 8, 16, 32, 64, 128, 256]),
    ),
    "dsr_sweep": ExperimentConfig(
        dsr=DsrConfig(coupling=2.0, gamma_target=3.0, S_list=[100.0, 1000.0, 10000.0]),
        attack=AttackConfig(gamma_trials=20000),
        run=RunConfig(trials=100000),
    ),
}


def get_preset(name: str) -> ExperimentConfig:
    """
    Get an experiment preset by name.

    Args:
        name: Preset name

    Returns:
        A fresh ExperimentConfig (safe to modify)

    Raises:
        KeyError: If preset not found
    """
    if name not in PRESETS:
        available = ", ".join(PRESETS.keys())
        raise KeyError(f"Unknown preset '{name}'. Available: {available}")

    return copy.deepcopy(PRESETS[name])


def list_presets() -> list:
    """List all available presets."""
    return list(PRESETS.keys())
