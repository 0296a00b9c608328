"""Cycle-accurate simulator of the LOKI digital SNN accelerator core."""

from .aer import BlockAerPacket, Spike, TimeReference, decode_block, encode_block
from .config import NetworkConfig, load_config, random_config, reference_config, save_config
from .engine import Core, TimestepResult
from .golden import GoldenState, check_equivalence, compare, golden_run, golden_timestep
from .metrics import DEFAULT_ENERGY, EnergyModel, SimReport, energy, throughput
from .neuron import LeakConfig

__version__ = "0.1.0"

__all__ = [
    "BlockAerPacket", "Core", "DEFAULT_ENERGY", "EnergyModel", "GoldenState",
    "LeakConfig", "NetworkConfig", "SimReport", "Spike", "TimeReference",
    "TimestepResult", "check_equivalence", "compare", "decode_block", "encode_block",
    "energy", "golden_run", "golden_timestep", "load_config", "random_config", "reference_config",
    "save_config", "throughput",
]
