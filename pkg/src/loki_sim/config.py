"""Network parameter files and core programming (stands in for the SPI load).

Binary layout, little-endian where it matters::

    0   4   magic b"LOKI"
    4   1   version (1)
    5   1   leak: 0xFF = no leak, else shift exponent k in [0, 7]
    6   1   threshold, two's complement int8
    7   2   reserved, must be zero
    9   32768  weight image

The weight image is row-major over input address, then neuron index, two
weights per byte with the lower neuron index in the low nibble.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from .errors import ConfigError, CoreBusyError
from .neuron import LeakConfig

MAGIC = b"LOKI"
VERSION = 1
HEADER_SIZE = 9
IMAGE_SIZE = 256 * 256 // 2
FILE_SIZE = HEADER_SIZE + IMAGE_SIZE
DEFAULT_CLOCK_HZ = 667e6


@dataclass(eq=False)
class NetworkConfig:
    weights: np.ndarray  # (256 inputs, 256 neurons) int8 in [-8, 7]
    threshold: int
    leak: LeakConfig = field(default_factory=LeakConfig.no_leak)
    clock_hz: float = DEFAULT_CLOCK_HZ

    def __post_init__(self):
        w = np.asarray(self.weights)
        if w.shape != (256, 256):
            raise ConfigError(f"weight matrix must be 256x256, got {w.shape}")
        if w.size and (w.min() < -8 or w.max() > 7):
            raise ConfigError("weights must lie in [-8, 7]")
        self.weights = w.astype(np.int8)
        if not -128 <= self.threshold <= 127:
            raise ConfigError(f"threshold {self.threshold} outside [-128, 127]")
        if not self.clock_hz > 0:
            raise ConfigError("clock frequency must be positive")

    def same_parameters(self, other: NetworkConfig) -> bool:
        return (self.threshold == other.threshold and self.leak == other.leak
                and np.array_equal(self.weights, other.weights))

    def __eq__(self, other):
        if not isinstance(other, NetworkConfig):
            return NotImplemented
        return self.same_parameters(other) and self.clock_hz == other.clock_hz

    def synapse_words(self) -> np.ndarray:
        """Weights arranged by synapse word address ``g + 8 * a``, shape (2048, 32)."""
        return self.weights.reshape(256 * 8, 32)


def weights_to_image(weights: np.ndarray) -> bytes:
    nib = (np.asarray(weights, dtype=np.int8).astype(np.uint8) & 0xF).reshape(-1, 2)
    return (nib[:, 0] | (nib[:, 1] << 4)).astype(np.uint8).tobytes()


def image_to_weights(image: bytes) -> np.ndarray:
    if len(image) != IMAGE_SIZE:
        raise ConfigError(f"weight image must be {IMAGE_SIZE} bytes, got {len(image)}")
    b = np.frombuffer(image, dtype=np.uint8)
    nib = np.stack([b & 0xF, b >> 4], axis=1).reshape(256, 256).astype(np.int8)
    return np.where(nib > 7, nib - 16, nib).astype(np.int8)


def dumps(cfg: NetworkConfig) -> bytes:
    header = MAGIC + bytes([VERSION, cfg.leak.to_byte(), cfg.threshold & 0xFF, 0, 0])
    return header + weights_to_image(cfg.weights)


def loads(data: bytes, clock_hz: float = DEFAULT_CLOCK_HZ) -> NetworkConfig:
    if len(data) < HEADER_SIZE or data[:4] != MAGIC:
        raise ConfigError("not a LOKI config file (bad magic)")
    if data[4] != VERSION:
        raise ConfigError(f"unsupported config version {data[4]}")
    if len(data) != FILE_SIZE:
        raise ConfigError(f"config file must be {FILE_SIZE} bytes, got {len(data)}")
    try:
        leak = LeakConfig.from_byte(data[5])
    except ValueError as e:
        raise ConfigError(str(e)) from None
    th = data[6] - 256 if data[6] & 0x80 else data[6]
    if data[7:9] != b"\0\0":
        raise ConfigError("reserved header bytes must be zero")
    return NetworkConfig(image_to_weights(data[HEADER_SIZE:]), th, leak, clock_hz)


def load_config(src: Union[str, os.PathLike, bytes], clock_hz: float = DEFAULT_CLOCK_HZ
                ) -> NetworkConfig:
    if isinstance(src, (bytes, bytearray)):
        return loads(bytes(src), clock_hz)
    with open(src, "rb") as f:
        return loads(f.read(), clock_hz)


def save_config(cfg: NetworkConfig, path):
    with open(path, "wb") as f:
        f.write(dumps(cfg))


def random_config(rng: np.random.Generator, threshold=None, leak=None) -> NetworkConfig:
    """Uniform weights in [-8, 7], threshold in [1, 127], leak from {none, 0..7}."""
    w = rng.integers(-8, 8, size=(256, 256), dtype=np.int8)
    if threshold is None:
        threshold = int(rng.integers(1, 128))
    if leak is None:
        k = int(rng.integers(-1, 8))
        leak = LeakConfig(None if k < 0 else k)
    return NetworkConfig(w, threshold, leak)


def reference_config(seed: int = 0) -> NetworkConfig:
    """Fixed seeded configuration used by the dense benchmark and energy fit."""
    return random_config(np.random.default_rng(seed), threshold=64, leak=LeakConfig(3))


def program_core(core, cfg: NetworkConfig):
    """Write weights, threshold and leak into an idle core and zero its neurons.

    Configuration time is outside every measured cycle count.
    """
    if core.busy:
        raise CoreBusyError("cannot program a core with spike events in flight")
    core.synapse.load(cfg.synapse_words())
    core.neurons.clear()
    core.threshold = cfg.threshold
    core.leak = cfg.leak
    core.config = cfg
