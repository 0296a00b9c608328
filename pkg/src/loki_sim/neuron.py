"""Quantized LIF arithmetic: saturating integration, shift leak, threshold/fire/reset.

Membrane potentials are signed 8-bit, weights signed 4-bit. The scalar
functions define the behaviour; the ``*_lanes`` variants apply the same rules
to a whole neuron word (32 parallel neurons) and are what the engine uses.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

V_MIN, V_MAX = -128, 127
W_MIN, W_MAX = -8, 7
K_MAX = 7

NO_LEAK_CODE = 0xFF


def check_potential(v: int) -> int:
    if not V_MIN <= v <= V_MAX:
        raise ValueError(f"membrane potential {v} outside [{V_MIN}, {V_MAX}]")
    return v


def check_weight(w: int) -> int:
    if not W_MIN <= w <= W_MAX:
        raise ValueError(f"weight {w} outside [{W_MIN}, {W_MAX}]")
    return w


@dataclass(frozen=True)
class LeakConfig:
    """Leak setting shared by all neurons of a core.

    ``k=None`` disables leakage (alpha = 1). Otherwise alpha = 1 - 2**-k, so
    each timestep removes ``|v| >> k`` from the magnitude of ``v``.
    """

    k: Optional[int] = None

    def __post_init__(self):
        if self.k is not None and not 0 <= self.k <= K_MAX:
            raise ValueError(f"leak exponent {self.k} outside [0, {K_MAX}]")

    @classmethod
    def no_leak(cls) -> LeakConfig:
        return cls(None)

    @classmethod
    def shift(cls, k: int) -> LeakConfig:
        return cls(k)

    @property
    def enabled(self) -> bool:
        return self.k is not None

    @property
    def alpha(self) -> float:
        return 1.0 if self.k is None else 1.0 - 2.0 ** -self.k

    def to_byte(self) -> int:
        return NO_LEAK_CODE if self.k is None else self.k

    @classmethod
    def from_byte(cls, b: int) -> LeakConfig:
        if b == NO_LEAK_CODE:
            return cls(None)
        if 0 <= b <= K_MAX:
            return cls(b)
        raise ValueError(f"invalid leak byte 0x{b:02x}")

    def __str__(self):
        return "NoLeak" if self.k is None else f"Shift({self.k})"


def integrate(v: int, w: int) -> int:
    """One synaptic operation: saturating ``v + w``."""
    s = v + w
    if s > V_MAX:
        return V_MAX
    if s < V_MIN:
        return V_MIN
    return s


def leak(v: int, cfg: LeakConfig) -> int:
    # sign-magnitude shift, not v >> k: must be symmetric and never cross zero
    if cfg.k is None or v == 0:
        return v
    if v > 0:
        return v - (v >> cfg.k)
    return v + ((-v) >> cfg.k)


def fire_check(v: int, threshold: int) -> bool:
    return v >= threshold


def leak_fire_step(v: int, threshold: int, cfg: LeakConfig) -> tuple[int, bool]:
    """Time-reference update of one neuron: fire and reset, or leak."""
    if fire_check(v, threshold):
        return 0, True
    return leak(v, cfg), False


# saturation table over every reachable sum v + w; negative sums index from
# the end of the table, so it needs one slot per sum and no offset
_SUM_MIN, _SUM_MAX = V_MIN + W_MIN, V_MAX + W_MAX
_SAT = np.empty(_SUM_MAX - _SUM_MIN + 1, dtype=np.int16)
for _s in range(_SUM_MIN, _SUM_MAX + 1):
    _SAT[_s] = max(V_MIN, min(V_MAX, _s))
_sat_take = _SAT.take


def integrate_lanes(v: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Saturating add over one 32-lane neuron word.

    Inputs must be int16 arrays already in range (potentials in [-128, 127],
    weights in [-8, 7]); returns a fresh int16 array.
    """
    return _sat_take(v + w)


def leak_lanes(v: np.ndarray, cfg: LeakConfig) -> np.ndarray:
    if cfg.k is None:
        return v.copy()
    mag = np.abs(v)
    return v - np.sign(v) * (mag >> cfg.k)


def leak_fire_lanes(v: np.ndarray, threshold: int,
                    cfg: LeakConfig) -> tuple[np.ndarray, np.ndarray]:
    """Vector form of :func:`leak_fire_step`. Returns (new potentials, fired mask)."""
    fired = v >= threshold
    out = np.where(fired, 0, leak_lanes(v, cfg))
    return out.astype(v.dtype, copy=False), fired
