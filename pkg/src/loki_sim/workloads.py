"""Synthetic input streams."""

from __future__ import annotations

import numpy as np

from .aer import TIME_REF, InputEvent, Spike


def dense_events(timesteps: int) -> list[InputEvent]:
    """0% input sparsity: all 256 inputs spike once per timestep."""
    events: list[InputEvent] = []
    for _ in range(timesteps):
        events.extend(Spike(a) for a in range(256))
        events.append(TIME_REF)
    return events


def random_events(rng: np.random.Generator, timesteps=None, sparsity=None) -> list[InputEvent]:
    """Random stream: each input fires per timestep with probability 1 - sparsity,
    in shuffled order. Defaults draw 1..50 timesteps and sparsity in [0, 0.99].
    """
    if timesteps is None:
        timesteps = int(rng.integers(1, 51))
    if sparsity is None:
        sparsity = float(rng.uniform(0.0, 0.99))
    events: list[InputEvent] = []
    for _ in range(timesteps):
        active = np.flatnonzero(rng.random(256) >= sparsity)
        rng.shuffle(active)
        events.extend(Spike(int(a)) for a in active)
        events.append(TIME_REF)
    return events
