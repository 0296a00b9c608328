"""Reference functional model of the LIF layer: no pipeline, no memories.

Used as the bit-exactness oracle for :class:`loki_sim.engine.Core`. The
arithmetic here is written out separately from :mod:`loki_sim.neuron` on
purpose; do not import from it, or a shared bug would cancel out.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np

from .aer import Spike, TimeReference
from .config import NetworkConfig
from .errors import ConfigError


class ConfigMismatchError(ConfigError):
    pass


@dataclass
class GoldenState:
    config: NetworkConfig
    potentials: np.ndarray = field(default_factory=lambda: np.zeros(256, dtype=np.int64))


def _add_row(v: np.ndarray, row: np.ndarray) -> np.ndarray:
    # int64 sum cannot wrap, so clamping afterwards is exact
    return np.minimum(np.maximum(v + row, -128), 127)


def _leak(v: np.ndarray, k: Optional[int]) -> np.ndarray:
    if k is None:
        return v
    # truncating division is rounding toward zero, i.e. magnitude floor
    return v - np.trunc(v / float(2 ** k)).astype(np.int64)


def golden_integrate(state: GoldenState, spikes: Sequence[int]) -> GoldenState:
    v = state.potentials.copy()
    w = state.config.weights.astype(np.int64)
    for a in spikes:
        if not 0 <= a <= 255:
            raise ValueError(f"input address {a} outside [0, 255]")
        v = _add_row(v, w[a])
    return GoldenState(state.config, v)


def golden_timestep(state: GoldenState, spikes: Sequence[int]) -> tuple[GoldenState, set[int]]:
    """Integrate ``spikes`` in order, then fire-and-reset or leak every neuron."""
    v = golden_integrate(state, spikes).potentials
    th = state.config.threshold
    fire = v >= th
    v = np.where(fire, 0, _leak(v, state.config.leak.k))
    return GoldenState(state.config, v), set(np.flatnonzero(fire).tolist())


def golden_run(config: NetworkConfig, events: Iterable) -> tuple[GoldenState, list[set[int]]]:
    state = GoldenState(config)
    fires = []
    pending: list[int] = []
    for ev in events:
        if isinstance(ev, Spike):
            pending.append(ev.address)
        elif isinstance(ev, TimeReference):
            state, fired = golden_timestep(state, pending)
            fires.append(fired)
            pending = []
    if pending:
        state = golden_integrate(state, pending)
    return state, fires


@dataclass
class Verdict:
    equal: bool
    timestep: Optional[int] = None
    neuron: Optional[int] = None
    detail: str = ""

    def __bool__(self):
        return self.equal

    def __str__(self):
        if self.equal:
            return "bit-exact: all potentials and fire sets match"
        where = f"timestep {self.timestep}" if self.timestep is not None else "final state"
        if self.neuron is not None:
            where += f", neuron {self.neuron}"
        return f"divergence at {where}: {self.detail}"


def _compare_fires(engine_fires, golden_fires, offset=0) -> Optional[Verdict]:
    for t, (ef, gf) in enumerate(zip(engine_fires, golden_fires)):
        ef, gf = set(ef), set(gf)
        if ef != gf:
            n = min(ef ^ gf)
            return Verdict(False, t + offset, n,
                           f"neuron fired in {'engine' if n in ef else 'oracle'} only")
    if len(engine_fires) != len(golden_fires):
        return Verdict(False, min(len(engine_fires), len(golden_fires)) + offset, None,
                       f"engine ran {len(engine_fires)} timesteps, oracle {len(golden_fires)}")
    return None


def _compare_potentials(ev: np.ndarray, gv: np.ndarray, timestep) -> Optional[Verdict]:
    diff = np.flatnonzero(np.asarray(ev, dtype=np.int64) != gv)
    if diff.size:
        n = int(diff[0])
        return Verdict(False, timestep, n,
                       f"potential engine={int(ev[n])} oracle={int(gv[n])}")
    return None


def _first_divergence(*checks) -> Verdict:
    # a failing Verdict is falsy, so test for None rather than chaining with `or`
    for check in checks:
        v = check()
        if v is not None:
            return v
    return Verdict(True)


def compare(engine, golden: GoldenState, engine_fires, golden_fires) -> Verdict:
    """Compare a finished engine run (a Core) against a finished oracle run."""
    if engine.config is None or not engine.config.same_parameters(golden.config):
        raise ConfigMismatchError("engine and oracle were run with different configurations")
    return _first_divergence(
        lambda: _compare_fires(engine_fires, golden_fires),
        lambda: _compare_potentials(engine.potentials(), golden.potentials, None))


def check_equivalence(config: NetworkConfig, events: Sequence, core=None) -> Verdict:
    """Run engine and oracle side by side, comparing after every timestep.

    Locates the first timestep at which any potential or fire set differs.
    """
    from .engine import Core

    if core is None:
        core = Core(config)
    elif core.config is None or not core.config.same_parameters(config):
        raise ConfigMismatchError("core is programmed with a different configuration")
    state = GoldenState(config)
    pending: list[int] = []
    t = 0
    for ev in events:
        if isinstance(ev, Spike):
            core.process_spike(ev.address)
            pending.append(ev.address)
        elif isinstance(ev, TimeReference):
            res = core.process_time_reference()
            state, fired = golden_timestep(state, pending)
            pending = []
            v = _first_divergence(
                lambda: _compare_fires([res.fired], [fired], t),
                lambda: _compare_potentials(core.potentials(), state.potentials, t))
            if not v:
                return v
            t += 1
    core.drain()
    if pending:
        state = golden_integrate(state, pending)
    return _first_divergence(
        lambda: _compare_potentials(core.potentials(), state.potentials, None))
