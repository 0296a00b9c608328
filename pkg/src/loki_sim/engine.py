"""Cycle-driven model of one LOKI core.

Per spike event on input ``a`` (cycles relative to the event's first cycle):

    rel 0..7    issue synapse read of word g = rel, address g + 8a
    rel 3..10   read neuron group g = rel - 3 from the neuron latches
    rel 4..11   collect weights for g = rel - 4, integrate, write group g back

A lone event therefore takes 12 cycles. The neuron update datapath is busy
from rel 3 to rel 11, so the next event is admitted at rel 9 of the previous
one: its first three cycles (weight prefetch) overlap the previous tail and
back-to-back events cost 9 cycles each, 3 + 9N in total.

A time reference drains the pipeline, then runs the leak-and-fire pass over
the eight neuron groups (one cycle each) and emits block AER packets (one
handshake each, ``handshake_cycles`` apiece).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from . import neuron
from .aer import BlockAerPacket, Spike, TimeReference, decode_block
from .config import NetworkConfig, program_core
from .errors import UnconfiguredCoreError
from .memory import LANES, N_GROUPS, MccgMemory, NeuronMemory, neuron_slot
from .metrics import SimReport
from .neuron import integrate_lanes

log = logging.getLogger(__name__)

EVENT_CYCLES = 12
ISSUE_START, ISSUE_END = 0, 7
NREAD_START = 3
UPDATE_START = 4
ADMIT_AT = 9  # rel step of the previous event at which a new one may start
LEAK_FIRE_CYCLES = N_GROUPS


def _build_schedule():
    """Per rel step: (synapse bank, neuron slot) to update, neuron slot to read, group to issue."""
    sched = []
    for r in range(EVENT_CYCLES):
        g_up, g_rd = r - UPDATE_START, r - NREAD_START
        # synapse bank of word g is g & 3 (address g + 8a)
        update = (g_up & 3, neuron_slot(g_up)) if 0 <= g_up < N_GROUPS else None
        read = neuron_slot(g_rd) if 0 <= g_rd < N_GROUPS else None
        issue = r - ISSUE_START if ISSUE_START <= r <= ISSUE_END else None
        sched.append((update, read, issue))
    return tuple(sched)


def _check_overlap(sched, admit_at=ADMIT_AT):
    # two events overlap while the older one is at rel >= admit_at; each
    # resource may be claimed by at most one of them in any cycle, and the
    # neuron update datapath (first read to last write) holds one event at a time
    if EVENT_CYCLES - admit_at > admit_at:
        raise AssertionError("more than two events would be in flight")
    if admit_at + NREAD_START < EVENT_CYCLES:
        raise AssertionError("neuron datapath would hold two events")
    for old in range(admit_at, EVENT_CYCLES):
        new = old - admit_at
        for kind in range(3):
            if sched[old][kind] is not None and sched[new][kind] is not None:
                raise AssertionError(f"schedule overlap at rel {old}/{new}")


_SCHEDULE = _build_schedule()
_check_overlap(_SCHEDULE)


@dataclass(slots=True)
class _Event:
    address: int
    start: int
    rel: int = 0
    latch: Optional[np.ndarray] = None
    fetched: int = 0
    consumed: int = 0


@dataclass
class TimestepResult:
    packets: list[BlockAerPacket]
    spike_count: int
    cycles_elapsed: int

    @property
    def fired(self) -> list[int]:
        return sorted(i for p in self.packets for i in decode_block(p))


@dataclass
class _Counters:
    spike_cycles: int = 0
    total_cycles: int = 0
    input_spikes: int = 0
    sops: int = 0
    output_spikes: int = 0
    handshakes: int = 0
    timesteps: int = 0


class Core:
    """A single 256x256 core: synapse and neuron memories plus the event pipeline.

    ``emit_empty_blocks`` sends all eight packets every timestep instead of
    only the non-zero ones. ``leak_fault`` injects an off-by-one leak for
    exercising the equivalence checker.
    """

    def __init__(self, config: Optional[NetworkConfig] = None, *,
                 emit_empty_blocks: bool = False, handshake_cycles: int = 1,
                 leak_fault: bool = False):
        self.synapse = MccgMemory()
        self.neurons = NeuronMemory()
        self.config: Optional[NetworkConfig] = None
        self.threshold: Optional[int] = None
        self.leak: Optional[neuron.LeakConfig] = None
        self.emit_empty_blocks = emit_empty_blocks
        if handshake_cycles < 0:
            raise ValueError("handshake_cycles must be non-negative")
        self.handshake_cycles = handshake_cycles
        self.leak_fault = leak_fault
        self.cycle = 0
        self._inflight: list[_Event] = []
        self._timestep_start = 0
        self.n = _Counters()
        if config is not None:
            self.program(config)

    def program(self, cfg: NetworkConfig):
        program_core(self, cfg)

    @property
    def busy(self) -> bool:
        return bool(self._inflight)

    def potentials(self) -> np.ndarray:
        return self.neurons.potentials()

    def _horizon(self) -> int:
        if not self._inflight:
            return self.cycle
        # the newest event finishes last
        return self.cycle + EVENT_CYCLES - self._inflight[-1].rel

    def _tick(self, n: int = 1, until_admit: bool = False):
        """Advance ``n`` cycles, or with ``until_admit`` until the pipeline can
        take a new event."""
        inflight = self._inflight
        syn_step, nm_step = self.synapse.step, self.neurons.step
        sched = _SCHEDULE
        c = self.cycle
        while (inflight and inflight[-1].rel < ADMIT_AT) if until_admit else n > 0:
            n -= 1
            up_ev = rd_ev = update = read = issue = None
            # at most one event claims each resource per cycle (see _check_overlap)
            for ev in inflight:
                u, r, i = sched[ev.rel]
                if u is not None:
                    up_ev, update = ev, u
                if r is not None:
                    rd_ev, read = ev, r
                if i is not None:
                    issue = i + N_GROUPS * ev.address
                    ev.fetched += 1
                ev.rel += 1
            if update is not None:
                # collect precedes issue: the bank freed here may be re-enabled this cycle
                w = syn_step(c, update[0], issue)
                # saturating arithmetic keeps the word in range
                new = integrate_lanes(up_ev.latch, w)
                up_ev.latch = None
                up_ev.consumed += 1
                latch = nm_step(c, read, update[1], new, validate=False)
            else:
                if issue is not None:
                    syn_step(c, None, issue)
                latch = nm_step(c, read) if read is not None else None
            if read is not None:
                rd_ev.latch = latch
            if inflight and inflight[0].rel == EVENT_CYCLES:
                self._retire(inflight.pop(0))
            c += 1
            self.cycle = c

    def _retire(self, ev: _Event):
        assert ev.fetched == ev.consumed == N_GROUPS, "weight fetch dropped or reused"
        # one SOP per membrane update, saturated or not
        self.n.sops += LANES * ev.consumed

    def process_spike(self, address: int) -> int:
        """Push one input spike through the pipeline; returns cycles it adds."""
        if self.config is None:
            raise UnconfiguredCoreError("core has not been programmed")
        if not 0 <= address <= 255:
            raise ValueError(f"spike address {address} outside [0, 255]")
        before = self._horizon()
        start = self.cycle
        self._tick(until_admit=True)
        self._inflight.append(_Event(address, self.cycle))
        self.n.input_spikes += 1
        self._tick(ADMIT_AT)
        self._count_spike_cycles(self.cycle - start)
        return self._horizon() - before

    def _count_spike_cycles(self, n: int):
        self.n.spike_cycles += n
        self.n.total_cycles += n

    def drain(self) -> int:
        start = self.cycle
        if self._inflight:
            self._tick(EVENT_CYCLES - self._inflight[-1].rel)
        self._count_spike_cycles(self.cycle - start)
        return self.cycle - start

    def process_time_reference(self) -> TimestepResult:
        if self.config is None:
            raise UnconfiguredCoreError("core has not been programmed")
        self.drain()
        base = self.cycle
        nm = self.neurons
        th, lk = self.threshold, self.leak
        packets = []
        pending = None
        for g in range(N_GROUPS):
            bank, word = neuron_slot(g)
            v = nm.read(bank, word, base + g)
            if pending is not None:
                nm.write(*pending, base + g)
            new, fired = neuron.leak_fire_lanes(v, th, lk)
            if self.leak_fault:
                new = np.where(~fired & (new > 0), new - 1, new).astype(new.dtype)
            pending = (bank, word, new)
            vec = int(np.packbits(fired, bitorder="little").view("<u4")[0])
            if vec or self.emit_empty_blocks:
                packets.append(BlockAerPacket(g, vec))
        # last write-back lands in the first cycle after the pass
        nm.write(*pending, base + N_GROUPS)

        cycles = LEAK_FIRE_CYCLES + self.handshake_cycles * len(packets)
        self.cycle += cycles
        self.n.total_cycles += cycles
        spikes = sum(p.count for p in packets)
        self.n.output_spikes += spikes
        self.n.handshakes += len(packets)
        self.n.timesteps += 1
        res = TimestepResult(packets, spikes, self.cycle - self._timestep_start)
        self._timestep_start = self.cycle
        return res

    def report(self) -> SimReport:
        self.drain()
        n = self.n
        return SimReport(
            cycles_measured=n.spike_cycles,
            sops=n.sops,
            input_spikes=n.input_spikes,
            output_spikes=n.output_spikes,
            handshakes=n.handshakes,
            timesteps=n.timesteps,
            total_cycles=n.total_cycles,
            synapse_word_reads=self.synapse.word_reads,
            neuron_word_accesses=self.neurons.accesses,
        )

    def run(self, events: Iterable) -> tuple[SimReport, list[TimestepResult]]:
        """Process events in order; the report covers this call only."""
        if self.config is None:
            raise UnconfiguredCoreError("core has not been programmed")
        before = self.report()
        results = []
        for ev in events:
            if isinstance(ev, Spike):
                self.process_spike(ev.address)
            elif isinstance(ev, TimeReference):
                results.append(self.process_time_reference())
            else:
                raise TypeError(f"not an input event: {ev!r}")
        return self.report() - before, results
