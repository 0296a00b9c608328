"""Block AER packets and the text event-stream format.

Stream format, one event per line::

    S <addr>            input spike, addr in [0, 255]
    T                   time reference (ends the current timestep)
    B <blk> <hex8>      raw output packet log line (ignored as input)
    # ...               comment; blank lines are ignored
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Iterable, Sequence, Union

from .errors import ParseError

log = logging.getLogger(__name__)

BLOCK_BITS = 32
N_BLOCKS = 8


@dataclass(frozen=True)
class Spike:
    address: int

    def __post_init__(self):
        if not 0 <= self.address <= 255:
            raise ValueError(f"spike address {self.address} outside [0, 255]")


@dataclass(frozen=True)
class TimeReference:
    pass


InputEvent = Union[Spike, TimeReference]
TIME_REF = TimeReference()


@dataclass(frozen=True)
class BlockAerPacket:
    block_address: int
    spike_vector: int

    def __post_init__(self):
        if not 0 <= self.block_address < N_BLOCKS:
            raise ValueError(f"block address {self.block_address} outside [0, 7]")
        if not 0 <= self.spike_vector < 1 << BLOCK_BITS:
            raise ValueError("spike vector must fit in 32 bits")

    @property
    def count(self) -> int:
        return bin(self.spike_vector).count("1")

    def __str__(self):
        return f"B {self.block_address} {self.spike_vector:08x}"


def encode_block(spikes: Iterable[int], group: int | None = None) -> BlockAerPacket:
    """Pack neuron indices that share one 32-neuron group into a packet.

    ``group`` is only needed for an empty set; otherwise it is inferred and,
    if given, checked.
    """
    spikes = set(spikes)
    groups = {s // BLOCK_BITS for s in spikes}
    if group is not None:
        groups.add(group)
    if len(groups) > 1:
        raise ValueError(f"spikes span several groups: {sorted(groups)}")
    if not groups:
        raise ValueError("empty spike set needs an explicit group")
    blk = groups.pop()
    vec = 0
    for s in spikes:
        if not 0 <= s < N_BLOCKS * BLOCK_BITS:
            raise ValueError(f"neuron index {s} out of range")
        vec |= 1 << (s % BLOCK_BITS)
    return BlockAerPacket(blk, vec)


def decode_block(p: BlockAerPacket) -> list[int]:
    base = BLOCK_BITS * p.block_address
    vec = p.spike_vector
    return [base + i for i in range(BLOCK_BITS) if vec >> i & 1]


def packets_to_events(timesteps: Sequence[Sequence[BlockAerPacket]]) -> list[InputEvent]:
    """Turn per-timestep output packets into an input stream for the next core."""
    events: list[InputEvent] = []
    for packets in timesteps:
        idx = sorted(i for p in packets for i in decode_block(p))
        events.extend(Spike(i) for i in idx)
        events.append(TIME_REF)
    return events


def _strip(line: str) -> str:
    return line.split("#", 1)[0].strip()


def _int_field(tok: str, lineno: int, base: int = 10) -> int:
    try:
        return int(tok, base)
    except ValueError:
        raise ParseError(f"bad number {tok!r}", lineno) from None


def _parse_packet(fields, lineno) -> BlockAerPacket:
    if len(fields) != 3 or len(fields[2]) != 8:
        raise ParseError("expected 'B <block> <8 hex digits>'", lineno)
    blk = _int_field(fields[1], lineno)
    vec = _int_field(fields[2], lineno, 16)
    if not 0 <= blk < N_BLOCKS:
        raise ParseError(f"block address {blk} outside [0, 7]", lineno)
    return BlockAerPacket(blk, vec)


def parse_event_stream(text: str) -> list[InputEvent]:
    events: list[InputEvent] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        fields = line.split()
        tag = fields[0]
        if tag == "S":
            if len(fields) != 2:
                raise ParseError("expected 'S <addr>'", lineno)
            addr = _int_field(fields[1], lineno)
            if not 0 <= addr <= 255:
                raise ParseError(f"spike address {addr} outside [0, 255]", lineno)
            events.append(Spike(addr))
        elif tag == "T":
            if len(fields) != 1:
                raise ParseError("unexpected fields after 'T'", lineno)
            events.append(TIME_REF)
        elif tag == "B":
            _parse_packet(fields, lineno)  # validated, carries no input event
        else:
            raise ParseError(f"unknown event tag {tag!r}", lineno)
    if events and not isinstance(events[-1], TimeReference):
        log.warning("event stream does not end with a time reference; "
                    "trailing spikes are integrated but never leak-fired")
    return events


def parse_packet_log(text: str) -> list[list[BlockAerPacket]]:
    """Recover per-timestep packets from an output stream's ``B`` lines."""
    out: list[list[BlockAerPacket]] = []
    cur: list[BlockAerPacket] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        fields = line.split()
        if fields[0] == "B":
            cur.append(_parse_packet(fields, lineno))
        elif fields[0] == "T":
            out.append(cur)
            cur = []
        elif fields[0] != "S":
            raise ParseError(f"unknown event tag {fields[0]!r}", lineno)
    if cur:
        out.append(cur)
    return out


def serialize_events(events: Iterable[InputEvent]) -> str:
    lines = []
    for ev in events:
        if isinstance(ev, Spike):
            lines.append(f"S {ev.address}")
        elif isinstance(ev, TimeReference):
            lines.append("T")
        else:
            raise TypeError(f"not an input event: {ev!r}")
    return "".join(line + "\n" for line in lines)


def serialize_output(timesteps: Sequence[Sequence[BlockAerPacket]]) -> str:
    """Output stream: packet log lines, then the decoded spikes, per timestep."""
    lines = []
    for packets in timesteps:
        lines.extend(str(p) for p in packets)
        lines.extend(f"S {i}" for i in sorted(i for p in packets for i in decode_block(p)))
        lines.append("T")
    return "".join(line + "\n" for line in lines)
