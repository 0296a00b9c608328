"""Synapse memory (4-bank multi-cycle clock-gated SRAM) and neuron memory models.

Synapse words hold 32 four-bit weights. Word ``raw`` lives in bank ``raw & 3``
at row ``raw >> 2``; the fan-out of input ``a`` to neuron group ``g`` is stored
at ``raw = g + 8 * a`` so one spike walks the four banks round-robin.
"""

from __future__ import annotations

from typing import Optional, Sequence

import numpy as np

from .errors import (AddressError, BankBusyError, CollisionError, CoreBusyError,
                     EmptyReadError, GatingViolation, NotReadyError)

N_INPUTS = 256
N_NEURONS = 256
LANES = 32
N_GROUPS = N_NEURONS // LANES  # 8

N_BANKS = 4
ROWS_PER_BANK = 512
N_WORDS = N_BANKS * ROWS_PER_BANK  # 2048
READ_LATENCY = 4
GATE_PERIOD = 4

NEURON_BANKS = 2
WORDS_PER_NEURON_BANK = 4


def decode_address(raw: int) -> tuple[int, int]:
    """Split an 11-bit word address into (bank, row)."""
    if not 0 <= raw < N_WORDS:
        raise AddressError(f"synapse word address {raw} outside [0, {N_WORDS - 1}]")
    return raw & 0b11, raw >> 2


def word_address(input_addr: int, group: int) -> int:
    return group + N_GROUPS * input_addr


def pack_word(weights: Sequence[int]) -> int:
    """Pack 32 signed 4-bit weights into a 128-bit integer, weight i at bits [4i, 4i+3]."""
    if len(weights) != LANES:
        raise ValueError(f"expected {LANES} weights, got {len(weights)}")
    bits = 0
    for i, w in enumerate(weights):
        w = int(w)
        if not -8 <= w <= 7:
            raise ValueError(f"weight {w} outside [-8, 7]")
        bits |= (w & 0xF) << (4 * i)
    return bits


def unpack_word(bits: int) -> list[int]:
    if not 0 <= bits < 1 << 128:
        raise ValueError("weight word must be a 128-bit unsigned value")
    out = []
    for i in range(LANES):
        nib = (bits >> (4 * i)) & 0xF
        out.append(nib - 16 if nib & 0x8 else nib)
    return out


class MccgMemory:
    """Four interleaved SRAM banks, each clocked at most once every four cycles.

    A read issued at cycle ``c`` is collectible from cycle ``c + 4``. Each bank
    holds at most one uncollected access; breaking either rule raises instead
    of reordering anything.
    """

    def __init__(self):
        # decoded weights, one lane vector per word; int16 to add without casts
        self._set_banks(np.zeros((N_BANKS, ROWS_PER_BANK, LANES), dtype=np.int16), blank=True)
        self._inflight: list[Optional[tuple[int, int]]] = [None] * N_BANKS
        self._last_enable: list[Optional[int]] = [None] * N_BANKS
        self.enable_log: list[list[int]] = [[] for _ in range(N_BANKS)]
        self.word_reads = 0
        self.log_enables = False

    @property
    def idle(self) -> bool:
        return all(x is None for x in self._inflight)

    def load(self, words: np.ndarray):
        """Bulk configuration write of all 2048 words, shape (2048, 32)."""
        if not self.idle:
            raise CoreBusyError("synapse memory has reads in flight")
        words = np.asarray(words)
        if words.shape != (N_WORDS, LANES):
            raise ValueError(f"expected shape {(N_WORDS, LANES)}, got {words.shape}")
        if words.size and (words.min() < -8 or words.max() > 7):
            raise ValueError("weights must lie in [-8, 7]")
        # raw = row * 4 + bank
        banks = words.reshape(ROWS_PER_BANK, N_BANKS, LANES).transpose(1, 0, 2)
        self._set_banks(np.ascontiguousarray(banks, dtype=np.int16))

    def _set_banks(self, banks: np.ndarray, blank: bool = False):
        banks.flags.writeable = False
        self.banks = banks
        # per-row views, so a collect is a list lookup rather than an array index;
        # a blank image can share one zero row
        if blank:
            self._rows = [[banks[0, 0]] * ROWS_PER_BANK for _ in range(N_BANKS)]
        else:
            self._rows = [list(b) for b in banks]

    def peek(self, raw: int) -> np.ndarray:
        bank, row = decode_address(raw)
        return self.banks[bank, row].copy()

    def peek_packed(self, raw: int) -> int:
        return pack_word(self.peek(raw).tolist())

    def step(self, cycle: int, collect: Optional[int] = None,
             issue: Optional[int] = None) -> Optional[np.ndarray]:
        """One cycle of bank activity: collect from bank ``collect`` (returns the
        word), then issue a read of word address ``issue``."""
        word = None
        if collect is not None:
            if not 0 <= collect < N_BANKS:
                raise AddressError(f"bank {collect} outside [0, {N_BANKS - 1}]")
            rec = self._inflight[collect]
            if rec is None:
                raise EmptyReadError(f"bank {collect} has no outstanding read")
            issued, row = rec
            if cycle < issued + READ_LATENCY:
                raise NotReadyError(
                    f"bank {collect} read issued at {issued} not ready at cycle {cycle}")
            self._inflight[collect] = None
            word = self._rows[collect][row]
        if issue is not None:
            if not 0 <= issue < N_WORDS:
                decode_address(issue)  # raises with the standard message
            bank = issue & 0b11
            last = self._last_enable[bank]
            if last is not None and cycle - last < GATE_PERIOD:
                raise GatingViolation(
                    f"bank {bank} enabled at cycle {last} and again at {cycle}")
            if self._inflight[bank] is not None:
                raise BankBusyError(
                    f"bank {bank} still holds an uncollected read issued at "
                    f"cycle {self._inflight[bank][0]}")
            self._inflight[bank] = (cycle, issue >> 2)
            self._last_enable[bank] = cycle
            self.word_reads += 1
            if self.log_enables:
                self.enable_log[bank].append(cycle)
        return word

    def issue_read(self, raw: int, cycle: int):
        self.step(cycle, issue=raw)

    def collect_read(self, bank: int, cycle: int) -> np.ndarray:
        return self.step(cycle, collect=bank)


_SLOTS = frozenset((b, w) for b in range(NEURON_BANKS) for w in range(WORDS_PER_NEURON_BANK))


def neuron_slot(group: int) -> tuple[int, int]:
    """(bank, word) holding neuron group ``group``; groups alternate banks."""
    return group & 1, group >> 1


class NeuronMemory:
    """Two latch banks of four 256-bit words (32 potentials each).

    Per cycle there is one read port and one write port, and they must target
    different banks. Stored words are read-only arrays: a write swaps in a new
    array, so reads can hand out the stored one without copying.
    """

    def __init__(self):
        self.words: list[list[np.ndarray]] = []
        self._cycle: Optional[int] = None
        self._read_bank: Optional[int] = None
        self._write_bank: Optional[int] = None
        self.reads = 0
        self.writes = 0
        self.clear()

    def step(self, cycle: int, read: Optional[tuple[int, int]] = None,
             write: Optional[tuple[int, int]] = None, values=None,
             validate: bool = True) -> Optional[np.ndarray]:
        """One cycle of port activity: store ``values`` at slot ``write``, then
        read slot ``read`` (returned). Slots are (bank, word).

        With ``validate=False`` the caller hands over a fresh int16 array in
        range that it will not touch again.
        """
        if cycle != self._cycle:
            self._cycle = cycle
            self._read_bank = None
            self._write_bank = None
        if write is not None:
            if write not in _SLOTS:
                raise AddressError(f"neuron memory slot {write} out of range")
            bank = write[0]
            if self._write_bank is not None:
                raise CollisionError(f"second neuron write in cycle {cycle}")
            if self._read_bank == bank:
                raise CollisionError(
                    f"read and write both on neuron bank {bank} in cycle {cycle}")
            if validate:
                values = np.array(values, dtype=np.int64)
                if values.shape != (LANES,):
                    raise ValueError(f"neuron word needs {LANES} values")
                if values.min() < -128 or values.max() > 127:
                    raise ValueError("membrane potential outside [-128, 127]")
                values = values.astype(np.int16)
            values.flags.writeable = False
            self._write_bank = bank
            self.writes += 1
            self.words[bank][write[1]] = values
        if read is None:
            return None
        if read not in _SLOTS:
            raise AddressError(f"neuron memory slot {read} out of range")
        bank = read[0]
        if self._read_bank is not None:
            raise CollisionError(f"second neuron read in cycle {cycle}")
        if self._write_bank == bank:
            raise CollisionError(f"read and write both on neuron bank {bank} in cycle {cycle}")
        self._read_bank = bank
        self.reads += 1
        return self.words[bank][read[1]]

    def read(self, bank: int, word: int, cycle: int) -> np.ndarray:
        return self.step(cycle, read=(bank, word))

    def write(self, bank: int, word: int, values, cycle: int, validate: bool = True):
        self.step(cycle, write=(bank, word), values=values, validate=validate)

    def clear(self):
        zero = np.zeros(LANES, dtype=np.int16)
        zero.flags.writeable = False
        self.words = [[zero] * WORDS_PER_NEURON_BANK for _ in range(NEURON_BANKS)]
        self._cycle = None

    @property
    def accesses(self) -> int:
        return self.reads + self.writes

    def potentials(self) -> np.ndarray:
        """All 256 potentials in neuron-index order."""
        return np.concatenate([self.words[b][w] for b, w in map(neuron_slot, range(N_GROUPS))])
