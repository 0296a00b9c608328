import logging

import pytest
from hypothesis import given, strategies as st

from loki_sim.aer import (TIME_REF, BlockAerPacket, Spike, decode_block, encode_block,
                          packets_to_events, parse_event_stream, parse_packet_log,
                          serialize_events, serialize_output)
from loki_sim.errors import ParseError


@st.composite
def group_sets(draw):
    g = draw(st.integers(0, 7))
    bits = draw(st.sets(st.integers(0, 31)))
    return g, {32 * g + b for b in bits}


def test_encode_examples():
    assert encode_block(set(), group=0) == BlockAerPacket(0, 0)
    assert encode_block({37}) == BlockAerPacket(1, 0x00000020)
    assert encode_block(range(224, 256)) == BlockAerPacket(7, 0xFFFFFFFF)


def test_encode_mixed_groups():
    with pytest.raises(ValueError):
        encode_block({31, 32})
    with pytest.raises(ValueError):
        encode_block({5}, group=1)


def test_decode_examples():
    assert decode_block(BlockAerPacket(0, 0)) == []
    assert decode_block(BlockAerPacket(1, 0x20)) == [37]
    assert decode_block(BlockAerPacket(3, 0x80000001)) == [96, 127]


def test_packet_fields_checked():
    with pytest.raises(ValueError):
        BlockAerPacket(8, 0)
    with pytest.raises(ValueError):
        BlockAerPacket(0, 1 << 32)


@given(group_sets())
def test_block_round_trip(gs):
    g, s = gs
    p = encode_block(s, group=g)
    assert p.block_address == g
    assert decode_block(p) == sorted(s)
    assert p.count == len(s)


def test_packet_log_line():
    assert str(BlockAerPacket(3, 0x80000001)) == "B 3 80000001"


def test_parse_examples():
    assert parse_event_stream("S 12\nT\n") == [Spike(12), TIME_REF]
    assert parse_event_stream("") == []
    with pytest.raises(ParseError) as ei:
        parse_event_stream("S 300\n")
    assert ei.value.lineno == 1


@pytest.mark.parametrize("text,line", [
    ("S 1\nX\n", 2),
    ("T\nS\n", 2),
    ("S 1 2\n", 1),
    ("S -1\n", 1),
    ("S abc\n", 1),
    ("T 4\n", 1),
    ("# c\n\nB 9 00000000\n", 3),
    ("B 1 123\n", 1),
])
def test_parse_errors_report_line(text, line):
    with pytest.raises(ParseError) as ei:
        parse_event_stream(text)
    assert ei.value.lineno == line
    assert f"line {line}" in str(ei.value)


def test_parse_comments_and_packet_lines():
    text = "# header\nS 1  # first\n\nB 0 00000002\nS 255\nT\n"
    assert parse_event_stream(text) == [Spike(1), Spike(255), TIME_REF]


def test_missing_trailing_time_reference_warns(caplog):
    with caplog.at_level(logging.WARNING):
        assert parse_event_stream("S 4\n") == [Spike(4)]
    assert "time reference" in caplog.text


events_st = st.lists(st.one_of(st.builds(Spike, st.integers(0, 255)), st.just(TIME_REF)))


@given(events_st)
def test_stream_round_trip(events):
    text = serialize_events(events)
    assert parse_event_stream(text) == events
    assert serialize_events(parse_event_stream(text)) == text


def test_serialize_normalizes():
    assert serialize_events(parse_event_stream("#x\n  S   7 \nT # end\n")) == "S 7\nT\n"


def test_packets_to_events():
    assert packets_to_events([[BlockAerPacket(1, 0x20)]]) == [Spike(37), TIME_REF]
    assert packets_to_events([[]]) == [TIME_REF]
    two = packets_to_events([[BlockAerPacket(2, 0b11)], [BlockAerPacket(0, 1)]])
    assert two == [Spike(64), Spike(65), TIME_REF, Spike(0), TIME_REF]


def test_packets_to_events_sorted_across_packets():
    ev = packets_to_events([[BlockAerPacket(5, 1), BlockAerPacket(0, 2)]])
    assert ev == [Spike(1), Spike(160), TIME_REF]


def test_output_stream_round_trip():
    steps = [[BlockAerPacket(0, 0x3), BlockAerPacket(7, 0x80000000)], [], [BlockAerPacket(4, 0)]]
    text = serialize_output(steps)
    assert text.splitlines()[:5] == ["B 0 00000003", "B 7 80000000", "S 0", "S 1", "S 255"]
    assert parse_packet_log(text) == steps
    assert parse_event_stream(text) == packets_to_events(steps)
