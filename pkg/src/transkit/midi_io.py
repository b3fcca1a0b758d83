"""Standard MIDI File reader/writer (formats 0 and 1, single tempo on write).

The reader honours tempo changes when converting ticks to seconds; the writer
emits format 1 with one tempo/meta track followed by one track per stream.
"""
from __future__ import annotations

import struct
from dataclasses import dataclass

from .types import (
    DEFAULT_VELOCITY, INSTRUMENT_PROGRAMS, PITCH_MAX, PITCH_MIN,
    PROGRAM_INSTRUMENTS, MidiDocument, NoteEvent, NoteStream,
)


class MidiParseError(ValueError):
    """Malformed MIDI input; message names the byte offset."""

    def __init__(self, msg: str, offset: int):
        super().__init__(f"{msg} (byte offset {offset})")
        self.offset = offset


def _read_varlen(data: bytes, pos: int) -> tuple[int, int]:
    value = 0
    for _ in range(4):
        if pos >= len(data):
            raise MidiParseError("truncated variable-length quantity", pos)
        byte = data[pos]
        pos += 1
        value = (value << 7) | (byte & 0x7F)
        if not byte & 0x80:
            return value, pos
    raise MidiParseError("variable-length quantity exceeds 4 bytes", pos)


def _encode_varlen(value: int) -> bytes:
    out = [value & 0x7F]
    value >>= 7
    while value:
        out.append((value & 0x7F) | 0x80)
        value >>= 7
    return bytes(reversed(out))


@dataclass
class _RawEvent:
    tick: int
    kind: str          # "on", "off", "program", "tempo"
    channel: int = 0
    a: int = 0         # pitch / program / tempo-us-per-quarter
    b: int = 0         # velocity


def _parse_track(data: bytes, pos: int, end: int) -> list[_RawEvent]:
    events: list[_RawEvent] = []
    tick = 0
    status = 0
    while pos < end:
        delta, pos = _read_varlen(data, pos)
        tick += delta
        if pos >= end:
            raise MidiParseError("event truncated", pos)
        byte = data[pos]
        if byte & 0x80:
            status = byte
            pos += 1
        elif status == 0:
            raise MidiParseError("running status with no prior status byte", pos)
        kind = status & 0xF0
        channel = status & 0x0F
        if kind in (0x80, 0x90, 0xA0, 0xB0, 0xE0):
            if pos + 2 > end:
                raise MidiParseError("two-byte event truncated", pos)
            a, b = data[pos], data[pos + 1]
            pos += 2
            if kind == 0x90:
                events.append(_RawEvent(tick, "on" if b > 0 else "off", channel, a, b))
            elif kind == 0x80:
                events.append(_RawEvent(tick, "off", channel, a, b))
        elif kind in (0xC0, 0xD0):
            if pos + 1 > end:
                raise MidiParseError("one-byte event truncated", pos)
            a = data[pos]
            pos += 1
            if kind == 0xC0:
                events.append(_RawEvent(tick, "program", channel, a))
        elif status == 0xFF:
            if pos >= end:
                raise MidiParseError("meta event truncated", pos)
            meta_type = data[pos]
            pos += 1
            length, pos = _read_varlen(data, pos)
            if pos + length > end:
                raise MidiParseError("meta payload truncated", pos)
            payload = data[pos:pos + length]
            pos += length
            if meta_type == 0x51 and length == 3:
                us_per_quarter = int.from_bytes(payload, "big")
                events.append(_RawEvent(tick, "tempo", 0, us_per_quarter))
            elif meta_type == 0x2F:
                break
        elif status in (0xF0, 0xF7):  # sysex
            length, pos = _read_varlen(data, pos)
            if pos + length > end:
                raise MidiParseError("sysex truncated", pos)
            pos += length
        else:
            raise MidiParseError(f"unsupported status byte 0x{status:02X}", pos)
    return events


class _TempoMap:
    """Piecewise-constant tempo; converts absolute ticks to seconds."""

    def __init__(self, changes: list[tuple[int, int]], tpq: int):
        changes = sorted(changes) or [(0, 500000)]
        if changes[0][0] != 0:
            changes.insert(0, (0, 500000))
        self.tpq = tpq
        self.ticks = [c[0] for c in changes]
        self.us = [c[1] for c in changes]
        self.sec_at = [0.0]
        for i in range(1, len(changes)):
            dt = self.ticks[i] - self.ticks[i - 1]
            self.sec_at.append(self.sec_at[-1] + dt * self.us[i - 1] / 1e6 / tpq)

    def to_seconds(self, tick: int) -> float:
        i = 0
        for j, t in enumerate(self.ticks):
            if t <= tick:
                i = j
            else:
                break
        return self.sec_at[i] + (tick - self.ticks[i]) * self.us[i] / 1e6 / self.tpq


def _instrument_for(channel: int, program: int) -> str:
    if channel == 9:
        return "drums"
    return PROGRAM_INSTRUMENTS.get(program, "piano")


def read_midi(data: bytes) -> MidiDocument:
    """Parse a standard MIDI file (format 0 or 1) into a MidiDocument.

    Same-pitch overlapping note-ons truncate the sounding note (last-on wins);
    unpaired note-ons close at track end.
    """
    if len(data) < 14 or data[:4] != b"MThd":
        raise MidiParseError("missing MThd header", 0)
    header_len = struct.unpack(">I", data[4:8])[0]
    if header_len < 6:
        raise MidiParseError("header chunk too short", 4)
    fmt, n_tracks, division = struct.unpack(">HHH", data[8:14])
    if fmt not in (0, 1):
        raise MidiParseError(f"unsupported format {fmt}", 8)
    if division & 0x8000:
        raise MidiParseError("SMPTE time division not supported", 12)
    tpq = division

    pos = 8 + header_len
    tracks: list[list[_RawEvent]] = []
    for _ in range(n_tracks):
        if pos + 8 > len(data):
            raise MidiParseError("missing MTrk chunk", pos)
        if data[pos:pos + 4] != b"MTrk":
            raise MidiParseError("expected MTrk chunk id", pos)
        length = struct.unpack(">I", data[pos + 4:pos + 8])[0]
        start = pos + 8
        if start + length > len(data):
            raise MidiParseError("track data truncated", start)
        tracks.append(_parse_track(data, start, start + length))
        pos = start + length

    tempo_changes = [(e.tick, e.a) for tr in tracks for e in tr if e.kind == "tempo"]
    tmap = _TempoMap(tempo_changes, tpq)

    streams: list[NoteStream] = []
    for track in tracks:
        program = {ch: 0 for ch in range(16)}
        # (channel, pitch) -> (onset_tick, velocity, instrument)
        sounding: dict[tuple[int, int], tuple[int, int, str]] = {}
        notes_by_inst: dict[str, list[NoteEvent]] = {}
        max_tick = max((e.tick for e in track), default=0)

        def close(key, off_tick, notes_by_inst=notes_by_inst, tmap=tmap):
            if key not in sounding:
                return
            on_tick, vel, inst = sounding.pop(key)
            onset = tmap.to_seconds(on_tick)
            offset = tmap.to_seconds(max(off_tick, on_tick + 1))
            pitch = key[1]
            if PITCH_MIN <= pitch <= PITCH_MAX:
                notes_by_inst.setdefault(inst, []).append(
                    NoteEvent(onset, offset, pitch, max(vel, 1), inst))

        for e in sorted(track, key=lambda e: e.tick):
            if e.kind == "program":
                program[e.channel] = e.a
            elif e.kind == "on":
                key = (e.channel, e.a)
                close(key, e.tick)  # last-on wins
                sounding[key] = (e.tick, e.b, _instrument_for(e.channel, program[e.channel]))
            elif e.kind == "off":
                close((e.channel, e.a), e.tick)
        for key in list(sounding):
            close(key, max_tick)

        for inst, notes in sorted(notes_by_inst.items()):
            streams.append(NoteStream(inst, tuple(notes)))

    tempo_bpm = 6e7 / tmap.us[0]
    return MidiDocument(tuple(streams), tempo_bpm=tempo_bpm, ticks_per_quarter=tpq)


def _track_chunk(body: bytes) -> bytes:
    body += b"\x00\xff\x2f\x00"
    return b"MTrk" + struct.pack(">I", len(body)) + body


def write_midi(doc: MidiDocument) -> bytes:
    """Serialize to format 1 with a single tempo event; 1-tick round-trip."""
    tpq = doc.ticks_per_quarter
    sec_per_tick = 60.0 / (doc.tempo_bpm * tpq)

    def tick_of(t_s: float) -> int:
        return round(t_s / sec_per_tick)

    us_per_quarter = round(6e7 / doc.tempo_bpm)
    tempo_track = b"\x00\xff\x51\x03" + us_per_quarter.to_bytes(3, "big")
    chunks = [_track_chunk(tempo_track)]

    for i, stream in enumerate(doc.streams):
        channel = 9 if stream.instrument == "drums" else i % 16
        if channel == 9 and stream.instrument != "drums":
            channel = 10  # keep pitched streams off the percussion channel
        program = INSTRUMENT_PROGRAMS.get(stream.instrument, 0)
        msgs: list[tuple[int, int, bytes]] = [(0, 0, bytes([0xC0 | channel, program]))]
        for n in stream.notes:
            if not (0 <= n.pitch <= 127):
                raise ValueError(f"pitch {n.pitch} outside MIDI range")
            on = tick_of(n.onset_s)
            off = max(tick_of(n.offset_s), on + 1)
            msgs.append((on, 1, bytes([0x90 | channel, n.pitch, n.velocity])))
            msgs.append((off, 0, bytes([0x80 | channel, n.pitch, 0])))
        msgs.sort(key=lambda m: (m[0], m[1]))
        body = b""
        prev = 0
        for tick, _, payload in msgs:
            body += _encode_varlen(tick - prev) + payload
            prev = tick
        chunks.append(_track_chunk(body))

    header = b"MThd" + struct.pack(">IHHH", 6, 1, len(chunks), tpq)
    return header + b"".join(chunks)


__all__ = ["read_midi", "write_midi", "MidiParseError"]
