"""Bit- and byte-level encoding helpers shared by all label formats.

Bit strings track their exact length in bits so decoders can consume input
to the last bit; pad bits in the final byte must be zero. Byte-level integers
use LEB128 varints (7-bit little-endian groups).
"""

from __future__ import annotations

from dataclasses import dataclass


class MalformedBits(Exception):
    """Raised when a label blob fails structural validation during decode."""


@dataclass(frozen=True)
class Bits:
    """An immutable bit string: `nbits` bits stored LSB-first in `data`."""

    data: bytes
    nbits: int

    def __post_init__(self):
        if len(self.data) != (self.nbits + 7) // 8:
            raise MalformedBits("bit length inconsistent with byte length")

    def __len__(self) -> int:
        return self.nbits


class BitWriter:
    def __init__(self):
        self._acc = 0
        self._nbits = 0

    def write(self, value: int, width: int) -> None:
        if value < 0 or (width < 64 and value >> width):
            raise ValueError(f"value {value} does not fit in {width} bits")
        self._acc |= value << self._nbits
        self._nbits += width

    def getvalue(self) -> Bits:
        nbytes = (self._nbits + 7) // 8
        return Bits(self._acc.to_bytes(nbytes, "little"), self._nbits)


class BitReader:
    def __init__(self, bits: Bits):
        self._acc = int.from_bytes(bits.data, "little")
        self._nbits = bits.nbits
        self._pos = 0
        # reject nonzero padding so any corruption of pad bits is detectable
        if self._acc >> self._nbits:
            raise MalformedBits("nonzero padding bits")

    @property
    def remaining(self) -> int:
        return self._nbits - self._pos

    def read(self, width: int) -> int:
        if self._pos + width > self._nbits:
            raise MalformedBits("read past end of bit string")
        value = (self._acc >> self._pos) & ((1 << width) - 1)
        self._pos += width
        return value

    def expect_end(self) -> None:
        if self._pos != self._nbits:
            raise MalformedBits(f"{self.remaining} trailing bits")


def width_for(max_value: int) -> int:
    """Number of bits needed to store values in [0, max_value]."""
    return max(1, max_value.bit_length())


# ---- byte-level varints (LEB128, little-endian groups) ----

def write_uvarint(out: bytearray, value: int) -> None:
    if value < 0:
        raise ValueError("uvarint must be non-negative")
    while True:
        byte = value & 0x7F
        value >>= 7
        if value:
            out.append(byte | 0x80)
        else:
            out.append(byte)
            return


def read_uvarint(buf: bytes, pos: int) -> tuple[int, int]:
    """Return (value, new_pos); raises MalformedBits on truncation/overflow."""
    value = 0
    shift = 0
    while True:
        if pos >= len(buf):
            raise MalformedBits("truncated varint")
        byte = buf[pos]
        pos += 1
        value |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return value, pos
        shift += 7
        if shift > 63:
            raise MalformedBits("varint too long")


def write_bytes(out: bytearray, blob: bytes) -> None:
    write_uvarint(out, len(blob))
    out.extend(blob)


def read_bytes(buf: bytes, pos: int) -> tuple[bytes, int]:
    length, pos = read_uvarint(buf, pos)
    if pos + length > len(buf):
        raise MalformedBits("truncated byte field")
    return buf[pos : pos + length], pos + length


def write_bits_field(out: bytearray, bits: Bits) -> None:
    write_uvarint(out, bits.nbits)
    out.extend(bits.data)


def read_bits_field(buf: bytes, pos: int) -> tuple[Bits, int]:
    nbits, pos = read_uvarint(buf, pos)
    nbytes = (nbits + 7) // 8
    if pos + nbytes > len(buf):
        raise MalformedBits("truncated bit field")
    return Bits(buf[pos : pos + nbytes], nbits), pos + nbytes
