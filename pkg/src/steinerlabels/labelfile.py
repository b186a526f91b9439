"""Indexed label-file container.

Layout: magic, version, scheme tag, record count, then the record byte
lengths (varints, acting as the index), then the concatenated records in
vertex order. Reading a query's labels seeks to and decodes only the named
vertices' records.
"""

from __future__ import annotations

from typing import Iterable

from . import scheme, warmup
from .bits import MalformedBits, write_uvarint

_MAGIC = b"SLBF"
_VERSION = 1

SCHEME_TAGS = {"main": 0, "warmup": 1}
_TAG_NAMES = {v: k for k, v in SCHEME_TAGS.items()}


def write_label_file(path: str, labels: dict, scheme_kind: str) -> None:
    if scheme_kind not in SCHEME_TAGS:
        raise ValueError(f"unknown scheme kind {scheme_kind!r}")
    serialize = (
        scheme.serialize_label if scheme_kind == "main" else warmup.serialize_warmup_label
    )
    records = [serialize(labels[v]) for v in sorted(labels)]
    header = bytearray(_MAGIC)
    header.append(_VERSION)
    header.append(SCHEME_TAGS[scheme_kind])
    write_uvarint(header, len(records))
    for rec in records:
        write_uvarint(header, len(rec))
    with open(path, "wb") as fh:
        fh.write(header)
        for rec in records:
            fh.write(rec)


def _read_varint_stream(fh) -> int:
    value, shift = 0, 0
    while True:
        b = fh.read(1)
        if not b:
            raise MalformedBits("truncated label file index")
        byte = b[0]
        value |= (byte & 0x7F) << shift
        if not byte & 0x80:
            return value
        shift += 7
        if shift > 63:
            raise MalformedBits("varint too long")


def _read_header(fh) -> tuple[str, list[int], int]:
    """Returns (scheme kind, record lengths, records start offset)."""
    fh.seek(0)
    head = fh.read(6)
    if len(head) < 6 or head[:4] != _MAGIC:
        raise MalformedBits("bad label file magic")
    if head[4] != _VERSION:
        raise MalformedBits(f"unsupported label file version {head[4]}")
    tag = head[5]
    if tag not in _TAG_NAMES:
        raise MalformedBits(f"unknown scheme tag {tag}")
    count = _read_varint_stream(fh)
    lengths = [_read_varint_stream(fh) for _ in range(count)]
    return _TAG_NAMES[tag], lengths, fh.tell()


def read_label_file_info(path: str) -> dict:
    with open(path, "rb") as fh:
        kind, lengths, _ = _read_header(fh)
    return {"scheme": kind, "labels": len(lengths)}


def read_labels(path: str, vertex_ids: Iterable[int] | None = None) -> tuple[str, dict]:
    """Decode the named vertices' records (all records when ids is None)."""
    with open(path, "rb") as fh:
        kind, lengths, start = _read_header(fh)
        deserialize = (
            scheme.deserialize_label if kind == "main" else warmup.deserialize_warmup_label
        )
        wanted = sorted(set(vertex_ids)) if vertex_ids is not None else range(len(lengths))
        offsets = [start]
        for length in lengths:
            offsets.append(offsets[-1] + length)
        labels = {}
        for v in wanted:
            if not 0 <= v < len(lengths):
                raise MalformedBits(f"vertex {v} not in label file of {len(lengths)}")
            fh.seek(offsets[v])
            label = deserialize(fh.read(lengths[v]))
            if label.owner != v:
                raise MalformedBits(f"record {v} owned by {label.owner}")
            labels[v] = label
    return kind, labels
