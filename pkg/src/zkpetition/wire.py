"""Length-prefixed field packing shared by proof, bundle and message
encodings (u32 big-endian length before each field), plus the base64
helpers used for JSON transport of binary fields."""

import base64
import binascii


def b64(data):
    return base64.b64encode(data).decode()


def unb64(text):
    if not isinstance(text, str):
        raise ValueError("expected base64 string")
    try:
        return base64.b64decode(text, validate=True)
    except (binascii.Error, ValueError) as exc:
        raise ValueError("bad base64") from exc


def pack_fields(*fields):
    out = bytearray()
    for field in fields:
        out += len(field).to_bytes(4, "big")
        out += field
    return bytes(out)


def unpack_fields(data, count):
    """Parses exactly count fields; rejects truncation and trailing bytes."""
    fields = []
    offset = 0
    for _ in range(count):
        if offset + 4 > len(data):
            raise ValueError("truncated field header")
        n = int.from_bytes(data[offset : offset + 4], "big")
        offset += 4
        if offset + n > len(data):
            raise ValueError("truncated field body")
        fields.append(data[offset : offset + n])
        offset += n
    if offset != len(data):
        raise ValueError("trailing bytes")
    return fields
