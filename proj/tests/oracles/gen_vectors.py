#!/usr/bin/env python3
"""Independent reference for the frozen vectors in tests/unit.

Hand-encodes records following the length-prefixed wire format and computes
digests and Merkle roots with hashlib only. Re-run to regenerate the
constants; the C++ implementation is never consulted.
"""
import hashlib
import struct


def field(b: bytes) -> bytes:
    return struct.pack(">I", len(b)) + b


def count(n: int) -> bytes:
    return struct.pack(">I", n)


def u64(n: int) -> bytes:
    return struct.pack(">Q", n)


def product(name: str, details, nonce: bytes) -> bytes:
    out = b"\x01" + field(name.encode())
    out += count(len(details))
    for k, v in details:
        out += field(k.encode()) + field(v.encode())
    out += field(nonce)
    return out


def action(type_code, timestamp, inputs, outputs, author, meta=None) -> bytes:
    out = b"\x02" + field(bytes([type_code])) + u64(timestamp)
    out += count(len(inputs)) + b"".join(field(i) for i in inputs)
    out += count(len(outputs)) + b"".join(field(o) for o in outputs)
    out += field(author)
    if meta is None:
        out += count(0)
    else:
        out += count(1) + field(meta[0]) + field(meta[1])
    return out


def sha(b: bytes) -> bytes:
    return hashlib.sha256(b).digest()


def merkle_root(leaves):
    level = list(leaves)
    while len(level) > 1:
        if len(level) % 2:
            level.append(level[-1])
        level = [sha(level[i] + level[i + 1]) for i in range(0, len(level), 2)]
    return level[0]


def leaf(i: int) -> bytes:
    return sha(b"leaf" + bytes([i]))


zero16 = bytes(16)
empty = product("", [], zero16)
print("empty product bytes", empty.hex())
print("empty product id   ", sha(empty).hex())

timber = product("timber", [("qty", "100")], zero16)
print("timber bytes", timber.hex(), len(timber))
print("timber id   ", sha(timber).hex())

author = sha(b"seed-a")
print("company id seed-a", author.hex())
create = action(1, 7, [], [sha(timber)], author)
print("create action bytes", create.hex())
print("create action id   ", sha(create).hex())

meta = (bytes(range(32)), bytes(range(16)))
export = action(3, 9, [sha(timber)], [], author, meta)
print("export action id   ", sha(export).hex())

for n in (1, 2, 3, 4, 5, 7, 8):
    print(f"merkle root n={n}", merkle_root([leaf(i) for i in range(n)]).hex())

l = [leaf(i) for i in range(4)]
print("4-leaf idx2 path0", l[3].hex(), "right")
print("4-leaf idx2 path1", sha(l[0] + l[1]).hex(), "left")

secret = bytes(32)
print("blind", sha(secret + author + sha(create)).hex())
