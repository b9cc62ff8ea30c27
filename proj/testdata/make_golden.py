#!/usr/bin/env python3
"""Writes the golden wire vectors under testdata/wire/.

Independent of the C++ encoder: the layout is assembled field by field with
struct and checksummed with zlib.crc32.  Rerun after changing a vector.
"""
import json
import os
import struct
import zlib

HERE = os.path.dirname(os.path.abspath(__file__))


def encode(breaks, counts, order=0, sums=(), name=None):
    flags = (1 if order else 0) | (2 if name is not None else 0)
    out = b"HGT1" + struct.pack("<BBI", 1, flags, len(counts))
    out += struct.pack("<%dd" % len(breaks), *breaks)
    out += struct.pack("<%dQ" % len(counts), *counts)
    if order:
        assert len(sums) == order * len(counts)
        out += struct.pack("<B", order) + struct.pack("<%dd" % len(sums), *sums)
    if name is not None:
        raw = name.encode("utf-8")
        out += struct.pack("<H", len(raw)) + raw
    return out + struct.pack("<I", zlib.crc32(out) & 0xFFFFFFFF)


VECTORS = {
    # One empty unit bin, nothing optional: 38 bytes.
    "minimal": dict(breaks=[0.0, 1.0], counts=[0]),
    # Samples {1, 2, 3} over breaks 0..9.
    "example": dict(breaks=[float(i) for i in range(10)], counts=[1, 1, 1, 0, 0, 0, 0, 0, 0]),
    # Samples {0.25, 0.5, 1.5} over {0, 1, 2} with S1 and S2, named.
    "annotated": dict(
        breaks=[0.0, 1.0, 2.0],
        counts=[2, 1],
        order=2,
        sums=[0.75, 1.5, 0.3125, 2.25],
        name="read_size",
    ),
    # testdata/dtrace/quantize.txt, transcribed by hand.
    "dtrace_quantize": dict(
        breaks=[-1.0, 0.0, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0],
        counts=[0, 12, 17, 38, 23, 14, 6, 0],
        name="bash",
    ),
}


def main():
    out_dir = os.path.join(HERE, "wire")
    os.makedirs(out_dir, exist_ok=True)
    for key, v in VECTORS.items():
        data = encode(**v)
        with open(os.path.join(out_dir, key + ".hgt"), "wb") as f:
            f.write(data)
        doc = {
            "breaks": v["breaks"],
            "counts": v["counts"],
            "moment_order": v.get("order", 0),
            "moment_sums": list(v.get("sums", [])),
        }
        if "name" in v:
            doc["name"] = v["name"]
        with open(os.path.join(out_dir, key + ".json"), "w") as f:
            json.dump(doc, f, indent=2)
            f.write("\n")
        print("%-16s %4d bytes  crc %08x" % (key, len(data), zlib.crc32(data[:-4]) & 0xFFFFFFFF))


if __name__ == "__main__":
    main()
