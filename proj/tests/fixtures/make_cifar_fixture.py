#!/usr/bin/env python3
# Copyright (C) 2026 The deskip Authors
# SPDX-License-Identifier: Apache-2.0
"""Writes a small CIFAR-10 binary file with a closed-form pixel pattern.

Record i has label i % 10 and byte j of its 3072-byte image equals
(i * 31 + j * 7) % 256.
"""
import pathlib
import sys
import zlib

RECORDS = 20


def record(i):
    return bytes([i % 10]) + bytes((i * 31 + j * 7) % 256 for j in range(3072))


def main():
    out = pathlib.Path(sys.argv[1] if len(sys.argv) > 1 else "cifar_mini/data_batch_1.bin")
    out.parent.mkdir(parents=True, exist_ok=True)
    blob = b"".join(record(i) for i in range(RECORDS))
    out.write_bytes(blob)
    pixels = b"".join(record(i)[1:] for i in range(RECORDS))
    print(f"{out}: {len(blob)} bytes, crc32 {zlib.crc32(blob):#010x}, "
          f"pixel crc32 {zlib.crc32(pixels):#010x}")


if __name__ == "__main__":
    main()
