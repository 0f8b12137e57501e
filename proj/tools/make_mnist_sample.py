#!/usr/bin/env python3
"""Writes the 5,000-image MNIST sample shipped with mlxtend as gzipped IDX files.

Usage: make_mnist_sample.py <mnist_5k.csv.gz> <output-dir>

The CSV holds one image per row: 784 pixel bytes followed by the digit label.
"""
import gzip
import struct
import sys
from pathlib import Path


def main() -> int:
    if len(sys.argv) != 3:
        print(__doc__.strip(), file=sys.stderr)
        return 1
    src, out = Path(sys.argv[1]), Path(sys.argv[2])
    out.mkdir(parents=True, exist_ok=True)
    pixels, labels = bytearray(), bytearray()
    with gzip.open(src, "rt") as fh:
        for line in fh:
            fields = [int(float(v)) for v in line.strip().split(",")]
            if len(fields) != 785:
                raise ValueError(f"expected 785 fields, got {len(fields)}")
            pixels.extend(fields[:784])
            labels.append(fields[784])
    n = len(labels)
    images = struct.pack(">IIII", 0x803, n, 28, 28) + bytes(pixels)
    lbls = struct.pack(">II", 0x801, n) + bytes(labels)
    # mtime=0 keeps the archives byte-reproducible.
    with gzip.GzipFile(out / "images-idx3-ubyte.gz", "wb", mtime=0) as fh:
        fh.write(images)
    with gzip.GzipFile(out / "labels-idx1-ubyte.gz", "wb", mtime=0) as fh:
        fh.write(lbls)
    print(f"wrote {n} images to {out}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
