#!/usr/bin/env python3
"""Convert the digit set shipped in the npm `mnist` package into gzipped IDX files.

The package (MIT, https://github.com/cazala/mnist) carries 10,000 MNIST digits as
per-class JSON arrays of 784 floats in [0, 1]. This script interleaves them with a
fixed seed and writes standard IDX3/IDX1 files that the C++ loader reads.

Usage: npm pack mnist && tar xzf mnist-*.tgz
       python3 tools/mnist_from_npm.py package/src/digits data/mnist
"""
import gzip
import json
import random
import struct
import sys
from pathlib import Path


def main(src: Path, dst: Path) -> None:
    samples = []
    for digit in range(10):
        flat = json.loads((src / f"{digit}.json").read_text())["data"]
        for i in range(0, len(flat), 784):
            pixels = bytes(min(255, max(0, round(v * 255))) for v in flat[i:i + 784])
            samples.append((pixels, digit))
    random.Random(20180907).shuffle(samples)

    dst.mkdir(parents=True, exist_ok=True)
    with gzip.GzipFile(dst / "digits-images-idx3-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">IIII", 0x00000803, len(samples), 28, 28))
        for pixels, _ in samples:
            f.write(pixels)
    with gzip.GzipFile(dst / "digits-labels-idx1-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">II", 0x00000801, len(samples)))
        f.write(bytes(label for _, label in samples))
    print(f"wrote {len(samples)} digits to {dst}")


if __name__ == "__main__":
    if len(sys.argv) != 3:
        sys.exit(__doc__)
    main(Path(sys.argv[1]), Path(sys.argv[2]))
