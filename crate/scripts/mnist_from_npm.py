#!/usr/bin/env python3
"""Convert the 10k-digit subset shipped in the npm `mnist` package into IDX files.

Usage: npm pack mnist && tar xzf mnist-*.tgz
       python3 scripts/mnist_from_npm.py package/src/digits data/mnist

Pixels in the package are stored as value/255 rounded to three decimals, which
is finer than the 1/255 grid, so round(v * 255) recovers the original byte.
"""
import gzip
import json
import struct
import sys
from pathlib import Path


def main(src: Path, dst: Path) -> None:
    images, labels = [], []
    per_digit = {}
    for digit in range(10):
        with open(src / f"{digit}.json") as f:
            flat = json.load(f)["data"]
        assert len(flat) % 784 == 0
        per_digit[digit] = [flat[i:i + 784] for i in range(0, len(flat), 784)]
    # interleave digits so any prefix is roughly class balanced
    longest = max(len(v) for v in per_digit.values())
    for i in range(longest):
        for digit in range(10):
            if i < len(per_digit[digit]):
                images.append(bytes(round(v * 255) for v in per_digit[digit][i]))
                labels.append(digit)
    dst.mkdir(parents=True, exist_ok=True)
    n = len(images)
    with gzip.GzipFile(dst / "train-images-idx3-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">IIII", 0x803, n, 28, 28))
        for img in images:
            f.write(img)
    with gzip.GzipFile(dst / "train-labels-idx1-ubyte.gz", "wb", mtime=0) as f:
        f.write(struct.pack(">II", 0x801, n))
        f.write(bytes(labels))
    print(f"wrote {n} images to {dst}")


if __name__ == "__main__":
    main(Path(sys.argv[1]), Path(sys.argv[2]))
