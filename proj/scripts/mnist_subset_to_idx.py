#!/usr/bin/env python3
# Copyright 2026 The qsplit Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Writes the 5,000-image MNIST subset bundled with mlxtend as IDX files.

Used when the official MNIST mirrors are unreachable. The subset holds 500
images per digit, sorted by class; the first 400 of each class become the
train split and the remaining 100 the test split, each shuffled with a fixed
seed.
"""

import argparse
import gzip
import importlib.util
import os
import random
import struct
import sys


def locate_csv():
    spec = importlib.util.find_spec("mlxtend")
    if spec is None or not spec.submodule_search_locations:
        return None
    root = list(spec.submodule_search_locations)[0]
    path = os.path.join(root, "data", "data", "mnist_5k.csv.gz")
    return path if os.path.exists(path) else None


def write_idx(path, magic, dims, payload):
    with gzip.open(path, "wb") as f:
        f.write(struct.pack(">I", magic))
        for d in dims:
            f.write(struct.pack(">I", d))
        f.write(bytes(payload))


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--csv", help="path to mnist_5k.csv.gz")
    parser.add_argument("--train-per-class", type=int, default=400)
    parser.add_argument("--seed", type=int, default=1234)
    args = parser.parse_args()

    csv_path = args.csv or locate_csv()
    if csv_path is None:
        sys.exit("mnist_5k.csv.gz not found; pip install mlxtend or pass --csv")

    by_class = {}
    with gzip.open(csv_path, "rt") as f:
        for line in f:
            fields = line.strip().split(",")
            if len(fields) != 785:
                continue
            label = int(float(fields[-1]))
            pixels = [int(float(v)) for v in fields[:-1]]
            by_class.setdefault(label, []).append(pixels)

    train, test = [], []
    for label in sorted(by_class):
        rows = by_class[label]
        train += [(label, r) for r in rows[: args.train_per_class]]
        test += [(label, r) for r in rows[args.train_per_class :]]
    rng = random.Random(args.seed)
    rng.shuffle(train)
    rng.shuffle(test)

    os.makedirs(args.out, exist_ok=True)
    for name, rows in (("train", train), ("t10k", test)):
        images = bytearray()
        for _, r in rows:
            images += bytes(r)
        write_idx(os.path.join(args.out, f"{name}-images-idx3-ubyte.gz"),
                  0x00000803, [len(rows), 28, 28], images)
        write_idx(os.path.join(args.out, f"{name}-labels-idx1-ubyte.gz"),
                  0x00000801, [len(rows)], [lab for lab, _ in rows])
        print(f"{name}: {len(rows)} images")


if __name__ == "__main__":
    main()
