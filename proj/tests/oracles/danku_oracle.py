#!/usr/bin/env python3
"""Straight-line reference computations used to freeze test expectations.

Independent of the C++ headers: uses pycryptodome's Keccak-256 and Python
big integers. Run with `python3 danku_oracle.py` and compare against the
constants in tests/*.cpp.
"""
import json
import os
from fractions import Fraction
from math import comb

from Crypto.Hash import keccak


def keccak256(data: bytes) -> bytes:
    h = keccak.new(digest_bits=256)
    h.update(data)
    return h.digest()


def word(v: int) -> bytes:
    return (v % (1 << 256)).to_bytes(32, "big")


def serialize(points, nonce):
    out = b""
    for inputs, label in points:
        for x in inputs:
            out += word(x)
        out += word(label)
    return out + word(nonce)


def mine(seed, count):
    hashes = []
    parent = bytes(32)
    for n in range(count):
        h = keccak256(word(seed) + parent + word(n))
        hashes.append(h)
        parent = h
    return hashes


def partition(hashes, group_count, training_count, at_block):
    array = list(range(group_count))
    length = group_count
    training = []
    for t in range(training_count):
        r = int.from_bytes(keccak256(hashes[at_block - t]), "big") % length
        training.append(array[r])
        array[r] = array[length - 1]
        length -= 1
    testing = [array[i] for i in range(length - 1, -1, -1)]
    return training, testing


def fp_mul(a, b, bits):
    q = abs(a * b) >> bits
    return q if a * b >= 0 else -q


def forward(model, inputs):
    bits = model["scale_bits"]
    x = [v << bits for v in inputs]
    layers = model["layers"]
    for i, layer in enumerate(layers):
        y = []
        for row, bias in zip(layer["weights"], layer["biases"]):
            acc = bias + sum(fp_mul(w, v, bits) for w, v in zip(row, x))
            y.append(max(acc, 0) if i + 1 < len(layers) else acc)
        x = y
    return x.index(max(x))


def scenario_scores(scenario_dir, seed, model_files, at_block=21, group_size=5):
    """Accuracy mantissas on the testing and the training partition."""
    with open(os.path.join(scenario_dir, "data", "synthetic_100.json")) as f:
        points = [(p[:-1], p[-1]) for p in json.load(f)["points"]]
    groups = [points[i:i + group_size] for i in range(0, len(points), group_size)]
    g = len(groups)
    training, testing = partition(mine(seed, at_block + 1), g, g * 4 // 5, at_block)
    out = {}
    for name in model_files:
        with open(os.path.join(scenario_dir, "models", name + ".json")) as f:
            model = json.load(f)
        for label, idx in (("testing", testing), ("training", training)):
            data = [p for i in idx for p in groups[i]]
            correct = sum(forward(model, x) == y for x, y in data)
            out[(name, label)] = (correct << model["scale_bits"]) // len(data)
    return testing, out


def main():
    print("empty", keccak256(b"").hex())
    print("group{[1],2} nonce 3", keccak256(serialize([([1], 2)], 3)).hex())
    print("group{[0],0} nonce 0", keccak256(serialize([([0], 0)], 0)).hex())
    print("example group nonce 12345",
          keccak256(serialize([([5, -47], 0), ([50, -34], 1), ([-48, 14], 0)], 12345)).hex())
    print("group{[0],0} nonce 1", keccak256(serialize([([0], 0)], 1)).hex())
    for seed in (1, 2):
        hs = mine(seed, 2)
        print(f"seed {seed} block0", hs[0].hex())
        print(f"seed {seed} block1", hs[1].hex())
    hs = mine(42, 10)
    print("seed 42 G=10 k=8 at 9", partition(hs, 10, 8, 9))
    hs = mine(7, 25)
    print("seed 7 G=20 k=16 at 24", partition(hs, 20, 16, 24))
    print("mnist gas", 11594722 * 6068352 // 1024)
    wei = (11594722 * 6068352 // 1024) * 4 * 10**9
    print("mnist ether", Fraction(wei, 10**18), float(Fraction(wei, 10**18)))
    print("mnist usd", float(Fraction(wei, 10**18) * 1100))
    for g in (5, 10, 15, 20, 25, 30):
        k = g * 4 // 5
        p = 1
        for n in range(g - k + 1, g + 1):
            p *= Fraction(g - n + 1, n)
        print("table", g, float(5 * p) * 100, "complement", float(1 - (1 - Fraction(1, comb(g, k))) ** 5) * 100)

    scen = os.path.join(os.path.dirname(os.path.abspath(__file__)), "..", "..", "scenarios")
    for name, seed in (("honest", 2024), ("withhold_test_reveal", 2025), ("tamper_reveal", 2026)):
        print("scenario", name, scenario_scores(scen, seed, ("bob", "carol")))


if __name__ == "__main__":
    main()
