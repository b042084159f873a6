#!/usr/bin/env python3
#
# SPDX-License-Identifier: Apache-2.0
#
"""Converts the fragment score pickle (fpscores.pkl.gz) into the binary
table read by the SA scorer.

Layout (little endian, gzip compressed):
  char[8]  magic "RXSAFS01"
  uint32   count
  count x (uint32 id, float32 score), sorted by id
"""
import argparse
import gzip
import pickle
import struct


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("pickle", help="path to fpscores.pkl.gz")
    ap.add_argument("output", help="output .bin.gz")
    args = ap.parse_args()
    with gzip.open(args.pickle, "rb") as f:
        data = pickle.load(f)
    table = {}
    for row in data:
        score = float(row[0])
        for fid in row[1:]:
            table[int(fid)] = score
    with gzip.open(args.output, "wb", compresslevel=9) as out:
        out.write(b"RXSAFS01")
        out.write(struct.pack("<I", len(table)))
        for fid in sorted(table):
            out.write(struct.pack("<If", fid, table[fid]))


if __name__ == "__main__":
    main()
