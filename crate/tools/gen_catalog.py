#!/usr/bin/env python3
"""Regenerate the bundled knot catalog from the KnotInfo tables.

    pip install database_knotinfo
    python3 tools/gen_catalog.py

Writes:
  crates/core/data/catalog.txt             name;crossings;PD[...] records
  crates/core/tests/data/knotinfo_invariants.txt
                                           published Jones/Alexander/determinant,
                                           used only as a test oracle
"""
import csv
import json
import os
import re
import sys

import database_knotinfo

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
MAX_CROSSINGS = 10


def knot_rows():
    path = os.path.join(
        os.path.dirname(database_knotinfo.__file__), "csv_data", "knotinfo_data_complete.csv"
    )
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh, delimiter="|"):
            cn = row["crossing_number"]
            if cn.isdigit() and 3 <= int(cn) <= MAX_CROSSINGS:
                yield row


def signed_pd(pd):
    """Attach a crossing sign: '+' when the over strand runs d -> b."""
    arcs = 2 * len(pd)
    nxt = lambda v: v % arcs + 1
    out = []
    for a, b, c, d in pd:
        assert c == nxt(a), (a, b, c, d)
        if b == nxt(d):
            sign = "+"
        elif d == nxt(b):
            sign = "-"
        else:
            raise ValueError(f"cannot orient over strand of {(a, b, c, d)}")
        out.append(f"({a},{b},{c},{d}){sign}")
    return "PD[" + ",".join(out) + "]"


TERM = re.compile(r"([+-]?)\s*(\d*)\s*\*?\s*(t(?:\^\(?(-?\d+)\)?)?)?")


def parse_poly(text):
    """Parse KnotInfo polynomial text in t into {exponent: coefficient}."""
    coeffs = {}
    s = text.replace(" ", "")
    pos = 0
    while pos < len(s):
        m = TERM.match(s, pos)
        if not m or m.end() == pos:
            raise ValueError(f"bad polynomial {text!r} at {pos}")
        sign, digits, var, exp = m.groups()
        coeff = int(digits) if digits else 1
        if sign == "-":
            coeff = -coeff
        if var:
            e = int(exp) if exp is not None else 1
        else:
            e = 0
        coeffs[e] = coeffs.get(e, 0) + coeff
        pos = m.end()
    return {e: c for e, c in coeffs.items() if c != 0}


def fmt_poly(coeffs, var, scale=1):
    terms = sorted((e * scale, c) for e, c in coeffs.items())
    return " ".join(f"{c}:{e}" for e, c in terms)


def main():
    rows = list(knot_rows())
    if len(rows) != 249:
        sys.exit(f"expected 249 knots, found {len(rows)}")
    catalog = os.path.join(ROOT, "crates", "core", "data", "catalog.txt")
    with open(catalog, "w") as fh:
        fh.write("# Prime knots with crossing number 3..10, one per line:\n")
        fh.write("#   name;crossing_number;PD[(a,b,c,d)s,...]\n")
        fh.write("# (a,b,c,d) lists arcs counterclockwise from the incoming under-arc;\n")
        fh.write("# s is the crossing sign, '+' when the over strand runs d -> b.\n")
        fh.write("# Source: KnotInfo (knotinfo.math.indiana.edu), via tools/gen_catalog.py.\n")
        for row in rows:
            pd = json.loads(row["pd_notation"])
            fh.write(f"{row['name']};{row['crossing_number']};{signed_pd(pd)}\n")
    oracle = os.path.join(ROOT, "crates", "core", "tests", "data", "knotinfo_invariants.txt")
    with open(oracle, "w") as fh:
        fh.write("# name;jones (coeff:exponent, exponents of q scaled x4);alexander (coeff:exponent);determinant\n")
        fh.write("# Published KnotInfo values, one chirality; used as an independent test oracle.\n")
        for row in rows:
            jones = fmt_poly(parse_poly(row["jones_polynomial"]), "q", scale=4)
            alex = fmt_poly(parse_poly(row["alexander_polynomial"]), "t")
            fh.write(f"{row['name']};{jones};{alex};{row['determinant']}\n")


if __name__ == "__main__":
    main()
