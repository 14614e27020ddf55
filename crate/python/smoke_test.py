#!/usr/bin/env python3
"""Smoke test for the frac3py extension module.

Build the extension first:

    cargo build -p frac3py

The script copies the cdylib into a temp directory under the import name
Python expects, imports it, and checks a handful of known values.
"""

import math
import shutil
import sys
import tempfile
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent


def load_module():
    candidates = [
        REPO / "target" / "release" / "libfrac3py.so",
        REPO / "target" / "debug" / "libfrac3py.so",
    ]
    built = [p for p in candidates if p.exists()]
    if not built:
        sys.exit("libfrac3py.so not found; run: cargo build -p frac3py")
    newest = max(built, key=lambda p: p.stat().st_mtime)
    stage = Path(tempfile.mkdtemp(prefix="frac3py-"))
    shutil.copy2(newest, stage / "frac3py.so")
    sys.path.insert(0, str(stage))
    import frac3py

    return frac3py


def close(a, b, tol=5e-7):
    return math.isfinite(a) and abs(a - b) <= tol


def main():
    f3 = load_module()
    checks = 0

    def ok(cond, label):
        nonlocal checks
        if not cond:
            sys.exit(f"FAIL {label}")
        checks += 1
        print(f"ok {label}")

    # Two 9-run designs with identical word-length patterns but different
    # discrepancies.
    design_a = f3.Design(
        [
            [0, 0, 0], [0, 1, 1], [0, 2, 2],
            [1, 0, 1], [1, 1, 2], [1, 2, 0],
            [2, 0, 2], [2, 1, 0], [2, 2, 1],
        ]
    )
    design_b = f3.Design(
        [
            [0, 0, 2], [0, 1, 0], [0, 2, 1],
            [1, 0, 0], [1, 1, 1], [1, 2, 2],
            [2, 0, 1], [2, 1, 2], [2, 2, 0],
        ]
    )
    ok(close(design_a.cd_fast(), 0.033186), "design A discrepancy")
    ok(close(design_b.cd_fast(), 0.033034), "design B discrepancy")
    ok(design_a.wlp() == design_b.wlp(), "shared word-length pattern")
    ok(close(design_a.cd(), design_a.cd_fast(), 1e-12), "kernel matches product form")

    sweep = f3.search_general(design_a)
    ok(close(sweep["min_phi"], 0.033034), "9-run sweep minimum")
    ok(sweep["evaluations"] == 27, "9-run sweep size")

    # Regular sweep on the cataloged 27-run, 5-factor relation.
    entry = f3.catalog(runs=27, factors=5, kind="ma")[0]
    rel = entry["relation"]
    ok(rel.runs == 27 and rel.factors == 5, "catalog relation shape")
    reg = f3.search_regular(rel)
    ok(close(reg["min_phi"], 0.063689), "27-run sweep minimum")
    ok(close(reg["ave_phi"], 0.063818), "27-run sweep average")
    ok(reg["class_count"] == 5, "mirror classes")

    best, stats = f3.uniform_minimum_aberration(rel)
    ok(close(best.cd_fast(), stats["min_phi"], 1e-15), "best design attains minimum")
    ok(close(best.average_cd(), reg["ave_phi"], 1e-12), "pattern average matches sweep")

    # Projection classes of the bundled 18-run array.
    groups = f3.classify(f3.oa18(), 3)
    ok(sorted(len(g["members"]) for g in groups) == [1, 6, 28], "18-run triple classes")

    # Closed forms and the identity suite. The cataloged 27-run, 4-factor
    # fraction has offset 0, which is the variant without the all-one run.
    ok(close(f3.fraction_cd(4, "uncentered"),
             f3.catalog_design(27, 4, "ma").cd_fast(), 1e-12),
       "closed form matches generated design")
    beta = f3.fraction_beta(5, "uncentered")
    ok(close(f3.cd_from_beta(5, beta), f3.fraction_cd(5, "uncentered"), 1e-14),
       "beta route matches closed form")
    report = f3.verify(n_max=6, bruteforce=True)
    ok(report["all_pass"] and len(report["checks"]) > 20, "verification suite")

    # Round trip through the text formats.
    text = design_a.to_text()
    ok(f3.Design.from_text(text).rows() == design_a.rows(), "design text round trip")
    ok(f3.Relation.from_text(rel.to_text()).coeffs() == rel.coeffs(),
       "relation text round trip")

    # Error mapping.
    try:
        f3.Design([[0, 1, 7]])
        sys.exit("FAIL invalid level accepted")
    except ValueError:
        checks += 1
        print("ok invalid level raises ValueError")

    print(f"\n{checks} checks passed")


if __name__ == "__main__":
    main()
