"""Rebuild hearo/data/processed.cleveland.data from Orange3's heart_disease.tab.

The UCI host is not always reachable, so the bundled copy was regenerated from
the tab-separated table shipped inside the Orange3 wheel
(``Orange/datasets/heart_disease.tab``), which holds the same 303 Cleveland
records with the categorical columns spelled out. This maps them back to the
numeric UCI codes. Orange's class column is already binary, so the 1-4
severity grades of the original outcome are not recoverable; the loader only
needs num == 0 versus num >= 1.

    pip download orange3==3.39.0 --no-deps -d /tmp/o
    unzip -p /tmp/o/orange3-*.whl Orange/datasets/heart_disease.tab > heart_disease.tab
    python scripts/rebuild_cleveland.py heart_disease.tab src/hearo/data/processed.cleveland.data
"""

import argparse
import csv

CODES = {
    1: {"female": 0, "male": 1},
    2: {"typical ang": 1, "atypical ang": 2, "non-anginal": 3, "asymptomatic": 4},
    6: {"normal": 0, "ST-T abnormal": 1, "left vent hypertrophy": 2},
    10: {"upsloping": 1, "flat": 2, "downsloping": 3},
    12: {"normal": 3, "fixed defect": 6, "reversable defect": 7},
}


def convert(row: list[str]) -> str:
    out = []
    for i, tok in enumerate(row[:13]):
        if tok in ("", "?"):
            out.append("?")
        elif i in CODES:
            out.append(f"{float(CODES[i][tok]):.1f}")
        else:
            out.append(f"{float(tok):.1f}")
    out.append(str(int(float(row[13]))))
    return ",".join(out)


def main() -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("tab")
    p.add_argument("out")
    args = p.parse_args()
    with open(args.tab, newline="") as fh:
        rows = list(csv.reader(fh, delimiter="\t"))[3:]  # three Orange header lines
    with open(args.out, "w") as fh:
        fh.writelines(convert(r) + "\n" for r in rows if r)


if __name__ == "__main__":
    main()
