#!/usr/bin/env python3
"""Fetch the Boston-area housing dataset and write data/housing.csv.

Needs network access (the build sandbox has none; run this on a normal
machine). Sources tried in order:

  1. the canonical StatLib file (two physical lines per record),
  2. the OpenML CSV export.

Alternatively pass ``--from-file raw.txt`` to convert an already-downloaded
StatLib file offline.

Columns are renamed to the descriptive names the rest of this repository
uses (PROPERTY_TAX, MEDIAN_PRICE, ...). The racially derived "B" column is
dropped: no analysis here uses it and we will not ship it.
"""

import argparse
import sys
import urllib.request
from pathlib import Path

STATLIB_URL = "http://lib.stat.cmu.edu/datasets/boston"
OPENML_URL = "https://www.openml.org/data/download/52643/boston_corrected.arff"

RAW_COLUMNS = [
    "CRIM", "ZN", "INDUS", "CHAS", "NOX", "RM", "AGE",
    "DIS", "RAD", "TAX", "PTRATIO", "B", "LSTAT", "MEDV",
]
RENAMES = {
    "CRIM": "CRIME_RATE",
    "ZN": "RESIDENTIAL_ZONING",
    "INDUS": "INDUSTRIALIZATION",
    "CHAS": "RIVERSIDE",
    "NOX": "NITRIC_OXIDE",
    "RM": "AVG_ROOMS",
    "AGE": "OLD_HOMES",
    "DIS": "DISTANCE_FROM_CITY",
    "RAD": "ACCESSIBILITY_TO_HIGHWAY",
    "TAX": "PROPERTY_TAX",
    "PTRATIO": "PUPIL_TEACHER_RATIO",
    "LSTAT": "LOWER_STATUS_PCT",
    "MEDV": "MEDIAN_PRICE",
}
DROP = {"B"}


def parse_statlib(text: str) -> list[list[float]]:
    """The StatLib file wraps each record over two lines after a prose header;
    tokenizing the numeric tail and regrouping by 14 is robust to that."""
    tokens: list[float] = []
    for line in text.splitlines():
        parts = line.split()
        try:
            values = [float(p) for p in parts]
        except ValueError:
            if tokens:
                raise ValueError(f"non-numeric line inside data section: {line!r}")
            continue  # header prose
        if values:
            tokens.extend(values)
    if len(tokens) % len(RAW_COLUMNS) != 0:
        raise ValueError(
            f"token count {len(tokens)} is not a multiple of {len(RAW_COLUMNS)}"
        )
    rows = [tokens[i:i + 14] for i in range(0, len(tokens), 14)]
    if len(rows) != 506:
        print(f"warning: expected 506 rows, parsed {len(rows)}", file=sys.stderr)
    return rows


def write_csv(rows: list[list[float]], out: Path) -> None:
    keep = [i for i, c in enumerate(RAW_COLUMNS) if c not in DROP]
    header = ",".join(RENAMES[RAW_COLUMNS[i]] for i in keep)
    lines = [header]
    for row in rows:
        lines.append(",".join(repr(row[i]) for i in keep))
    out.parent.mkdir(parents=True, exist_ok=True)
    out.write_text("\n".join(lines) + "\n", encoding="utf-8")
    print(f"wrote {out} ({len(rows)} rows, {len(keep)} columns)")


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out", default="data/housing.csv")
    parser.add_argument("--from-file", help="convert a local StatLib-format file")
    args = parser.parse_args()
    out = Path(args.out)

    if args.from_file:
        write_csv(parse_statlib(Path(args.from_file).read_text()), out)
        return 0

    try:
        with urllib.request.urlopen(STATLIB_URL, timeout=30) as resp:
            write_csv(parse_statlib(resp.read().decode("utf-8", "replace")), out)
        return 0
    except Exception as exc:  # fall through to the mirror
        print(f"StatLib fetch failed ({exc}); trying OpenML", file=sys.stderr)

    try:
        with urllib.request.urlopen(OPENML_URL, timeout=30) as resp:
            text = resp.read().decode("utf-8", "replace")
    except Exception as exc:
        print(f"OpenML fetch failed too: {exc}", file=sys.stderr)
        return 1
    # Minimal ARFF handling: names from @attribute lines, data after @data.
    names: list[str] = []
    rows: list[list[float]] = []
    in_data = False
    for line in text.splitlines():
        line = line.strip()
        if not line or line.startswith("%"):
            continue
        if line.lower().startswith("@attribute"):
            names.append(line.split()[1].strip("'\""))
        elif line.lower().startswith("@data"):
            in_data = True
        elif in_data:
            rows.append([float(x) for x in line.split(",")])
    upper = [n.upper() for n in names]
    idx = [upper.index(c) for c in RAW_COLUMNS]
    write_csv([[r[i] for i in idx] for r in rows], out)
    return 0


if __name__ == "__main__":
    sys.exit(main())
