#!/usr/bin/env python3
# Copyright 2026 The edgecc Authors.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Rebuild data/pendigits.csv from the KEEL "penbased" copy of UCI PenDigits.

The KEEL copy (all 10,992 instances, 16 integer features in [0, 100], digit
label last) ships inside the `keel-ds` wheel, which is fetched with pip.
"""
import argparse
import pathlib
import subprocess
import sys
import tempfile
import zipfile

MEMBER = "keel_ds/data/balanced/raw/penbased.dat"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("-o", "--output", default="data/pendigits.csv")
    args = parser.parse_args()

    with tempfile.TemporaryDirectory() as tmp:
        subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps",
                        "-d", tmp, "keel-ds"], check=True)
        wheel = next(pathlib.Path(tmp).glob("keel_ds-*.whl"))
        text = zipfile.ZipFile(wheel).read(MEMBER).decode()

    rows = [line.strip() for line in text.splitlines()
            if line.strip() and not line.startswith("@")]
    out = pathlib.Path(args.output)
    out.parent.mkdir(parents=True, exist_ok=True)
    with out.open("w") as f:
        f.write(",".join(f"f{i}" for i in range(16)) + ",label\n")
        for row in rows:
            cells = [c.strip() for c in row.split(",")]
            if len(cells) != 17:
                raise SystemExit(f"unexpected row width {len(cells)}: {row}")
            f.write(",".join(cells) + "\n")
    print(f"wrote {len(rows)} rows to {out}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
