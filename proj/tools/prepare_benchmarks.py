# Copyright 2026 The Ballad Authors.
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Rebuild data/benchmarks/{glass,wbc,wdbc}.csv.

Glass and WBC come from the Orange3 3.10.0 source distribution on PyPI;
WDBC comes from scikit-learn. Anomaly subsampling is seeded so the output
is reproducible byte for byte.

    python tools/prepare_benchmarks.py [--orange-dir DIR] [--out data/benchmarks]
"""

import argparse
import csv
import pathlib
import random
import subprocess
import tarfile
import tempfile

SEED = 20260101


def read_tab(path):
    with open(path, newline="") as f:
        rows = list(csv.reader(f, delimiter="\t"))
    header, body = rows[0], rows[3:]
    return header, [r for r in body if r and any(c.strip() for c in r)]


def fetch_orange(workdir):
    subprocess.run(
        ["pip", "download", "Orange3==3.10.0", "--no-deps", "--no-binary", ":all:", "-d", workdir],
        check=True,
    )
    sdist = next(pathlib.Path(workdir).glob("Orange3-3.10.0.tar.gz"))
    with tarfile.open(sdist) as tar:
        tar.extractall(workdir)
    return pathlib.Path(workdir) / "Orange3-3.10.0" / "Orange" / "datasets"


def write_csv(path, features, labels):
    d = len(features[0])
    with open(path, "w", newline="") as f:
        f.write(",".join(f"f{i + 1}" for i in range(d)) + ",label\n")
        for x, y in zip(features, labels):
            f.write(",".join(repr(float(v)) if not float(v).is_integer() else str(int(v))
                             for v in x) + f",{y}\n")
    print(f"{path}: {len(labels)} rows, {sum(labels)} anomalies, d={d}")


def glass(orange):
    # Tableware (class 6) is the anomaly class; the Id column is dropped.
    header, body = read_tab(orange / "glass.tab")
    feats = [[float(v) for v in r[1:10]] for r in body]
    labels = [1 if r[10].strip() == "6" else 0 for r in body]
    return feats, labels


def wbc(orange):
    # Deduplicated benign rows are the inliers; ten malignant rows are sampled.
    header, body = read_tab(orange / "breast-cancer-wisconsin.tab")
    benign, malignant, seen = [], [], set()
    for r in body:
        x = tuple(float(v) for v in r[:9])
        if r[9].strip() == "2":
            if x not in seen:
                seen.add(x)
                benign.append(list(x))
        else:
            malignant.append(list(x))
    rng = random.Random(SEED)
    picked = rng.sample(malignant, 10)
    rows = [(x, 0) for x in benign] + [(x, 1) for x in picked]
    rng.shuffle(rows)
    return [x for x, _ in rows], [y for _, y in rows]


def wdbc():
    from sklearn.datasets import load_breast_cancer

    data = load_breast_cancer()
    # sklearn codes malignant as 0.
    benign = [list(x) for x, t in zip(data.data, data.target) if t == 1]
    malignant = [list(x) for x, t in zip(data.data, data.target) if t == 0]
    rng = random.Random(SEED + 1)
    picked = rng.sample(malignant, 10)
    rows = [(x, 0) for x in benign] + [(x, 1) for x in picked]
    rng.shuffle(rows)
    return [x for x, _ in rows], [y for _, y in rows]


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--orange-dir", type=pathlib.Path)
    ap.add_argument("--out", type=pathlib.Path,
                    default=pathlib.Path(__file__).resolve().parent.parent / "data" / "benchmarks")
    args = ap.parse_args()
    args.out.mkdir(parents=True, exist_ok=True)
    with tempfile.TemporaryDirectory() as tmp:
        orange = args.orange_dir or fetch_orange(tmp)
        write_csv(args.out / "glass.csv", *glass(orange))
        write_csv(args.out / "wbc.csv", *wbc(orange))
    write_csv(args.out / "wdbc.csv", *wdbc())


if __name__ == "__main__":
    main()
