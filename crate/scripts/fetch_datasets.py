#!/usr/bin/env python3
"""Populate the local data directory with the five UCI benchmark datasets.

Each file is written in the layout of the original UCI distribution so the
registry in datasets.toml can parse it regardless of where it came from.

Sources, tried in order per dataset:
  1. the UCI Machine Learning Repository (original files);
  2. PyPI packages that redistribute the same tables
     (pydataset: R `datasets::iris`, `MASS::biopsy`;
      keel-ds: KEEL copies of Sonar and Mammographic Mass).

The KEEL copies differ from the UCI originals: Sonar values are rounded to
three decimals and Mammographic Mass has its rows with missing values removed
(830 of 961 rows). `bench datasets verify` reports which checksum matched.

Usage: fetch_datasets.py [--data-dir DIR] [--offline-only]
"""

import argparse
import csv
import hashlib
import io
import os
import subprocess
import sys
import tarfile
import tempfile
import urllib.request
import zipfile

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"

DATASETS = {
    "iris": {
        "file": "iris.data",
        "url": f"{UCI}/iris/iris.data",
    },
    "breast_cancer": {
        "file": "breast-cancer-wisconsin.data",
        "url": f"{UCI}/breast-cancer-wisconsin/breast-cancer-wisconsin.data",
    },
    "seeds": {
        "file": "seeds_dataset.txt",
        "url": f"{UCI}/00236/seeds_dataset.txt",
    },
    "mammographic_mass": {
        "file": "mammographic_masses.data",
        "url": f"{UCI}/mammographic-masses/mammographic_masses.data",
    },
    "sonar": {
        "file": "sonar.all-data",
        "url": f"{UCI}/undocumented/connectionist-bench/sonar/sonar.all-data",
    },
}

PYDATASET = "pydataset==0.2.0"
KEEL = "keel-ds==0.2.5"


def sha256(data: bytes) -> str:
    return hashlib.sha256(data).hexdigest()


def fetch_uci(url: str):
    try:
        with urllib.request.urlopen(url, timeout=15) as resp:
            return resp.read()
    except Exception as err:  # noqa: BLE001
        print(f"  uci: unavailable ({err})")
        return None


def pip_download(spec: str, dest: str):
    cmd = [sys.executable, "-m", "pip", "download", "--no-deps", "-q", spec, "-d", dest]
    try:
        subprocess.run(cmd, check=True, capture_output=True)
    except subprocess.CalledProcessError as err:
        print(f"  pip: could not download {spec}: {err.stderr.decode().strip()[-200:]}")
        return None
    for name in os.listdir(dest):
        if name.lower().replace("_", "-").startswith(spec.split("==")[0].replace("_", "-")):
            return os.path.join(dest, name)
    return None


def read_rdata_csv(sdist: str, member: str):
    with tarfile.open(sdist) as outer:
        inner_member = next(m for m in outer.getmembers() if m.name.endswith("resources.tar.gz"))
        inner = tarfile.open(fileobj=io.BytesIO(outer.extractfile(inner_member).read()))
        raw = inner.extractfile(f"resources/rdata/csv/{member}").read().decode()
    return list(csv.reader(io.StringIO(raw)))


def iris_from_pydataset(sdist: str) -> bytes:
    rows = read_rdata_csv(sdist, "datasets/iris.csv")[1:]
    out = io.StringIO()
    for row in rows:
        values = row[1:5]
        out.write(",".join(values) + ",Iris-" + row[5] + "\n")
    return out.getvalue().encode()


def breast_cancer_from_pydataset(sdist: str) -> bytes:
    rows = read_rdata_csv(sdist, "MASS/biopsy.csv")[1:]
    out = io.StringIO()
    for row in rows:
        ident = row[1]
        values = ["?" if v == "NA" else v for v in row[2:11]]
        label = "2" if row[11] == "benign" else "4"
        out.write(",".join([ident] + values + [label]) + "\n")
    return out.getvalue().encode()


def keel_table(wheel: str, name: str) -> bytes:
    with zipfile.ZipFile(wheel) as z:
        raw = z.read(f"keel_ds/data/balanced/raw/{name}.dat").decode()
    out = io.StringIO()
    for line in raw.splitlines():
        if not line.strip() or line.startswith("@"):
            continue
        out.write(",".join(field.strip() for field in line.split(",")) + "\n")
    return out.getvalue().encode()


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--data-dir", default=os.path.join(os.path.dirname(__file__), "..", "data"))
    parser.add_argument("--offline-only", action="store_true", help="skip the UCI download attempt")
    args = parser.parse_args()
    os.makedirs(args.data_dir, exist_ok=True)

    missing = []
    with tempfile.TemporaryDirectory() as tmp:
        packages = {}

        def package(spec):
            if spec not in packages:
                packages[spec] = pip_download(spec, tmp)
            return packages[spec]

        fallbacks = {
            "iris": lambda: iris_from_pydataset(package(PYDATASET)) if package(PYDATASET) else None,
            "breast_cancer": lambda: breast_cancer_from_pydataset(package(PYDATASET)) if package(PYDATASET) else None,
            "mammographic_mass": lambda: keel_table(package(KEEL), "mammographic") if package(KEEL) else None,
            "sonar": lambda: keel_table(package(KEEL), "sonar") if package(KEEL) else None,
        }

        for name, info in DATASETS.items():
            print(f"{name}:")
            data = None if args.offline_only else fetch_uci(info["url"])
            source = "uci"
            if data is None and name in fallbacks:
                data = fallbacks[name]()
                source = "pypi"
            if data is None:
                print("  no source available")
                missing.append(name)
                continue
            path = os.path.join(args.data_dir, info["file"])
            with open(path, "wb") as fh:
                fh.write(data)
            print(f"  {source}: wrote {path} sha256={sha256(data)}")

    if missing:
        print(f"missing datasets: {', '.join(missing)}; place the UCI files in {args.data_dir} manually")
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
