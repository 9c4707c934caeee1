#!/usr/bin/env python3
"""Build the benchmark CSVs under data/ from public dataset bundles on PyPI.

Sources:
  keel-ds    KEEL copies of the UCI Pima Indians Diabetes and Statlog (Heart) tables
  pydataset  Rdatasets snapshot with the R `survival` package tables (pbc, lung, colon, veteran)

Usage: tools/fetch_datasets.py [--out data] [--cache DIR] [--parkinsons parkinsons.data]
The two packages are fetched with `pip download`; nothing is installed.
Parkinsons is not on PyPI: pass a local copy of the UCI `parkinsons.data` file to convert it
(the `name` recording id is dropped, `status` is the class column).
"""

import argparse
import csv
import io
import pathlib
import subprocess
import sys
import tarfile
import tempfile
import zipfile

HEART_COLUMNS = ["age", "sex", "chest_pain", "rest_bp", "chol", "fbs", "rest_ecg",
                 "max_hr", "ex_angina", "oldpeak", "slope", "n_vessels", "thal", "class"]
PIMA_COLUMNS = ["pregnant", "glucose", "pressure", "triceps", "insulin", "mass",
                "pedigree", "age", "class"]


def pip_download(name, dest):
    existing = [p for p in sorted(dest.glob(name.replace("-", "_") + "-*")) + sorted(dest.glob(name + "-*"))
                if p.is_file()]
    if existing:
        return existing[0]
    subprocess.run([sys.executable, "-m", "pip", "download", "--no-deps", "-d", str(dest), name],
                   check=True)
    return pip_download(name, dest)


def keel_table(wheel, name):
    with zipfile.ZipFile(wheel) as z:
        text = z.read(f"keel_ds/data/balanced/raw/{name}.dat").decode()
    return [line.split(",") for line in text.splitlines() if line and not line.startswith("@")]


def rdata_table(sdist, package, name):
    with tarfile.open(sdist) as outer:
        member = next(m for m in outer.getmembers() if m.name.endswith("resources.tar.gz"))
        inner = tarfile.open(fileobj=io.BytesIO(outer.extractfile(member).read()))
        raw = inner.extractfile(f"resources/rdata/csv/{package}/{name}.csv").read().decode()
    rows = list(csv.reader(io.StringIO(raw)))
    header = rows[0][1:]
    return [dict(zip(header, r[1:])) for r in rows[1:]]


def write(path, header, rows):
    with open(path, "w", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    print(f"wrote {path} ({len(rows)} rows x {len(header)} columns)")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    ap.add_argument("--cache", default=None, help="directory for downloaded packages")
    ap.add_argument("--parkinsons", default=None, help="local UCI parkinsons.data file")
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    cache = pathlib.Path(args.cache or tempfile.mkdtemp(prefix="smoothrank-data-"))
    cache.mkdir(parents=True, exist_ok=True)

    keel = pip_download("keel-ds", cache)
    pima = keel_table(keel, "pima")
    write(out / "pima.csv", PIMA_COLUMNS,
          [r[:8] + ["positive" if r[8] == "tested_positive" else "negative"] for r in pima])

    heart = keel_table(keel, "heart")
    rows = []
    for r in heart:
        r = list(r)
        # KEEL stores ST depression in tenths; restore the UCI units.
        r[9] = f"{float(r[9]) / 10:g}"
        r[13] = "presence" if r[13] == "2" else "absence"
        rows.append(r)
    write(out / "statlog_heart.csv", HEART_COLUMNS, rows)

    rdata = pip_download("pydataset", cache)

    # PBC: death is the event; transplant is treated as censored.
    pbc = rdata_table(rdata, "survival", "pbc")
    feats = ["trt", "age", "sex", "ascites", "hepato", "spiders", "edema", "bili", "chol",
             "albumin", "copper", "alk.phos", "ast", "trig", "platelet", "protime", "stage"]
    write(out / "pbc.csv", ["time", "event"] + feats,
          [[r["time"], "1" if r["status"] == "2" else "0"] + [r[f] for f in feats] for r in pbc])

    lung = rdata_table(rdata, "survival", "lung")
    feats = ["age", "sex", "ph.ecog", "ph.karno", "pat.karno", "meal.cal", "wt.loss"]
    write(out / "lung.csv", ["time", "event"] + feats,
          [[r["time"], "1" if r["status"] == "2" else "0"] + [r[f] for f in feats] for r in lung])

    # Colon: one record per patient, death (etype 2) as the outcome.
    colon = [r for r in rdata_table(rdata, "survival", "colon") if r["etype"] == "2"]
    feats = ["rx", "sex", "age", "obstruct", "perfor", "adhere", "nodes", "differ", "extent",
             "surg", "node4"]
    write(out / "colon.csv", ["time", "event"] + feats,
          [[r["time"], r["status"]] + [r[f] for f in feats] for r in colon])

    vet = rdata_table(rdata, "survival", "veteran")
    feats = ["trt", "celltype", "karno", "diagtime", "age", "prior"]
    write(out / "veteran.csv", ["time", "event"] + feats,
          [[r["time"], r["status"]] + [r[f] for f in feats] for r in vet])

    if args.parkinsons:
        with open(args.parkinsons, newline="") as f:
            table = list(csv.DictReader(f))
        feats = [c for c in table[0] if c not in ("name", "status")]
        write(out / "parkinsons.csv", feats + ["status"],
              [[r[c] for c in feats] + [r["status"]] for r in table])


if __name__ == "__main__":
    main()
