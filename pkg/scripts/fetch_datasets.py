#!/usr/bin/env python3
"""Fetch and normalize the benchmark datasets into data/.

Each dataset is tried against several public sources (UCI archive first, then
GitHub mirrors) and written as a comma-separated file with a header row and a
``class`` label column, the format imbkit's loader expects.

Restricted networks can route the hosts through proxies:

    python scripts/fetch_datasets.py \
        --github-base https://my-proxy/github \
        --uci-base https://my-proxy/uci

Already-present files are skipped unless --force is given.
"""

from __future__ import annotations

import argparse
import csv
import gzip
import io
import sys
import urllib.request
import zipfile
from pathlib import Path

UCI = "https://archive.ics.uci.edu/ml/machine-learning-databases"
GITHUB = "https://github.com"
PMLB = "{github}/EpistasisLab/pmlb/raw/master/datasets/{name}/{name}.tsv.gz"


def fetch(url: str) -> bytes:
    req = urllib.request.Request(url, headers={"User-Agent": "imbkit-fetch/0.1"})
    with urllib.request.urlopen(req, timeout=60) as resp:
        return resp.read()


def parse_pmlb(raw: bytes, label_map=None):
    text = gzip.decompress(raw).decode()
    rows = [line.split("\t") for line in text.strip().split("\n")]
    out = []
    for r in rows[1:]:
        lab = r[-1]
        out.append(r[:-1] + [label_map.get(lab, lab) if label_map else lab])
    return out


def parse_delimited(raw: bytes, *, delim=",", label_first=False, label_map=None,
                    skip_header=False):
    lines = [l.strip() for l in raw.decode().strip().split("\n") if l.strip()]
    if skip_header:
        lines = lines[1:]
    out = []
    for line in lines:
        cells = [c for c in line.replace(delim, ",").split(",") if c != ""] \
            if delim == " " else line.split(delim)
        if label_first:
            lab, feats = cells[0], cells[1:]
        else:
            lab, feats = cells[-1], cells[:-1]
        out.append(feats + [label_map.get(lab, lab) if label_map else lab])
    return out


def parse_vehicle_uci(parts):
    rows = []
    for raw in parts:
        rows.extend(parse_delimited(raw, delim=" "))
    return rows


def parse_vertebral_zip(raw: bytes):
    with zipfile.ZipFile(io.BytesIO(raw)) as z:
        dat = z.read("column_3C.dat").decode()
    return parse_delimited(dat.encode(), delim=" ")


def parse_arff(raw: bytes, label_map=None):
    rows = []
    for line in raw.decode().split("\n"):
        line = line.strip()
        if not line or line.startswith(("%", "@")):
            continue
        cells = line.split(",")
        lab = cells[-1]
        rows.append(cells[:-1] + [label_map.get(lab, lab) if label_map else lab])
    return rows


def dataset_sources(github: str, uci: str) -> dict:
    pmlb = lambda name: PMLB.format(github=github, name=name)
    return {
        "new-thyroid.csv": [
            (f"{uci}/thyroid-disease/new-thyroid.data",
             lambda raw: parse_delimited(raw, label_first=True,
                                         label_map={"1": "normal", "2": "hyper", "3": "hypo"})),
            (pmlb("new_thyroid"),
             lambda raw: parse_pmlb(raw, {"1": "normal", "2": "hyper", "3": "hypo"})),
        ],
        "balance.csv": [
            (f"{uci}/balance-scale/balance-scale.data",
             lambda raw: parse_delimited(raw, label_first=True)),
            (pmlb("balance_scale"),
             lambda raw: parse_pmlb(raw, {"0": "B", "1": "L", "2": "R"})),
        ],
        "contraceptive.csv": [
            (f"{uci}/cmc/cmc.data",
             lambda raw: parse_delimited(raw, label_map={"1": "no-use", "2": "long-term",
                                                         "3": "short-term"})),
            (f"{github}/renatopp/arff-datasets/raw/master/classification/cmc.arff",
             lambda raw: parse_arff(raw, {"1": "no-use", "2": "long-term", "3": "short-term"})),
        ],
        "vehicle.csv": [
            (pmlb("vehicle"), parse_pmlb),
            # UCI splits vehicle across 9 chunk files; fetched together below
        ],
        "winequality-red.csv": [
            (f"{uci}/wine-quality/winequality-red.csv",
             lambda raw: parse_delimited(raw, delim=";", skip_header=True)),
            (pmlb("wine_quality_red"), parse_pmlb),
        ],
        "vertebral.csv": [
            (f"{uci}/00212/vertebral_column_data.zip", parse_vertebral_zip),
        ],
    }


def write_dataset(path: Path, rows) -> None:
    n_feat = len(rows[0]) - 1
    with open(path, "w", newline="", encoding="utf-8") as f:
        w = csv.writer(f)
        w.writerow([f"f{i + 1}" for i in range(n_feat)] + ["class"])
        w.writerows(rows)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("--out-dir", default=Path(__file__).resolve().parent.parent / "data",
                    type=Path)
    ap.add_argument("--github-base", default=GITHUB)
    ap.add_argument("--uci-base", default=UCI)
    ap.add_argument("--only", nargs="*", help="dataset file names to fetch")
    ap.add_argument("--force", action="store_true")
    args = ap.parse_args(argv)

    args.out_dir.mkdir(parents=True, exist_ok=True)
    sources = dataset_sources(args.github_base.rstrip("/"), args.uci_base.rstrip("/"))
    failures = []
    for fname, candidates in sources.items():
        if args.only and fname not in args.only:
            continue
        target = args.out_dir / fname
        if target.exists() and not args.force:
            print(f"{fname}: already present, skipping")
            continue
        rows = None
        if fname == "vehicle.csv":
            # UCI fallback needs all 9 statlog chunks
            try:
                parts = [fetch(f"{args.uci_base}/statlog/vehicle/xa{c}.dat")
                         for c in "abcdefghi"]
                rows = parse_vehicle_uci(parts)
            except Exception:
                rows = None
        for url, parser in candidates:
            if rows is not None:
                break
            try:
                rows = parser(fetch(url))
                print(f"{fname}: fetched from {url}")
            except Exception as exc:
                print(f"{fname}: {url} failed ({exc})", file=sys.stderr)
        if rows is None:
            failures.append(fname)
            continue
        write_dataset(target, rows)
        print(f"{fname}: wrote {len(rows)} rows")
    if failures:
        print(f"failed to fetch: {failures}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
