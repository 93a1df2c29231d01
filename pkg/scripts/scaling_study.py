#!/usr/bin/env python3
"""Construction-only resource scaling of the QLT circuit.

Reads a scaling config (see configs/scaling.yaml), builds one seeded random
instance per (n, eps) and writes table.csv plus a short spread summary.

    python scripts/scaling_study.py --config configs/scaling.yaml --out out/scaling
"""
import argparse
import csv
import json
from pathlib import Path

from qlaplace.cli import CSV_FIELDS, load_config, scaling_rows


def spread(rows, key):
    vals = [r[key] for r in rows]
    return max(vals) / min(vals) if vals else float("nan")


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default="configs/scaling.yaml")
    ap.add_argument("--out", type=Path, default=Path("out/scaling"))
    args = ap.parse_args()

    cfg = load_config(args.config, "scaling")
    rows = scaling_rows(cfg["scaling"], cfg.get("seed", 0))
    args.out.mkdir(parents=True, exist_ok=True)
    with (args.out / "table.csv").open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_FIELDS)
        w.writerows([r[k] for k in CSV_FIELDS] for r in rows)

    summary = {
        key: spread(rows, key)
        for key in ("size_per_Kn", "depth_per_Klogn", "overhead_size_per_Kn", "overhead_depth_per_Klogn")
    }
    (args.out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")
    print(f"{'n':>3} {'eps':>8} {'K':>3} {'size':>9} {'depth':>7} {'ovh size/Kn':>12} {'ovh depth/Klogn':>16}")
    for r in rows:
        print(
            f"{r['n']:>3} {r['eps']:>8.1e} {r['K']:>3} {r['size']:>9} {r['depth']:>7} "
            f"{r['overhead_size_per_Kn']:>12.2f} {r['overhead_depth_per_Klogn']:>16.2f}"
        )
    for key, val in summary.items():
        print(f"max/min {key}: {val:.2f}")


if __name__ == "__main__":
    main()
