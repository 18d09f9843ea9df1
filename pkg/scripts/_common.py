import argparse
from pathlib import Path

from sigtrade.io import write_json


def parse(desc):
    ap = argparse.ArgumentParser(description=desc)
    ap.add_argument("--out", default="results", help="directory for the JSON result")
    ap.add_argument("--seed", type=int, default=None, help="override the simulation seed")
    return ap.parse_args()


def save(args, name, result):
    out = Path(args.out)
    write_json(out / f"{name}.json", result)
    print(f"wrote {out / (name + '.json')}")
