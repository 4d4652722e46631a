"""Plot LCE against one sweep axis from a ``chiplet-lce sweep`` CSV.

Needs matplotlib, which the package itself does not depend on.

    chiplet-lce sweep --axis chiplet.redundant_modules_a=0,1,2,3,4,5,6,7,8 \
        --axis chiplet.router_redundancy_enabled=false,true --out modules.csv
    python scripts/plot_sweep.py modules.csv --x chiplet.redundant_modules_a \
        --group chiplet.router_redundancy_enabled --out modules.png
"""

import argparse
import csv
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("csv")
    p.add_argument("--x", required=True, help="axis column for the horizontal axis")
    p.add_argument("--y", default="lce", help="result column to plot (default: lce)")
    p.add_argument("--group", help="axis column that splits the curves")
    p.add_argument("--out", default="sweep.png")
    args = p.parse_args(argv)

    with open(args.csv, newline="") as fh:
        rows = list(csv.DictReader(fh))
    curves = defaultdict(list)
    for row in rows:
        curves[row[args.group] if args.group else args.y].append((float(row[args.x]), float(row[args.y])))

    fig, ax = plt.subplots(figsize=(5, 3.5))
    for label, pts in curves.items():
        pts.sort()
        ax.plot([x for x, _ in pts], [y for _, y in pts], marker="o",
                label=f"{args.group}={label}" if args.group else label)
    ax.set_xlabel(args.x)
    ax.set_ylabel(args.y)
    ax.legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=150)


if __name__ == "__main__":
    main()
