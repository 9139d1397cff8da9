"""Plot optimal hashing quality against c for each S, one panel per S.

    python3 scripts/rho_figure.py --out rho.png [--csv rho.csv]
"""

import argparse
import csv
import io

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

from mipslsh.rho import DEFAULT_S_VALUES, GridSpec, emit_rho_curves


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default="rho.png")
    ap.add_argument("--csv")
    args = ap.parse_args()

    c_values = [k / 100 for k in range(5, 100, 5)]
    buf = io.StringIO()
    emit_rho_curves(DEFAULT_S_VALUES, c_values, GridSpec(), buf)
    if args.csv:
        with open(args.csv, "w", encoding="utf-8") as fh:
            fh.write(buf.getvalue())
    rows = list(csv.DictReader(io.StringIO(buf.getvalue())))

    fig, axes = plt.subplots(2, 3, figsize=(12, 7), sharex=True, sharey=True)
    for ax, S in zip(axes.flat, DEFAULT_S_VALUES):
        sub = [r for r in rows if float(r["S"]) == S]
        c = [float(r["c"]) for r in sub]
        for key, label in (("rho_simple", "simple-lsh"), ("rho_l2alsh", "l2-alsh"), ("rho_signalsh", "sign-alsh")):
            pts = [(ci, float(r[key])) for ci, r in zip(c, sub) if r[key]]
            ax.plot(*zip(*pts), label=label)
        ax.set_title(f"S = {S}")
        ax.set_xlabel("c")
        ax.set_ylabel("rho*")
    axes.flat[0].legend()
    fig.tight_layout()
    fig.savefig(args.out, dpi=120)
    print(f"wrote {args.out}")


if __name__ == "__main__":
    main()
