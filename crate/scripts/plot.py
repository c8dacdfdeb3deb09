#!/usr/bin/env python3
"""Plot the CSV files written by `unipred --out DIR`.

usage: python3 scripts/plot.py DIR [--show]
"""
import sys
from pathlib import Path

import matplotlib

if "--show" not in sys.argv:
    matplotlib.use("Agg")
import matplotlib.pyplot as plt
import pandas as pd


def plot_series(df, ax, title):
    for col in df.columns[1:]:
        ax.plot(df["t"], df[col], label=col, linewidth=0.8)
    if df["t"].max() > 100:
        ax.set_xscale("log")
    ax.set_xlabel("t")
    ax.set_title(title)
    ax.legend()


def plot_checks(df, ax, title):
    colors = ["tab:green" if s == "pass" else "tab:red" for s in df["status"]]
    ax.barh(df["check"], df["slack"], color=colors)
    ax.set_xlabel("slack")
    ax.set_title(title)


def main():
    args = [a for a in sys.argv[1:] if not a.startswith("--")]
    out = Path(args[0] if args else "out")
    for path in sorted(out.glob("*.csv")):
        df = pd.read_csv(path)
        fig, ax = plt.subplots(figsize=(8, 4.5))
        if "t" in df.columns:
            plot_series(df, ax, path.stem)
        else:
            plot_checks(df, ax, path.stem)
        fig.tight_layout()
        target = path.with_suffix(".png")
        fig.savefig(target, dpi=120)
        print(target)
    if "--show" in sys.argv:
        plt.show()


if __name__ == "__main__":
    main()
