"""Writes the synthetic sine quote fixture used by the tests.

x_t = 2 + sin(2*pi*t/25) + 0.01*N(0,1), t = 0..799, business-day dates
from 2016-10-03. Open/High/Low bracket Close; Adj Close equals Close.
"""
import argparse

import numpy as np
import pandas as pd


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--output", default="tests/data/sine_800.csv")
    ap.add_argument("--length", type=int, default=800)
    ap.add_argument("--period", type=float, default=25.0)
    ap.add_argument("--sigma", type=float, default=0.01)
    ap.add_argument("--seed", type=int, default=20161003)
    args = ap.parse_args()

    rng = np.random.default_rng(args.seed)
    t = np.arange(args.length)
    close = 2.0 + np.sin(2.0 * np.pi * t / args.period) + args.sigma * rng.standard_normal(args.length)
    dates = pd.bdate_range("2016-10-03", periods=args.length)
    frame = pd.DataFrame({
        "Date": dates.strftime("%Y-%m-%d"),
        "Open": close,
        "High": close + 0.005,
        "Low": close - 0.005,
        "Close": close,
        "Adj Close": close,
        "Volume": 1000000,
    })
    frame.to_csv(args.output, index=False, float_format="%.10f")


if __name__ == "__main__":
    main()
