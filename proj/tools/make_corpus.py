"""Writes the bundled synthetic LIBSVM corpora under data/.

The files are committed; rerunning this script reproduces them byte for byte.
Values are multiples of 1/1000 written in shortest round-trip form, so the
C++ serializer reproduces each file exactly.
"""

import argparse
import pathlib

import numpy as np


def fmt(v: float) -> str:
    if v == int(v):
        return str(int(v))
    return repr(v)


def make(rows: int, dim: int, nnz: int, flip: float, seed: int) -> str:
    rng = np.random.default_rng(seed)
    w = rng.normal(size=dim)
    lines = []
    for _ in range(rows):
        cols = np.sort(rng.choice(dim, size=nnz, replace=False))
        vals = np.where(rng.random(nnz) < 0.5, 1.0, rng.integers(10, 1001, size=nnz) / 1000.0)
        margin = float(vals @ w[cols]) + rng.normal(scale=0.5)
        y = 1 if margin > 0 else -1
        if rng.random() < flip:
            y = -y
        feats = " ".join(f"{c + 1}:{fmt(float(v))}" for c, v in zip(cols, vals))
        lines.append(("+1" if y > 0 else "-1") + " " + feats)
    return "\n".join(lines) + "\n"


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(pathlib.Path(__file__).resolve().parent.parent / "data"))
    args = ap.parse_args()
    out = pathlib.Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    (out / "synthetic2000.libsvm").write_text(make(2000, 120, 12, 0.05, 7))
    (out / "mini.libsvm").write_text(make(24, 10, 4, 0.0, 3))


if __name__ == "__main__":
    main()
