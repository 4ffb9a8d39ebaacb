# plot_sweep.py
#
# Template for plotting the per-image files written by `qic sweep` into
# <out>/plots/. Not imported by the package; needs matplotlib.
#
#   python docs/plot_sweep.py out/plots/grass.dat

import sys
from pathlib import Path

import matplotlib.pyplot as plt


def read_series(path):
    series = {}
    current = None
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if line.startswith("# scheme "):
            current = line.split()[-1]
            series[current] = []
        elif line and not line.startswith("#"):
            gpp, psnr = line.split()
            series[current].append((float(gpp), float(psnr)))
    return series


def plot(path):
    series = read_series(path)
    fig, ax = plt.subplots(figsize=(6, 4))
    for scheme, rows in series.items():
        # rows are in ascending Q; drop lossless points, they have no finite PSNR
        rows = [r for r in rows if r[1] != float("inf")]
        ax.plot([r[0] for r in rows], [r[1] for r in rows], marker="o", label=scheme)
    ax.set_xlabel("gates per pixel")
    ax.set_ylabel("PSNR (dB)")
    ax.legend()
    ax.set_title(Path(path).stem)
    fig.tight_layout()
    out = Path(path).with_suffix(".png")
    fig.savefig(out)
    print(f"wrote {out}")


if __name__ == "__main__":
    for arg in sys.argv[1:]:
        plot(arg)
