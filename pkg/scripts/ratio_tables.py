"""Print Re/Im and Im/Re of m(iy) over both windows for a catalog entry (CSV)."""
import argparse
import csv
import sys

from weylhelp.asymptotics import ratio_window, sample_ratio
from weylhelp.catalog import catalog, names


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("name", choices=names())
    ap.add_argument("--which", choices=("Re/Im", "Im/Re"), default="Im/Re")
    args = ap.parse_args()
    p = catalog(args.name)
    out = csv.writer(sys.stdout)
    out.writerow(["window", "y", "re_m", "im_m", "ratio", "enclosure"])
    for end in ("zero", "infinity"):
        for y, re, im, ratio, enc in sample_ratio(p, ratio_window(end), args.which):
            out.writerow([end, f"{y:.6e}", f"{re:.12e}", f"{im:.12e}", f"{ratio:.8e}", f"{enc:.2e}"])


if __name__ == "__main__":
    main()
