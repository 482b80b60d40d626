"""Verdict table for every catalog entry: inequality, similarity, well-posedness."""
import argparse
import time

from weylhelp.catalog import catalog, names
from weylhelp.help_inequality import HelpError, help_check, help_with_potential
from weylhelp.indefinite import SimilarityError, fp_wellposedness, similarity_check
from weylhelp.weyl import WeylError


def verdicts(name: str) -> dict:
    p = catalog(name)
    row = {"name": name}
    try:
        row["help"] = (help_check(p) if p.q_zero else help_with_potential(p)).validity
    except (HelpError, WeylError) as exc:
        row["help"] = f"n/a ({type(exc).__name__})"
    try:
        row["similar"] = similarity_check(p).similar
        row["fp"] = fp_wellposedness(p).well_posed
    except (SimilarityError, WeylError) as exc:
        row["similar"] = row["fp"] = f"n/a ({type(exc).__name__})"
    return row


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("entries", nargs="*", default=None)
    args = ap.parse_args()
    skip = {"atomic", "regular-interval", "singular-interval"}  # finite or atomic: no half-line verdicts
    todo = args.entries or [n for n in names() if n not in skip]
    print(f"{'entry':<20} {'inequality':<16} {'similar':<14} {'fp':<14} time")
    for n in todo:
        t = time.perf_counter()
        row = verdicts(n)
        print(f"{n:<20} {row['help']:<16} {row['similar']:<14} {row['fp']:<14} {time.perf_counter() - t:.1f}s")


if __name__ == "__main__":
    main()
