"""Deepen the well q = -c0 on [0,1] until the class (S) test fails and a nonreal eigenvalue appears."""
import math

from weylhelp import coefficients as C
from weylhelp.indefinite import STIELTJES_GRID, nonreal_spectrum_probe
from weylhelp.weyl import HalfLineProblem, stieltjes_check


def main() -> None:
    c0 = 0.25
    while c0 <= 8.0:
        q = C.piecewise([0.0, 1.0, math.inf], [-c0, 0.0], signed=True)
        p = HalfLineProblem(C.constant(), C.constant(), q)
        s = stieltjes_check(p, STIELTJES_GRID)
        rep = nonreal_spectrum_probe(p)
        zs = ", ".join(f"{z.real:+.6f}{z.imag:+.6f}i (|D|={r:.1e})" for z, r in rep.zeros) or "none"
        print(f"c0={c0:<5g} class S: {'pass' if s.passed else 'fail'}  zeros in box: {zs}")
        if not s.passed and rep.zeros:
            break
        c0 *= 2.0


if __name__ == "__main__":
    main()
