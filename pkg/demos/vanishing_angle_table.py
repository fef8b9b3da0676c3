"""Tabulate vanishing angles for the two conservative curvature controls.

For each link dimension k and curvature bound alpha, the fastest
admissible descent is integrated under the sharper product control F and
the coarser exponential control.  Where no angle prints, either the
quadratic departure has no real root or the control pinches to zero before
the descent can land; both mean the criterion is silent at that alpha.
"""

from conekit import vanishing_angle


def fmt(theta):
    return f"{theta:10.6f}" if theta is not None else f"{'-':>10}"


if __name__ == "__main__":
    alphas = [0.25, 0.5, 0.75, 1.0, 1.25, 1.5]
    print(f"{'k':>3} {'alpha':>6} {'theta_F':>10} {'theta_c':>10}")
    for k in (2, 3, 4, 6, 8):
        for alpha in alphas:
            tf = vanishing_angle("F", alpha, k)
            tc = vanishing_angle("c", alpha, k)
            print(f"{k:3d} {alpha:6.2f} {fmt(tf)} {fmt(tc)}")
            if tf is not None and tc is not None:
                assert tc > tf
