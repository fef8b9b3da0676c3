"""Sweep a convex combination of metrics and watch the comass stay pinned.

The form dx1 ^ dx2 has comass one under the Euclidean metric and under the
diagonal metric (1/4, 4, 1, 1), whose restriction to the (1,2)-plane has
determinant one.  Along g(s) = (1-s) g1 + s g2 the comass drops strictly
below one in the interior: the squared Gram norm of the maximizing plane
is a product of affine functions of s, and strict convexity of the
reciprocal pushes the interior value above its endpoint values.
"""

import numpy as np

from conekit import AlternatingForm, MetricTensor, verify_gluing_bound

if __name__ == "__main__":
    phi = AlternatingForm.basis(4, (1, 2))
    g1 = MetricTensor.euclidean(4)
    g2 = MetricTensor.diagonal([0.25, 4.0, 1.0, 1.0])
    rep = verify_gluing_bound(phi, g1, g2, np.linspace(0.0, 1.0, 11),
                              comass_opts={"restarts": 8, "seed": 0})
    print(f"{'s':>5} {'comass':>12} {'closed form':>12} {'energy bound':>12}")
    for s, measured, _, improved in rep.rows():
        exact = 1.0 / np.sqrt((1.0 - 0.75 * s) * (1.0 + 3.0 * s))
        print(f"{s:5.2f} {measured:12.8f} {exact:12.8f} {improved:12.8f}")
    print(f"\nworst violation of min(1, bounds): {rep.worst_violation:.3e}")
    assert rep.worst_violation <= 1e-8
