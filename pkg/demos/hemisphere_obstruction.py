"""Obstruct constant-coefficient calibrations of a product cone.

A constant form calibrating the cone over (S^1 x S^1) x S^3 would force
the Gauss image of the torus factor (its unit normals, read as points of
S^3) into an open hemisphere.  The image is a closed curve symmetric under
the antipodal map of a 2-torus orbit, so the hemisphere test returns an
infeasibility certificate: convex weights combining the sampled normals to
zero.  The certificate is re-checked by direct arithmetic here.
"""

import numpy as np

from conekit import (
    SphereFactor,
    constant_calibration_obstruction,
    gauss_image,
    hemisphere_test,
    hypersurface_factor,
    minimal_product,
)

if __name__ == "__main__":
    torus = minimal_product([SphereFactor.round(1), SphereFactor.round(1)],
                            samples=200, seed=0)
    image = gauss_image(hypersurface_factor(torus))
    cert = hemisphere_test(image)
    print(f"torus Gauss image: {len(image.points)} samples in S^3")
    print(f"hemisphere test  : {cert.verdict}")
    print(f"dual residual    : {cert.residual:.3e}")
    combo = image.points.T @ cert.convex_weights
    print(f"recomputed |sum w_i nu_i| = {np.linalg.norm(combo):.3e}")

    product = minimal_product(
        [hypersurface_factor(torus), SphereFactor.round(3)],
        samples=100, seed=1,
    )
    out = constant_calibration_obstruction(product)
    print(f"\ncone over (S^1 x S^1) x S^3 obstructed: {out['obstructed']}")
    assert out["obstructed"]
