"""Scaled products of sphere links and their numeric differential geometry.

The product of links L_i^{k_i} in S^{N_i}, each factor scaled by
lambda_i = sqrt(k_i / k) with k = sum k_i, is a minimal submanifold of the
unit sphere S^(sum N_i + n - 1).  This module assembles such products,
samples them, and extracts the quantities the cone criterion consumes:
a curvature bound alpha, the determinant infimum p(t), its quadratic
coefficient p2, and a lower bound for the normal injectivity radius.

Second fundamental forms are computed by finite differences along exact
great-circle curves of the built-in round-sphere parametrizations; tests
pin them against the closed-form principal curvatures of two-factor
products.  General links may be supplied as sampled point/normal data, but
curvature extraction is only implemented for products of round spheres.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from .lawlor import CurvatureModel, LinkData, check_area_minimizing

__all__ = [
    "SphereFactor",
    "ProductLink",
    "NormalRadiusEstimate",
    "minimal_product",
    "numeric_second_fundamental_form",
    "curvature_model",
    "normal_radius",
    "hypersurface_factor",
    "replication_search",
    "as_link_data",
]

UNIT_TOL = 1e-10


@dataclass(frozen=True)
class SphereFactor:
    """One factor link: a round sphere S^dim, or sampled data in S^ambient.

    Sampled factors carry unit points (rows of ``points``) and, for
    codimension-one links, a unit normal per point (rows of ``normals``).
    """

    dim: int
    ambient: int
    points: Optional[np.ndarray] = None
    normals: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.dim < 1 or self.ambient < self.dim:
            raise ValueError("need 1 <= dim <= ambient")
        if self.points is not None:
            pts = np.asarray(self.points, dtype=float)
            if pts.ndim != 2 or pts.shape[1] != self.ambient + 1:
                raise ValueError("points must be (S, ambient+1)")
            if np.max(np.abs(np.linalg.norm(pts, axis=1) - 1.0)) > UNIT_TOL:
                raise ValueError("sample points must be unit vectors")
            object.__setattr__(self, "points", pts)
        if self.normals is not None:
            nor = np.asarray(self.normals, dtype=float)
            if nor.shape != self.points.shape:
                raise ValueError("normals must align with points")
            if np.max(np.abs(np.linalg.norm(nor, axis=1) - 1.0)) > UNIT_TOL:
                raise ValueError("normals must be unit vectors")
            if np.max(np.abs(np.sum(nor * self.points, axis=1))) > 1e-8:
                raise ValueError("normals must be orthogonal to their points")
            object.__setattr__(self, "normals", nor)

    @property
    def is_round(self) -> bool:
        return self.points is None and self.ambient == self.dim

    @staticmethod
    def round(k: int) -> "SphereFactor":
        """The round sphere S^k in R^(k+1) as its own link."""
        return SphereFactor(dim=k, ambient=k)


@dataclass
class ProductLink:
    """A scaled product link with aligned per-factor sample points."""

    factors: list
    lambdas: np.ndarray
    k: int
    ambient_sphere_dim: int
    factor_points: list
    seed: int

    @property
    def n_factors(self) -> int:
        return len(self.factors)

    @property
    def block_slices(self) -> list:
        out, at = [], 0
        for f in self.factors:
            out.append(slice(at, at + f.ambient + 1))
            at += f.ambient + 1
        return out

    def embedded_points(self) -> np.ndarray:
        """Unit-norm samples of the product in R^(ambient_sphere_dim + 1)."""
        blocks = [
            lam * pts for lam, pts in zip(self.lambdas, self.factor_points)
        ]
        return np.concatenate(blocks, axis=1)

    def point_tuple(self, i: int) -> list:
        return [pts[i] for pts in self.factor_points]


def _sphere_samples(rng, count: int, ambient: int) -> np.ndarray:
    v = rng.standard_normal((count, ambient + 1))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def minimal_product(
    factors, *, samples: int = 200, seed: int = 0
) -> ProductLink:
    """Assemble the scaled product of the given factor links.

    Scaling factors are sqrt(k_i / k) with exact rational squares, so the
    concatenated samples land on the unit sphere to rounding error.
    """
    factors = list(factors)
    if not factors:
        raise ValueError("need at least one factor")
    k = sum(f.dim for f in factors)
    assert sum(Fraction(f.dim, k) for f in factors) == 1
    lambdas = np.array([np.sqrt(f.dim / k) for f in factors])
    ambient = sum(f.ambient for f in factors) + len(factors) - 1
    rng = np.random.default_rng(seed)
    factor_points = []
    for f in factors:
        if f.points is not None:
            if len(f.points) >= samples:
                idx = rng.choice(len(f.points), size=samples, replace=False)
            else:
                idx = rng.choice(len(f.points), size=samples, replace=True)
            factor_points.append(f.points[idx])
        else:
            factor_points.append(_sphere_samples(rng, samples, f.ambient))
    return ProductLink(
        factors=factors,
        lambdas=lambdas,
        k=k,
        ambient_sphere_dim=ambient,
        factor_points=factor_points,
        seed=seed,
    )


def _require_round(link: ProductLink, what: str):
    if not all(f.is_round for f in link.factors):
        raise ValueError(f"{what} requires all factors to be round spheres")


def _tangent_basis(link: ProductLink, xs: list) -> list:
    """Orthonormal tangent basis of the product at the point with factor
    coordinates xs, as (factor index, unit factor tangent) pairs."""
    basis = []
    for i, x in enumerate(xs):
        # Householder QR completes x to an orthogonal frame; the columns
        # after the first are an orthonormal tangent basis at x
        q, _ = np.linalg.qr(np.column_stack([x, np.eye(x.size)[:, : x.size - 1]]))
        for a in range(1, x.size):
            basis.append((i, q[:, a]))
    return basis


def _mixing_normals(link: ProductLink, xs: list) -> np.ndarray:
    """Orthonormal basis (rows) of the span of (b_1 x_1, ..., b_n x_n) with
    sum b_i lambda_i = 0: the normal directions that mix the factors."""
    n = link.n_factors
    d = link.ambient_sphere_dim + 1
    lam = link.lambdas
    rows = []
    for r in range(n - 1):
        b = np.zeros(n)
        b[r] = lam[r + 1]
        b[r + 1] = -lam[r]
        z = np.zeros(d)
        for i, sl in enumerate(link.block_slices):
            z[sl] = b[i] * xs[i]
        rows.append(z)
    B = np.asarray(rows)
    if B.size == 0:
        return B.reshape(0, d)
    q, _ = np.linalg.qr(B.T)
    return q.T


def _curve_point(link: ProductLink, xs, direction, s: float) -> np.ndarray:
    """Point of the unit-speed product curve through xs with initial
    velocity given by per-factor tangents (factor great circles)."""
    d = link.ambient_sphere_dim + 1
    out = np.zeros(d)
    for i, sl in enumerate(link.block_slices):
        lam = link.lambdas[i]
        w = direction.get(i)
        if w is None:
            out[sl] = lam * xs[i]
        else:
            speed = np.linalg.norm(w)
            ang = speed * s / lam
            out[sl] = lam * (np.cos(ang) * xs[i] + np.sin(ang) * (w / speed))
    return out


def _sff_vectors(link: ProductLink, xs: list, eps: float = 1e-4):
    """Vector-valued second fundamental form at xs: a (k, k, d) array whose
    contraction with a unit normal v gives the k x k shape matrix h^v."""
    basis = _tangent_basis(link, xs)
    k = link.k
    d = link.ambient_sphere_dim + 1
    x0 = _curve_point(link, xs, {}, 0.0)

    def accel(direction):
        p = _curve_point(link, xs, direction, eps)
        m = _curve_point(link, xs, direction, -eps)
        return (p + m - 2.0 * x0) / (eps * eps)

    diag = []
    for i, u in basis:
        diag.append(accel({i: u}))
    S = np.zeros((k, k, d))
    for a in range(k):
        S[a, a] = diag[a]
    inv_sqrt2 = 1.0 / np.sqrt(2.0)
    for a in range(k):
        ia, ua = basis[a]
        for b in range(a + 1, k):
            ib, ub = basis[b]
            if ia == ib:
                combo = {ia: inv_sqrt2 * (ua + ub)}
            else:
                combo = {ia: inv_sqrt2 * ua, ib: inv_sqrt2 * ub}
            cross = accel(combo) - 0.5 * (diag[a] + diag[b])
            S[a, b] = cross
            S[b, a] = cross
    return S, basis


def numeric_second_fundamental_form(
    link: ProductLink, x, v: np.ndarray
) -> np.ndarray:
    """Shape matrix h^v at a sample point, by finite differences.

    ``x`` is either a sample index or a list of per-factor unit points;
    ``v`` must be a unit vector normal to the link and tangent to the
    ambient sphere at that point.
    """
    _require_round(link, "second fundamental form")
    xs = link.point_tuple(x) if isinstance(x, (int, np.integer)) else list(x)
    v = np.asarray(v, dtype=float)
    x0 = _curve_point(link, xs, {}, 0.0)
    if abs(np.linalg.norm(v) - 1.0) > 1e-8 or abs(v @ x0) > 1e-8:
        raise ValueError("v must be a unit vector orthogonal to the point")
    S, basis = _sff_vectors(link, xs)
    for i, u in basis:
        emb = np.zeros(v.size)
        emb[link.block_slices[i]] = u
        if abs(v @ emb) > 1e-8:
            raise ValueError("v has a tangential component")
    H = S @ v
    return 0.5 * (H + H.T)


def _normal_grid(link: ProductLink, rng, count: int) -> np.ndarray:
    """Unit b-vectors orthogonal to (lambda_i): axis-aligned extremals of
    each coordinate plus random directions."""
    n = link.n_factors
    lam = link.lambdas
    if n == 1:
        return np.zeros((0, 1))
    cands = []
    for i in range(n):
        b = -lam[i] * lam
        b[i] += 1.0
        cands.append(b / np.linalg.norm(b))
    raw = rng.standard_normal((count, n))
    raw -= np.outer(raw @ lam, lam)
    norms = np.linalg.norm(raw, axis=1)
    raw = raw[norms > 1e-8] / norms[norms > 1e-8, None]
    return np.vstack([np.asarray(cands), raw])


def curvature_model(
    link: ProductLink,
    *,
    point_samples: int = 6,
    normal_samples: int = 32,
    seed: int = 1,
    fit_window: float = 0.05,
) -> CurvatureModel:
    """Curvature data of a round-sphere product from sampled shape matrices.

    alpha is the largest Frobenius norm of h^v over the sample grid (the
    bound the conservative controls require); p(t) is the pointwise minimum
    of det(I - t h^v) over the same frozen grid; p2 comes from a quadratic
    fit of p at t = 0.
    """
    _require_round(link, "curvature model")
    rng = np.random.default_rng(seed)
    point_samples = min(point_samples, len(link.factor_points[0]))
    if point_samples < 1:
        raise ValueError("no sample points available")
    shape_mats = []
    for p_idx in range(point_samples):
        xs = link.point_tuple(p_idx)
        S, _ = _sff_vectors(link, xs)
        for b in _normal_grid(link, rng, normal_samples):
            v = np.zeros(link.ambient_sphere_dim + 1)
            for i, sl in enumerate(link.block_slices):
                v[sl] = b[i] * xs[i]
            H = S @ v
            H = 0.5 * (H + H.T)
            shape_mats.append(H)
            shape_mats.append(-H)
    if not shape_mats:
        # single totally geodesic factor: no normal directions, flat model
        return CurvatureModel(link.k, 0.0, lambda t: 1.0, 0.0)
    shape_mats = np.asarray(shape_mats)
    alpha = float(np.max(np.linalg.norm(shape_mats, axis=(1, 2))))
    eye = np.eye(link.k)

    def p_fn(t):
        return float(np.min(np.linalg.det(eye - t * shape_mats)))

    ts = np.linspace(-fit_window, fit_window, 21)
    ps = np.asarray([p_fn(t) for t in ts])
    p2 = float(np.polyfit(ts, ps, 2)[0])
    p2 = min(p2, 0.0)
    return CurvatureModel(link.k, alpha, p_fn, p2)


@dataclass(frozen=True)
class NormalRadiusEstimate:
    """Lower bound for the normal injectivity radius, recording which of
    the constituent bounds was binding."""

    value: float
    binding: str
    focal_bound: float
    avoidance_bound: float
    sparse: bool

    def __float__(self):
        return self.value


def normal_radius(
    link: ProductLink,
    *,
    seed: int = 2,
    normal_samples: int = 32,
    avoidance_ratio: float = 0.95,
) -> NormalRadiusEstimate:
    """Lower bound min(pi/2, focal distance, self-avoidance distance).

    The focal bound is arccot of the largest sampled principal curvature;
    the self-avoidance bound is half the spherical distance between sample
    pairs whose connecting chord is predominantly normal to the link
    (normal component ratio at least ``avoidance_ratio``).
    """
    _require_round(link, "normal radius")
    rng = np.random.default_rng(seed)
    kappa = 0.0
    for p_idx in range(min(4, len(link.factor_points[0]))):
        xs = link.point_tuple(p_idx)
        S, _ = _sff_vectors(link, xs)
        for b in _normal_grid(link, rng, normal_samples):
            v = np.zeros(link.ambient_sphere_dim + 1)
            for i, sl in enumerate(link.block_slices):
                v[sl] = b[i] * xs[i]
            H = S @ v
            kappa = max(kappa, float(np.max(np.abs(np.linalg.eigvalsh(0.5 * (H + H.T))))))
    focal = np.pi / 2 if kappa == 0.0 else float(np.arctan(1.0 / kappa))

    pts = link.embedded_points()
    S_count = len(pts)
    sparse = S_count < 8
    avoid = np.pi / 2
    for i in range(S_count):
        xs = link.point_tuple(i)
        B = _mixing_normals(link, xs)
        chords = pts[i + 1 :] - pts[i]
        norms = np.linalg.norm(chords, axis=1)
        keep = norms > 1e-9
        if B.shape[0] == 0 or not np.any(keep):
            continue
        ratio = np.linalg.norm(chords[keep] @ B.T, axis=1) / norms[keep]
        close = ratio >= avoidance_ratio
        if np.any(close):
            cosang = np.clip(pts[i + 1 :][keep][close] @ pts[i], -1.0, 1.0)
            avoid = min(avoid, 0.5 * float(np.min(np.arccos(cosang))))
    value = min(np.pi / 2, focal, avoid)
    if value == focal and focal <= avoid:
        binding = "focal"
    elif value == avoid:
        binding = "self-avoidance"
    else:
        binding = "hemisphere-cap"
    return NormalRadiusEstimate(value, binding, focal, avoid, sparse)


def hypersurface_factor(link: ProductLink) -> SphereFactor:
    """Repackage a codimension-one product (two round factors) as a sampled
    factor with its unit normal field nu = (lambda_2 x_1, -lambda_1 x_2)."""
    _require_round(link, "hypersurface repackaging")
    if link.n_factors != 2:
        raise ValueError("only two-factor products are hypersurfaces in their sphere")
    lam = link.lambdas
    pts = link.embedded_points()
    normals = np.concatenate(
        [lam[1] * link.factor_points[0], -lam[0] * link.factor_points[1]], axis=1
    )
    return SphereFactor(
        dim=link.k, ambient=link.ambient_sphere_dim, points=pts, normals=normals
    )


def as_link_data(
    link: ProductLink,
    *,
    curvature: Optional[CurvatureModel] = None,
    radius: Optional[NormalRadiusEstimate] = None,
    **opts,
) -> LinkData:
    """Bundle the criterion inputs, computing anything not supplied."""
    model = curvature if curvature is not None else curvature_model(link, **opts)
    R = radius if radius is not None else normal_radius(link)
    return LinkData(
        k=link.k,
        alpha=model.alpha,
        normal_radius=float(R),
        p_fn=model.p_fn,
        p2=model.p2,
    )


def replication_search(
    base: SphereFactor,
    n_max: int,
    control: str = "F",
    *,
    seed: int = 0,
    samples: int = 200,
    normalization: str = "k-plus-1",
) -> dict:
    """Smallest number of copies of the base link whose product cone the
    criterion certifies, scanning n = 2 .. n_max."""
    if n_max < 2:
        raise ValueError("n_max must be >= 2")
    verdicts = []
    n_pass = None
    for n in range(2, n_max + 1):
        link = minimal_product([base] * n, samples=samples, seed=seed + n)
        data = as_link_data(link, seed=seed + n)
        verdict = check_area_minimizing(data, control, normalization=normalization)
        verdicts.append((n, verdict))
        if verdict.passes and n_pass is None:
            n_pass = n
    return {"n_pass": n_pass, "verdicts": verdicts}
