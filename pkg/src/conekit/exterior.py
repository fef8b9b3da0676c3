"""Exact multilinear algebra on R^n: alternating forms, simple m-vectors,
wedge products, contractions, Gram norms and pullbacks.

Forms with constant coefficients are stored as dense vectors over the
lexicographically ordered strictly increasing multi-indices (1-based, as is
conventional for dx_1, dx_2, ...).  All values are immutable after
construction and every operation is a pure function, so everything here is
safe to evaluate concurrently.
"""

from __future__ import annotations

import math
from functools import lru_cache
from itertools import combinations

import numpy as np

__all__ = [
    "DimensionMismatchError",
    "MultiIndex",
    "AlternatingForm",
    "SimpleVector",
    "MetricTensor",
    "multi_indices",
    "wedge",
    "contract",
    "evaluate",
    "gram_norm",
    "pullback",
]

ATOL = 1e-12

# Beyond this ambient dimension a dense coefficient vector over C(n, m)
# multi-indices gets wasteful; we fall back to sparse dict storage.
DENSE_LIMIT = 16


class DimensionMismatchError(ValueError):
    """Operands live in incompatible spaces (ambient dimension or degree)."""


@lru_cache(maxsize=None)
def multi_indices(n: int, m: int) -> tuple[tuple[int, ...], ...]:
    """All strictly increasing m-tuples from {1, ..., n}, lexicographic."""
    return tuple(combinations(range(1, n + 1), m))


@lru_cache(maxsize=None)
def _index_position(n: int, m: int) -> dict[tuple[int, ...], int]:
    return {I: pos for pos, I in enumerate(multi_indices(n, m))}


@lru_cache(maxsize=None)
def _index_rows(n: int, m: int) -> np.ndarray:
    """0-based row-selection array of shape (C(n, m), m)."""
    idx = np.array(multi_indices(n, m), dtype=np.intp)
    if idx.size == 0:
        idx = idx.reshape(-1, m)
    return idx - 1


class MultiIndex:
    """A strictly increasing list of integers in [1, n]."""

    __slots__ = ("indices",)

    def __init__(self, indices):
        idx = tuple(int(i) for i in indices)
        if any(a >= b for a, b in zip(idx, idx[1:])):
            raise ValueError(f"multi-index must be strictly increasing: {idx}")
        if idx and idx[0] < 1:
            raise ValueError(f"multi-index entries must be >= 1: {idx}")
        object.__setattr__(self, "indices", idx)

    def __setattr__(self, *a):
        raise AttributeError("MultiIndex is immutable")

    @property
    def degree(self) -> int:
        return len(self.indices)

    def __iter__(self):
        return iter(self.indices)

    def __eq__(self, other):
        if isinstance(other, MultiIndex):
            return self.indices == other.indices
        if isinstance(other, tuple):
            return self.indices == other
        return NotImplemented

    def __hash__(self):
        return hash(self.indices)

    def __repr__(self):
        return f"MultiIndex{self.indices}"


def _as_key(I) -> tuple[int, ...]:
    if isinstance(I, MultiIndex):
        return I.indices
    return tuple(int(i) for i in I)


class AlternatingForm:
    """Degree-m alternating form on R^n with constant coefficients.

    ``coeffs`` maps strictly increasing multi-indices to reals; evaluation on
    standard basis vectors e_{i_1}, ..., e_{i_m} returns the coefficient of
    (i_1, ..., i_m).
    """

    def __init__(self, n: int, m: int, coeffs=None):
        n, m = int(n), int(m)
        if not 0 <= m <= n:
            raise DimensionMismatchError(f"degree m={m} outside [0, n={n}]")
        self._n = n
        self._m = m
        self._dense = n <= DENSE_LIMIT
        if self._dense:
            vec = np.zeros(math.comb(n, m))
            if coeffs is not None:
                if isinstance(coeffs, np.ndarray):
                    if coeffs.shape != vec.shape:
                        raise DimensionMismatchError(
                            f"coefficient vector has shape {coeffs.shape}, "
                            f"expected {vec.shape}"
                        )
                    vec = coeffs.astype(float).copy()
                else:
                    pos = _index_position(n, m)
                    for I, c in dict(coeffs).items():
                        vec[pos[self._check_key(I)]] = float(c)
            vec.flags.writeable = False
            self._vec = vec
            self._map = None
        else:
            self._vec = None
            cmap = {}
            if coeffs is not None:
                for I, c in dict(coeffs).items():
                    if c != 0.0:
                        cmap[self._check_key(I)] = float(c)
            self._map = cmap

    def _check_key(self, I) -> tuple[int, ...]:
        key = _as_key(I)
        if len(key) != self._m:
            raise DimensionMismatchError(f"index {key} has degree != {self._m}")
        if any(a >= b for a, b in zip(key, key[1:])) or (
            key and (key[0] < 1 or key[-1] > self._n)
        ):
            raise ValueError(f"bad multi-index {key} for n={self._n}")
        return key

    @classmethod
    def basis(cls, n: int, indices) -> "AlternatingForm":
        """dx_{i_1} ^ ... ^ dx_{i_m} for a strictly increasing index list."""
        key = _as_key(indices)
        return cls(n, len(key), {key: 1.0})

    @classmethod
    def from_vector(cls, n: int, m: int, vector: np.ndarray) -> "AlternatingForm":
        return cls(n, m, np.asarray(vector, dtype=float))

    @property
    def n(self) -> int:
        return self._n

    @property
    def m(self) -> int:
        return self._m

    @property
    def vector(self) -> np.ndarray:
        """Dense coefficient vector over lexicographic multi-indices."""
        if self._dense:
            return self._vec
        vec = np.zeros(math.comb(self._n, self._m))
        pos = _index_position(self._n, self._m)
        for I, c in self._map.items():
            vec[pos[I]] = c
        return vec

    @property
    def coeffs(self) -> dict[tuple[int, ...], float]:
        if self._dense:
            idx = multi_indices(self._n, self._m)
            return {I: c for I, c in zip(idx, self._vec) if c != 0.0}
        return dict(self._map)

    def coeff(self, I) -> float:
        key = self._check_key(I)
        if self._dense:
            return float(self._vec[_index_position(self._n, self._m)[key]])
        return self._map.get(key, 0.0)

    def is_zero(self, atol: float = ATOL) -> bool:
        if self._dense:
            return bool(np.all(np.abs(self._vec) <= atol))
        return all(abs(c) <= atol for c in self._map.values())

    def norm(self) -> float:
        """Euclidean norm of the coefficient vector (not the comass)."""
        if self._dense:
            return float(np.linalg.norm(self._vec))
        return math.sqrt(sum(c * c for c in self._map.values()))

    def _binary_check(self, other: "AlternatingForm"):
        if not isinstance(other, AlternatingForm):
            raise TypeError(f"expected AlternatingForm, got {type(other)!r}")
        if other.n != self._n or other.m != self._m:
            raise DimensionMismatchError(
                f"cannot combine forms of type ({self._n},{self._m}) "
                f"and ({other.n},{other.m})"
            )

    def __add__(self, other):
        self._binary_check(other)
        if self._dense:
            return AlternatingForm(self._n, self._m, self._vec + other.vector)
        out = dict(self._map)
        for I, c in other.coeffs.items():
            out[I] = out.get(I, 0.0) + c
        return AlternatingForm(self._n, self._m, out)

    def __sub__(self, other):
        return self + (-other)

    def __neg__(self):
        return self * (-1.0)

    def __mul__(self, scalar):
        s = float(scalar)
        if self._dense:
            return AlternatingForm(self._n, self._m, self._vec * s)
        return AlternatingForm(
            self._n, self._m, {I: c * s for I, c in self._map.items()}
        )

    __rmul__ = __mul__

    def allclose(self, other: "AlternatingForm", atol: float = ATOL) -> bool:
        self._binary_check(other)
        return bool(np.allclose(self.vector, other.vector, rtol=0.0, atol=atol))

    def __repr__(self):
        terms = [f"{c:+g}*dx{list(I)}" for I, c in sorted(self.coeffs.items())]
        body = " ".join(terms) if terms else "0"
        return f"AlternatingForm(n={self._n}, m={self._m}: {body})"


class SimpleVector:
    """An ordered list of m vectors in R^n representing v_1 ^ ... ^ v_m."""

    def __init__(self, factors):
        facs = [np.asarray(v, dtype=float).reshape(-1) for v in factors]
        if not facs:
            raise ValueError("SimpleVector needs at least one factor")
        n = facs[0].size
        if any(v.size != n for v in facs):
            raise DimensionMismatchError("factors live in different dimensions")
        if len(facs) > n:
            raise DimensionMismatchError(
                f"{len(facs)} factors cannot be independent in R^{n}"
            )
        mat = np.column_stack(facs)
        mat.flags.writeable = False
        self._mat = mat

    @classmethod
    def basis(cls, n: int, indices) -> "SimpleVector":
        """e_{i_1} ^ ... ^ e_{i_m} for 1-based indices."""
        eye = np.eye(int(n))
        return cls([eye[int(i) - 1] for i in _as_key(indices)])

    @classmethod
    def from_matrix(cls, matrix: np.ndarray) -> "SimpleVector":
        """Columns of ``matrix`` are the ordered factors."""
        mat = np.asarray(matrix, dtype=float)
        return cls([mat[:, j] for j in range(mat.shape[1])])

    @property
    def n(self) -> int:
        return self._mat.shape[0]

    @property
    def m(self) -> int:
        return self._mat.shape[1]

    @property
    def factors(self) -> list[np.ndarray]:
        return [self._mat[:, j] for j in range(self.m)]

    @property
    def matrix(self) -> np.ndarray:
        """n x m matrix whose columns are the factors."""
        return self._mat

    def concat(self, other: "SimpleVector") -> "SimpleVector":
        """The simple vector self ^ other (factor lists concatenated)."""
        if other.n != self.n:
            raise DimensionMismatchError("ambient dimensions differ")
        return SimpleVector(self.factors + other.factors)

    def scale(self, c: float) -> "SimpleVector":
        facs = self.factors
        facs[0] = facs[0] * float(c)
        return SimpleVector(facs)

    def __repr__(self):
        return f"SimpleVector(n={self.n}, m={self.m})"


class MetricTensor:
    """Symmetric positive-definite bilinear form on R^n."""

    def __init__(self, matrix):
        mat = np.asarray(matrix, dtype=float)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionMismatchError(f"metric matrix must be square, got {mat.shape}")
        if not np.allclose(mat, mat.T, rtol=0.0, atol=ATOL):
            raise ValueError("metric matrix is not symmetric to 1e-12")
        mat = 0.5 * (mat + mat.T)
        eigvals = np.linalg.eigvalsh(mat)
        if eigvals[0] <= 0.0:
            raise ValueError(
                f"metric is not positive definite (min eigenvalue {eigvals[0]:g})"
            )
        mat.flags.writeable = False
        self._mat = mat
        self._chol = None

    @classmethod
    def euclidean(cls, n: int) -> "MetricTensor":
        return cls(np.eye(int(n)))

    @classmethod
    def diagonal(cls, diag) -> "MetricTensor":
        return cls(np.diag(np.asarray(diag, dtype=float)))

    @property
    def n(self) -> int:
        return self._mat.shape[0]

    @property
    def matrix(self) -> np.ndarray:
        return self._mat

    @property
    def cholesky(self) -> np.ndarray:
        """Lower-triangular L with g = L L^T."""
        if self._chol is None:
            self._chol = np.linalg.cholesky(self._mat)
            self._chol.flags.writeable = False
        return self._chol

    def inner(self, u, v) -> float:
        return float(np.asarray(u) @ self._mat @ np.asarray(v))

    def __repr__(self):
        return f"MetricTensor(n={self.n})"


# ---------------------------------------------------------------------------
# operations


def _merge_sign(I: tuple[int, ...], J: tuple[int, ...]):
    """Merge two disjoint increasing tuples; return (merged, shuffle sign).

    Returns (None, 0) when the tuples share an index.
    """
    merged = []
    inversions = 0
    i = j = 0
    while i < len(I) and j < len(J):
        if I[i] == J[j]:
            return None, 0
        if I[i] < J[j]:
            merged.append(I[i])
            i += 1
        else:
            merged.append(J[j])
            inversions += len(I) - i
            j += 1
    merged.extend(I[i:])
    merged.extend(J[j:])
    return tuple(merged), (-1 if inversions % 2 else 1)


def wedge(phi: AlternatingForm, psi: AlternatingForm) -> AlternatingForm:
    """Exterior product of two forms on the same R^n."""
    if phi.n != psi.n:
        raise DimensionMismatchError(
            f"ambient dimensions differ: {phi.n} vs {psi.n}"
        )
    p, q = phi.m, psi.m
    if p + q > phi.n:
        raise DimensionMismatchError(
            f"degree {p}+{q} exceeds ambient dimension {phi.n}"
        )
    out: dict[tuple[int, ...], float] = {}
    for I, a in phi.coeffs.items():
        for J, b in psi.coeffs.items():
            K, sign = _merge_sign(I, J)
            if K is None:
                continue
            out[K] = out.get(K, 0.0) + sign * a * b
    return AlternatingForm(phi.n, p + q, out)


def evaluate(phi: AlternatingForm, Q: SimpleVector) -> float:
    """phi(v_1, ..., v_m), the determinant expansion against the factors."""
    if phi.n != Q.n:
        raise DimensionMismatchError(f"ambient dimensions differ: {phi.n} vs {Q.n}")
    if phi.m != Q.m:
        raise DimensionMismatchError(f"degrees differ: form {phi.m}, vector {Q.m}")
    if phi.m == 0:
        return phi.coeff(())
    rows = _index_rows(phi.n, phi.m)
    minors = Q.matrix[rows, :]  # (C, m, m)
    return float(np.linalg.det(minors) @ phi.vector)


def contract(eta: SimpleVector, phi: AlternatingForm) -> AlternatingForm:
    """Interior product: the form psi with psi(v...) = phi(eta factors, v...)."""
    if eta.n != phi.n:
        raise DimensionMismatchError(f"ambient dimensions differ: {eta.n} vs {phi.n}")
    r, p = eta.m, phi.m
    if r > p:
        raise DimensionMismatchError(f"cannot contract degree {r} into degree {p}")
    q = p - r
    eye = np.eye(phi.n)
    out = {}
    for J in multi_indices(phi.n, q):
        factors = eta.factors + [eye[j - 1] for j in J]
        val = evaluate(phi, SimpleVector(factors))
        if val != 0.0:
            out[J] = val
    return AlternatingForm(phi.n, q, out)


def gram_norm(Q: SimpleVector, g: MetricTensor) -> float:
    """sqrt of the Gram determinant det[g(v_i, v_j)]; the mass norm of Q."""
    if Q.n != g.n:
        raise DimensionMismatchError(f"ambient dimensions differ: {Q.n} vs {g.n}")
    gram = Q.matrix.T @ g.matrix @ Q.matrix
    det = np.linalg.det(gram)
    return math.sqrt(max(det, 0.0))


def pullback(A: np.ndarray, phi: AlternatingForm) -> AlternatingForm:
    """(A^* phi)(v_1, ..., v_m) = phi(A v_1, ..., A v_m) for A: R^k -> R^n."""
    A = np.asarray(A, dtype=float)
    if A.ndim != 2 or A.shape[0] != phi.n:
        raise DimensionMismatchError(
            f"map must be {phi.n} x k matrix, got shape {A.shape}"
        )
    k = A.shape[1]
    if phi.m > k:
        raise DimensionMismatchError(
            f"cannot pull a degree-{phi.m} form back to R^{k}"
        )
    rows_src = _index_rows(phi.n, phi.m)
    cols_dst = _index_rows(k, phi.m)
    vec = phi.vector
    out = np.zeros(len(cols_dst))
    for pos, J in enumerate(cols_dst):
        sub = A[:, J]  # (n, m)
        out[pos] = float(np.linalg.det(sub[rows_src, :]) @ vec)
    return AlternatingForm.from_vector(k, phi.m, out)
