"""Exterior algebra over R^n with exact-rational and float coefficients.

Conventions used throughout the package:

* A multi-index is a strictly increasing tuple of axis labels from
  ``{1, .., n}``; the empty tuple labels the scalar (degree-0) component.
* An element is a finite linear combination of basis monomials
  ``e_I = e_{i1} ^ .. ^ e_{ip}``.  Products pick up the Koszul sign
  ``(-1)^{inv(I,J)}`` where ``inv`` counts the inversions needed to merge
  the two sorted index tuples.
* The volume element ``e_{1..n}`` has coefficient +1; ``M[I, J]`` of the
  middle-degree pairing matrix is the volume coefficient of ``e_I ^ e_J``.
* Two arithmetic modes coexist: exact (``fractions.Fraction``) and float.
  The exact mode is the oracle for the float mode in tests.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, sqrt
from typing import Iterable, Mapping, NamedTuple, Sequence, Union

import numpy as np

from .errors import DimensionMismatch, ShapeError, UnsupportedPairing

__all__ = [
    "Scalar",
    "MultiIndex",
    "ExteriorElement",
    "SignatureTriple",
    "multi_indices",
    "merge_sign",
    "wedge",
    "wedge_pairing_matrix",
    "signature",
    "signature_exact",
    "basis_element",
    "volume_element",
    "selfdual_triple",
    "antiselfdual_triple",
]

Scalar = Union[int, float, Fraction]
MultiIndex = tuple  # strictly increasing tuple of ints in {1..n}


def multi_indices(n: int, p: int) -> list:
    """All degree-p multi-indices over {1..n} in lexicographic order."""
    if not 0 <= p <= n:
        return []
    return [tuple(c) for c in combinations(range(1, n + 1), p)]


def merge_sign(I: MultiIndex, J: MultiIndex):
    """Koszul sign of merging two disjoint sorted index tuples.

    Returns (sign, merged) with sign = (-1)^{#inversions}, or (0, None)
    when the tuples share an index (the product vanishes).
    """
    if set(I) & set(J):
        return 0, None
    inversions = 0
    for i in I:
        for j in J:
            if i > j:
                inversions += 1
    merged = tuple(sorted(I + J))
    return (-1) ** (inversions & 1), merged


def _check_index(n: int, I) -> MultiIndex:
    I = tuple(int(i) for i in I)
    if any(not 1 <= i <= n for i in I):
        raise DimensionMismatch(f"index {I} out of range for ambient dimension {n}")
    if any(I[k] >= I[k + 1] for k in range(len(I) - 1)):
        raise ShapeError(f"multi-index {I} is not strictly increasing")
    return I


@dataclass(frozen=True)
class ExteriorElement:
    """A (possibly inhomogeneous) exterior-algebra element.

    coefficients maps multi-indices to scalars; zero coefficients are
    dropped on construction so equality is structural.
    """

    ambient_dim: int
    coefficients: Mapping = field(default_factory=dict)

    def __post_init__(self):
        if self.ambient_dim < 1:
            raise DimensionMismatch("ambient dimension must be >= 1")
        clean = {}
        for I, c in self.coefficients.items():
            I = _check_index(self.ambient_dim, I)
            if c != 0:
                clean[I] = c
        object.__setattr__(self, "coefficients", clean)

    # -- queries ---------------------------------------------------------

    @property
    def degrees(self) -> set:
        return {len(I) for I in self.coefficients}

    @property
    def degree(self):
        """Common degree of all terms; None for 0; error if mixed."""
        degs = self.degrees
        if not degs:
            return None
        if len(degs) > 1:
            raise ShapeError(f"element has mixed degrees {sorted(degs)}")
        return degs.pop()

    def coefficient(self, I) -> Scalar:
        return self.coefficients.get(_check_index(self.ambient_dim, I), 0)

    def sup_norm(self) -> float:
        """Largest absolute basis coefficient (0 for the zero element)."""
        if not self.coefficients:
            return 0
        return max(abs(c) for c in self.coefficients.values())

    def is_zero(self, tol: float = 0.0) -> bool:
        return self.sup_norm() <= tol

    # -- linear structure --------------------------------------------------

    def _binary(self, other: "ExteriorElement", sign: int) -> "ExteriorElement":
        if self.ambient_dim != other.ambient_dim:
            raise DimensionMismatch(
                f"ambient dimensions differ: {self.ambient_dim} vs {other.ambient_dim}"
            )
        out = dict(self.coefficients)
        for I, c in other.coefficients.items():
            out[I] = out.get(I, 0) + sign * c
        return ExteriorElement(self.ambient_dim, out)

    def __add__(self, other):
        return self._binary(other, +1)

    def __sub__(self, other):
        return self._binary(other, -1)

    def __neg__(self):
        return self.scale(-1)

    def scale(self, c: Scalar) -> "ExteriorElement":
        return ExteriorElement(
            self.ambient_dim, {I: c * v for I, v in self.coefficients.items()}
        )

    def __rmul__(self, c):
        return self.scale(c)

    def to_float(self) -> "ExteriorElement":
        return ExteriorElement(
            self.ambient_dim, {I: float(v) for I, v in self.coefficients.items()}
        )

    # -- serialization -----------------------------------------------------

    def to_json_dict(self) -> dict:
        terms = []
        for I in sorted(self.coefficients):
            c = self.coefficients[I]
            if isinstance(c, Fraction):
                c = f"{c.numerator}/{c.denominator}"
            elif isinstance(c, (np.floating, np.integer)):
                c = c.item()
            terms.append({"I": list(I), "c": c})
        return {"n": self.ambient_dim, "terms": terms}

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json_dict(cls, data: Mapping) -> "ExteriorElement":
        coeffs = {}
        for term in data["terms"]:
            c = term["c"]
            if isinstance(c, str):
                num, _, den = c.partition("/")
                c = Fraction(int(num), int(den) if den else 1)
            I = tuple(term["I"])
            coeffs[I] = coeffs.get(I, 0) + c
        return cls(int(data["n"]), coeffs)

    @classmethod
    def from_json(cls, text: str) -> "ExteriorElement":
        return cls.from_json_dict(json.loads(text))


def basis_element(n: int, I, c: Scalar = 1) -> ExteriorElement:
    return ExteriorElement(n, {tuple(I): c})


def volume_element(n: int, c: Scalar = 1) -> ExteriorElement:
    return ExteriorElement(n, {tuple(range(1, n + 1)): c})


def wedge(a: ExteriorElement, b: ExteriorElement) -> ExteriorElement:
    """Bilinear wedge product with Koszul signs."""
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch(
            f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}"
        )
    out: dict = {}
    for I, ca in a.coefficients.items():
        for J, cb in b.coefficients.items():
            sign, K = merge_sign(I, J)
            if sign:
                out[K] = out.get(K, 0) + sign * ca * cb
    return ExteriorElement(a.ambient_dim, out)


def wedge_many(factors: Sequence[ExteriorElement]) -> ExteriorElement:
    """Left-to-right wedge of a nonempty list of elements."""
    acc = factors[0]
    for f in factors[1:]:
        acc = wedge(acc, f)
    return acc


# -- middle-degree pairing -------------------------------------------------


class SignatureTriple(NamedTuple):
    pos: int
    neg: int
    zero: int


@lru_cache(maxsize=None)
def wedge_pairing_matrix(n: int, p: int) -> np.ndarray:
    """Pairing M[i, j] = volume coefficient of e_{I_i} ^ e_{I_j} on degree p.

    Requires 2p = n (so products land in top degree) and p even (odd p
    gives an antisymmetric pairing, which has no signature in this sense).
    Basis order is lexicographic, matching multi_indices(n, p).
    Entries are exact integers.
    """
    if 2 * p != n:
        raise UnsupportedPairing(f"pairing needs 2p = n, got n={n}, p={p}")
    if p % 2 != 0:
        raise UnsupportedPairing(f"pairing needs even degree, got p={p}")
    basis = multi_indices(n, p)
    m = len(basis)
    M = np.zeros((m, m), dtype=np.int64)
    for i, I in enumerate(basis):
        for j in range(i, m):
            sign, K = merge_sign(I, basis[j])
            if sign and len(K) == n:
                M[i, j] = sign
                M[j, i] = sign  # p even => symmetric
    return M


def _as_exact_rows(M) -> list:
    if isinstance(M, np.ndarray):
        rows = M.tolist()
    else:
        rows = [list(r) for r in M]
    return [[Fraction(x) for x in r] for r in rows]


def signature_exact(M) -> SignatureTriple:
    """Signature of a symmetric matrix over exact rationals.

    Symmetric Gauss (congruence) diagonalization; no tolerance involved.
    Accepts integer/Fraction numpy arrays or nested sequences.
    """
    A = _as_exact_rows(M)
    m = len(A)
    if any(len(r) != m for r in A):
        raise ShapeError("signature needs a square matrix")
    for i in range(m):
        for j in range(i + 1, m):
            if A[i][j] != A[j][i]:
                raise ShapeError("signature needs a symmetric matrix")
    pos = neg = zero = 0
    for r in range(m):
        if A[r][r] == 0:
            # try to bring a nonzero onto the diagonal by congruence
            swap = next((i for i in range(r + 1, m) if A[i][i] != 0), None)
            if swap is not None:
                A[r], A[swap] = A[swap], A[r]
                for row in A:
                    row[r], row[swap] = row[swap], row[r]
            else:
                off = next((i for i in range(r + 1, m) if A[r][i] != 0), None)
                if off is None:
                    zero += 1
                    continue
                # row/col r += row/col off makes the pivot 2*A[r][off] != 0
                for k in range(m):
                    A[r][k] += A[off][k]
                for row in A:
                    row[r] += row[off]
        piv = A[r][r]
        if piv > 0:
            pos += 1
        else:
            neg += 1
        for i in range(r + 1, m):
            if A[i][r] != 0:
                f = A[i][r] / piv
                for k in range(r, m):
                    A[i][k] -= f * A[r][k]
        for i in range(r + 1, m):
            A[r][i] = Fraction(0)
            A[i][r] = Fraction(0)
    return SignatureTriple(pos, neg, zero)


def signature(M, tol: float = 1e-9) -> SignatureTriple:
    """Signature (pos, neg, zero) of a symmetric matrix.

    Integer and Fraction inputs take the exact congruence route; float
    inputs are classified through eigenvalues with |lambda| <= tol counted
    as zero.
    """
    A = np.asarray(M)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ShapeError("signature needs a square matrix")
    if A.dtype == object or np.issubdtype(A.dtype, np.integer):
        return signature_exact(M)
    if not np.allclose(A, A.T, atol=tol, rtol=0.0):
        raise ShapeError("signature needs a symmetric matrix")
    eig = np.linalg.eigvalsh(0.5 * (A + A.T))
    pos = int(np.sum(eig > tol))
    neg = int(np.sum(eig < -tol))
    return SignatureTriple(pos, neg, int(len(eig) - pos - neg))


# -- distinguished middle bases in dimension 4 ------------------------------


def _sd_terms(exact: bool):
    one = Fraction(1) if exact else 1.0
    plus = [
        {(1, 2): one, (3, 4): one},
        {(1, 3): one, (2, 4): -one},
        {(1, 4): one, (2, 3): one},
    ]
    minus = [
        {(1, 2): one, (3, 4): -one},
        {(1, 3): one, (2, 4): one},
        {(1, 4): one, (2, 3): -one},
    ]
    return plus, minus


def selfdual_triple(normalized: bool = True, exact: bool = False) -> list:
    """The three +1-eigenvector 2-forms of the middle pairing on R^4.

    With ``normalized`` each b_i satisfies b_i ^ b_j = delta_ij * vol
    (coefficients 1/sqrt(2), float only); unnormalized coefficients are 1
    and b_i ^ b_i = 2 * vol exactly, available in exact mode.
    """
    if normalized and exact:
        raise UnsupportedPairing("1/sqrt(2) normalization is not rational")
    plus, _ = _sd_terms(exact)
    scale = 1.0 / sqrt(2.0) if normalized else (Fraction(1) if exact else 1.0)
    return [ExteriorElement(4, {I: scale * c for I, c in t.items()}) for t in plus]


def antiselfdual_triple(normalized: bool = True, exact: bool = False) -> list:
    """The three -1-eigenvector 2-forms; b_i ^ b_i = -vol when normalized."""
    if normalized and exact:
        raise UnsupportedPairing("1/sqrt(2) normalization is not rational")
    _, minus = _sd_terms(exact)
    scale = 1.0 / sqrt(2.0) if normalized else (Fraction(1) if exact else 1.0)
    return [ExteriorElement(4, {I: scale * c for I, c in t.items()}) for t in minus]


# -- dense representation (flat coefficient vectors per degree) -------------


@lru_cache(maxsize=None)
def _index_positions(n: int, p: int) -> dict:
    return {I: k for k, I in enumerate(multi_indices(n, p))}


@lru_cache(maxsize=None)
def wedge_table(n: int, p: int, q: int):
    """Structure constants of wedge: (target, sign) arrays, -1 for zero.

    target[i, j] is the position of e_{I_i} ^ e_{J_j} in the (p+q)-basis,
    sign[i, j] the Koszul sign; used by the numpy fast path.
    """
    bp, bq = multi_indices(n, p), multi_indices(n, q)
    pos = _index_positions(n, p + q) if p + q <= n else {}
    target = -np.ones((len(bp), len(bq)), dtype=np.int64)
    sign = np.zeros((len(bp), len(bq)), dtype=np.int8)
    for i, I in enumerate(bp):
        for j, J in enumerate(bq):
            s, K = merge_sign(I, J)
            if s and K in pos:
                target[i, j] = pos[K]
                sign[i, j] = s
    return target, sign


def dense_vector(a: ExteriorElement, p: int) -> np.ndarray:
    """Float coefficient vector of the degree-p part, lexicographic basis."""
    pos = _index_positions(a.ambient_dim, p)
    v = np.zeros(len(pos))
    for I, c in a.coefficients.items():
        if len(I) == p:
            v[pos[I]] = float(c)
    return v


def from_dense(n: int, p: int, v: np.ndarray) -> ExteriorElement:
    basis = multi_indices(n, p)
    return ExteriorElement(n, {I: float(c) for I, c in zip(basis, v) if c != 0.0})


def wedge_dense(n: int, p: int, q: int, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Dense wedge of coefficient vectors (degrees p and q over R^n)."""
    if p + q > n:
        return np.zeros(0)
    target, sign = wedge_table(n, p, q)
    out = np.zeros(comb(n, p + q))
    prod = np.multiply.outer(a, b) * sign
    ok = target >= 0
    np.add.at(out, target[ok], prod[ok])
    return out
