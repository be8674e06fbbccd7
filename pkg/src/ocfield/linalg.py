"""Small dense complex Hermitian linear algebra.

Hand-rolled, unblocked routines: the matrices here are antenna-sized
(L <= ~16), and keeping the numeric core free of LAPACK keeps it auditable.
Only the lower triangle of a Hermitian input is ever read.

Rank deficiency is expected, not exceptional: with zero noise and fewer
interferers than antennas the covariance is singular, and the quadratic form
on its inverse is legitimately infinite for a generic vector.
"""

from __future__ import annotations

import math

import numpy as np

__all__ = [
    "SINGULAR",
    "SingularIndication",
    "cholesky",
    "project_out",
    "quadratic_form_inverse",
    "solve",
]

_EPS = float(np.finfo(np.float64).eps)


class SingularIndication:
    """Marker for a pivot collapse in `cholesky` (rank-deficient input)."""

    __slots__ = ()

    def __repr__(self) -> str:  # pragma: no cover
        return "SINGULAR"


SINGULAR = SingularIndication()


def _pivot_tolerance(diag_max: float, n: int) -> float:
    # pivots at or below n * eps * max-diagonal count as collapsed
    return n * _EPS * max(diag_max, 0.0)


def _cholesky_psd(m: np.ndarray) -> tuple[np.ndarray, list[int]]:
    """Lower factor of a Hermitian PSD matrix, zeroing collapsed columns.

    Returns (g, deficient): g is lower triangular with g @ g.conj().T
    reproducing m on its numerical range; deficient lists the zeroed pivots.
    """
    a = np.array(m, dtype=np.complex128)
    n = a.shape[0]
    tol = _pivot_tolerance(max((a[j, j].real for j in range(n)), default=0.0), n)
    deficient: list[int] = []
    for j in range(n):
        if j:
            a[j:, j] -= a[j:, :j] @ a[j, :j].conj()
        pivot = a[j, j].real
        if pivot <= tol:
            deficient.append(j)
            a[j:, j] = 0.0
        else:
            a[j:, j] /= math.sqrt(pivot)
    return np.tril(a), deficient


def cholesky(m: np.ndarray) -> np.ndarray | SingularIndication:
    """Lower triangular G with G @ G^H = m, or SINGULAR on a pivot collapse.

    A SINGULAR return is information, not an error; callers that need the
    pseudo-inverse quadratic form go through `quadratic_form_inverse`.
    """
    g, deficient = _cholesky_psd(m)
    return SINGULAR if deficient else g


def solve(m: np.ndarray, b: np.ndarray) -> np.ndarray:
    """x with m @ x = b for Hermitian positive definite m."""
    g = cholesky(m)
    if g is SINGULAR:
        raise ValueError("matrix is singular to working precision")
    b = np.asarray(b, dtype=np.complex128)
    n = b.shape[0]
    y = np.zeros(n, dtype=np.complex128)
    for i in range(n):
        y[i] = (b[i] - g[i, :i] @ y[:i]) / g[i, i]
    x = np.zeros(n, dtype=np.complex128)
    for i in range(n - 1, -1, -1):
        x[i] = (y[i] - g[i + 1 :, i].conj() @ x[i + 1 :]) / g[i, i].real
    return x


def quadratic_form_inverse(c: np.ndarray, m: np.ndarray) -> float:
    """c^H m^{-1} c for Hermitian PSD m; pseudo-inverse semantics when singular.

    If m is rank deficient and c has a component outside its column space the
    form is math.inf; if c stays inside, the value on the pseudo-inverse is
    returned.  Fused scalar Cholesky + forward substitution (this sits in the
    per-trial hot path, so no intermediate matrices are built).
    """
    a = np.asarray(m)
    n = a.shape[0]
    rows = a.tolist()
    y = np.asarray(c, dtype=np.complex128).tolist()  # python scalars: faster loops
    if len(y) != n:
        raise ValueError(f"vector length {len(y)} does not match matrix order {n}")
    tol = _pivot_tolerance(max((rows[j][j].real for j in range(n)), default=0.0), n)
    g = [[0j] * n for _ in range(n)]
    residual = 0.0
    deficient = False
    for j in range(n):
        gj = g[j]
        pivot = rows[j][j].real
        r = y[j]
        for k in range(j):
            v = gj[k]
            pivot -= v.real * v.real + v.imag * v.imag
            r -= v * y[k]
        if pivot <= tol:
            # zero the column; row j of the factor then only constrains
            # consistency of c with the column space
            deficient = True
            y[j] = 0j
            residual = max(residual, abs(r))
            continue
        d = math.sqrt(pivot)
        gj[j] = d
        y[j] = r / d
        for i in range(j + 1, n):
            gi = g[i]
            v = rows[i][j]
            for k in range(j):
                v -= gi[k] * gj[k].conjugate()
            gi[j] = v / d
    if deficient:
        c_norm = math.sqrt(
            sum(v.real * v.real + v.imag * v.imag for v in np.asarray(c).ravel().tolist())
        )
        if residual > tol * c_norm:
            return math.inf
    return sum(v.real * v.real + v.imag * v.imag for v in y)


def _norm(v: np.ndarray) -> float:
    return math.sqrt(float(v.real @ v.real + v.imag @ v.imag))


def project_out(c: np.ndarray, basis) -> np.ndarray:
    """Component of c orthogonal to span(basis).

    Modified Gram-Schmidt with re-orthogonalization on the basis, then
    repeated projection passes on c until no further mass is removed.
    Returns the zero vector when c lies in the span (callers read that as
    zero SINR).
    """
    w = np.array(c, dtype=np.complex128)
    ortho: list[np.ndarray] = []
    for b in basis:
        v = np.array(b, dtype=np.complex128)
        scale = _norm(v)
        if scale == 0.0:
            continue
        for _ in range(2):
            for u in ortho:
                v -= (u.conj() @ v) * u
        size = _norm(v)
        if size > 1e-10 * scale:
            ortho.append(v / size)
    if not ortho:
        return w
    c_scale = _norm(w)
    size = c_scale
    for _ in range(4):
        before = size
        for u in ortho:
            w -= (u.conj() @ w) * u
        size = _norm(w)
        if size > 0.7071 * before:
            break
    if size <= 4.0 * len(ortho) * _EPS * c_scale:
        return np.zeros_like(w)
    return w
