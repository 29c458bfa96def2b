"""Covariance diagnostics of the measure ``|Q(z)|**2 dz`` for 0/1 sequences.

With ``a_k`` the normalized aperiodic correlations of ``eta`` (so that
``|Q|**2 = 1 + sum_{k != 0} a_k z**k``) the random variables
``X(k) = z**k - a_k`` have covariance ``m(i, j) = a_{j-i} - a_i a_j`` over the
index set ``k in {-(q-1), ..., -1, 1, ..., q-1}``.

Every entry is an integer over ``m**2``: ``(m*c_{j-i} - c_i*c_j) / m**2`` with
``c`` the integer correlations, so ``r`` and ``C`` are computed exactly.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .sequences import BinarySequence
from .spectral import AutocorrelationProfile, aperiodic_correlation

DENSE_MAX_Q = 2048
JACOBI_MAX_DIM = 256
ORACLE_MAX_Q = 64


def nb_autocorrelation(b: BinarySequence) -> AutocorrelationProfile:
    """Profile ``a_k = (1/m) sum_j eta_j eta_{j+k}`` with integer numerators over m."""
    if b.m == 0:
        raise ValueError("weight m = 0 has no normalized profile")
    return AutocorrelationProfile(aperiodic_correlation(b.entries), b.m, "binary")


def index_set(q: int) -> np.ndarray:
    """Matrix index order ``-(q-1), ..., -1, 1, ..., q-1``."""
    k = np.arange(1, q, dtype=np.int64)
    return np.concatenate([-k[::-1], k])


def _extended(c: np.ndarray, d: np.ndarray) -> np.ndarray:
    d = np.abs(d)
    out = np.zeros(d.shape, dtype=np.int64)
    inside = d < c.size
    out[inside] = c[d[inside]]
    return out


def numerator_matrix(profile: AutocorrelationProfile) -> np.ndarray:
    """Integer matrix ``m*c_{j-i} - c_i*c_j``; divide by ``m**2`` for the covariance."""
    c = profile.numerators
    m = profile.denominator
    k = index_set(profile.q)
    ck = _extended(c, k)
    return m * _extended(c, k[None, :] - k[:, None]) - np.outer(ck, ck)


@dataclass(frozen=True)
class CovarianceDiagnostics:
    q: int
    m: int
    profile: AutocorrelationProfile
    matrix: np.ndarray | None
    r_exact: Fraction
    C_exact: Fraction

    @property
    def dim(self) -> int:
        return 2 * (self.q - 1)

    @property
    def r(self) -> float:
        return float(self.r_exact)

    @property
    def C(self) -> float:
        return float(self.C_exact)

    @property
    def obstruction(self) -> float:
        return float(self.C_exact / self.m**2)


def _streamed_sums(profile: AutocorrelationProfile) -> tuple[int, int]:
    c = profile.numerators
    m = profile.denominator
    k = index_set(profile.q)
    ck = _extended(c, k)
    total = 0
    total_abs = 0
    for i, ki in enumerate(k):
        row = m * _extended(c, k - ki) - ck[i] * ck
        total += int(row.sum())
        total_abs += int(np.abs(row).sum())
    return total, total_abs


def covariance_matrix(b: BinarySequence, dense: bool | None = None) -> CovarianceDiagnostics:
    """Assemble the covariance diagnostics of one 0/1 sequence.

    The matrix is materialized for ``q <= 2048`` (or when ``dense`` forces it);
    otherwise only the exact sums ``r`` and ``C`` are streamed row by row.
    ``q = 1`` gives an empty matrix with ``r = C = 0``.
    """
    profile = nb_autocorrelation(b)
    q, m = b.q, b.m
    if dense is None:
        dense = q <= DENSE_MAX_Q
    if q < 2:
        return CovarianceDiagnostics(q, m, profile, np.zeros((0, 0)), Fraction(0), Fraction(0))
    if dense:
        num = numerator_matrix(profile)
        total, total_abs = int(num.sum()), int(np.abs(num).sum())
        matrix = num / float(m * m)
    else:
        total, total_abs = _streamed_sums(profile)
        matrix = None
    return CovarianceDiagnostics(
        q, m, profile, matrix, Fraction(total, m * m), Fraction(total_abs, m * m)
    )


def r_and_C(d: CovarianceDiagnostics) -> tuple[float, float]:
    return d.r, d.C


def obstruction_ratio(b: BinarySequence) -> float:
    """``C / m**2``, never above ``4 q**2 / m**2``."""
    if b.m == 0:
        raise ValueError("weight m = 0")
    return covariance_matrix(b).obstruction


def covariance_bruteforce_check(b: BinarySequence, N: int, conjugate: str = "second") -> float:
    """Max deviation between the exact matrix and N-point quadrature of the covariance.

    Each entry is recomputed as the grid mean of
    ``(z**k - a_k) * conj(z**l - a_l) * |Q(z)|**2`` (``conjugate="first"``
    conjugates the other factor). The integrand's frequencies stay below
    ``3q``, so ``N >= 8q`` makes the quadrature exact up to rounding.
    """
    q = b.q
    if q > ORACLE_MAX_Q:
        raise ValueError(f"oracle limited to q <= {ORACLE_MAX_Q}, got {q}")
    if N < 8 * q:
        raise ValueError(f"oracle needs N >= 8q = {8 * q}, got {N}")
    if conjugate not in ("first", "second"):
        raise ValueError("conjugate must be 'first' or 'second'")
    d = covariance_matrix(b, dense=True)
    if q < 2:
        return 0.0
    k = index_set(q)
    a = d.profile.floats()[np.abs(k)]
    theta = 2 * np.pi * np.arange(N) / N
    z = np.exp(1j * theta)
    Q = np.polyval(b.coefficients()[::-1], z)
    weight = np.abs(Q) ** 2
    X = np.exp(1j * np.outer(theta, k)) - a
    if conjugate == "second":
        est = (X * weight[:, None]).T @ np.conj(X) / N
    else:
        est = (np.conj(X) * weight[:, None]).T @ X / N
    return float(np.max(np.abs(est - d.matrix)))


def _round_robin(n: int):
    """Disjoint index pairs covering all ``n(n-1)/2`` pairs in ``n-1`` rounds (n even)."""
    players = list(range(n))
    for _ in range(n - 1):
        yield np.array(players[: n // 2]), np.array(players[n // 2 :][::-1])
        players = [players[0]] + [players[-1]] + players[1:-1]


def _off_norm(A: np.ndarray) -> float:
    off = A - np.diag(np.diag(A))
    return float(np.sqrt(np.sum(off * off)))


def jacobi_eigenvalues(A: np.ndarray, tol: float = 1e-10, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.

    Each sweep visits every off-diagonal pair once, in round-robin order so that
    the ``n/2`` rotations of a round act on disjoint rows and are applied
    together. Stops when the off-diagonal Frobenius norm drops below ``tol``.
    """
    A = np.array(A, dtype=float)
    n = A.shape[0]
    if A.shape != (n, n):
        raise ValueError("matrix must be square")
    if not np.allclose(A, A.T, rtol=0, atol=1e-12):
        raise ValueError("matrix must be symmetric")
    if n < 2:
        return np.diag(A).copy()
    pad = n % 2
    if pad:
        A = np.pad(A, ((0, 1), (0, 1)))
    size = A.shape[0]
    for _ in range(max_sweeps):
        off = _off_norm(A)
        if off < tol:
            break
        for p, r in _round_robin(size):
            apr = A[p, r]
            active = apr != 0
            if not active.any():
                continue
            p, r, apr = p[active], r[active], apr[active]
            theta = (A[r, r] - A[p, p]) / (2.0 * apr)
            big = np.abs(theta) > 1e150
            safe = np.where(big, 1.0, theta)
            t = np.sign(safe) / (np.abs(safe) + np.sqrt(safe * safe + 1.0))
            t = np.where(big, 0.5 / np.where(big, theta, 1.0), t)
            t[theta == 0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            rows_p, rows_r = A[p, :].copy(), A[r, :].copy()
            A[p, :] = c[:, None] * rows_p - s[:, None] * rows_r
            A[r, :] = s[:, None] * rows_p + c[:, None] * rows_r
            cols_p, cols_r = A[:, p].copy(), A[:, r].copy()
            A[:, p] = cols_p * c - cols_r * s
            A[:, r] = cols_p * s + cols_r * c
    else:
        raise RuntimeError(f"Jacobi did not converge in {max_sweeps} sweeps")
    ev = np.diag(A)
    return np.sort(ev[:n] if not pad else np.delete(ev, n))


def min_eigenvalue(d: CovarianceDiagnostics, method: str = "auto") -> float | None:
    """Smallest eigenvalue of the covariance matrix; None for an empty or unstored one.

    ``method="auto"`` uses Jacobi up to dimension 256 and LAPACK above.
    """
    if d.matrix is None or d.matrix.size == 0:
        return None
    if method == "auto":
        method = "jacobi" if d.dim <= JACOBI_MAX_DIM else "lapack"
    if method == "jacobi":
        return float(jacobi_eigenvalues(d.matrix)[0])
    if method == "lapack":
        return float(np.linalg.eigvalsh(d.matrix)[0])
    raise ValueError(f"unknown method {method!r}")
