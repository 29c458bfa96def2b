"""Evaluation on the unit circle and the scalar metrics built on it.

Grids sample ``P(exp(2*pi*i*(t + shift)/N))`` for ``t = 0..N-1``. Norms are
plain grid means; the exact L4 norm and the merit factor come from integer
aperiodic autocorrelations instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .sequences import (
    CosinePolynomial,
    SignSequence,
    frequency_minus_one,
    is_palindromic,
    palindromic_decomposition,
)

DEFAULT_ALPHAS = (0.0, 0.5, 1.0, 2.0, 4.0)
MAHLER_FLOOR = 1e-300
MAHLER_RTOL = 1e-6


def _is_pow2(n: int) -> bool:
    return n >= 1 and n & (n - 1) == 0


def default_grid_size(q: int) -> int:
    """Smallest power of two >= max(4096, 16*q)."""
    target = max(4096, 16 * q)
    return 1 << (target - 1).bit_length()


@dataclass(frozen=True)
class EvaluationGrid:
    coeffs: np.ndarray
    values: np.ndarray
    shift: float = 0.0

    @property
    def N(self) -> int:
        return int(self.values.size)

    @property
    def abs(self) -> np.ndarray:
        return np.abs(self.values)


def evaluate_on_grid(coeffs, N: int, shift: float = 0.0) -> EvaluationGrid:
    """Evaluate ``sum c_j z**j`` at the N points ``exp(2*pi*i*(t + shift)/N)`` by FFT.

    ``shift = 0.5`` gives the midpoint grid, which never lands on a root of unity
    of order dividing N.
    """
    c = np.asarray(coeffs, dtype=complex).ravel()
    if N < c.size:
        raise ValueError(f"grid size N = {N} is smaller than q = {c.size}")
    if not _is_pow2(N):
        raise ValueError(f"grid size N = {N} is not a power of two")
    if shift:
        c = c * np.exp(2j * np.pi * shift * np.arange(c.size) / N)
    values = np.fft.ifft(c, n=N) * N
    return EvaluationGrid(np.asarray(coeffs), values, shift)


def lp_norm(grid: EvaluationGrid, alpha: float) -> float:
    if alpha <= 0:
        raise ValueError("alpha must be > 0; use mahler_measure for alpha = 0")
    return float(np.mean(grid.abs**alpha) ** (1.0 / alpha))


def flatness_residual(grid: EvaluationGrid, alpha: float) -> float:
    """``|| |P| - 1 ||_alpha`` on the grid."""
    if alpha <= 0:
        raise ValueError("alpha must be > 0")
    return float(np.mean(np.abs(grid.abs - 1.0) ** alpha) ** (1.0 / alpha))


def sup_norm_estimate(grid: EvaluationGrid) -> float:
    """Grid maximum of ``|P|``; a lower bound on the sup norm."""
    return float(grid.abs.max())


@dataclass(frozen=True)
class MahlerEstimate:
    value: float
    converged: bool
    N: int
    coarse: float


def _log_mean_exp(coeffs, N: int) -> float:
    g = evaluate_on_grid(coeffs, N, shift=0.5)
    return float(np.exp(np.mean(np.log(np.maximum(g.abs, MAHLER_FLOOR)))))


def mahler_measure(grid: EvaluationGrid) -> MahlerEstimate:
    """Geometric mean of ``|P|`` over the circle.

    Uses midpoint grids of size N and 2N built from the grid's coefficients
    (a sample that hits a zero on the circle would otherwise dominate the log
    mean) and returns the 2N value. ``converged`` is set when the two agree to
    a relative 1e-6. Polynomials with zeros on or close to the circle converge
    slowly, roughly like ``log(2)/N`` per zero in the log mean.
    """
    c = np.asarray(grid.coeffs)
    if not np.any(c):
        raise ValueError("Mahler measure of the zero polynomial is undefined")
    coarse = _log_mean_exp(c, grid.N)
    fine = _log_mean_exp(c, 2 * grid.N)
    converged = abs(fine - coarse) <= MAHLER_RTOL * fine
    return MahlerEstimate(fine, bool(converged), 2 * grid.N, coarse)


# autocorrelations


@dataclass(frozen=True)
class AutocorrelationProfile:
    """Aperiodic correlations ``value_k = numerators[k] / denominator`` for k >= 0.

    Sign sequences use denominator 1 (integers ``c_k``); 0/1 sequences use the
    weight ``m``, so ``a_0 = 1``. Negative offsets mirror positive ones and
    offsets ``|k| >= q`` are zero.
    """

    numerators: np.ndarray
    denominator: int = 1
    kind: str = "sign"

    @property
    def q(self) -> int:
        return int(self.numerators.size)

    def numerator(self, k: int) -> int:
        k = abs(k)
        return int(self.numerators[k]) if k < self.q else 0

    def __getitem__(self, k: int) -> Fraction:
        return Fraction(self.numerator(k), self.denominator)

    def floats(self) -> np.ndarray:
        return self.numerators / self.denominator


def aperiodic_correlation(x) -> np.ndarray:
    """Exact ``sum_j x_j x_{j+k}`` for k = 0..q-1 on an integer vector."""
    x = np.asarray(x, dtype=np.int64)
    q = x.size
    if q <= 2048:
        return np.correlate(x, x, mode="full")[q - 1 :].astype(np.int64)
    nfft = 1 << (2 * q - 1).bit_length()
    f = np.fft.rfft(x.astype(float), nfft)
    raw = np.fft.irfft(f * np.conj(f), nfft)[:q]
    # integer-valued with |c_k| <= q, far below the float rounding limit
    return np.rint(raw).astype(np.int64)


def sign_autocorrelation(s: SignSequence) -> AutocorrelationProfile:
    return AutocorrelationProfile(aperiodic_correlation(s.entries), 1, "sign")


def l4_fourth_power_exact(profile: AutocorrelationProfile) -> Fraction:
    """``||P||_4**4 = q**-2 * sum_{|k|<q} c_k**2`` as an exact fraction."""
    if profile.kind != "sign":
        raise ValueError("exact L4 is defined here for sign-sequence profiles")
    c = profile.numerators
    total = int(c[0]) ** 2 + 2 * int(np.dot(c[1:], c[1:]))
    return Fraction(total, profile.q**2)


def l4_norm_exact(profile: AutocorrelationProfile) -> float:
    """``||P||_4**4`` (the fourth power, not the norm) as a float."""
    return float(l4_fourth_power_exact(profile))


def merit_factor(profile: AutocorrelationProfile) -> float:
    """``1 / (||P||_4**4 - 1)``; ``math.inf`` when every off-peak correlation is zero."""
    excess = l4_fourth_power_exact(profile) - 1
    if excess == 0:
        return math.inf
    return float(1 / excess)


def mz_divergence_witness(s: SignSequence, alpha: float) -> float:
    """Lower-bound witness ``|(1 - 2 n/q)**2 - 1/q| * q**((beta-1)/beta)``, beta = alpha/2.

    Up to an unknown absolute constant it bounds ``||P||_alpha**2 + 1`` from
    below, so growth in q certifies growth of the norm.
    """
    if alpha <= 2:
        raise ValueError(f"witness needs alpha > 2, got {alpha}")
    beta = alpha / 2.0
    q = s.q
    bias = (1.0 - 2.0 * s.n_minus / q) ** 2
    return abs(bias - 1.0 / q) * q ** ((beta - 1.0) / beta)


def littlewood_criterion_ratio(f: CosinePolynomial) -> float:
    """``sum m**2 a_m**2 / (n**2 * sum a_m**2)`` with the sums over m >= 0.

    The constant term is the m = 0 coefficient: it adds nothing to the
    numerator but counts in the denominator. Littlewood's criterion hypothesis
    holds with ``K = 1 / ratio``. Constant-magnitude palindromic input gives
    ``(2h + 1) / (6h) = 1/3 + 1/(6h)``.
    """
    if f.degree < 1:
        raise ValueError("nominal degree must be >= 1")
    a2 = f.harmonics**2
    if not a2.any():
        raise ValueError("all harmonic coefficients are zero")
    m = np.arange(1, f.h + 1, dtype=float)
    denom = f.constant**2 + a2.sum()
    return float((m**2 * a2).sum() / (f.degree**2 * denom))


def l1_over_l2(f: CosinePolynomial, N: int) -> float:
    """Grid ratio ``||f||_1 / ||f||_2`` of a cosine polynomial."""
    v = np.abs(f.evaluate_on_grid(N))
    return float(v.mean() / np.sqrt((v**2).mean()))


# reports


def _alpha_key(alpha: float) -> str:
    return f"{alpha:g}"


@dataclass
class FlatnessReport:
    q: int
    n_minus: int
    frequency: float
    norms: dict[float, float]
    residuals: dict[float, float]
    mahler: float
    mahler_converged: bool
    merit_factor: float
    mz_witness: dict[float, float]
    sup_norm: float
    grid_N: int
    criterion_ratio: float | None = None

    def to_dict(self) -> dict:
        """Flat mapping with stable keys; alpha keys use ``%g`` text (``norm_0.5``)."""
        out = {"q": self.q, "n_minus": self.n_minus, "frequency": self.frequency}
        for a in sorted(self.norms):
            out[f"norm_{_alpha_key(a)}"] = self.norms[a]
        for a in sorted(self.residuals):
            out[f"residual_{_alpha_key(a)}"] = self.residuals[a]
        out["mahler"] = self.mahler
        out["mahler_converged"] = self.mahler_converged
        out["merit_factor"] = self.merit_factor
        for a in sorted(self.mz_witness):
            out[f"mz_witness_{_alpha_key(a)}"] = self.mz_witness[a]
        out["sup_norm"] = self.sup_norm
        out["grid_N"] = self.grid_N
        out["criterion_ratio"] = self.criterion_ratio
        return out


def flatness_report(s: SignSequence, alphas=DEFAULT_ALPHAS, N: int | None = None) -> FlatnessReport:
    """All metrics of one Littlewood polynomial.

    ``alpha = 0`` in ``alphas`` is served by the Mahler measure and is always
    reported. The criterion ratio is filled in for odd-length palindromes.
    """
    q = s.q
    N = N or default_grid_size(q)
    grid = evaluate_on_grid(s.coefficients(), N)
    positive = sorted({float(a) for a in alphas if a > 0})
    if any(a < 0 for a in alphas):
        raise ValueError("alphas must be >= 0")
    norms = {a: lp_norm(grid, a) for a in positive}
    residuals = {a: flatness_residual(grid, a) for a in positive}
    witness = {a: mz_divergence_witness(s, a) for a in positive if a > 2}
    mahler = mahler_measure(grid)
    ratio = None
    if q % 2 == 1 and q >= 3 and is_palindromic(s):
        ratio = littlewood_criterion_ratio(palindromic_decomposition(s)[0])
    return FlatnessReport(
        q=q,
        n_minus=s.n_minus,
        frequency=float(frequency_minus_one(s)),
        norms=norms,
        residuals=residuals,
        mahler=mahler.value,
        mahler_converged=mahler.converged,
        merit_factor=merit_factor(sign_autocorrelation(s)),
        mz_witness=witness,
        sup_norm=sup_norm_estimate(grid),
        grid_N=N,
        criterion_ratio=ratio,
    )
