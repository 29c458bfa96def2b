"""Sign and 0/1 coefficient sequences and the maps between them.

A :class:`SignSequence` holds the coefficients of a Littlewood polynomial
``P(z) = q**-0.5 * sum(eps_j z**j)``; a :class:`BinarySequence` holds those of
a Newman-Bourgain polynomial ``Q(z) = m**-0.5 * sum(eta_j z**j)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np


class _FrozenVector:
    """Read-only integer vector with value semantics."""

    __slots__ = ("_entries",)
    _allowed: tuple[int, ...] = ()
    _dtype = np.int8

    def __init__(self, entries):
        arr = np.array(entries, dtype=np.int64).ravel()
        if arr.size == 0:
            raise ValueError(f"{type(self).__name__} must have length >= 1")
        bad = ~np.isin(arr, self._allowed)
        if bad.any():
            pos = int(np.flatnonzero(bad)[0])
            raise ValueError(
                f"{type(self).__name__} entry {pos} is {arr[pos]}, "
                f"expected one of {self._allowed}"
            )
        arr = arr.astype(self._dtype)
        arr.flags.writeable = False
        self._entries = arr

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def q(self) -> int:
        return int(self._entries.size)

    def __len__(self):
        return self.q

    def __iter__(self):
        return iter(int(x) for x in self._entries)

    def __eq__(self, other):
        if type(other) is not type(self):
            return NotImplemented
        return np.array_equal(self._entries, other._entries)

    def __hash__(self):
        return hash((type(self).__name__, self._entries.tobytes()))

    def __repr__(self):
        return f"{type(self).__name__}({format_sequence(self)!r})"


class SignSequence(_FrozenVector):
    """A finite vector of +1/-1 coefficients."""

    __slots__ = ()
    _allowed = (-1, 1)

    @property
    def n_minus(self) -> int:
        return int(np.count_nonzero(self._entries < 0))

    @property
    def n_plus(self) -> int:
        return self.q - self.n_minus

    def coefficients(self) -> np.ndarray:
        """L2-normalized coefficients ``eps_j / sqrt(q)``."""
        return self._entries.astype(float) / np.sqrt(self.q)


class BinarySequence(_FrozenVector):
    """A finite vector of 0/1 coefficients with weight ``m``."""

    __slots__ = ()
    _allowed = (0, 1)

    @property
    def m(self) -> int:
        return int(np.count_nonzero(self._entries))

    def coefficients(self) -> np.ndarray:
        """Coefficients ``eta_j / sqrt(m)``; needs ``m >= 1``."""
        if self.m == 0:
            raise ValueError("cannot normalize a BinarySequence of weight 0")
        return self._entries.astype(float) / np.sqrt(self.m)


@dataclass(frozen=True)
class DirichletSpec:
    """The normalized Dirichlet polynomial ``q**-0.5 * (1 + z + ... + z**(q-1))``."""

    q: int

    def coefficients(self) -> np.ndarray:
        return np.full(self.q, 1.0 / np.sqrt(self.q))

    def __call__(self, z):
        z = np.asarray(z, dtype=complex)
        near_one = np.isclose(z, 1.0, rtol=0.0, atol=1e-14)
        safe = np.where(near_one, 0.0, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            closed = (1 - safe**self.q) / (1 - safe)
        out = np.where(near_one, self.q, closed) / np.sqrt(self.q)
        return out if out.ndim else complex(out)


@dataclass(frozen=True)
class CosinePolynomial:
    """``constant + sum_{m=1}^{h} a_m cos(m*theta + phi_m)`` with nominal degree n.

    ``harmonics[m-1]`` holds ``a_m``. The constant term enters evaluation with
    weight one and is kept apart from the harmonics.
    """

    constant: float
    harmonics: np.ndarray
    degree: int
    phases: np.ndarray | None = None

    def __post_init__(self):
        harm = np.asarray(self.harmonics, dtype=float)
        object.__setattr__(self, "harmonics", harm)
        if self.phases is None:
            object.__setattr__(self, "phases", np.zeros_like(harm))
        else:
            ph = np.asarray(self.phases, dtype=float)
            if ph.shape != harm.shape:
                raise ValueError("phases must match harmonics in length")
            object.__setattr__(self, "phases", ph)
        if harm.size > self.degree:
            raise ValueError(f"{harm.size} harmonics exceed degree {self.degree}")

    @property
    def h(self) -> int:
        return int(self.harmonics.size)

    def __call__(self, theta):
        theta = np.asarray(theta, dtype=float)
        m = np.arange(1, self.h + 1)
        terms = self.harmonics * np.cos(np.multiply.outer(theta, m) + self.phases)
        return self.constant + terms.sum(axis=-1)

    def evaluate_on_grid(self, N: int) -> np.ndarray:
        """Values at ``theta_t = 2*pi*t/N`` computed by FFT; requires ``N > h``."""
        if N <= self.h:
            raise ValueError(f"grid size {N} must exceed h = {self.h}")
        spec = np.zeros(N, dtype=complex)
        spec[1 : self.h + 1] = self.harmonics * np.exp(1j * self.phases)
        return self.constant + (np.fft.ifft(spec) * N).real


# maps between the classes


def frequency_minus_one(s: SignSequence) -> Fraction:
    """Proportion ``n_q / q`` of -1 coefficients, as an exact fraction."""
    return Fraction(s.n_minus, s.q)


def to_binary(s: SignSequence) -> BinarySequence:
    return BinarySequence((s.entries.astype(np.int64) + 1) // 2)


def complement(b: BinarySequence) -> BinarySequence:
    return BinarySequence(1 - b.entries.astype(np.int64))


def negate_S(s: SignSequence) -> SignSequence:
    return SignSequence(-s.entries.astype(np.int64))


def t_map(s: SignSequence) -> tuple[BinarySequence, int]:
    """Send ``P`` to the Newman-Bourgain datum ``eta = (eps + 1) / 2`` and its weight.

    The map is defined on every sign sequence. It is one-to-one onto the
    Newman-Bourgain class on sequences with positive endpoints, see
    :func:`satisfies_endpoint_convention`.
    """
    b = to_binary(s)
    return b, b.m


def t_inverse(b: BinarySequence) -> SignSequence:
    return SignSequence(2 * b.entries.astype(np.int64) - 1)


def satisfies_endpoint_convention(seq) -> bool:
    """True when the first and last coefficients are positive (+1 or 1)."""
    e = seq.entries
    return bool(e[0] > 0 and e[-1] > 0)


def is_palindromic(s: SignSequence) -> bool:
    e = s.entries
    return bool(np.array_equal(e, e[::-1]))


def dirichlet(q: int) -> DirichletSpec:
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    return DirichletSpec(int(q))


def palindromic_decomposition(s: SignSequence) -> tuple[CosinePolynomial, int]:
    """Split an even-degree palindromic ``P`` as ``z**h * L(z) - eps_h * z**h``.

    Here ``h = (q - 1) / 2`` and, on the circle,
    ``L(theta) = 2*eps_h + sum_{m=1}^{h} 2*eps_{h-m} cos(m*theta)``. The
    polynomial ``P`` is the unnormalized ``sum eps_j z**j``.

    Returns
    -------
    L : CosinePolynomial
        Harmonics ``a_m = 2*eps_{h-m}``, constant ``2*eps_h``, degree ``h``.
    center : int
        The middle coefficient ``eps_h``.
    """
    if s.q % 2 == 0:
        raise ValueError(f"palindromic decomposition needs odd length, got q = {s.q}")
    if not is_palindromic(s):
        raise ValueError("sequence is not palindromic")
    h = (s.q - 1) // 2
    e = s.entries.astype(float)
    center = int(s.entries[h])
    harmonics = 2.0 * e[:h][::-1]
    return CosinePolynomial(2.0 * center, harmonics, degree=h), center


# pointwise identity checks


def _grid_values(coeffs: np.ndarray, N: int) -> np.ndarray:
    return np.fft.ifft(coeffs, n=N) * N


def tmap_identity_residual(s: SignSequence, N: int | None = None) -> float:
    """Max over an N-point grid of ``|P - (2*sqrt(m/q)*T(P) - D)|``.

    When ``m = 0`` the term ``sqrt(m) * T(P)`` is the zero polynomial.
    """
    q = s.q
    N = N or 16 * q
    b, m = t_map(s)
    lhs = _grid_values(s.coefficients(), N)
    if m:
        tp = _grid_values(b.coefficients(), N)
        scaled = 2.0 * np.sqrt(m / q) * tp
    else:
        scaled = np.zeros(N, dtype=complex)
    rhs = scaled - _grid_values(dirichlet(q).coefficients(), N)
    return float(np.max(np.abs(lhs - rhs)))


def split_residuals(s: SignSequence, N: int | None = None) -> tuple[float, float]:
    """Residuals of ``P = 2Q - D`` and ``P = D - 2R`` (both 1/sqrt(q) normalized)."""
    q = s.q
    N = N or 16 * q
    eta = to_binary(s).entries.astype(float) / np.sqrt(q)
    eta_c = complement(to_binary(s)).entries.astype(float) / np.sqrt(q)
    P = _grid_values(s.coefficients(), N)
    D = _grid_values(dirichlet(q).coefficients(), N)
    Q = _grid_values(eta, N)
    R = _grid_values(eta_c, N)
    return (
        float(np.max(np.abs(P - (2 * Q - D)))),
        float(np.max(np.abs(P - (D - 2 * R)))),
    )


def minus_part_coefficients(s: SignSequence) -> np.ndarray:
    """Coefficients of ``R_q = q**-0.5 * sum eta'_j z**j`` (eta' marks the -1 entries)."""
    return complement(to_binary(s)).entries.astype(float) / np.sqrt(s.q)


def decomposition_residual(s: SignSequence, N: int | None = None) -> float:
    """Max grid deviation of ``P`` from ``z**h L(z) - eps_h z**h``, both scaled by 1/sqrt(q)."""
    L, center = palindromic_decomposition(s)
    h = L.h
    N = N or 16 * s.q
    P = _grid_values(s.coefficients(), N)
    zh = np.exp(2j * np.pi * ((h * np.arange(N)) % N) / N)
    rhs = zh * (L.evaluate_on_grid(N) - center) / np.sqrt(s.q)
    return float(np.max(np.abs(P - rhs)))


# text format


class SequenceParseError(ValueError):
    def __init__(self, message, line, column):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


_SIGN = {"+": 1, "-": -1}
_BIT = {"0": 0, "1": 1}


def parse_sequences(text: str) -> list[SignSequence | BinarySequence]:
    """Parse one sequence per line; ``#`` starts a comment, blank lines are skipped."""
    out = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        body = raw.split("#", 1)[0]
        alphabet = None
        values = []
        for col, ch in enumerate(body, start=1):
            if ch.isspace():
                continue
            if ch in _SIGN:
                kind = "sign"
            elif ch in _BIT:
                kind = "bit"
            else:
                raise SequenceParseError(f"unexpected character {ch!r}", lineno, col)
            if alphabet is None:
                alphabet = kind
            elif kind != alphabet:
                raise SequenceParseError(
                    f"mixed alphabet: {ch!r} in a {alphabet} sequence", lineno, col
                )
            values.append(_SIGN[ch] if kind == "sign" else _BIT[ch])
        if alphabet is None:
            continue
        out.append(SignSequence(values) if alphabet == "sign" else BinarySequence(values))
    return out


def format_sequence(seq) -> str:
    if isinstance(seq, SignSequence):
        return "".join("+" if x > 0 else "-" for x in seq.entries)
    return "".join(str(int(x)) for x in seq.entries)
