"""Seeded families of sign and 0/1 sequences.

Randomness comes from SplitMix64 so outputs are reproducible across
platforms and languages:

    state <- (state + 0x9E3779B97F4A7C15) mod 2**64
    z <- state
    z <- (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9 mod 2**64
    z <- (z ^ (z >> 27)) * 0x94D049BB133111EB mod 2**64
    output z ^ (z >> 31)

Derived quantities:

* bounded integer in [0, k): ``(u * k) >> 64``
* uniform double in [0, 1): ``(u >> 11) * 2**-53``
* random sign: ``+1`` if ``u >> 63 == 0`` else ``-1``
* per-task seed for ``(seed, q, trial)``: start from ``mix(seed)`` and for each
  integer x apply ``h <- mix(h ^ mix(x + GAMMA))`` where ``mix`` is the output
  function above.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import asdict, dataclass, fields

import numpy as np

from .sequences import BinarySequence, SignSequence

MASK64 = (1 << 64) - 1
GAMMA = 0x9E3779B97F4A7C15
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB

FAMILY_KINDS = ("random_p", "rudin_shapiro", "legendre", "palindromic_random", "nb_density")


class ClampWarning(UserWarning):
    """The requested number of -1 entries did not fit the interior slots."""


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def derive_seed(seed: int, *parts: int) -> int:
    h = mix64(seed)
    for x in parts:
        h = mix64(h ^ mix64(x + GAMMA))
    return h


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + GAMMA) & MASK64
        return mix64(self.state)

    def block(self, n: int) -> np.ndarray:
        """The next n outputs as uint64, same values as n calls to :meth:`next`."""
        k = np.arange(1, n + 1, dtype=np.uint64)
        with np.errstate(over="ignore"):
            z = np.uint64(self.state) + k * np.uint64(GAMMA)
            z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
            z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
            z = z ^ (z >> np.uint64(31))
        self.state = (self.state + n * GAMMA) & MASK64
        return z

    def below(self, k: int) -> int:
        return (self.next() * k) >> 64

    def uniforms(self, n: int) -> np.ndarray:
        return (self.block(n) >> np.uint64(11)).astype(np.float64) * 2.0**-53

    def signs(self, n: int) -> np.ndarray:
        return np.where(self.block(n) >> np.uint64(63), -1, 1).astype(np.int64)


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def random_littlewood(q: int, p: float, seed: int, endpoint_convention: bool = False) -> SignSequence:
    """Sign sequence with exactly ``round(p*q)`` entries equal to -1.

    Positions come from a partial Fisher-Yates shuffle of the candidate slots.
    With ``endpoint_convention`` both endpoints are +1 and the -1 entries go to
    the interior; a count that does not fit is clamped with a :class:`ClampWarning`.
    """
    if q < 1:
        raise ValueError(f"q must be >= 1, got {q}")
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    target = _round_half_up(p * q)
    if endpoint_convention:
        slots = list(range(1, q - 1))
        if target > len(slots):
            warnings.warn(
                f"{target} minus signs requested but only {len(slots)} interior slots",
                ClampWarning,
                stacklevel=2,
            )
            target = len(slots)
    else:
        slots = list(range(q))
    rng = SplitMix64(seed)
    n = len(slots)
    for i in range(target):
        j = i + rng.below(n - i)
        slots[i], slots[j] = slots[j], slots[i]
    eps = np.ones(q, dtype=np.int64)
    eps[slots[:target]] = -1
    return SignSequence(eps)


def rudin_shapiro(k: int) -> SignSequence:
    """First member of the pair recurrence ``(P, Q) -> (P|Q, P|-Q)`` from ``(+1, +1)``."""
    if not 0 <= k <= 24:
        raise ValueError(f"k must lie in [0, 24], got {k}")
    p = np.ones(1, dtype=np.int64)
    r = np.ones(1, dtype=np.int64)
    for _ in range(k):
        p, r = np.concatenate([p, r]), np.concatenate([p, -r])
    return SignSequence(p)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


def legendre_fekete(prime: int) -> SignSequence:
    """Legendre symbols ``(j | prime)`` for j >= 1 with entry 0 set to +1."""
    if prime == 2 or not is_prime(prime):
        raise ValueError(f"{prime} is not an odd prime")
    eps = np.full(prime, -1, dtype=np.int64)
    j = np.arange(1, prime, dtype=np.int64)
    eps[(j * j) % prime] = 1
    eps[0] = 1
    return SignSequence(eps)


def random_palindromic(n_even: int, seed: int) -> SignSequence:
    """Random palindrome of even degree ``n_even`` (length ``n_even + 1``)."""
    if n_even < 0 or n_even % 2:
        raise ValueError(f"degree must be even and >= 0, got {n_even}")
    h = n_even // 2
    half = SplitMix64(seed).signs(h + 1)
    return SignSequence(np.concatenate([half, half[:h][::-1]]))


def nb_random(q: int, density: float, seed: int) -> BinarySequence:
    """0/1 sequence with both endpoints 1 and independent interior bits."""
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")
    if not 0.0 < density <= 1.0:
        raise ValueError(f"density must lie in (0, 1], got {density}")
    eta = np.ones(q, dtype=np.int64)
    if q > 2:
        eta[1:-1] = SplitMix64(seed).uniforms(q - 2) < density
    return BinarySequence(eta)


@dataclass(frozen=True)
class FamilySpec:
    """A seeded family; ``generate(q, trial)`` is a pure function of its inputs.

    The size ``q`` is read per kind: the length for ``random_p`` and
    ``nb_density``; ``2**k`` for ``rudin_shapiro``; the prime for ``legendre``;
    an odd length ``n + 1`` for ``palindromic_random``.
    """

    kind: str
    p: float = 0.5
    density: float = 0.5
    prime: int | None = None
    k: int | None = None
    seed: int = 0
    endpoint_convention: bool = False

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ValueError(f"unknown family {self.kind!r}; choose from {', '.join(FAMILY_KINDS)}")
        if not 0.0 <= self.p <= 1.0:
            raise ValueError(f"p must lie in [0, 1], got {self.p}")
        if not 0.0 < self.density <= 1.0:
            raise ValueError(f"density must lie in (0, 1], got {self.density}")

    @property
    def is_binary(self) -> bool:
        return self.kind == "nb_density"

    def fixed_size(self) -> int | None:
        """Length implied by the parameters alone, if any."""
        if self.kind == "rudin_shapiro" and self.k is not None:
            return 1 << self.k
        if self.kind == "legendre" and self.prime is not None:
            return self.prime
        return None

    def generate(self, q: int | None = None, trial: int = 0):
        if q is None:
            q = self.fixed_size()
            if q is None:
                raise ValueError(f"family {self.kind} needs a size q")
        sub = derive_seed(self.seed, q, trial)
        if self.kind == "random_p":
            return random_littlewood(q, self.p, sub, self.endpoint_convention)
        if self.kind == "rudin_shapiro":
            if q & (q - 1):
                raise ValueError(f"rudin_shapiro needs q a power of two, got {q}")
            return rudin_shapiro(q.bit_length() - 1)
        if self.kind == "legendre":
            return legendre_fekete(q)
        if self.kind == "palindromic_random":
            if q % 2 == 0:
                raise ValueError(f"palindromic_random needs odd q, got {q}")
            return random_palindromic(q - 1, sub)
        return nb_random(q, self.density, sub)

    def to_config(self) -> str:
        """``key=value`` pairs separated by spaces; inverse of :meth:`from_config`."""
        parts = []
        for f in fields(self):
            v = getattr(self, f.name)
            if v is None:
                continue
            if isinstance(v, bool):
                v = int(v)
            parts.append(f"{f.name}={v}")
        return " ".join(parts)

    @classmethod
    def from_config(cls, text: str) -> "FamilySpec":
        kw = {}
        for tok in text.replace("\n", " ").split():
            if "=" not in tok:
                raise ValueError(f"expected key=value, got {tok!r}")
            key, val = tok.split("=", 1)
            kw[key.strip()] = val.strip()
        return cls.from_mapping(kw)

    @classmethod
    def from_mapping(cls, kw: dict) -> "FamilySpec":
        known = {f.name for f in fields(cls)}
        unknown = set(kw) - known
        if unknown:
            raise ValueError(f"unknown family keys: {', '.join(sorted(unknown))}")
        conv = {
            "p": float,
            "density": float,
            "prime": int,
            "k": int,
            "seed": int,
            "endpoint_convention": lambda v: str(v).lower() in ("1", "true", "yes"),
        }
        args = {key: (conv[key](val) if key in conv and val is not None else val) for key, val in kw.items()}
        return cls(**args)

    def as_dict(self) -> dict:
        return asdict(self)
