"""Shared exact arithmetic: primes, weights, half-integral T-matrices, F_p elements.

Everything here is immutable; all helpers are pure functions.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache


class ThetaError(Exception):
    """Base error; ``code`` is a stable machine-readable string."""

    code = "ThetaError"

    def __init__(self, message: str = "", **details):
        super().__init__(message)
        self.details = details

    def to_dict(self) -> dict:
        out = {"code": self.code, "message": str(self)}
        if self.details:
            out["details"] = self.details
        return out


class ValidationError(ThetaError, ValueError):
    code = "ValidationError"


class ParameterMismatch(ValidationError):
    code = "ParameterMismatch"


class IndexOutOfRange(ValidationError, IndexError):
    code = "IndexOutOfRange"


@lru_cache(maxsize=1024)
def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def check_prime(p) -> int:
    """Return ``p`` as an int, raising ValidationError unless it is a prime."""
    if isinstance(p, bool) or not isinstance(p, int):
        raise ValidationError(f"p must be an integer, got {p!r}")
    if not is_prime(p):
        raise ValidationError(f"p={p} is not prime", p=p)
    return p


def odd_primes(upto: int) -> list[int]:
    return [q for q in range(3, upto + 1) if is_prime(q)]


@dataclass(frozen=True)
class Weight:
    """Weight (k1, k2) with k1 >= k2; k2 may be negative."""

    k1: int
    k2: int

    def __post_init__(self):
        if self.k1 < self.k2:
            raise ValidationError(f"weight needs k1 >= k2, got ({self.k1},{self.k2})")

    @property
    def r(self) -> int:
        return self.k1 - self.k2

    def __add__(self, other: "Weight") -> "Weight":
        return Weight(self.k1 + other.k1, self.k2 + other.k2)

    def to_list(self) -> list[int]:
        return [self.k1, self.k2]

    @classmethod
    def from_list(cls, data) -> "Weight":
        if not (isinstance(data, (list, tuple)) and len(data) == 2
                and all(isinstance(x, int) and not isinstance(x, bool) for x in data)):
            raise ValidationError(f"weight must be [k1, k2], got {data!r}")
        return cls(data[0], data[1])


@dataclass(frozen=True, order=True)
class TMatrix:
    """The half-integral matrix [[2a, b], [b, 2c]], stored as (a, b, c).

    Equality is structural; no GL2(Z) reduction is attempted.
    """

    a: int
    b: int
    c: int

    @property
    def det(self) -> int:
        return 4 * self.a * self.c - self.b * self.b

    @property
    def trace(self) -> int:
        # trace of (a, b, c) as used for truncation; the true trace is 2(a + c)
        return self.a + self.c

    def is_psd(self) -> bool:
        return self.a >= 0 and self.c >= 0 and self.det >= 0

    def __add__(self, other: "TMatrix") -> "TMatrix":
        return TMatrix(self.a + other.a, self.b + other.b, self.c + other.c)

    def to_list(self) -> list[int]:
        return [self.a, self.b, self.c]

    @classmethod
    def from_list(cls, data) -> "TMatrix":
        if not (isinstance(data, (list, tuple)) and len(data) == 3
                and all(isinstance(x, int) and not isinstance(x, bool) for x in data)):
            raise ValidationError(f"T must be [a, b, c], got {data!r}")
        return cls(*data)


def det_t(t: TMatrix) -> int:
    return t.det


def psd_matrices(max_trace: int):
    """All positive semidefinite T with a + c <= max_trace, in sorted order."""
    found = []
    for a in range(max_trace + 1):
        for c in range(max_trace - a + 1):
            bound = math.isqrt(4 * a * c)
            found.extend(TMatrix(a, b, c) for b in range(-bound, bound + 1))
    yield from sorted(found)


@dataclass(frozen=True)
class FpElem:
    """Element of F_p held by its canonical representative in [0, p)."""

    value: int
    p: int

    def __post_init__(self):
        object.__setattr__(self, "value", self.value % self.p)

    def _coerce(self, other) -> int:
        if isinstance(other, FpElem):
            if other.p != self.p:
                raise ParameterMismatch(f"F_{self.p} vs F_{other.p}")
            return other.value
        return other % self.p

    def __add__(self, other):
        return FpElem(self.value + self._coerce(other), self.p)

    __radd__ = __add__

    def __sub__(self, other):
        return FpElem(self.value - self._coerce(other), self.p)

    def __rsub__(self, other):
        return FpElem(self._coerce(other) - self.value, self.p)

    def __mul__(self, other):
        return FpElem(self.value * self._coerce(other), self.p)

    __rmul__ = __mul__

    def __neg__(self):
        return FpElem(-self.value, self.p)

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        return FpElem(pow(self.value, e, self.p), self.p)

    def inverse(self) -> "FpElem":
        if self.value == 0:
            raise ZeroDivisionError(f"0 has no inverse in F_{self.p}")
        return FpElem(pow(self.value, -1, self.p), self.p)

    def __truediv__(self, other):
        return self * FpElem(self._coerce(other), self.p).inverse()

    def __eq__(self, other):
        if isinstance(other, FpElem):
            return self.p == other.p and self.value == other.value
        if isinstance(other, int):
            return (other - self.value) % self.p == 0
        return NotImplemented

    def __hash__(self):
        return hash((self.value, self.p))

    def __int__(self):
        return self.value

    def __repr__(self):
        return f"{self.value} (mod {self.p})"


def m_shift(p: int, w: Weight) -> Weight:
    """Extra parallel weight picked up by the big theta operator."""
    if p == 2:
        return Weight(0, 0)
    if w.r <= 1:
        return Weight(p - 1, p - 1)
    return Weight(2 * p - 2, 2 * p - 2)


def theta_target_weight(p: int, w: Weight) -> Weight:
    return w + Weight(2, 2) + m_shift(p, w)


def weight_key(w: Weight) -> tuple[int, int]:
    # second entries are compared first
    return (w.k2, w.k1)


def weight_lex_le(w1: Weight, w2: Weight) -> bool:
    return weight_key(w1) <= weight_key(w2)


def delta_p(p: int, i: int, j: int) -> Weight:
    return Weight(p - 1, p - 1) if i == j else Weight(0, 0)
