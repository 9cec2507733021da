"""Sparse q-expansions of vector-valued Siegel modular forms mod p.

A q-expansion stores, for each positive semidefinite T with a + c at most
``max_trace``, the coefficient vector (A_{F_0}(T), ..., A_{F_r}(T)) over F_p.
Vectors are tuples of canonical representatives in [0, p).
"""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .core import (
    ParameterMismatch,
    ThetaError,
    TMatrix,
    ValidationError,
    Weight,
    check_prime,
    theta_target_weight,
)


class UnsupportedProduct(ThetaError):
    code = "UnsupportedProduct"


@dataclass(frozen=True)
class QExpansion:
    p: int
    N: int
    weight: Weight
    max_trace: int
    coeffs: Mapping[TMatrix, tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        check_prime(self.p)
        if not isinstance(self.N, int) or self.N < 3:
            raise ValidationError(f"level N must be an integer >= 3, got {self.N!r}")
        if self.N % self.p == 0:
            raise ValidationError(f"p={self.p} divides N={self.N}", p=self.p, N=self.N)
        if not isinstance(self.max_trace, int) or self.max_trace < 0:
            raise ValidationError(f"max_trace must be a non-negative integer, got {self.max_trace!r}")
        if self.weight.k2 < 0:
            warnings.warn(f"weight {self.weight.to_list()} has k2 < 0; such spaces vanish "
                          "for |k2| large", stacklevel=3)
        width = self.weight.r + 1
        clean = {}
        for t, v in self.coeffs.items():
            if not isinstance(t, TMatrix):
                t = TMatrix(*t)
            if not t.is_psd():
                raise ValidationError(f"T={t.to_list()} is not positive semidefinite")
            if t.trace > self.max_trace:
                raise ValidationError(f"T={t.to_list()} exceeds max_trace={self.max_trace}")
            v = tuple(int(x) % self.p for x in v)
            if len(v) != width:
                raise ValidationError(f"vector at T={t.to_list()} has length {len(v)}, "
                                      f"expected r+1={width}")
            if any(v):
                clean[t] = v
        object.__setattr__(self, "coeffs", dict(sorted(clean.items())))

    # -- basic queries -------------------------------------------------

    @property
    def r(self) -> int:
        return self.weight.r

    def coefficient(self, t: TMatrix) -> tuple[int, ...]:
        return self.coeffs.get(t, (0,) * (self.r + 1))

    def support(self) -> list[TMatrix]:
        return list(self.coeffs)

    def is_zero(self) -> bool:
        return not self.coeffs

    def __len__(self):
        return len(self.coeffs)

    def same_coefficients(self, other: "QExpansion") -> bool:
        return self.p == other.p and dict(self.coeffs) == dict(other.coeffs)

    def replace(self, **kw) -> "QExpansion":
        data = dict(p=self.p, N=self.N, weight=self.weight,
                    max_trace=self.max_trace, coeffs=self.coeffs)
        data.update(kw)
        return QExpansion(**data)

    def restrict(self, max_trace: int) -> "QExpansion":
        if max_trace > self.max_trace:
            raise ValidationError("cannot extend a truncated expansion")
        return self.replace(max_trace=max_trace,
                            coeffs={t: v for t, v in self.coeffs.items() if t.trace <= max_trace})

    def scale(self, alpha: int) -> "QExpansion":
        return self.replace(coeffs={t: tuple(alpha * x for x in v) for t, v in self.coeffs.items()})

    def __neg__(self):
        return self.scale(-1)

    def __add__(self, other):
        return qexp_add(self, other)

    def __sub__(self, other):
        return qexp_add(self, -other)

    # -- JSON ----------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "N": self.N,
            "weight": self.weight.to_list(),
            "max_trace": self.max_trace,
            "coeffs": [{"T": t.to_list(), "v": list(v)} for t, v in self.coeffs.items()],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, data) -> "QExpansion":
        if not isinstance(data, dict):
            raise ValidationError("q-expansion document must be a JSON object")
        missing = {"p", "N", "weight", "max_trace", "coeffs"} - set(data)
        if missing:
            raise ValidationError(f"missing keys: {sorted(missing)}")
        extra = set(data) - {"p", "N", "weight", "max_trace", "coeffs"}
        if extra:
            raise ValidationError(f"unknown keys: {sorted(extra)}")
        p = check_prime(data["p"])
        coeffs = {}
        for entry in data["coeffs"]:
            if not isinstance(entry, dict) or set(entry) != {"T", "v"}:
                raise ValidationError(f"bad coefficient entry {entry!r}")
            t = TMatrix.from_list(entry["T"])
            v = entry["v"]
            if not isinstance(v, list) or not all(isinstance(x, int) and not isinstance(x, bool)
                                                  and 0 <= x < p for x in v):
                raise ValidationError(f"entries of v must be integers in [0, {p}): {v!r}")
            if t in coeffs:
                raise ValidationError(f"duplicate T={t.to_list()}")
            coeffs[t] = tuple(v)
        return cls(p, data["N"], Weight.from_list(data["weight"]), data["max_trace"], coeffs)

    @classmethod
    def from_json(cls, text: str) -> "QExpansion":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ValidationError(f"invalid JSON: {exc}") from exc
        return cls.from_dict(data)


def zero(p: int, N: int, weight: Weight, max_trace: int) -> QExpansion:
    return QExpansion(p, N, weight, max_trace, {})


def hasse(p: int, N: int, max_trace: int) -> QExpansion:
    """The Hasse invariant: constant q-expansion 1 of weight (p-1, p-1)."""
    return QExpansion(p, N, Weight(p - 1, p - 1), max_trace, {TMatrix(0, 0, 0): (1,)})


def monomial(p: int, N: int, weight: Weight, max_trace: int, t: TMatrix,
             v: Iterable[int] | None = None) -> QExpansion:
    v = tuple(v) if v is not None else (1,) + (0,) * weight.r
    return QExpansion(p, N, weight, max_trace, {t: v})


def _check_compatible(f: QExpansion, g: QExpansion, same_weight: bool):
    if f.p != g.p or f.N != g.N:
        raise ParameterMismatch(f"(p, N) differ: ({f.p}, {f.N}) vs ({g.p}, {g.N})")
    if same_weight and f.weight != g.weight:
        raise ParameterMismatch(f"weights differ: {f.weight.to_list()} vs {g.weight.to_list()}")


def qexp_add(f: QExpansion, g: QExpansion) -> QExpansion:
    _check_compatible(f, g, same_weight=True)
    bound = min(f.max_trace, g.max_trace)
    p = f.p
    out: dict[TMatrix, tuple[int, ...]] = {}
    for t in set(f.coeffs) | set(g.coeffs):
        if t.trace > bound:
            continue
        v = tuple((x + y) % p for x, y in zip(f.coefficient(t), g.coefficient(t)))
        if any(v):
            out[t] = v
    return QExpansion(p, f.N, f.weight, bound, out)


def qexp_multiply(f: QExpansion, g: QExpansion) -> QExpansion:
    """Cauchy product; at least one factor must be scalar-valued (r = 0)."""
    _check_compatible(f, g, same_weight=False)
    if f.r > 0 and g.r > 0:
        raise UnsupportedProduct("product of two vector-valued expansions is not supported")
    if f.r > 0:
        f, g = g, f
    weight = f.weight + g.weight
    bound = min(f.max_trace, g.max_trace)
    p = f.p
    out: dict[TMatrix, list[int]] = {}
    for t1, (s,) in f.coeffs.items():
        if t1.trace > bound:
            continue
        for t2, v in g.coeffs.items():
            t = t1 + t2
            if t.trace > bound:
                continue
            acc = out.setdefault(t, [0] * len(v))
            for i, x in enumerate(v):
                acc[i] = (acc[i] + s * x) % p
    return QExpansion(p, f.N, weight, bound, {t: tuple(v) for t, v in out.items()})


def theta_multiplier(p: int, N: int, t: TMatrix) -> int:
    """det(T) / N^2 in F_p: the factor by which the big theta scales A(T)."""
    return t.det * pow(N * N, -1, p) % p


def theta_qexp(f: QExpansion) -> QExpansion:
    """The big theta operator on q-expansions: A(T) -> det(T) N^-2 A(T)."""
    p = f.p
    inv = pow(f.N * f.N, -1, p)
    out = {}
    for t, v in f.coeffs.items():
        m = t.det * inv % p
        if m:
            out[t] = tuple(m * x % p for x in v)
    return QExpansion(p, f.N, theta_target_weight(p, f.weight), f.max_trace, out)


def theta_iterate(f: QExpansion, j: int) -> QExpansion:
    if not isinstance(j, int) or j < 0:
        raise ValidationError(f"iteration count must be a non-negative integer, got {j!r}")
    for _ in range(j):
        f = theta_qexp(f)
    return f


def is_weakly_p_singular(f: QExpansion) -> bool:
    """True when no stored T with p not dividing det T carries a nonzero vector.

    The verdict only covers T with a + c <= max_trace.
    """
    return all(t.det % f.p == 0 for t in f.coeffs)


def theta3_weight(p: int, w: Weight) -> Weight:
    """Target weight of the small theta operator (its q-expansion is not modeled)."""
    return w + Weight(p + 1, p - 1)
