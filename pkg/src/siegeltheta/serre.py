"""Classical Serre weights (k1, k2, w) from a description of the local representation at p."""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from enum import Enum

from .core import ThetaError, ValidationError, check_prime


class NoValidRepresentative(ThetaError):
    code = "NoValidRepresentative"


class CaseMismatch(ValidationError):
    code = "CaseMismatch"


class RamFlag(str, Enum):
    PEU = "peu"
    RAMIFIED = "ramified"
    TRES = "tres"

    @classmethod
    def parse(cls, value) -> "RamFlag":
        if isinstance(value, cls):
            return value
        try:
            return cls(value)
        except ValueError:
            raise ValidationError(f"unknown ramification flag {value!r}; "
                                  f"expected one of {[f.value for f in cls]}") from None


def r_value(p: int, flag: RamFlag) -> int:
    return 0 if RamFlag.parse(flag) is RamFlag.PEU else p - 1


def _delta(p: int, i: int, j: int) -> tuple[int, int]:
    return (p - 1, p - 1) if i == j else (0, 0)


@dataclass(frozen=True)
class SerreWeight:
    k1: int
    k2: int
    w: int

    def key(self) -> tuple[int, int, int]:
        return (self.k2, self.k1, self.w)

    def checks(self) -> dict:
        # reported, not enforced
        return {"k1_ge_k2": self.k1 >= self.k2, "k2_ge_3": self.k2 >= 3}

    def to_dict(self) -> dict:
        return {"k1": self.k1, "k2": self.k2, "w": self.w}

    def to_tuple(self) -> tuple[int, int, int]:
        return (self.k1, self.k2, self.w)


def _ints(**kw):
    for name, v in kw.items():
        if isinstance(v, bool) or not isinstance(v, int):
            raise ValidationError(f"{name} must be an integer, got {v!r}")


def _check_ab_window(p: int, a: int, b: int):
    if not 0 <= b < a <= p:
        raise ValidationError(f"need 0 <= b < a <= p, got a={a}, b={b}, p={p}", p=p, a=a, b=b)


# ---------------------------------------------------------------------------
# descriptors


@dataclass(frozen=True)
class Borel:
    p: int
    a: int
    b: int
    c: int
    ram_b1: RamFlag = RamFlag.PEU
    ram_b2: RamFlag = RamFlag.PEU
    ram_b3: RamFlag = RamFlag.PEU
    ram_t0: RamFlag = RamFlag.PEU

    def __post_init__(self):
        check_prime(self.p)
        _ints(a=self.a, b=self.b, c=self.c)
        for name in ("ram_b1", "ram_b2", "ram_b3", "ram_t0"):
            object.__setattr__(self, name, RamFlag.parse(getattr(self, name)))
        if not (0 <= self.a <= self.p - 2 and 0 <= self.b <= self.p - 2):
            raise ValidationError(f"Borel needs 0 <= a, b <= p-2, got a={self.a}, b={self.b}",
                                  p=self.p, a=self.a, b=self.b)
        if self.ram_t0 is RamFlag.TRES and self.b != 1:
            raise ValidationError("t0 tres ramifiee requires b = 1", b=self.b)
        if self.ram_t0 is RamFlag.RAMIFIED and self.b != 0:
            raise ValidationError("t0 ramified requires b = 0", b=self.b)


@dataclass(frozen=True)
class Siegel:
    p: int
    a: int
    b: int
    c: int
    ram_t3: RamFlag = RamFlag.PEU

    def __post_init__(self):
        check_prime(self.p)
        _ints(a=self.a, b=self.b, c=self.c)
        object.__setattr__(self, "ram_t3", RamFlag.parse(self.ram_t3))
        _check_ab_window(self.p, self.a, self.b)


@dataclass(frozen=True)
class KlingenGeneric:
    p: int
    a: int
    b: int
    c: int
    ram_t: RamFlag = RamFlag.PEU

    def __post_init__(self):
        check_prime(self.p)
        _ints(a=self.a, b=self.b, c=self.c)
        object.__setattr__(self, "ram_t", RamFlag.parse(self.ram_t))
        _check_ab_window(self.p, self.a, self.b)
        if 2 * (self.a - self.b) % (self.p + 1) == 0:
            raise CaseMismatch(f"(p+1) divides 2(a-b)={2 * (self.a - self.b)}; use KlingenSplit")

    @property
    def r(self) -> int:
        return r_value(self.p, self.ram_t)


@dataclass(frozen=True)
class KlingenSplit:
    p: int
    a: int
    b: int
    c: int
    ram_max: RamFlag = RamFlag.PEU

    def __post_init__(self):
        check_prime(self.p)
        _ints(a=self.a, b=self.b, c=self.c)
        object.__setattr__(self, "ram_max", RamFlag.parse(self.ram_max))
        _check_ab_window(self.p, self.a, self.b)
        if 2 * (self.a - self.b) != self.p + 1:
            raise CaseMismatch(f"split case needs a-b=(p+1)/2, got a-b={self.a - self.b}")

    @property
    def r(self) -> int:
        return r_value(self.p, self.ram_max)


@dataclass(frozen=True)
class Endoscopic:
    p: int
    candidates: tuple[SerreWeight, ...] = field(default=())

    def __post_init__(self):
        check_prime(self.p)
        object.__setattr__(self, "candidates", tuple(self.candidates))


@dataclass(frozen=True)
class Irreducible:
    p: int
    a: int
    c: int
    candidates: tuple[SerreWeight, ...] = field(default=())

    def __post_init__(self):
        check_prime(self.p)
        _ints(a=self.a, c=self.c)
        object.__setattr__(self, "candidates", tuple(self.candidates))


# ---------------------------------------------------------------------------
# weight formulas

BOREL_MODES = ("uniform", "max23")


def serre_weight_borel(d: Borel, mode: str = "uniform") -> SerreWeight:
    """Borel ordinary case.

    ``mode="uniform"`` takes the max over all three b_i in the a > b row;
    ``"max23"`` drops b1 from that max (the peu ramifiee variant).
    """
    if mode not in BOREL_MODES:
        raise ValidationError(f"unknown Borel mode {mode!r}")
    p, a, b = d.p, d.a, d.b
    rs = [r_value(p, d.ram_b1), r_value(p, d.ram_b2), r_value(p, d.ram_b3)]
    rt = r_value(p, d.ram_t0)
    if a > b:
        top = max(rs) if mode == "uniform" else max(rs[1:])
        dk = _delta(p, b, 0)
        k1, k2 = 1 + a + top + rt + dk[0], 2 + b + rt + dk[1]
    elif a == b:
        dk = _delta(p, a, 0)
        k1, k2 = 1 + a + p - 1 + rt + dk[0], 2 + a + rt + dk[1]
    else:
        k1, k2 = 1 + a + p - 1 + rs[2] + rt, 2 + b + rt
    return SerreWeight(k1, k2, d.c)


def serre_weight_siegel(d: Siegel) -> SerreWeight:
    r = r_value(d.p, d.ram_t3)
    dk = _delta(d.p, d.b, 0)
    return SerreWeight(1 + d.a + r + dk[0], 2 + d.b + r + dk[1], d.c)


def _klingen(p: int, a: int, b: int, c: int, r: int) -> SerreWeight:
    if 2 * b > c - r:
        return SerreWeight(1 + a + b - c + r, 2 + a - b, c - r - a)
    return SerreWeight(1 + a + b + 2 * (p - 1) - c + r, 2 + a - b, c - r - a - (p - 1))


def serre_weight_klingen(d: KlingenGeneric | KlingenSplit) -> SerreWeight:
    if not isinstance(d, (KlingenGeneric, KlingenSplit)):
        raise CaseMismatch(f"expected a Klingen descriptor, got {type(d).__name__}")
    return _klingen(d.p, d.a, d.b, d.c, d.r)


def serre_weight_klingen_p2(c: int, ram: RamFlag = RamFlag.PEU) -> SerreWeight:
    _ints(c=c)
    return _klingen(2, 1, 0, c, r_value(2, ram))


def sw_min(candidates) -> SerreWeight:
    """Lexicographic minimum: k2 first, then k1, then w."""
    cands = list(candidates)
    if not cands:
        raise ValidationError("sw_min needs a non-empty candidate set")
    return min(cands, key=SerreWeight.key)


def omega2_normalize(p: int, a: int, b: int) -> tuple[int, int]:
    """Shift (a, b) by a multiple of (p-1, p-1) into 0 <= b < a <= p.

    When two shifts qualify (a - b = 1, b = 0 mod p-1) the one with the
    smaller b is returned.
    """
    check_prime(p)
    _ints(a=a, b=b)
    step = p - 1
    m = -(b // step)  # smallest shift with b + m*step >= 0
    while a + m * step <= p:
        bb, aa = b + m * step, a + m * step
        if 0 <= bb < aa <= p:
            return aa, bb
        m += 1
    raise NoValidRepresentative(f"no shift of ({a},{b}) by multiples of {step} lies in 0 <= b < a <= {p}",
                                p=p, a=a, b=b)


def omega4_digits(p: int, a: int) -> tuple[int, int, int, int, bool]:
    check_prime(p)
    x = a % (p ** 4 - 1)
    digits = []
    for _ in range(4):
        x, d = divmod(x, p)
        digits.append(d)
    return (*digits, len(set(digits)) == 4)


# ---------------------------------------------------------------------------
# JSON descriptors

_RAM_KEYS = {
    "borel": ("b1", "b2", "b3", "t0"),
    "siegel": ("t3",),
    "klingen": ("t", "max"),
    "klingen2": ("t",),
    "endoscopic": (),
    "irreducible": (),
}

_FIELDS = {
    "borel": {"type", "p", "a", "b", "c", "ram", "mode"},
    "siegel": {"type", "p", "a", "b", "c", "ram"},
    "klingen": {"type", "p", "a", "b", "c", "ram"},
    "klingen2": {"type", "p", "c", "ram"},
    "endoscopic": {"type", "p", "candidates"},
    "irreducible": {"type", "p", "a", "c", "candidates"},
}

_REQUIRED = {
    "borel": {"p", "a", "b", "c"},
    "siegel": {"p", "a", "b", "c"},
    "klingen": {"p", "a", "b", "c"},
    "klingen2": {"c"},
    "endoscopic": {"p", "candidates"},
    "irreducible": {"p", "a", "c"},
}


def _candidates(raw) -> tuple[SerreWeight, ...]:
    if not isinstance(raw, list):
        raise ValidationError("candidates must be a list of [k1, k2, w]")
    out = []
    for item in raw:
        if not (isinstance(item, list) and len(item) == 3):
            raise ValidationError(f"candidate must be [k1, k2, w], got {item!r}")
        _ints(k1=item[0], k2=item[1], w=item[2])
        out.append(SerreWeight(*item))
    return tuple(out)


def descriptor_from_dict(data: dict):
    """Build a descriptor from its JSON form; ``(descriptor, mode)`` for Borel."""
    if not isinstance(data, dict):
        raise ValidationError("descriptor must be a JSON object")
    kind = data.get("type")
    if kind not in _FIELDS:
        raise ValidationError(f"unknown descriptor type {kind!r}")
    extra = set(data) - _FIELDS[kind]
    if extra:
        raise ValidationError(f"unknown keys for {kind}: {sorted(extra)}")
    missing = _REQUIRED[kind] - set(data)
    if missing:
        raise ValidationError(f"missing keys for {kind}: {sorted(missing)}")
    ram = data.get("ram", {})
    if not isinstance(ram, dict):
        raise ValidationError("ram must be an object")
    bad = set(ram) - set(_RAM_KEYS[kind])
    if bad:
        raise ValidationError(f"unknown ram keys for {kind}: {sorted(bad)}")
    flags = {k: RamFlag.parse(v) for k, v in ram.items()}
    peu = RamFlag.PEU

    if kind == "borel":
        return Borel(data["p"], data["a"], data["b"], data["c"],
                     flags.get("b1", peu), flags.get("b2", peu),
                     flags.get("b3", peu), flags.get("t0", peu))
    if kind == "siegel":
        return Siegel(data["p"], data["a"], data["b"], data["c"], flags.get("t3", peu))
    if kind == "klingen":
        p, a, b = data["p"], data["a"], data["b"]
        _ints(p=p, a=a, b=b)
        if 2 * (a - b) == p + 1:
            if "t" in flags:
                raise ValidationError("split Klingen case takes ram key 'max', not 't'")
            return KlingenSplit(p, a, b, data["c"], flags.get("max", peu))
        if "max" in flags:
            raise ValidationError("generic Klingen case takes ram key 't', not 'max'")
        return KlingenGeneric(p, a, b, data["c"], flags.get("t", peu))
    if kind == "klingen2":
        if data.get("p", 2) != 2:
            raise ValidationError("klingen2 descriptors have p = 2")
        return KlingenGeneric(2, 1, 0, data["c"], flags.get("t", peu))
    if kind == "endoscopic":
        return Endoscopic(data["p"], _candidates(data["candidates"]))
    return Irreducible(data["p"], data["a"], data["c"], _candidates(data.get("candidates", [])))


def descriptor_to_dict(d, mode: str = "uniform") -> dict:
    if isinstance(d, Borel):
        out = {"type": "borel", "p": d.p, "a": d.a, "b": d.b, "c": d.c,
               "ram": {"b1": d.ram_b1.value, "b2": d.ram_b2.value,
                       "b3": d.ram_b3.value, "t0": d.ram_t0.value}}
        if mode != "uniform":
            out["mode"] = mode
        return out
    if isinstance(d, Siegel):
        return {"type": "siegel", "p": d.p, "a": d.a, "b": d.b, "c": d.c,
                "ram": {"t3": d.ram_t3.value}}
    if isinstance(d, KlingenGeneric):
        return {"type": "klingen", "p": d.p, "a": d.a, "b": d.b, "c": d.c,
                "ram": {"t": d.ram_t.value}}
    if isinstance(d, KlingenSplit):
        return {"type": "klingen", "p": d.p, "a": d.a, "b": d.b, "c": d.c,
                "ram": {"max": d.ram_max.value}}
    if isinstance(d, Endoscopic):
        return {"type": "endoscopic", "p": d.p,
                "candidates": [list(s.to_tuple()) for s in d.candidates]}
    if isinstance(d, Irreducible):
        return {"type": "irreducible", "p": d.p, "a": d.a, "c": d.c,
                "candidates": [list(s.to_tuple()) for s in d.candidates]}
    raise ValidationError(f"not a descriptor: {d!r}")


def descriptor_to_json(d, mode: str = "uniform") -> str:
    return json.dumps(descriptor_to_dict(d, mode), sort_keys=True)


def serre_weight(d, mode: str = "uniform") -> SerreWeight:
    """Dispatch on descriptor type."""
    if isinstance(d, Borel):
        return serre_weight_borel(d, mode)
    if isinstance(d, Siegel):
        return serre_weight_siegel(d)
    if isinstance(d, (KlingenGeneric, KlingenSplit)):
        return serre_weight_klingen(d)
    if isinstance(d, Endoscopic):
        return sw_min(d.candidates)
    if isinstance(d, Irreducible):
        if not d.candidates:
            raise ValidationError("irreducible case needs a candidate set")
        return sw_min(d.candidates)
    raise ValidationError(f"not a descriptor: {d!r}")


def weight_from_dict(data: dict) -> SerreWeight:
    mode = data.get("mode", "uniform") if isinstance(data, dict) else "uniform"
    return serre_weight(descriptor_from_dict(data), mode)
