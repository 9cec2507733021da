"""Theta cycles: closed forms, degenerate cycles, and a low-point solver.

Only second entries of filtrations are tracked; the big theta preserves
r = k1 - k2, so the first entry is always ``value + r``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from .core import ThetaError, ValidationError, check_prime


class CongruenceExcluded(ThetaError):
    code = "CongruenceExcluded"


class IndeterminateStep(ThetaError):
    code = "IndeterminateStep"


class UnsupportedClosedForm(ThetaError):
    code = "UnsupportedClosedForm"


@dataclass(frozen=True)
class LowPoint:
    """A drop in the cycle.

    ``low_number`` counts the steps of the run ending in the drop,
    ``jumping_number`` is the drop in units of p - 1, and ``anchor`` is the
    value reached after the drop.
    """

    type: int
    low_number: int
    jumping_number: int
    anchor: int

    def to_dict(self) -> dict:
        return {"type": self.type, "low_number": self.low_number,
                "jumping_number": self.jumping_number, "anchor": self.anchor}


@dataclass(frozen=True)
class CycleResult:
    p: int
    r: int
    k: int
    values: tuple[int, ...]
    low_points: tuple[LowPoint, ...]
    provenance: str
    semi_ordinary: bool = False
    # value the low-point structure starts from: k, or k + p + 1 when semi-ordinary
    anchor: int | None = None
    flags: tuple[str, ...] = field(default=())

    def to_dict(self) -> dict:
        out = {
            "p": self.p,
            "r": self.r,
            "k": self.k,
            "semi_ordinary": self.semi_ordinary,
            "values": list(self.values),
            "low_points": [lp.to_dict() for lp in self.low_points],
            "provenance": self.provenance,
            "anchor": self.k if self.anchor is None else self.anchor,
            "flags": list(self.flags),
        }
        if "r0_deferred" in self.flags:
            out["caveat"] = ("r = 0 cycles come from the constraint solver only; "
                             "they are not checked against a closed form")
        return out

    def structure(self) -> tuple[tuple[int, int, int], ...]:
        return tuple((lp.type, lp.low_number, lp.jumping_number) for lp in self.low_points)


def k0_of(p: int, k: int) -> int:
    """The residue k0 with k = a p + k0 and 1 <= k0 <= p."""
    return (k - 1) % p + 1


def cycle_length(p: int) -> int:
    return 1 if p == 2 else (p - 1) // 2


def is_trigger(p: int, r: int, v: int, kind: int) -> bool:
    """Congruence that must hold at the value preceding a low point."""
    if kind == 1:
        return (v + r) % p == 0
    return (2 * v - 1) % p == 0


def _check_inputs(p: int, r: int, k: int):
    check_prime(p)
    if not isinstance(r, int) or r < 0:
        raise ValidationError(f"r must be a non-negative integer, got {r!r}")
    if not isinstance(k, int) or k < 1:
        raise ValidationError(f"k must be a positive integer, got {k!r}")


def validate_cycle_input(p: int, r: int, k: int, semi_ordinary: bool = False) -> None:
    """Raise unless the input can carry a theta cycle.

    For odd p, r = 1 and non-semi-ordinary forms, k0 = 1, (p+3)/2, p are
    impossible.
    """
    _check_inputs(p, r, k)
    if p == 2 or r != 1 or semi_ordinary:
        return
    k0 = k0_of(p, k)
    if k0 in (1, (p + 3) // 2, p):
        raise CongruenceExcluded(
            f"k0={k0} is excluded for non-semi-ordinary forms with p={p}",
            p=p, k=k, k0=k0, excluded=sorted({1, (p + 3) // 2, p}))


# ---------------------------------------------------------------------------
# closed forms


def _ramp(start: int, step: int, count: int) -> list[int]:
    return [start + i * step for i in range(count)]


def _lows(values: list[int], k: int, rows: list[tuple[int, int, int]]) -> tuple[LowPoint, ...]:
    # each anchor is the value at the end of its run
    out, pos = [], 0
    for kind, c, b in rows:
        pos += c
        out.append(LowPoint(kind, c, b, values[pos - 1] if pos else k))
    return tuple(out)


def _closed_r1_nonsemi(p: int, k: int) -> tuple[list[int], list[tuple[int, int, int]], tuple[str, ...]]:
    k0 = k0_of(p, k)
    q = p + 1
    half = (p - 1) // 2
    flags: tuple[str, ...] = ()
    if k0 == (p + 1) // 2 or k0 == 2:
        values = _ramp(k + q, q, (p - 3) // 2) + [k]
        kind = 1 if k0 == (p + 1) // 2 else 2
        if p == 3:
            # -r and (p+1)/2 coincide mod 3: both trigger types apply
            flags = ("ambiguous_type",)
        return values, [(kind, half, (p + 1) // 2)], flags
    if p >= 7 and (p + 5) // 2 <= k0 <= p - 1:
        k1 = k + 2 - 2 * k0
        values = _ramp(k + q, q, p - 1 - k0) + _ramp(k1, q, k0 - (p + 3) // 2 + 1) + [k]
        rows = [(1, p - k0, p + 2 - k0), (2, k0 - (p + 1) // 2, k0 - (p + 3) // 2)]
        return values, rows, flags
    if p >= 7 and 3 <= k0 <= (p - 1) // 2:
        k1 = k + 2 + 2 * p - 2 * k0
        values = _ramp(k + q, q, (p + 1) // 2 - k0) + _ramp(k1, q, k0 - 2) + [k]
        rows = [(2, (p + 3) // 2 - k0, (p + 1) // 2 - k0), (1, k0 - 2, k0)]
        return values, rows, flags
    raise CongruenceExcluded(f"k0={k0} has no cycle for p={p}", p=p, k=k, k0=k0)


def _closed_r1_semi(p: int, k: int) -> tuple[list[int], tuple[str, ...]]:
    # first runs have lengths p-1-k0 and (p+1)/2-k0
    # that make the cycle length (p-1)/2
    k0 = k0_of(p, k)
    q = p + 1
    half = (p - 1) // 2
    if k0 == 1 or k0 == half:
        return _ramp(k + q, q, half), ()
    if p >= 7 and (p + 3) // 2 <= k0 <= p - 2:
        k1 = k + q - 2 * k0
        return _ramp(k + q, q, p - 1 - k0) + _ramp(k1, q, k0 - (p + 1) // 2 + 1), ()
    if p >= 7 and 2 <= k0 <= (p - 3) // 2:
        k1 = k + q + 2 * p - 2 * k0
        return _ramp(k + q, q, (p + 1) // 2 - k0) + _ramp(k1, q, k0 - 1), ()
    # remaining residue k0 = p: Theta(f) lands on k0 = 1, where no low-point
    # structure exists; the filtration keeps rising through the cycle
    return _ramp(k + q, q, half), ("no_low_point_structure",)


def cycle_closed_form(p: int, r: int, k: int, semi_ordinary: bool = False) -> CycleResult:
    validate_cycle_input(p, r, k, semi_ordinary)
    if p == 2:
        return CycleResult(p, r, k, (k + 2,), (), "degenerate", semi_ordinary, k)
    half = (p - 1) // 2
    if r > 1:
        return CycleResult(p, r, k, tuple(_ramp(k + 2 * p, 2 * p, half)), (),
                           "degenerate", semi_ordinary, k)
    if r == 0:
        raise UnsupportedClosedForm("no closed form for r = 0; use the solver", p=p, k=k)
    if not semi_ordinary:
        values, rows, flags = _closed_r1_nonsemi(p, k)
        return CycleResult(p, r, k, tuple(values), _lows(values, k, rows),
                           "closed_form", False, k, flags)
    k0 = k0_of(p, k)
    if (k0 + 1) % p == 0 or (2 * k0 - 1) % p == 0:
        raise IndeterminateStep(
            f"p={p} divides (k0+1)(2k0-1) for k0={k0}; the first step is undetermined",
            p=p, k=k, k0=k0)
    values, flags = _closed_r1_semi(p, k)
    anchor = k + p + 1
    lows: tuple[LowPoint, ...] = ()
    if not flags:
        # the low points are those of Theta(f), whose cycle closes at anchor
        _, rows, _ = _closed_r1_nonsemi(p, anchor)
        lows = _lows(values[1:] + [anchor], anchor, rows)
    return CycleResult(p, r, k, tuple(values), lows, "closed_form", True, anchor, flags)


# ---------------------------------------------------------------------------
# solver


def _compositions(total: int, parts: int):
    for cuts in itertools.combinations(range(1, total), parts - 1):
        bounds = (0,) + cuts + (total,)
        yield tuple(bounds[i + 1] - bounds[i] for i in range(parts))


def _target(p: int, r: int, kind: int) -> int:
    return (-r) % p if kind == 1 else (p + 1) // 2


def walk(p: int, k: int, structure) -> tuple[list[int], list[int]]:
    """Run the additive recursion; return (values, run-start values)."""
    v = k
    values, starts = [], []
    for _, c, b in structure:
        starts.append(v)
        for _ in range(c - 1):
            v += p + 1
            values.append(v)
        v += p + 1 - b * (p - 1)
        values.append(v)
    return values, starts


def _admissible(p: int, r: int, k: int, structure) -> bool:
    v = k
    for idx, (kind, c, b) in enumerate(structure):
        for j in range(c - 1):
            # no trigger before the drop inside a run, except at the starting
            # point of the whole cycle
            if (idx or j) and (is_trigger(p, r, v, 1) or is_trigger(p, r, v, 2)):
                return False
            v += p + 1
        if not is_trigger(p, r, v, kind):
            return False
        v += p + 1 - b * (p - 1)
    return v == k


def _solve_nonsemi(p: int, r: int, k: int, max_runs: int = 4) -> list[tuple[tuple[int, int, int], ...]]:
    total_c, total_b = (p - 1) // 2, (p + 1) // 2
    found = []
    for s in range(1, max_runs + 1):
        for cs in _compositions(total_c, s):
            for kinds in itertools.product((1, 2), repeat=s):
                # the trigger at the next drop fixes each jumping number mod p
                u = k + (cs[0] - 1) * (p + 1)
                if u % p != _target(p, r, kinds[0]):
                    continue
                bs = []
                for i in range(s - 1):
                    b = (_target(p, r, kinds[i + 1]) - u - cs[i + 1]) % p or p
                    bs.append(b)
                    u += (p + 1) - b * (p - 1) + (cs[i + 1] - 1) * (p + 1)
                last = total_b - sum(bs)
                if last < 1 or any(b > p for b in bs):
                    continue
                structure = tuple(zip(kinds, cs, bs + [last]))
                if _admissible(p, r, k, structure):
                    found.append(structure)
    return sorted(found, key=lambda st: (len(st), [t for t, _, _ in st], [c for _, c, _ in st]))


def _render(p: int, r: int, k: int, structure, semi: bool, anchor: int,
            extra_flags: tuple[str, ...] = ()) -> CycleResult:
    values, _ = walk(p, anchor, structure)
    lows, pos = [], 0
    for kind, c, b in structure:
        pos += c
        lows.append(LowPoint(kind, c, b, values[pos - 1]))
    if semi:
        values = [anchor] + values[:-1]
    flags = extra_flags + (("r0_deferred",) if r == 0 else ())
    return CycleResult(p, r, k, tuple(values), tuple(lows), "solver", semi, anchor, flags)


def cycle_solver(p: int, r: int, k: int, semi_ordinary: bool = False,
                 max_runs: int = 4) -> list[CycleResult]:
    """Enumerate every low-point structure compatible with the budgets.

    Structures have at most ``max_runs`` runs; results are sorted by
    (number of runs, types, low numbers).  An empty list means no structure
    is admissible.  Solutions whose values coincide are flagged ``ambiguous``.
    """
    _check_inputs(p, r, k)
    if p == 2:
        raise ValidationError("the solver needs an odd prime")
    if r not in (0, 1):
        raise ValidationError("the solver handles r in {0, 1}")

    results: list[CycleResult] = []
    if not semi_ordinary:
        for st in _solve_nonsemi(p, r, k, max_runs):
            results.append(_render(p, r, k, st, False, k))
    else:
        k0 = k0_of(p, k)
        if (k0 + r) % p == 0 or (2 * k0 - 1) % p == 0:
            # first step undetermined: try every drop b for Theta(f)
            for b in range(0, p + 1):
                anchor = k + (p + 1) - b * (p - 1)
                if anchor < 1:
                    break
                for st in _solve_nonsemi(p, r, anchor, max_runs):
                    results.append(_render(p, r, k, st, True, anchor, ("candidate", f"first_drop={b}")))
        else:
            anchor = k + p + 1
            for st in _solve_nonsemi(p, r, anchor, max_runs):
                results.append(_render(p, r, k, st, True, anchor))

    seen: dict[tuple, int] = {}
    for res in results:
        seen[res.values] = seen.get(res.values, 0) + 1
    return [
        CycleResult(res.p, res.r, res.k, res.values, res.low_points, res.provenance,
                    res.semi_ordinary, res.anchor, res.flags + ("ambiguous",))
        if seen[res.values] > 1 else res
        for res in results
    ]


# ---------------------------------------------------------------------------


def selector(p: int, w: int) -> tuple[int, bool]:
    """Position j in the cycle, and whether the small theta is needed.

    Returns the unique (j, flag) with 0 <= j < (p-1)/2 and w = 2j (flag
    False) or w = 2j + 1 (flag True) modulo p - 1.
    """
    check_prime(p)
    if p == 2:
        raise ValidationError("the selector needs an odd prime")
    res = w % (p - 1)
    return (res // 2, bool(res % 2))
