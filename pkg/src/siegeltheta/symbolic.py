"""Exact symbolic engine for the local coefficients of the theta operator.

Polynomials live on two levels.  The outer level is a sparse sum of
monomials in formal symbols (the entries ``c11, c12, c21, c22`` of C,
the atom ``detC``, and the coefficient functions ``F_n`` with any number
of commuting derivations applied).  Each outer coefficient is an
:class:`IntPoly`, an integer polynomial in the weight parameters
``k, k1, k2, n``.  All arithmetic is over the integers.

Three independent sources of the coefficient ``A_n`` are provided:

* :func:`theta_local_general`: the general closed formula;
* :func:`theta_local_r0` / :func:`theta_local_r1`: the r = 0, 1 formulas,
  as stated;
* :func:`derive_theta_local`: a from-scratch derivation (Leibniz rule on the
  first-derivative coefficients, the derivative table for ``c_ij``, and the
  projection with weights (2, -1, 2)).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Iterable, Mapping

from .core import IndexOutOfRange, ValidationError

PARAMS = ("k", "k1", "k2", "n")

# ---------------------------------------------------------------------------
# integer polynomials in the weight parameters


class IntPoly:
    """Sparse integer polynomial in named variables.

    Terms map a sorted tuple of ``(variable, exponent)`` pairs to a nonzero
    integer; the empty tuple is the constant term.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, int] | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c}

    @classmethod
    def const(cls, c: int) -> "IntPoly":
        return cls({(): c})

    @classmethod
    def var(cls, name: str) -> "IntPoly":
        return cls({((name, 1),): 1})

    @staticmethod
    def lift(x) -> "IntPoly":
        if isinstance(x, IntPoly):
            return x
        if isinstance(x, int):
            return IntPoly.const(x)
        raise TypeError(f"cannot make an IntPoly from {x!r}")

    def is_zero(self) -> bool:
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def __eq__(self, other):
        if isinstance(other, int):
            other = IntPoly.const(other)
        if not isinstance(other, IntPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __add__(self, other):
        other = IntPoly.lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out.get(m, 0) + c
        return IntPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return IntPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-IntPoly.lift(other))

    def __rsub__(self, other):
        return IntPoly.lift(other) - self

    def __mul__(self, other):
        other = IntPoly.lift(other)
        out: dict[tuple, int] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono_mul(m1, m2)
                out[m] = out.get(m, 0) + c1 * c2
        return IntPoly(out)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        out = IntPoly.const(1)
        for _ in range(e):
            out = out * self
        return out

    def subs(self, values: Mapping[str, "IntPoly | int"]) -> "IntPoly":
        out = IntPoly()
        for m, c in self.terms.items():
            term = IntPoly.const(c)
            for v, e in m:
                base = IntPoly.lift(values[v]) if v in values else IntPoly.var(v)
                term = term * base ** e
            out = out + term
        return out

    def variables(self) -> set[str]:
        return {v for m in self.terms for v, _ in m}

    def evaluate(self, values: Mapping[str, int]) -> int:
        total = 0
        for m, c in self.terms.items():
            t = c
            for v, e in m:
                t *= values[v] ** e
            total += t
        return total

    def is_const(self) -> bool:
        return all(m == () for m in self.terms)

    def constant(self) -> int:
        return self.terms.get((), 0)

    def to_text(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for m in sorted(self.terms, key=_mono_order):
            c = self.terms[m]
            body = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
            if not body:
                parts.append((c < 0, str(abs(c))))
            elif abs(c) == 1:
                parts.append((c < 0, body))
            else:
                parts.append((c < 0, f"{abs(c)}*{body}"))
        text = ("-" if parts[0][0] else "") + parts[0][1]
        for neg, s in parts[1:]:
            text += (" - " if neg else " + ") + s
        return text

    def __repr__(self):
        return f"IntPoly({self.to_text()})"


def _mono_mul(m1: tuple, m2: tuple) -> tuple:
    if not m1:
        return m2
    if not m2:
        return m1
    d = dict(m1)
    for v, e in m2:
        d[v] = d.get(v, 0) + e
    return tuple(sorted(d.items()))


def _mono_order(m: tuple):
    degree = sum(e for _, e in m)
    exps = dict(m)
    return (-degree, tuple(-exps.get(v, 0) for v in sorted(set(PARAMS) | set(exps))))


K = IntPoly.var("k")
K1 = IntPoly.var("k1")
K2 = IntPoly.var("k2")
NV = IntPoly.var("n")

# ---------------------------------------------------------------------------
# formal symbols

C_NAMES = ("c11", "c12", "c21", "c22")
DIRECTIONS = ("11", "12", "22")
_KIND_RANK = {"detC": 0, "c11": 1, "c12": 2, "c21": 3, "c22": 4, "F": 5}


@dataclass(frozen=True)
class Symbol:
    """A formal symbol: an entry of C, det(C), or ``D_{ops} F_n``."""

    name: str
    n: int = 0
    ops: tuple[str, ...] = field(default=())

    def __post_init__(self):
        if self.name not in _KIND_RANK:
            raise ValidationError(f"unknown symbol {self.name!r}")
        # the derivations are assumed to commute, so keep them sorted
        object.__setattr__(self, "ops", tuple(sorted(self.ops)))

    @property
    def is_c(self) -> bool:
        return self.name in C_NAMES

    @property
    def is_f(self) -> bool:
        return self.name == "F"

    def sort_key(self):
        return (_KIND_RANK[self.name], len(self.ops), self.ops, self.n)

    def text(self) -> str:
        if self.name != "F":
            return self.name
        if not self.ops:
            return f"F{self.n}"
        return "".join(f"D{o}" for o in self.ops) + f"(F{self.n})"


def F(n: int, *ops: str) -> Symbol:
    return Symbol("F", n, tuple(ops))


def _mono(symbols: Iterable[Symbol]) -> tuple[Symbol, ...]:
    return tuple(sorted(symbols, key=Symbol.sort_key))


class SymPoly:
    """Sparse polynomial in :class:`Symbol` with :class:`IntPoly` coefficients."""

    __slots__ = ("terms",)

    def __init__(self, terms: Mapping[tuple, IntPoly] | None = None):
        self.terms = {m: c for m, c in (terms or {}).items() if not c.is_zero()}

    @classmethod
    def symbol(cls, s: Symbol, coeff=1) -> "SymPoly":
        return cls({(s,): IntPoly.lift(coeff)})

    @classmethod
    def const(cls, coeff) -> "SymPoly":
        return cls({(): IntPoly.lift(coeff)})

    @staticmethod
    def lift(x) -> "SymPoly":
        if isinstance(x, SymPoly):
            return x
        if isinstance(x, Symbol):
            return SymPoly.symbol(x)
        return SymPoly.const(x)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, SymPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def __len__(self):
        return len(self.terms)

    def __add__(self, other):
        other = SymPoly.lift(other)
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return SymPoly(out)

    __radd__ = __add__

    def __neg__(self):
        return SymPoly({m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-SymPoly.lift(other))

    def __rsub__(self, other):
        return SymPoly.lift(other) - self

    def __mul__(self, other):
        if isinstance(other, (int, IntPoly)):
            c = IntPoly.lift(other)
            return SymPoly({m: v * c for m, v in self.terms.items()})
        other = SymPoly.lift(other)
        out: dict[tuple, IntPoly] = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _mono(m1 + m2)
                v = c1 * c2
                out[m] = out[m] + v if m in out else v
        return SymPoly(out)

    __rmul__ = __mul__

    def coefficient(self, *symbols: Symbol) -> IntPoly:
        return self.terms.get(_mono(symbols), IntPoly())

    def filter(self, keep: Callable[[tuple], bool]) -> "SymPoly":
        return SymPoly({m: c for m, c in self.terms.items() if keep(m)})

    def map_coefficients(self, fn: Callable[[IntPoly], IntPoly]) -> "SymPoly":
        return SymPoly({m: fn(c) for m, c in self.terms.items()})

    def subs_params(self, values: Mapping[str, "IntPoly | int"]) -> "SymPoly":
        return self.map_coefficients(lambda c: c.subs(values))

    def subs_symbols(self, rule: Callable[[Symbol], "SymPoly | None"]) -> "SymPoly":
        """Replace every symbol ``s`` for which ``rule(s)`` is not None."""
        out = SymPoly()
        for m, c in self.terms.items():
            term = SymPoly.const(c)
            for s in m:
                rep = rule(s)
                term = term * (SymPoly.symbol(s) if rep is None else rep)
            out = out + term
        return out

    def symbols(self) -> set[Symbol]:
        return {s for m in self.terms for s in m}

    def to_text(self) -> str:
        """Canonical text: one ``monomial : coefficient`` line per term."""
        lines = []
        for m in sorted(self.terms, key=lambda m: tuple(s.sort_key() for s in m)):
            mono = "*".join(s.text() for s in m) or "1"
            lines.append(f"{mono} : {self.terms[m].to_text()}")
        return "\n".join(lines)

    def __repr__(self):
        return "SymPoly(" + "; ".join(self.to_text().splitlines()) + ")"


def sympoly_diff(a: SymPoly, b: SymPoly) -> SymPoly:
    return a - b


def _c(name: str) -> SymPoly:
    return SymPoly.symbol(Symbol(name))


c11, c12, c21, c22 = (_c(n) for n in C_NAMES)
detC = _c("detC")

# ---------------------------------------------------------------------------
# differentiation rules

# derivative of the entries of C along each direction (input table; the
# derivations are assumed to commute)
NABLA_C: dict[tuple[str, str], SymPoly] = {
    ("11", "c11"): c11 * c11,
    ("12", "c11"): (c12 + c21) * c11,
    ("22", "c11"): c12 * c21,
    ("11", "c12"): c11 * c12,
    ("12", "c12"): c11 * c22 + c12 * c12,
    ("22", "c12"): c22 * c12,
    ("11", "c21"): c11 * c21,
    ("12", "c21"): c11 * c22 + c21 * c21,
    ("22", "c21"): c22 * c21,
    ("11", "c22"): c12 * c21,
    ("12", "c22"): (c12 + c21) * c22,
    ("22", "c22"): c22 * c22,
}

# action of each direction on the basis e1, e2 of the Hodge bundle, modulo the
# unit-root part.  Read off from the first-derivative coefficients: these are
# the unique rules whose Leibniz expansion on e1^(r-n) e2^n (e1^e2)^k2
# reproduces them (checked by test_symbolic.test_basis_rules_reproduce_psi1).
NABLA_E: dict[tuple[str, str], dict[str, SymPoly]] = {
    ("11", "e1"): {"e1": -c11, "e2": -c12},
    ("11", "e2"): {},
    ("12", "e1"): {"e1": -c21, "e2": -c22},
    ("12", "e2"): {"e1": -c11, "e2": -c12},
    ("22", "e1"): {},
    ("22", "e2"): {"e1": -c21, "e2": -c22},
}


def _check_direction(kl: str):
    if kl not in DIRECTIONS:
        raise ValidationError(f"unknown direction {kl!r}")


def nabla(kl: str, poly: SymPoly) -> SymPoly:
    """Apply the derivation along ``kl`` by the Leibniz rule."""
    _check_direction(kl)
    out = SymPoly()
    for m, coeff in poly.terms.items():
        for i, s in enumerate(m):
            if s.is_c:
                ds = NABLA_C[(kl, s.name)]
            elif s.is_f:
                ds = SymPoly.symbol(Symbol("F", s.n, s.ops + (kl,)))
            else:
                raise ValidationError("detC is atomic; differentiate before normalizing")
            rest = SymPoly({_mono(m[:i] + m[i + 1:]): coeff})
            out = out + rest * ds
    return out


def nabla_delta(kl: str, m: int, r: int, k1=K1, k2=K2) -> dict[int, SymPoly]:
    """``nabla_kl(delta_m)`` in the basis delta_0..delta_r of weight (k1, k2).

    delta_m = e1^(r-m) e2^m (e1 ^ e2)^k2; the exponent r - m is taken as
    ``k1 - k2 - m`` so that the weight may stay symbolic.
    """
    _check_direction(kl)
    k1, k2 = IntPoly.lift(k1), IntPoly.lift(k2)
    exp_e1 = k1 - k2 - m
    out: dict[int, SymPoly] = {}

    def add(idx: int, val: SymPoly):
        if 0 <= idx <= r:
            out[idx] = out[idx] + val if idx in out else val

    shift = {"e1": 0, "e2": 1}
    rule1 = NABLA_E[(kl, "e1")]
    rule2 = NABLA_E[(kl, "e2")]
    # one e1 factor replaced: e1 -> e1 keeps the index, e1 -> e2 raises it
    for target, coeff in rule1.items():
        add(m + shift[target], coeff * exp_e1)
    # one e2 factor replaced: e2 -> e1 lowers the index
    for target, coeff in rule2.items():
        add(m + shift[target] - 1, coeff * m)
    # the wedge: nabla(e1 ^ e2) = (trace of the action) e1 ^ e2
    trace = rule1.get("e1", SymPoly()) + rule2.get("e2", SymPoly())
    add(m, trace * k2)
    return {i: v for i, v in out.items() if not v.is_zero()}


def identify_c21(poly: SymPoly) -> SymPoly:
    """Rewrite c21 as c12 (valid when the derivations commute)."""
    return poly.subs_symbols(lambda s: c12 if s.name == "c21" else None)


def normalize_det(poly: SymPoly) -> SymPoly:
    """Rewrite c11*c22 as detC + c12^2 until no monomial holds both.

    Assumes c21 has already been identified with c12.
    """
    out = SymPoly()
    for m, coeff in poly.terms.items():
        n11 = sum(1 for s in m if s.name == "c11")
        n22 = sum(1 for s in m if s.name == "c22")
        pairs = min(n11, n22)
        if not pairs:
            out = out + SymPoly({m: coeff})
            continue
        rest = list(m)
        for _ in range(pairs):
            rest.remove(Symbol("c11"))
            rest.remove(Symbol("c22"))
        term = SymPoly({_mono(rest): coeff})
        for _ in range(pairs):
            term = term * (detC + c12 * c12)
        out = out + term
    return out


# ---------------------------------------------------------------------------
# closed formulas


def _check_range(r: int, n: int):
    if r < 0 or not 0 <= n <= r:
        raise IndexOutOfRange(f"need 0 <= n <= r, got r={r}, n={n}", r=r, n=n)


def _f(r: int, m: int, *ops: str) -> SymPoly:
    """``D_ops F_m``, or zero when m is outside [0, r]."""
    if 0 <= m <= r:
        return SymPoly.symbol(F(m, *ops))
    return SymPoly()


def psi1_coefficients(r: int, n: int, identify: bool = True) -> tuple[SymPoly, SymPoly, SymPoly]:
    """Coefficients (b2, b1, b0) of delta_n (x) u_i in the first derivative.

    Weight parameters stay symbolic with r = k1 - k2; out-of-range F terms
    are dropped.  With ``identify`` the symbol c21 is rewritten to c12.
    """
    _check_range(r, n)
    R = K1 - K2
    b2 = _f(r, n, "11") - _f(r, n) * c11 * (K1 - n) - _f(r, n - 1) * c12 * (R + 1 - n)
    b1 = (_f(r, n, "12") - _f(r, n + 1) * c11 * (n + 1)
          - _f(r, n) * (c21 * (K1 - n) + c12 * (K2 + n))
          - _f(r, n - 1) * c22 * (R + 1 - n))
    b0 = _f(r, n, "22") - _f(r, n) * c22 * (K2 + n) - _f(r, n + 1) * c21 * (n + 1)
    if identify:
        b2, b1, b0 = identify_c21(b2), identify_c21(b1), identify_c21(b0)
    return b2, b1, b0


def second_order_block(r: int, n: int) -> SymPoly:
    """det([[2 D11, D12], [D12, 2 D22]]) applied to F_n."""
    return _f(r, n, "11", "22") * 4 - _f(r, n, "12", "12")


def theta_local_general(r: int, n: int, symbolic_n: bool = False) -> SymPoly:
    """The general closed formula for A_n, with k1, k2 symbolic.

    With ``symbolic_n`` the coefficients keep ``n`` as a formal parameter
    (the F indices are always concrete).
    """
    _check_range(r, n)
    N = NV if symbolic_n else IntPoly.const(n)
    R = K1 - K2
    f = lambda m, *ops: _f(r, m, *ops)  # noqa: E731
    A = second_order_block(r, n)
    A += detC * f(n) * (2 * (K1 * (2 * K2 - 1) + (R - N) * N))
    A += c22 * f(n, "11") * (-2 * (2 * K2 + 2 * N - 1))
    A += c12 * f(n, "12") * (2 * (2 * K1 + 2 * K2 - 1))
    A += c11 * f(n, "22") * (2 * (1 - 2 * K1 + 2 * N))
    A += c12 * c12 * f(n) * (-((R - 1) * R - 6 * (R - N) * N))
    A += c22 * f(n - 1, "12") * (2 * (1 + R - N))
    A += c12 * f(n - 1, "22") * (-4 * (1 + R - N))
    A += c12 * f(n + 1, "11") * (-4 * (N + 1))
    A += c11 * f(n + 1, "12") * (2 * (N + 1))
    A += c12 * c22 * f(n - 1) * (2 * (1 + R - N) * (2 * N - R - 1))
    A += c11 * c12 * f(n + 1) * (-2 * (1 + N) * (2 * N - R + 1))
    A += c22 * c22 * f(n - 2) * (-(1 + R - N) * (2 + R - N))
    A += c11 * c11 * f(n + 2) * (-(1 + N) * (2 + N))
    return A


def theta_local_r0() -> SymPoly:
    """A_0 for parallel weight (k, k)."""
    f = lambda m, *ops: _f(0, m, *ops)  # noqa: E731
    A = second_order_block(0, 0)
    A += detC * f(0) * (2 * K * (2 * K - 1))
    A += (c22 * f(0, "11") - c12 * f(0, "12") + c11 * f(0, "22")) * (-2 * (2 * K - 1))
    return A


def theta_local_r1(n: int) -> SymPoly:
    """A_n (n = 0, 1) for weight (k + 1, k)."""
    _check_range(1, n)
    f = lambda m, *ops: _f(1, m, *ops)  # noqa: E731
    A = second_order_block(1, n)
    A += detC * f(n) * (2 * (K + 1) * (2 * K - 1))
    if n == 0:
        A += c22 * f(0, "11") * (-2 * (2 * K - 1))
        A += c12 * f(0, "12") * (4 * K)
        A += c11 * f(0, "22") * (-2 * (2 * K + 1))
        A += c12 * f(1, "11") * -4
        A += c11 * f(1, "12") * 2
    else:
        A += c22 * f(1, "11") * (-2 * (1 + 2 * K))
        A += c12 * f(1, "12") * (2 * (1 + 4 * K))
        A += c11 * f(1, "22") * (2 * (1 - 2 * K))
        A += c22 * f(0, "12") * 2
        A += c12 * f(0, "22") * -4
    return A


def on_weight_line(poly: SymPoly, r: int) -> SymPoly:
    """Impose k1 = k2 + r, the relation tying the weight to the index range."""
    return poly.subs_params({"k1": K2 + r})


def specialize(poly: SymPoly, r: int) -> SymPoly:
    """Put (k1, k2) = (k + r, k) to compare with the r = 0, 1 formulas."""
    return poly.subs_params({"k1": K + r, "k2": K})


# ---------------------------------------------------------------------------
# derivation from first principles

# direction of the second derivative -> index j of v_j
_V_INDEX = {"11": 2, "12": 1, "22": 0}
# projection onto (e1 ^ e2)^2: weights on u_i (x) v_j
P1_WEIGHTS = {(2, 0): 2, (1, 1): -1, (0, 2): 2}


@lru_cache(maxsize=None)
def _derive_all(r: int) -> tuple[SymPoly, ...]:
    # coefficient of delta_m (x) u_i (x) v_j
    acc: dict[tuple[int, int, int], SymPoly] = {}

    def add(key, val: SymPoly):
        acc[key] = acc[key] + val if key in acc else val

    psi = {}
    for m in range(r + 1):
        b2, b1, b0 = psi1_coefficients(r, m, identify=False)
        psi[(m, 2)], psi[(m, 1)], psi[(m, 0)] = b2, b1, b0

    for kl, j in _V_INDEX.items():
        for (m, i), b in psi.items():
            add((m, i, j), nabla(kl, b))
            for m2, coeff in nabla_delta(kl, m, r).items():
                add((m2, i, j), b * coeff)
            # u_i is delta_(2-i) in weight (2, 0)
            for idx, coeff in nabla_delta(kl, 2 - i, 2, 2, 0).items():
                add((m, 2 - idx, j), b * coeff)

    out = []
    for n in range(r + 1):
        a = SymPoly()
        for (i, j), w in P1_WEIGHTS.items():
            a = a + acc.get((n, i, j), SymPoly()) * w
        out.append(normalize_det(identify_c21(a)))
    return tuple(out)


def derive_theta_local(r: int, n: int) -> SymPoly:
    _check_range(r, n)
    return _derive_all(r)[n]


# ---------------------------------------------------------------------------
# inspection


def pole_order(poly: SymPoly) -> int:
    """Largest number of C-entries plus detC factors in any monomial."""
    best = 0
    for m in poly.terms:
        best = max(best, sum(1 for s in m if s.is_c or s.name == "detC"))
    return best


def block_of(mono: tuple[Symbol, ...]) -> str:
    """Classify a monomial: second_order, detC, c_squared, c_nabla, or other."""
    fs = [s for s in mono if s.is_f]
    cs = [s for s in mono if s.is_c]
    dets = [s for s in mono if s.name == "detC"]
    if len(fs) != 1:
        return "other"
    order = len(fs[0].ops)
    if dets:
        return "detC" if len(dets) == 1 and not cs and order == 0 else "other"
    if not cs and order == 2:
        return "second_order"
    if len(cs) == 2 and order == 0:
        return "c_squared"
    if len(cs) == 1 and order == 1:
        return "c_nabla"
    return "other"


BLOCKS = ("second_order", "detC", "c_squared", "c_nabla", "other")
ASSERTED_BLOCKS = ("second_order", "detC", "c_squared")


def split_blocks(poly: SymPoly) -> dict[str, SymPoly]:
    return {b: poly.filter(lambda m, b=b: block_of(m) == b) for b in BLOCKS}


def f_indices(poly: SymPoly) -> set[int]:
    return {s.n for s in poly.symbols() if s.is_f}


__all__ = [
    "IntPoly", "Symbol", "SymPoly", "F", "K", "K1", "K2", "NV",
    "c11", "c12", "c21", "c22", "detC", "NABLA_C", "NABLA_E", "P1_WEIGHTS",
    "nabla", "nabla_delta", "identify_c21", "normalize_det",
    "psi1_coefficients", "second_order_block", "theta_local_general",
    "theta_local_r0", "theta_local_r1", "specialize", "on_weight_line", "derive_theta_local",
    "sympoly_diff", "pole_order", "block_of", "split_blocks", "f_indices",
    "BLOCKS", "ASSERTED_BLOCKS",
]
