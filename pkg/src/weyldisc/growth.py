"""Exact asymptotics for the recognized coefficient family.

A recognized coefficient is an exponential polynomial

    f(t) = sum_i  c_i * b_i^t * t^(k_i),   c_i, b_i rational, b_i > 0, k_i >= 0,

optionally wrapped in a single outermost sqrt.  Within this family the
questions the solvers need -- does a real number lie in the closure of the
range, is a ratio of two coefficients bounded, does a reciprocal series
diverge -- are decidable exactly with rational arithmetic.  Everything
outside the family is reported as unrecognized (None), never guessed.

The internal representation of an exponential polynomial is a dict
mapping (base, power) -> coefficient with all entries nonzero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm

from . import expr as ex

ExpPoly = dict[tuple[Fraction, int], Fraction]

_MAX_INT_EXPONENT = 64
_SCAN_LIMIT = 200_000


def _clean(poly: ExpPoly) -> ExpPoly:
    return {key: c for key, c in poly.items() if c != 0}


def _const_poly(value: Fraction) -> ExpPoly:
    return {(Fraction(1), 0): value} if value != 0 else {}


def _add(p: ExpPoly, q: ExpPoly, sign: int = 1) -> ExpPoly:
    out = dict(p)
    for key, c in q.items():
        out[key] = out.get(key, Fraction(0)) + sign * c
    return _clean(out)


def _mul(p: ExpPoly, q: ExpPoly) -> ExpPoly:
    out: ExpPoly = {}
    for (b1, k1), c1 in p.items():
        for (b2, k2), c2 in q.items():
            key = (b1 * b2, k1 + k2)
            out[key] = out.get(key, Fraction(0)) + c1 * c2
    return _clean(out)


def _scale(p: ExpPoly, factor: Fraction) -> ExpPoly:
    return _clean({key: c * factor for key, c in p.items()})


def _div_single(p: ExpPoly, single: ExpPoly) -> ExpPoly | None:
    if not p:
        return {}
    ((b0, k0), c0), = single.items()
    if any(k < k0 for (_, k) in p):
        return None
    return {(b / b0, k - k0): c / c0 for (b, k), c in p.items()}


def _int_pow(p: ExpPoly, n: int) -> ExpPoly | None:
    if n < 0:
        if len(p) != 1:
            return None
        ((b, k), c), = p.items()
        if k != 0:
            return None
        p = {(1 / b, 0): 1 / c}
        n = -n
    if n > _MAX_INT_EXPONENT:
        return None
    out = _const_poly(Fraction(1))
    for _ in range(n):
        out = _mul(out, p)
    return out


def _linear_int_parts(p: ExpPoly) -> tuple[int, int] | None:
    """Return (u, v) when the poly is u*t + v with integer u, v."""
    u = v = Fraction(0)
    for (b, k), c in p.items():
        if b != 1 or k > 1:
            return None
        if k == 1:
            u = c
        else:
            v = c
    if u.denominator != 1 or v.denominator != 1:
        return None
    return int(u), int(v)


def poly_of(node: ex.CoefficientExpr) -> ExpPoly | None:
    """Exponential-polynomial normal form of an AST, or None."""
    if isinstance(node, ex.Num):
        return _const_poly(node.value)
    if isinstance(node, ex.Var):
        return {(Fraction(1), 1): Fraction(1)}
    if isinstance(node, ex.Neg):
        inner = poly_of(node.arg)
        return None if inner is None else _scale(inner, Fraction(-1))
    if isinstance(node, ex.Add) or isinstance(node, ex.Sub):
        left = poly_of(node.left)
        right = poly_of(node.right)
        if left is None or right is None:
            return None
        return _add(left, right, 1 if isinstance(node, ex.Add) else -1)
    if isinstance(node, ex.Mul):
        left = poly_of(node.left)
        right = poly_of(node.right)
        if left is None or right is None:
            return None
        return _mul(left, right)
    if isinstance(node, ex.Div):
        left = poly_of(node.left)
        right = poly_of(node.right)
        if left is None or right is None or not right:
            return None
        if len(right) == 1:
            return _div_single(left, right)
        return None
    if isinstance(node, ex.Pow):
        base = poly_of(node.base)
        expo = poly_of(node.exponent)
        if base is None or expo is None:
            return None
        linear = _linear_int_parts(expo)
        if linear is None:
            return None
        u, v = linear
        if u == 0:
            return _int_pow(base, v)
        # constant positive base raised to an affine exponent
        if len(base) == 1 and (Fraction(1), 0) in base:
            c = base[(Fraction(1), 0)]
            if c > 0:
                return {(c**u, 0): c**v}
        return None
    return None  # Sqrt handled only at the top level


@dataclass(frozen=True)
class GrowthClass:
    """Normal form sum of c * b^t * t^k terms, optionally under a sqrt.

    ``terms`` is sorted with the dominant (largest base, then largest
    power) term first; recognition is exact or absent.
    """

    terms: tuple[tuple[Fraction, Fraction, int], ...]
    sqrt_wrapped: bool = False

    @property
    def is_zero(self) -> bool:
        return not self.terms

    @property
    def dominant(self) -> tuple[Fraction, Fraction, int] | None:
        """(coeff, base, power) of the asymptotically leading term."""
        return self.terms[0] if self.terms else None

    def poly(self) -> ExpPoly:
        return {(b, k): c for c, b, k in self.terms}


def _class_from_poly(poly: ExpPoly, sqrt_wrapped: bool = False) -> GrowthClass:
    terms = tuple(
        (c, b, k)
        for (b, k), c in sorted(poly.items(), key=lambda kv: kv[0], reverse=True)
    )
    return GrowthClass(terms=terms, sqrt_wrapped=sqrt_wrapped and bool(terms))


def class_of_expr(node: ex.CoefficientExpr) -> GrowthClass | None:
    if isinstance(node, ex.Sqrt):
        inner = poly_of(node.arg)
        if inner is None:
            return None
        cls = _class_from_poly(inner, sqrt_wrapped=True)
        if cls.terms and cls.dominant[0] < 0:
            return None  # eventually negative under a sqrt: not evaluable
        return cls
    poly = poly_of(node)
    return None if poly is None else _class_from_poly(poly)


def exact_value(poly: ExpPoly, t: int) -> Fraction:
    total = Fraction(0)
    for (b, k), c in poly.items():
        total += c * b**t * Fraction(t) ** k
    return total


def dominant_of(poly: ExpPoly) -> tuple[Fraction, Fraction, int] | None:
    if not poly:
        return None
    (b, k) = max(poly)
    return (poly[(b, k)], b, k)


def _term_abs(c: Fraction, b: Fraction, k: int, t: int) -> Fraction:
    return abs(c) * b**t * Fraction(t) ** k


def _ratio_nonincreasing_at(bi: Fraction, ki: int, bd: Fraction, kd: int, t: int) -> bool:
    # |term_i(t+1)/term_d(t+1)| <= |term_i(t)/term_d(t)|
    return bi * Fraction(t + 1, t) ** (ki - kd) <= bd


def domination_index(poly: ExpPoly, t_start: int) -> int | None:
    """Smallest T >= max(t_start, 1) with  sum of non-dominant |terms|
    <= |dominant|/2  for every t >= T.  None if the scan cap is hit."""
    dom = dominant_of(poly)
    if dom is None:
        return max(t_start, 1)
    cd, bd, kd = dom
    rest = [(c, b, k) for (b, k), c in poly.items() if (b, k) != (bd, kd)]
    if not rest:
        return max(t_start, 1)
    t = max(t_start, 1)
    for _ in range(_SCAN_LIMIT):
        if all(_ratio_nonincreasing_at(b, k, bd, kd, t) for _, b, k in rest):
            total = sum(_term_abs(c, b, k, t) for c, b, k in rest)
            if total * 2 <= _term_abs(cd, bd, kd, t):
                return t
        t += 1
    return None


def eventual_sign(cls: GrowthClass, t_start: int) -> tuple[int, int] | None:
    """(sign, T) such that sign(f(t)) = sign for all t >= T, or None."""
    if cls.is_zero:
        return (0, max(t_start, 1))
    if cls.sqrt_wrapped:
        inner = eventual_sign(GrowthClass(cls.terms), t_start)
        if inner is None or inner[0] < 0:
            return None
        return (1 if inner[0] > 0 else 0, inner[1])
    T = domination_index(cls.poly(), t_start)
    if T is None:
        return None
    c, _, _ = cls.dominant
    return (1 if c > 0 else -1, T)


# ---------------------------------------------------------------------------
# Growth orders: exact comparison of products of rational powers.


@dataclass(frozen=True)
class GrowthOrder:
    """Order of growth (base^t * t^power) with base a product of rational
    numbers raised to rational exponents (so sqrt and quartic roots of
    recognized coefficients stay exactly comparable)."""

    base_factors: tuple[tuple[Fraction, Fraction], ...]
    power: Fraction

    def pow(self, r: Fraction) -> "GrowthOrder":
        return GrowthOrder(
            tuple((b, e * r) for b, e in self.base_factors), self.power * r
        )

    def mul(self, other: "GrowthOrder") -> "GrowthOrder":
        return GrowthOrder(
            self.base_factors + other.base_factors, self.power + other.power
        )


ORDER_ONE = GrowthOrder((), Fraction(0))


def _base_cmp(a: GrowthOrder, b: GrowthOrder) -> int:
    """Exact comparison of the two exponential bases: -1, 0 or +1."""
    factors = list(a.base_factors) + [(q, -e) for q, e in b.base_factors]
    factors = [(q, e) for q, e in factors if e != 0 and q != 1]
    if not factors:
        return 0
    scale = lcm(*(e.denominator for _, e in factors))
    ratio = Fraction(1)
    for q, e in factors:
        ratio *= q ** int(e * scale)
    if ratio == 1:
        return 0
    return 1 if ratio > 1 else -1


def order_cmp(a: GrowthOrder, b: GrowthOrder) -> int:
    base = _base_cmp(a, b)
    if base != 0:
        return base
    if a.power == b.power:
        return 0
    return 1 if a.power > b.power else -1


def base_cmp_to_one(a: GrowthOrder) -> int:
    return _base_cmp(a, ORDER_ONE)


def order_of(cls: GrowthClass) -> GrowthOrder | None:
    """None for the zero class."""
    if cls.is_zero:
        return None
    _, b, k = cls.dominant
    order = GrowthOrder(((b, Fraction(1)),), Fraction(k))
    return order.pow(Fraction(1, 2)) if cls.sqrt_wrapped else order


def ratio_bounded(num: GrowthOrder | None, den: GrowthOrder | None) -> bool | None:
    """Is limsup |num/den| finite?  None when it cannot be decided."""
    if num is None:
        return True
    if den is None:
        return None  # nonzero over an identically zero denominator
    return order_cmp(num, den) <= 0


def recip_sum_diverges(order: GrowthOrder) -> bool:
    """Does sum of 1/f(t) diverge, for positive f of the given order?"""
    base = base_cmp_to_one(order)
    if base < 0:
        return True  # terms themselves blow up
    if base > 0:
        return False  # geometric decay of 1/f
    return order.power <= 1


def shift_poly(poly: ExpPoly) -> ExpPoly:
    """The poly of t -> f(t-1)."""
    out: ExpPoly = {}
    for (b, k), c in poly.items():
        base_coeff = c / b
        for j in range(k + 1):
            binom = Fraction(
                _binomial(k, j) * ((-1) ** (k - j))
            )
            key = (b, j)
            out[key] = out.get(key, Fraction(0)) + base_coeff * binom
    return _clean(out)


def _binomial(n: int, k: int) -> int:
    out = 1
    for i in range(k):
        out = out * (n - i) // (i + 1)
    return out


def nabla_poly(poly: ExpPoly) -> ExpPoly:
    """f(t) - f(t-1)."""
    return _add(poly, shift_poly(poly), -1)


# ---------------------------------------------------------------------------
# Membership of a rational value in the closure of a recognized range.


def closure_contains(
    cls: GrowthClass, value: Fraction, t_start: int
) -> bool | None:
    """Exact membership of value in closure({f(t): t >= t_start}).

    The closure is the set of attained values together with the finite
    limit when one exists.  None when no finite certificate was found.
    """
    if cls.sqrt_wrapped:
        if value < 0:
            return False
        return closure_contains(GrowthClass(cls.terms), value * value, t_start)
    poly = cls.poly()
    if not poly:
        return value == 0
    cd, bd, kd = dominant_of(poly)
    growing = bd > 1 or (bd == 1 and kd >= 1)
    if growing:
        T = domination_index(poly, t_start)
        if T is None:
            return None
        # beyond T the modulus exceeds |dominant(t)|/2, which increases
        bound_t = T
        for _ in range(_SCAN_LIMIT):
            if _term_abs(cd, bd, kd, bound_t) > 2 * abs(value):
                break
            bound_t += 1
        else:
            return None
        return any(
            exact_value(poly, t) == value for t in range(t_start, bound_t + 1)
        )
    # no growing term: limit is the constant part
    limit = poly.get((Fraction(1), 0), Fraction(0))
    if value == limit:
        return True
    decay = [(c, b, k) for (b, k), c in poly.items() if b != 1]
    delta = abs(value - limit)
    t = max(t_start, 1)
    for _ in range(_SCAN_LIMIT):
        all_decreasing = all(
            b * Fraction(t + 1, t) ** k <= 1 for _, b, k in decay
        )
        if all_decreasing and sum(
            _term_abs(c, b, k, t) for c, b, k in decay
        ) < delta:
            break
        t += 1
    else:
        return None
    return any(exact_value(poly, s) == value for s in range(t_start, t + 1))


def finite_limit(cls: GrowthClass) -> Fraction | None:
    """The finite limit of f(t) as t grows, when one exists exactly."""
    if cls.is_zero:
        return Fraction(0)
    poly = cls.poly() if not cls.sqrt_wrapped else None
    if poly is None:
        return None
    _, bd, kd = dominant_of(poly)
    if bd > 1 or (bd == 1 and kd >= 1):
        return None
    return poly.get((Fraction(1), 0), Fraction(0))
