"""Sufficient limit-point criteria decided from the coefficients alone.

Two closed checks, each sound but not necessary:

* ratio criterion -- |c/p| bounded beyond some index together with a
  divergent sum of 1/|p| forces the limit point case;
* weighted criterion -- p positive, with a positive weight sequence M
  controlling c, h and the negative part of q, a bounded normalized
  variation of M, and a divergent weighted series
  sum 1/((p^2 + c^2)^(1/4) sqrt(M)) (shifted one step in p and c).

The bound constants involved are existential, so a numeric scan can
witness but never certify them; certification happens through the exact
growth classes of the coefficients (dominant-term comparison and the
divergence decision table: a reciprocal series sum 1/f diverges exactly
when f's dominant base is below 1, or equals 1 with t-power at most 1).
Whenever a certificate is unavailable the verdict is ``unknown``, never
a guess, and a definite verdict can never flip under a longer horizon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

from . import expr as ex
from . import growth
from .errors import EvaluationError
from .growth import GrowthClass
from .model import Coefficient, CoefficientSet, ExprCoefficient

asymptotic_class = growth.class_of_expr


@dataclass(frozen=True)
class CriterionVerdict:
    outcome: str  # holds | fails | unknown
    which: str  # ratio | weighted
    witnesses: dict
    failing_condition: str | None = None
    reason: str | None = None


def _coefficient_class(coeff: Coefficient) -> GrowthClass | None:
    return coeff.growth_class()


def _float_of(model: CoefficientSet, value) -> float:
    try:
        return float(model.kernel.to_mpf(value))
    except (OverflowError, ValueError):
        return math.inf


def _scan_sup(model: CoefficientSet, horizon: int, fn, lo: int | None = None) -> float:
    worst = 0.0
    with model.workprec():
        for t in range(model.a if lo is None else lo, horizon + 1):
            worst = max(worst, _float_of(model, fn(t)))
    return worst


def ratio_limit_point_check(model: CoefficientSet, horizon: int = 200) -> CriterionVerdict:
    """Bounded |c/p| plus divergent sum of 1/|p| force the limit point case."""
    c_cls = _coefficient_class(model.c)
    p_cls = _coefficient_class(model.p)
    witnesses: dict = {"N": model.a}

    if c_cls is not None and c_cls.is_zero:
        ratio_ok = True
        witnesses["K"] = 0.0
    elif c_cls is None or p_cls is None:
        return CriterionVerdict(
            outcome="unknown", which="ratio", witnesses=witnesses,
            reason="coupling/leading coefficient has no certified asymptotics",
        )
    else:
        ratio_ok = growth.ratio_bounded(growth.order_of(c_cls), growth.order_of(p_cls))
        witnesses["K"] = _scan_sup(
            model, horizon,
            lambda t: abs(model.coeff("c", t)) / abs(model.coeff("p", t)),
        )
    if not ratio_ok:
        return CriterionVerdict(
            outcome="fails", which="ratio", witnesses=witnesses,
            failing_condition="coupling_ratio_bound",
        )

    if p_cls is None:
        return CriterionVerdict(
            outcome="unknown", which="ratio", witnesses=witnesses,
            reason="leading coefficient has no certified asymptotics "
                   "(finite data cannot witness divergence)",
        )
    p_order = growth.order_of(p_cls)
    if growth.recip_sum_diverges(p_order):
        return CriterionVerdict(outcome="holds", which="ratio", witnesses=witnesses)
    return CriterionVerdict(
        outcome="fails", which="ratio", witnesses=witnesses,
        failing_condition="reciprocal_series_divergence",
    )


def _certify_positive(model: CoefficientSet, coeff: Coefficient, horizon: int):
    """(verdict, witness_t): True if positive on the whole grid from a,
    False with a witness index if a violation is found, None if only the
    scanned range could be checked."""
    with model.workprec():
        for t in range(model.a, horizon + 1):
            if not coeff.value(t, model.kernel) > 0:
                return False, t
    cls = coeff.growth_class()
    if cls is None:
        return None, None
    sign = growth.eventual_sign(cls, model.a)
    if sign is None:
        return None, None
    if sign[0] <= 0:
        return False, None
    # positive beyond sign[1]; verify the remaining front exactly
    front_end = max(sign[1], model.a)
    if front_end > horizon:
        poly = cls.poly()
        for t in range(max(horizon + 1, model.a), front_end + 1):
            value = growth.exact_value(poly, t)
            if cls.sqrt_wrapped:
                if value < 0:
                    return False, t
                continue
            if not value > 0:
                return False, t
    return True, None


def weighted_limit_point_check(
    model: CoefficientSet, weight: Coefficient | ex.CoefficientExpr,
    horizon: int = 200,
) -> CriterionVerdict:
    """Weight-sequence criterion; ``weight`` is the positive sequence M."""
    if isinstance(weight, str):
        weight = ExprCoefficient.parse(weight)
    elif not isinstance(weight, ExprCoefficient):
        weight = ExprCoefficient(weight)
    witnesses: dict = {"N": model.a}

    # M > 0 wherever we can see it; a witnessed violation is an input error
    with model.workprec():
        for t in range(model.a, horizon + 1):
            if not weight.value(t, model.kernel) > 0:
                raise EvaluationError(f"weight M({t}) is not positive")

    p_positive, bad_t = _certify_positive(model, model.p, horizon)
    if p_positive is False:
        witnesses["p_violation_t"] = bad_t
        return CriterionVerdict(
            outcome="fails", which="weighted", witnesses=witnesses,
            failing_condition="p_positive",
        )
    if p_positive is None:
        return CriterionVerdict(
            outcome="unknown", which="weighted", witnesses=witnesses,
            reason="positivity of p beyond the horizon could not be certified",
        )

    m_cls = weight.growth_class()
    c_cls = _coefficient_class(model.c)
    h_cls = _coefficient_class(model.h)
    q_cls = _coefficient_class(model.q)
    p_cls = _coefficient_class(model.p)

    def scan_witnesses():
        k = model.kernel
        witnesses["k1"] = _scan_sup(
            model, horizon,
            lambda t: (abs(model.coeff("c", t)) + abs(model.coeff("c", t - 1)))
            / weight.value(t, k),
        )
        witnesses["k2"] = _scan_sup(
            model, horizon,
            lambda t: abs(model.coeff("h", t)) / weight.value(t, k),
        )
        witnesses["k3"] = _scan_sup(
            model, horizon,
            lambda t: max(-model.coeff("q", t), k.real(0)) / weight.value(t, k),
        )

        def variation(t):
            m_t = weight.value(t, k)
            m_prev = weight.value(t - 1, k)
            grad = abs(m_t - m_prev)
            p_prev = model.coeff("p", t - 1)
            return k.sqrt_nonneg(p_prev) * grad / (k.sqrt_nonneg(m_t) * m_prev)

        # the variation ratio needs M(t-1): usable only from a+1, where
        # the validated positive range covers the previous index
        witnesses["k4"] = _scan_sup(
            model, min(horizon, model.a + 200), variation, lo=model.a + 1
        )

    if m_cls is None or m_cls.is_zero:
        scan_witnesses()
        return CriterionVerdict(
            outcome="unknown", which="weighted", witnesses=witnesses,
            reason="weight has no certified asymptotics",
        )
    m_order = growth.order_of(m_cls)

    # condition 1: |c| and |h| dominated by M
    for cls, name in ((c_cls, "c"), (h_cls, "h")):
        if cls is None:
            scan_witnesses()
            return CriterionVerdict(
                outcome="unknown", which="weighted", witnesses=witnesses,
                reason=f"{name} has no certified asymptotics",
            )
        bounded = growth.ratio_bounded(growth.order_of(cls), m_order)
        if bounded is not True:
            scan_witnesses()
            return CriterionVerdict(
                outcome="fails", which="weighted", witnesses=witnesses,
                failing_condition="coupling_bound",
            )

    # condition 2: q bounded below by a multiple of -M
    if q_cls is None:
        scan_witnesses()
        return CriterionVerdict(
            outcome="unknown", which="weighted", witnesses=witnesses,
            reason="q has no certified asymptotics",
        )
    if not q_cls.is_zero:
        sign = growth.eventual_sign(q_cls, model.a)
        if sign is None:
            scan_witnesses()
            return CriterionVerdict(
                outcome="unknown", which="weighted", witnesses=witnesses,
                reason="sign of q could not be certified",
            )
        if sign[0] < 0:
            bounded = growth.ratio_bounded(growth.order_of(q_cls), m_order)
            if bounded is not True:
                scan_witnesses()
                return CriterionVerdict(
                    outcome="fails", which="weighted", witnesses=witnesses,
                    failing_condition="potential_lower_bound",
                )

    # condition 3: normalized variation of M stays bounded
    if p_cls is None:
        scan_witnesses()
        return CriterionVerdict(
            outcome="unknown", which="weighted", witnesses=witnesses,
            reason="p has no certified asymptotics",
        )
    p_order = growth.order_of(p_cls)
    if p_order is None:
        raise EvaluationError("p is identically zero")  # p != 0 by contract
    if m_cls.sqrt_wrapped:
        scan_witnesses()
        return CriterionVerdict(
            outcome="unknown", which="weighted", witnesses=witnesses,
            reason="variation of a sqrt-wrapped weight is not certified",
        )
    nabla_m = growth.nabla_poly(m_cls.poly())
    if nabla_m:
        nabla_cls = growth._class_from_poly(nabla_m)
        num_order = p_order.pow(Fraction(1, 2)).mul(growth.order_of(nabla_cls))
        den_order = m_order.pow(Fraction(3, 2))
        if growth.order_cmp(num_order, den_order) > 0:
            scan_witnesses()
            return CriterionVerdict(
                outcome="fails", which="weighted", witnesses=witnesses,
                failing_condition="weight_variation",
            )

    # condition 4: divergence of sum 1/((p^2+c^2)^(1/4) sqrt(M))
    c_order = growth.order_of(c_cls) if not c_cls.is_zero else None
    pc_order = p_order.pow(Fraction(2))
    if c_order is not None:
        c_sq = c_order.pow(Fraction(2))
        if growth.order_cmp(c_sq, pc_order) > 0:
            pc_order = c_sq
    term_order = pc_order.pow(Fraction(1, 4)).mul(m_order.pow(Fraction(1, 2)))
    scan_witnesses()
    if growth.recip_sum_diverges(term_order):
        return CriterionVerdict(outcome="holds", which="weighted", witnesses=witnesses)
    return CriterionVerdict(
        outcome="fails", which="weighted", witnesses=witnesses,
        failing_condition="weighted_series_divergence",
    )
