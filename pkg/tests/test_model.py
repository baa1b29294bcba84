import random
from fractions import Fraction

import mpmath
import pytest

from weyldisc import (
    CoefficientSet,
    CoefficientRangeError,
    EvaluationError,
    PrecisionConfig,
    TableCoefficient,
    derived_at,
    spectral_gap,
    split_perturbation,
)
from weyldisc.model import ExprCoefficient

from conftest import fabs, fdiff


def test_free_model_derived_values(models):
    free = models["free"]
    sample = derived_at(free, 0, 1j)
    assert fdiff(free, sample.p_tilde, 1) == 0
    assert fabs(free, sample.alpha) == 0
    assert fdiff(free, sample.h_shift, -1j) == 0
    assert fabs(free, sample.m_excl) == 0


def test_perturbed_geometric_effective_potential(models):
    """q_eff for the h-coupled family equals its closed rational form."""
    model = models["ex4.1b"]
    k = model.kernel
    with model.workprec():
        lam = k.complex(0, 1)
        for t in (0, 1, 5, 20):
            sample = derived_at(model, t, lam)
            four_t = k.real(4) ** t
            expected = four_t + (four_t + k.real(4) ** (-t) + 2) / (lam - 1)
            assert fdiff(model, sample.q_tilde, expected) / fabs(model, expected) < 1e-70
            assert fdiff(model, sample.p_tilde, -four_t) == 0


def test_sqrt_coupled_effective_leading_coefficient(models):
    """p_eff for the c-coupled family equals 1 + (4^2t + 4^t)/(lam - 4^t)."""
    model = models["ex4.2b"]
    k = model.kernel
    with model.workprec():
        lam = k.complex(0, 1)
        for t in (0, 1, 4, 9):
            sample = derived_at(model, t, lam)
            four_t = k.real(4) ** t
            expected = 1 + (four_t * four_t + four_t) / (lam - four_t)
            assert fdiff(model, sample.p_tilde, expected) / fabs(model, expected) < 1e-70


def test_p_tilde_m_excl_consistency(models):
    """p_eff (lam - d) = p (lam - m_excl), the defining factorization."""
    rng = random.Random(11)
    for model in models.values():
        k = model.kernel
        with model.workprec():
            for _ in range(20):
                t = rng.randint(model.a - 1, model.a + 30)
                lam = k.complex(rng.uniform(-3, 3), rng.uniform(0.2, 3))
                s = derived_at(model, t, lam)
                d_val = model.coeff("d", t)
                p_val = model.coeff("p", t)
                lhs = s.p_tilde * (lam - d_val)
                rhs = p_val * (lam - s.m_excl)
                scale = fabs(model, lhs) + fabs(model, rhs)
                assert fdiff(model, lhs, rhs) <= scale * 2.0 ** -248


def test_alpha_definition(models):
    model = models["ex4.1b"]
    k = model.kernel
    with model.workprec():
        lam = k.complex(0.5, 2)
        s = derived_at(model, 3, lam)
        expected = model.coeff("h", 3) * model.coeff("c", 3) / (lam - model.coeff("d", 3))
        assert fdiff(model, s.alpha, expected) == 0


def test_derived_precision_agreement(models):
    """256- and 512-bit evaluations agree to at least 60 digits, t <= 50."""
    for name in ("ex4.1b", "ex4.2b"):
        base = models[name]
        hi = base.with_precision(PrecisionConfig(mantissa_bits=512))
        for t in (0, 17, 50):
            lo_s = derived_at(base, t, 1j)
            hi_s = derived_at(hi, t, 1j)
            with hi.workprec():
                k = hi.kernel
                for field in ("p_tilde", "q_tilde", "alpha", "m_excl"):
                    lo_v = k.to_mpf(k.absval(getattr(lo_s, field) - getattr(hi_s, field)))
                    ref = k.to_mpf(k.absval(getattr(hi_s, field))) + mpmath.mpf(1e-30)
                    assert lo_v / ref < mpmath.mpf(10) ** -60


def test_spectral_gap_examples(models):
    gap = spectral_gap(models["ex4.1b"], 1j, 40)
    assert gap.margin == pytest.approx(2 ** 0.5, rel=1e-12)
    assert gap.decided_symbolically

    zero = spectral_gap(models["free"], 0.0, 40)
    assert zero.margin == 0.0 and not zero.admissible

    one = spectral_gap(models["free"], 1j, 40)
    assert one.margin == pytest.approx(1.0, rel=1e-12)


def test_spectral_gap_monotone_in_horizon(models):
    model = models["ex4.2b"]
    margins = [spectral_gap(model, 2.5, h).margin for h in (5, 10, 20, 40)]
    assert all(m1 >= m2 for m1, m2 in zip(margins, margins[1:]))


def test_spectral_gap_symbolic_hits(models):
    model = models["ex4.2b"]
    # 4.0 is in the range of d = 4^t; -16.0 in the range of the derived
    # excluded sequence -4^(2t); -17 avoids both, certified for all t
    assert spectral_gap(model, 4.0, 10).margin == 0.0
    assert spectral_gap(model, -16.0, 10).margin == 0.0
    clear = spectral_gap(model, -17.0, 10)
    assert clear.margin == pytest.approx(1.0) and clear.decided_symbolically


def test_spectral_gap_hit_beyond_horizon_is_still_rejected(models):
    # 4^6 = 4096 is attained at t=6, beyond this horizon of 3
    point = spectral_gap(models["ex4.2a"], 4096.0, 3)
    assert point.decided_symbolically and point.margin == 0.0


def test_spectral_gap_accumulation_point():
    model = CoefficientSet.from_expressions(a=0, p="1", d="1 + 2^(-t)")
    # 1 is the limit of d, never attained: in the closure
    assert spectral_gap(model, 1.0, 30).margin == 0.0
    ok = spectral_gap(model, 0.99, 30)
    assert ok.margin > 0 and ok.decided_symbolically


def test_split_perturbation(models):
    diagonal, delta = split_perturbation(models["ex4.1b"])
    assert diagonal.c.text() == "0" and diagonal.h.text() == "0"
    assert diagonal.p.text() == models["ex4.1b"].p.text()
    assert delta.h.text() == "2^t + 2^(-t)"
    # already-diagonal model: the split-off pair is identically zero
    _, zero_delta = split_perturbation(models["ex4.2a"])
    assert zero_delta.c.text() == "0" and zero_delta.h.text() == "0"
    # the sqrt-coupled family's delta carries its c
    _, sqrt_delta = split_perturbation(models["ex4.2b"])
    assert sqrt_delta.c.text() == "sqrt(4^(2 * t) + 4^t)"


def test_table_coefficient_range_error():
    table = TableCoefficient(start=-1, values=tuple(Fraction(n) for n in range(5)))
    model = CoefficientSet(
        a=0,
        p=ExprCoefficient.parse("1"),
        q=ExprCoefficient.parse("0"),
        c=ExprCoefficient.parse("0"),
        h=ExprCoefficient.parse("0"),
        d=table,
    )
    with model.workprec():
        assert float(model.kernel.to_mpf(model.coeff("d", 2))) == 3.0
        with pytest.raises(CoefficientRangeError):
            model.coeff("d", 4)


def test_vanishing_p_is_an_error():
    model = CoefficientSet.from_expressions(a=0, p="t - 3")
    with model.workprec():
        with pytest.raises(EvaluationError, match="p\\(3\\) = 0"):
            model.coeff("p", 3)


def test_precision_config_validation():
    with pytest.raises(ValueError):
        PrecisionConfig(mantissa_bits=32)
    with pytest.raises(ValueError):
        PrecisionConfig(mode="quad")
