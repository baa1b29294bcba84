import math

import pytest

from weyldisc import (
    BoundaryAngles,
    BoundaryData,
    ClassifyOptions,
    InadmissibleLambdaError,
    builtin_scenario,
    chi,
    classify,
    corner_values,
    fundamental_pair,
    m_point,
    on_circle_defect,
    oracle_three_term,
    propagate,
    regular_eigen_residual,
    weyl_disc,
    wronskian,
)
from weyldisc.recurrence import max_relative_residual

from conftest import EXPECTED_VERDICTS, fabs, fdiff


def test_fundamental_pair_initial_data(models):
    free = models["free"]
    phi, psi = fundamental_pair(free, 1j, 0.0, 6)
    assert fabs(free, phi.y1_at(0)) == 0
    assert fdiff(free, phi.y1q_at(-1), -1) == 0
    assert fdiff(free, psi.y1_at(0), 1) == 0
    assert fabs(free, psi.y1q_at(-1)) == 0
    assert fdiff(free, psi.y1_at(1), 1 - 1j) == 0
    assert fdiff(free, phi.y1_at(1), -1) == 0


def test_fundamental_pair_wronskian_long_window(models):
    model = models["ex4.1a"]
    phi, psi = fundamental_pair(model, 1j, 0.0, 100)
    for t in range(-1, 100):
        w = wronskian(phi, psi, t)
        scale = (
            fabs(model, phi.y1_at(t + 1)) * fabs(model, psi.y1q_at(t))
            + fabs(model, phi.y1q_at(t)) * fabs(model, psi.y1_at(t + 1))
            + 1
        )
        assert fdiff(model, w, 1) <= scale * 1e-70


def test_corner_values_free_model(models):
    free = models["free"]
    pair = fundamental_pair(free, 1j, 0.0, 4)
    corner = corner_values(pair, 0)
    assert fdiff(free, corner.A, -1) == 0
    assert fdiff(free, corner.B, -1) == 0
    assert fdiff(free, corner.C, 1 - 1j) == 0
    assert fdiff(free, corner.D, -1j) == 0
    with free.workprec():
        k = free.kernel
        assert fdiff(free, corner.A * corner.D - corner.B * corner.C, 1) == 0
        diag = corner.C * k.conj(corner.D) - corner.D * k.conj(corner.C)
        assert fdiff(free, diag, 2j) == 0


def test_weyl_disc_free_model(models):
    free = models["free"]
    disc = weyl_disc(free, 1j, 0.0, 0)
    assert fdiff(free, disc.center, 0.5j) == 0
    assert fdiff(free, disc.radius, 0.5) == 0


def test_weyl_disc_rejects_real_lam(models):
    with pytest.raises(InadmissibleLambdaError):
        weyl_disc(models["free"], 2.0, 0.0, 5)


def test_disc_nesting_first_steps(models):
    free = models["free"]
    d0 = weyl_disc(free, 1j, 0.0, 0)
    d1 = weyl_disc(free, 1j, 0.0, 1)
    with free.workprec():
        k = free.kernel
        assert float(k.to_mpf(d1.radius)) <= float(k.to_mpf(d0.radius))
        gap = k.absval(d1.center - d0.center)
        assert float(k.to_mpf(gap - (d0.radius - d1.radius))) <= 1e-70


def test_m_point_values_and_circle_membership(models):
    free = models["free"]
    pair = fundamental_pair(free, 1j, 0.0, 4)
    corner = corner_values(pair, 0)
    disc = weyl_disc(free, 1j, 0.0, 0)
    with free.workprec():
        k = free.kernel
        m0 = m_point(corner, k.real(0))
        assert fdiff(free, m0, 1j) == 0
        assert fdiff(free, k.absval(m0 - disc.center), 0.5) == 0
        m_inf = m_point(corner, math.inf)
        assert fdiff(free, m_inf, 0.5 + 0.5j) == 0
        assert fdiff(free, k.absval(m_inf - disc.center), 0.5) < 1e-70


def test_m_sweep_stays_on_circle(models):
    free = models["free"]
    pair = fundamental_pair(free, 1j, 0.0, 12)
    corner = corner_values(pair, 8)
    disc = weyl_disc(free, 1j, 0.0, 8)
    k = free.kernel
    with free.workprec():
        for i in range(8):
            beta = math.pi * i / 8
            z = math.inf if beta == 0 else k.cos(beta) / k.sin(beta)
            m_val = m_point(corner, z)
            dev = abs(float(k.to_mpf(k.absval(m_val - disc.center) / disc.radius)) - 1)
            assert dev < 1e-40
            defect = on_circle_defect(free, chi(pair, m_val), m_val, 1j, 8)
            assert fabs(free, defect) < 1e-40


def test_chi_with_zero_m_is_phi(models):
    free = models["free"]
    pair = fundamental_pair(free, 1j, 0.0, 6)
    combo = chi(pair, 0)
    assert all(fdiff(free, a, b) == 0 for a, b in zip(combo.y1, pair[0].y1))


def test_chi_first_component(models):
    free = models["free"]
    pair = fundamental_pair(free, 1j, 0.0, 6)
    with free.workprec():
        combo = chi(pair, free.kernel.complex(0, 1))
    assert fdiff(free, combo.y1_at(0), 1j) == 0


def test_chi_solves_the_equation(models):
    model = models["ex4.2b"]
    pair = fundamental_pair(model, 1j, 0.25, 30)
    with model.workprec():
        combo = chi(pair, model.kernel.complex(0.3, 0.8))
    assert max_relative_residual(model, combo) < 1e-70


def test_on_circle_defect_sign(models):
    free = models["free"]
    pair = fundamental_pair(free, 1j, 0.0, 10)
    disc = weyl_disc(free, 1j, 0.0, 6)
    corner = corner_values(pair, 6)
    k = free.kernel
    with free.workprec():
        # center lies strictly inside: defect negative
        center_defect = on_circle_defect(free, chi(pair, disc.center), disc.center, 1j, 6)
        assert float(k.to_mpf(k.re(center_defect))) < 0
        # a circle point of the *larger* window N'=9 is inside at N=6 but on at 9
        pair9 = fundamental_pair(free, 1j, 0.0, 12)
        corner9 = corner_values(pair9, 9)
        m9 = m_point(corner9, k.real(0.7))
        inner = on_circle_defect(free, chi(pair9, m9), m9, 1j, 6)
        outer = on_circle_defect(free, chi(pair9, m9), m9, 1j, 9)
        assert float(k.to_mpf(k.re(inner))) < 0
        assert fabs(free, outer) < 1e-40


def test_classify_reproduces_expected_verdicts(classify_memo):
    for name, want in EXPECTED_VERDICTS.items():
        report = classify_memo(name)
        assert report.verdict == want, name
        assert report.l2_solution_count == (2 if want == "LCC" else 1)


def test_classify_disc_radii_nonincreasing(classify_memo, models):
    for name in EXPECTED_VERDICTS:
        report = classify_memo(name)
        model = models[name]
        radii = [fabs(model, d.radius) for d in report.disc_samples]
        assert all(r1 >= r2 for r1, r2 in zip(radii, radii[1:])), name


def test_classify_partial_sums_nondecreasing(classify_memo, models):
    report = classify_memo("ex4.1b")
    model = models["ex4.1b"]
    for profile in (report.psi_profile, report.chi_profile):
        values = [fabs(model, s) for _, s in profile.partial_sums]
        assert all(a <= b for a, b in zip(values, values[1:]))


def test_classify_rejects_real_lam(models):
    with pytest.raises(InadmissibleLambdaError):
        classify(models["free"], 1.0)


def test_classify_rejects_excluded_lam(models):
    with pytest.raises(InadmissibleLambdaError):
        classify(models["ex4.1a"], 1.0 + 0j)


def test_classify_cross_check_agreement(models):
    options = ClassifyOptions(n_max=80, cross_check_lambda=1 + 1j)
    report = classify(models["ex4.1a"], 1j, 0.0, options)
    assert report.verdict == "LCC"
    assert report.cross_check[1] == "LCC"


def test_classify_undecided_with_extreme_thresholds(models):
    options = ClassifyOptions(
        n_max=60, rel_tol=1e-40, divergence_factor=1e30, window=8
    )
    report = classify(models["free"], 1j, 0.0, options)
    assert report.verdict == "undecided"
    assert report.l2_solution_count is None
    assert report.reason


def test_classify_validates_window(models):
    with pytest.raises(ValueError, match="n_max"):
        classify(models["free"], 1j, 0.0, ClassifyOptions(n_max=20, window=32))


def test_eigen_residual_linear_in_lam(models):
    free = models["free"]
    angles = BoundaryAngles(0.0, 0.0)
    r1 = regular_eigen_residual(free, 1.0, angles, 0)
    assert fabs(free, r1) < 1e-70
    r3 = regular_eigen_residual(free, 3.0, angles, 0)
    assert fdiff(free, r3, -2) == 0
    ri = regular_eigen_residual(free, 1j, angles, 0)
    assert fabs(free, ri) > 0.5


def test_eigen_residual_matches_oracle(models):
    """U2(psi) against the independent scalar recursion."""
    free = models["free"]
    angles = BoundaryAngles(0.0, 0.7)
    got = regular_eigen_residual(free, 0.5, angles, 6)
    k = free.kernel
    with free.workprec():
        psi = oracle_three_term(free, 0.5, BoundaryData(1, 0), 7)
        want = psi.y1_at(7) * k.cos(0.7) + psi.y1q_at(6) * k.sin(0.7)
        assert fdiff(free, got, want) < 1e-70


def test_eigen_rejects_inadmissible(models):
    with pytest.raises(InadmissibleLambdaError):
        regular_eigen_residual(models["free"], 0.0, BoundaryAngles(0.0, 0.0), 4)


def test_boundary_angle_validation():
    with pytest.raises(ValueError):
        BoundaryAngles(-0.1, 0.0)
    with pytest.raises(ValueError):
        BoundaryAngles(0.0, math.pi)


def test_alpha_half_pi_classifies(models):
    scenario = builtin_scenario("free")
    report = classify(models["free"], 1j, math.pi / 2, scenario.classify_options())
    assert report.verdict == "LPC"


def test_degenerate_origin_disc_is_skipped(models):
    """Exactly-zero solution data at the origin (the idealized alpha =
    pi/2 pair) makes the first circle degenerate; the sequence starts at
    the next window."""
    from weyldisc.weyl import _disc_rows

    free = models["free"]
    with free.workprec():
        k = free.kernel
        psi = propagate(free, 1j, BoundaryData(0, 1), 10)
        phi = propagate(free, 1j, BoundaryData(-1, 0), 10)
        discs, sums = _disc_rows(free, phi, psi, k.complex(0, 1), 10)
    assert sums[0][1] == 0
    assert discs[0].n == 1
    assert len(discs) == 10
