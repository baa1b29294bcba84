"""Weyl discs, m-points, and the limit-point/limit-circle classifier.

For a nonreal spectral parameter the canonical pair (phi, psi) fixed by a
boundary angle spans all solutions; the m-points m = -(Az+B)/(Cz+D) trace
a circle whose center and radius come from two Lagrange brackets at N.
The discs are nested, so their radii converge: to a positive number (all
solutions square-summable, "limit circle") or to zero (exactly one
square-summable direction, "limit point").  Any finite-N decision is a
heuristic; the classifier reports the raw disc and partial-sum evidence
alongside its verdict.

Numerical note: the candidate square-summable solution chi = phi + m*psi
is a difference of two (possibly astronomically) growing solutions.  When
the forward combination loses more than half the working mantissa it is
recomputed by backward propagation from the far end, which amplifies the
decaying direction instead of burying it, then matched to chi's left
boundary state.  The report records which route was used.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace

from .errors import InadmissibleLambdaError, NumericalInvariantError
from .model import CoefficientSet, as_lambda_scalar, spectral_gap
from .recurrence import BoundaryData, Trajectory, propagate, propagate_backward
from .structure import bracket


@dataclass(frozen=True)
class BoundaryAngles:
    """Left and right boundary angles, each in [0, pi)."""

    alpha: float
    beta: float

    def __post_init__(self):
        for name, value in (("alpha", self.alpha), ("beta", self.beta)):
            if not 0 <= value < math.pi:
                raise ValueError(f"{name} must lie in [0, pi), got {value}")


@dataclass(frozen=True)
class CornerValues:
    """The four pair values at the right end of a finite window:
    A = phi1(N+1), B = phi1q(N), C = psi1(N+1), D = psi1q(N)."""

    n: int
    A: object
    B: object
    C: object
    D: object


@dataclass(frozen=True)
class WeylDisc:
    n: int
    center: object
    radius: object


@dataclass(frozen=True)
class L2Profile:
    """Partial sums S_N of the squared norm of a trajectory, with the
    finite-horizon growth verdict."""

    partial_sums: tuple
    growth_verdict: str  # bounded | divergent | undecided


@dataclass(frozen=True)
class ClassifyOptions:
    n_max: int = 200
    rel_tol: float = 1e-10
    divergence_factor: float = 1e6
    window: int = 32
    cross_check_lambda: complex | None = None


@dataclass(frozen=True)
class ClassificationReport:
    lam: object
    alpha: float
    verdict: str  # LPC | LCC | undecided
    disc_samples: tuple
    psi_profile: L2Profile
    chi_profile: L2Profile | None
    m_limit: object
    l2_solution_count: int | None
    chi_method: str  # forward | backward | unavailable
    reason: str | None = None
    cross_check: tuple | None = None  # (lam, verdict) of the second run


def fundamental_pair(
    model: CoefficientSet, lam, alpha: float, top: int
) -> tuple[Trajectory, Trajectory]:
    """Canonical solutions phi (data sin a, -cos a) and psi (cos a, sin a);
    their Wronskian pairing is 1, so they are independent."""
    if not 0 <= alpha < math.pi:
        raise ValueError(f"alpha must lie in [0, pi), got {alpha}")
    k = model.kernel
    with model.workprec():
        sa, ca = k.sin(alpha), k.cos(alpha)
        phi = propagate(model, lam, BoundaryData(sa, -ca), top)
        psi = propagate(model, lam, BoundaryData(ca, sa), top)
        return phi, psi


def corner_values(pair: tuple[Trajectory, Trajectory], n: int) -> CornerValues:
    phi, psi = pair
    model = phi.model
    k = model.kernel
    with model.workprec():
        a_val, b_val = phi.state(n)
        c_val, d_val = psi.state(n)
        lhs = a_val * d_val - b_val * c_val
        scale = k.absval(a_val * d_val) + k.absval(b_val * c_val) + 1
        if not k.absval(lhs - 1) <= scale * k.real(2) ** (-(model.precision.bits - 8)):
            raise NumericalInvariantError(
                f"pair determinant at N={n} deviates from 1 beyond tolerance"
            )
        return CornerValues(n=n, A=a_val, B=b_val, C=c_val, D=d_val)


def _disc_from_brackets(k, n, mixed, diag) -> WeylDisc:
    if diag == 0:
        raise InadmissibleLambdaError(
            "disc is degenerate: the defining bracket vanishes (real lam?)"
        )
    return WeylDisc(n=n, center=-mixed / diag, radius=1 / k.absval(diag))


def _disc_rows(model, phi, psi, lam, n_hi):
    """Disc sequence and psi partial sums for N = a .. n_hi.

    Both defining brackets are evaluated through their summed form
    (bracket at a-1 plus 2i Im(lam) times a running inner-product sum),
    which is an exact identity of the system and, unlike the product of
    the corner values, loses no precision when the solutions grow fast.
    A leading window with an identically zero psi sample (possible only
    at N = a) is skipped: its circle degenerates to a line.
    """
    k = model.kernel
    diag0 = bracket(psi, psi, model.a - 1)
    mixed0 = bracket(phi, psi, model.a - 1)
    factor = k.complex(0, 2) * k.im(lam)
    s_run = k.real(0)
    w_run = k.complex(0)
    psi_sums = []
    discs = []
    for t in range(model.a, n_hi + 1):
        s1, s2 = psi.component_pair(t)
        p1, p2 = phi.component_pair(t)
        s_run = s_run + k.absval(s1) ** 2 + k.absval(s2) ** 2
        w_run = w_run + k.conj(s1) * p1 + k.conj(s2) * p2
        psi_sums.append((t, s_run))
        diag = diag0 + factor * s_run
        if diag == 0:
            continue
        mixed = mixed0 + factor * w_run
        discs.append(_disc_from_brackets(k, t, mixed, diag))
    return discs, psi_sums


def weyl_disc(model: CoefficientSet, lam, alpha: float, n: int) -> WeylDisc:
    """Center and radius of the m-point circle at window end n."""
    k = model.kernel
    with model.workprec():
        lam = as_lambda_scalar(model, lam)
        if k.im(lam) == 0:
            raise InadmissibleLambdaError("Weyl discs require a nonreal lam")
        phi, psi = fundamental_pair(model, lam, alpha, n)
        discs, _ = _disc_rows(model, phi, psi, lam, n)
        if not discs or discs[-1].n != n:
            raise InadmissibleLambdaError(
                f"disc at N={n} is degenerate (zero psi sample at the origin)"
            )
        return discs[-1]


def m_point(corner: CornerValues, z):
    """m = -(Az+B)/(Cz+D) for real z = cot(beta); z = inf (beta = 0) gives
    the limit -A/C.  A zero denominator would mean lam is an eigenvalue of
    the finite-window problem and is refused."""
    if isinstance(z, float) and math.isinf(z):
        if corner.C == 0:
            raise ZeroDivisionError("m-point at z=inf needs C != 0")
        return -corner.A / corner.C
    den = corner.C * z + corner.D
    if den == 0:
        raise ZeroDivisionError("m-point denominator C z + D vanishes")
    return -(corner.A * z + corner.B) / den


def chi(pair: tuple[Trajectory, Trajectory], m) -> Trajectory:
    """The combination phi + m * psi, including quasi-differences."""
    phi, psi = pair
    with phi.model.workprec():
        return phi.combined(psi, m)


def on_circle_defect(model: CoefficientSet, chi_traj: Trajectory, m, lam, n: int):
    """sum_{t=a}^{n} |chi(t)|^2 - Im(m)/Im(lam): zero when m lies on the
    n-th circle, negative when it lies inside."""
    k = model.kernel
    with model.workprec():
        lam = as_lambda_scalar(model, lam)
        if k.im(lam) == 0:
            raise InadmissibleLambdaError("circle membership requires nonreal lam")
        total = k.real(0)
        for t in range(model.a, n + 1):
            c1, c2 = chi_traj.component_pair(t)
            total = total + k.absval(c1) ** 2 + k.absval(c2) ** 2
        return total - k.im(m) / k.im(lam)


def regular_eigen_residual(
    model: CoefficientSet, lam, angles: BoundaryAngles, n: int
):
    """Right-endpoint boundary form of psi: psi1(N+1) cos b + psi1q(N) sin b.

    A (real, admissible) lam is an eigenvalue of the finite-window
    boundary value problem exactly when this residual vanishes; for
    nonreal lam it never does.
    """
    k = model.kernel
    with model.workprec():
        lam = as_lambda_scalar(model, lam)
        point = spectral_gap(model, lam, n + 1)
        if not point.admissible:
            raise InadmissibleLambdaError("lam is not admissible on this window")
        _, psi = fundamental_pair(model, lam, angles.alpha, n)
        sb, cb = k.sin(angles.beta), k.cos(angles.beta)
        return psi.y1_at(n + 1) * cb + psi.y1q_at(n) * sb


# ---------------------------------------------------------------------------
# Classification


def _norm1(state, k):
    return k.absval(state[0]) + k.absval(state[1])


def _stable_chi(model, lam, phi, psi, m, n_max, radius_last):
    """chi = phi + m psi, by the forward combination when it keeps at least
    half the mantissa everywhere, else by backward propagation matched to
    chi's left boundary state.  Returns (trajectory or None, method)."""
    k = model.kernel
    bits = model.precision.bits
    chi_fwd = phi.combined(psi, m)
    m_abs = k.absval(m)
    floor = k.real(2) ** (-(bits // 2))
    trusted = True
    for t in range(model.a - 1, n_max + 1):
        mag = _norm1(phi.state(t), k) + m_abs * _norm1(psi.state(t), k)
        if _norm1(chi_fwd.state(t), k) < mag * floor:
            trusted = False
            break
    if trusted:
        return chi_fwd, "forward"

    left_target = (
        phi.y1_at(model.a) + m * psi.y1_at(model.a),
        phi.y1q_at(model.a - 1) + m * psi.y1q_at(model.a - 1),
    )
    norm_left = _norm1(left_target, k)
    # backward-normalization mismatch allows for m being the disc center
    # rather than the true limit point: that shift is at most the radius
    thresh = norm_left * k.real(2) ** (-(bits // 4)) + 8 * radius_last * (1 + m_abs)
    for seed in ((1, 0), (0, 1), (1, 1)):
        w = propagate_backward(
            model, lam, (k.complex(seed[0]), k.complex(seed[1])), n_max
        )
        w_left = w.state(model.a - 1)
        j = 0 if k.absval(left_target[0]) >= k.absval(left_target[1]) else 1
        if w_left[j] == 0:
            continue
        scale = left_target[j] / w_left[j]
        mismatch = k.absval(w_left[1 - j] * scale - left_target[1 - j])
        if mismatch <= thresh:
            return w.scaled(scale), "backward"
    return None, "unavailable"


def _profile(model, traj, n_max) -> list:
    k = model.kernel
    total = k.real(0)
    sums = []
    for t in range(model.a, n_max + 1):
        c1, c2 = traj.component_pair(t)
        total = total + k.absval(c1) ** 2 + k.absval(c2) ** 2
        sums.append((t, total))
    return sums


def _growth_verdict(sums, model, options) -> str:
    k = model.kernel
    a = model.a
    by_n = dict(sums)
    last = by_n[options.n_max]
    tail = by_n[options.n_max - options.window]
    half = by_n[max(a, options.n_max // 2)]
    bounded = (last - tail) < k.real(options.rel_tol) * last
    divergent = last > k.real(options.divergence_factor) * half
    if bounded and not divergent:
        return "bounded"
    if divergent and not bounded:
        return "divergent"
    return "undecided"


def classify(
    model: CoefficientSet, lam, alpha: float = 0.0,
    options: ClassifyOptions | None = None,
) -> ClassificationReport:
    """Limit-type verdict at lam with full disc and profile evidence.

    LCC when both the psi and chi partial sums pass the bounded test (all
    solutions square-summable); LPC when psi diverges while chi stays
    bounded (exactly one square-summable direction); undecided otherwise,
    in which case raising n_max or the precision usually resolves it.
    """
    options = options or ClassifyOptions()
    if options.n_max < model.a + options.window + 4:
        raise ValueError(
            "n_max must exceed a + window + 4 for the trailing-window tests"
        )
    k = model.kernel
    with model.workprec():
        lam = as_lambda_scalar(model, lam)
        if k.im(lam) == 0:
            raise InadmissibleLambdaError("classification requires a nonreal lam")
        point = spectral_gap(model, lam, options.n_max + 1)
        if not point.admissible:
            raise InadmissibleLambdaError("lam is not admissible over the horizon")

        phi, psi = fundamental_pair(model, lam, alpha, options.n_max)
        discs, psi_sums = _disc_rows(model, phi, psi, lam, options.n_max)
        m_limit = discs[-1].center

        chi_traj, chi_method = _stable_chi(
            model, lam, phi, psi, m_limit, options.n_max, discs[-1].radius
        )
        psi_verdict = _growth_verdict(psi_sums, model, options)
        psi_profile = L2Profile(tuple(psi_sums), psi_verdict)

        if chi_traj is None:
            chi_profile = None
            verdict, reason = "undecided", "chi profile could not be stabilized"
        else:
            chi_sums = _profile(model, chi_traj, options.n_max)
            chi_verdict = _growth_verdict(chi_sums, model, options)
            chi_profile = L2Profile(tuple(chi_sums), chi_verdict)
            if psi_verdict == "bounded" and chi_verdict == "bounded":
                verdict, reason = "LCC", None
            elif psi_verdict == "divergent" and chi_verdict == "bounded":
                verdict, reason = "LPC", None
            else:
                verdict = "undecided"
                reason = (
                    f"psi profile {psi_verdict}, chi profile {chi_verdict}; "
                    "raise n_max or mantissa_bits"
                )

        cross = None
        if options.cross_check_lambda is not None:
            sub = classify(
                model, options.cross_check_lambda, alpha,
                replace(options, cross_check_lambda=None),
            )
            cross = (sub.lam, sub.verdict)
            if (
                verdict != "undecided"
                and sub.verdict != "undecided"
                and sub.verdict != verdict
            ):
                reason = (
                    f"verdicts disagree between lam values: {verdict} vs "
                    f"{sub.verdict}"
                )
                verdict = "undecided"

        counts = {"LCC": 2, "LPC": 1}
        return ClassificationReport(
            lam=lam,
            alpha=alpha,
            verdict=verdict,
            disc_samples=tuple(discs),
            psi_profile=psi_profile,
            chi_profile=chi_profile,
            m_limit=m_limit,
            l2_solution_count=counts.get(verdict),
            chi_method=chi_method,
            reason=reason,
            cross_check=cross,
        )
