"""Initial value problems for the mixed-order system.

The two-component equation is equivalent to a first-order recursion for
the state v(t) = (y1(t+1), y1q(t)), where y1q is the quasi-difference
p*dy1 + c*y2: stepping forward solves (I - A(t)) v(t) = v(t-1) with the
closed-form 2x2 inverse (det(I - A) == 1, so no pivoting is needed), and
y2 is reconstructed algebraically from the state.  The values at t = a-1
come from a 2x2 boundary system whose determinant is -p_eff(a-1), nonzero
for admissible lam.

``oracle_three_term`` is the independent check: it never touches the
transfer matrices, solving instead the scalar three-term recurrence

    p_eff(t) y1(t+1) = (p_eff(t) + p_eff(t-1) + q_eff(t) - lam) y1(t)
                       - p_eff(t-1) y1(t-1)

with y2 recovered from y1 by its defining algebraic relation.
"""

from __future__ import annotations

from dataclasses import dataclass

from .backends import checked_div
from .errors import (
    InadmissibleLambdaError,
    NumericalInvariantError,
    PrecisionExhaustedError,
    WindowError,
)
from .model import CoefficientSet, as_lambda_scalar, _derived_at


@dataclass(frozen=True)
class StepMatrix:
    """One-step coefficient matrix A(t) of the first-order system."""

    t: int
    a11: object
    a12: object
    a21: object
    a22: object

    def det_i_minus_a(self):
        return (1 - self.a11) * (1 - self.a22) - self.a12 * self.a21


@dataclass(frozen=True)
class BoundaryData:
    """Initial data (y1(a), y1q(a-1))."""

    c1: object
    c2: object


@dataclass(frozen=True)
class Trajectory:
    """A solution sampled on the window a-1 .. top.

    y1 additionally carries the value at top+1 (the state at top needs
    it); y2 and the quasi-difference y1q run over a-1 .. top.
    """

    model: CoefficientSet
    lam: object
    top: int
    y1: tuple
    y2: tuple
    y1q: tuple

    @property
    def a(self) -> int:
        return self.model.a

    def _idx(self, t: int, hi: int, what: str) -> int:
        if t < self.a - 1 or t > hi:
            raise WindowError(
                f"{what} stored for {self.a - 1} <= t <= {hi}, got t={t}"
            )
        return t - (self.a - 1)

    def y1_at(self, t: int):
        return self.y1[self._idx(t, self.top + 1, "y1")]

    def y2_at(self, t: int):
        return self.y2[self._idx(t, self.top, "y2")]

    def y1q_at(self, t: int):
        return self.y1q[self._idx(t, self.top, "quasi-difference")]

    def state(self, t: int) -> tuple:
        """(y1(t+1), y1q(t)) for a-1 <= t <= top."""
        return (self.y1_at(t + 1), self.y1q_at(t))

    def component_pair(self, t: int) -> tuple:
        """(y1(t), y2(t)) for a-1 <= t <= top."""
        return (self.y1_at(t), self.y2_at(t))

    def scaled(self, factor) -> "Trajectory":
        return Trajectory(
            model=self.model, lam=self.lam, top=self.top,
            y1=tuple(v * factor for v in self.y1),
            y2=tuple(v * factor for v in self.y2),
            y1q=tuple(v * factor for v in self.y1q),
        )

    def combined(self, other: "Trajectory", factor) -> "Trajectory":
        """self + factor * other, componentwise."""
        if other.top != self.top or other.model != self.model:
            raise WindowError("trajectories live on different windows or models")
        return Trajectory(
            model=self.model, lam=self.lam, top=self.top,
            y1=tuple(u + factor * v for u, v in zip(self.y1, other.y1)),
            y2=tuple(u + factor * v for u, v in zip(self.y2, other.y2)),
            y1q=tuple(u + factor * v for u, v in zip(self.y1q, other.y1q)),
        )


def step_matrix(model: CoefficientSet, t: int, lam) -> StepMatrix:
    """A(t, lam); verifies det(I - A) = 1 to working tolerance."""
    with model.workprec():
        sm = _step_matrix(model, t, as_lambda_scalar(model, lam))
        k = model.kernel
        dev = k.absval(sm.det_i_minus_a() - 1)
        if not dev < k.real(2) ** (-(model.precision.bits - 8)):
            raise NumericalInvariantError(
                f"det(I - A({t})) deviates from 1 by {float(k.to_mpf(dev)):.3e}"
            )
        return sm


def _step_matrix(model: CoefficientSet, t: int, lam) -> StepMatrix:
    s = _derived_at(model, t, lam)
    if s.p_tilde == 0:
        raise InadmissibleLambdaError(f"effective leading coefficient vanishes at t={t}", t=t)
    inv_p = 1 / s.p_tilde
    alpha, shift = s.alpha, s.h_shift
    return StepMatrix(
        t=t,
        a11=-alpha * inv_p,
        a12=inv_p,
        a21=(shift - alpha) * alpha * inv_p + shift,
        a22=(alpha - shift) * inv_p,
    )


def _step_forward(sm: StepMatrix, state: tuple) -> tuple:
    # (I - A)^{-1} in closed form; det(I - A) == 1
    m11 = 1 - sm.a22
    m12 = sm.a12
    m21 = sm.a21
    m22 = 1 - sm.a11
    return (m11 * state[0] + m12 * state[1], m21 * state[0] + m22 * state[1])


def _step_backward(sm: StepMatrix, state: tuple) -> tuple:
    # v(t-1) = (I - A(t)) v(t)
    return (
        (1 - sm.a11) * state[0] - sm.a12 * state[1],
        -sm.a21 * state[0] + (1 - sm.a22) * state[1],
    )


def reconstruct_y2(model: CoefficientSet, lam, y1_next, y1q, t: int):
    """y2(t) from the state (y1(t+1), y1q(t))."""
    with model.workprec():
        return _reconstruct_y2(model, as_lambda_scalar(model, lam), y1_next, y1q, t)


def _reconstruct_y2(model: CoefficientSet, lam, y1_next, y1q, t: int):
    s = _derived_at(model, t, lam)
    if s.p_tilde == 0:
        raise InadmissibleLambdaError(
            f"effective leading coefficient vanishes at t={t}", t=t
        )
    c = model.coeff("c", t)
    h = model.coeff("h", t)
    den = lam - model.coeff("d", t)
    if den == 0:
        raise InadmissibleLambdaError(f"lam equals d({t})", t=t)
    denp = den * s.p_tilde
    return (s.alpha * (h - c) / denp + h / den) * y1_next + (c - h) / denp * y1q


def _left_boundary_values(model: CoefficientSet, lam, c1, c2) -> tuple:
    """(y1(a-1), y2(a-1)) from the 2x2 boundary system; its determinant
    is -p_eff(a-1), nonzero for admissible lam."""
    t = model.a - 1
    p = model.coeff("p", t)
    c = model.coeff("c", t)
    h = model.coeff("h", t)
    den = lam - model.coeff("d", t)
    if den == 0:
        raise InadmissibleLambdaError(f"lam equals d({t})", t=t)
    a11 = (h - c) / den
    rhs1 = -c / den * c1
    rhs2 = c2 - p * c1
    det = a11 * c - p  # == -p_eff(a-1)
    if det == 0:
        raise NumericalInvariantError(
            "left boundary system is singular although lam was admissible"
        )
    y1_left = checked_div(rhs1 * c + rhs2, det)
    y2_left = checked_div(a11 * rhs2 + p * rhs1, det)
    return y1_left, y2_left


def _check_finite(model: CoefficientSet, state: tuple, t: int) -> None:
    k = model.kernel
    if not (k.isfinite(state[0]) and k.isfinite(state[1])):
        raise PrecisionExhaustedError(
            f"state magnitude left the representable range near t={t}; "
            "raise mantissa_bits or switch to big-float mode"
        )


def _assemble(model: CoefficientSet, lam, states: list, top: int) -> Trajectory:
    """Build a Trajectory from states v(t) for t = a-1 .. top."""
    a = model.a
    first = states[0]
    y1_left, y2_left = _left_boundary_values(model, lam, first[0], first[1])
    y1 = [y1_left] + [st[0] for st in states]
    y1q = [st[1] for st in states]
    y2 = [y2_left] + [
        _reconstruct_y2(model, lam, states[i][0], states[i][1], a + i - 1)
        for i in range(1, len(states))
    ]
    k = model.kernel
    if k.needs_finite_checks and not all(
        k.isfinite(v) for seq in (y1, y2, y1q) for v in seq
    ):
        raise PrecisionExhaustedError(
            "trajectory magnitude left the representable range; "
            "raise mantissa_bits or switch to big-float mode"
        )
    return Trajectory(
        model=model, lam=lam, top=top,
        y1=tuple(y1), y2=tuple(y2), y1q=tuple(y1q),
    )


def propagate(model: CoefficientSet, lam, bd: BoundaryData, top: int) -> Trajectory:
    """Unique solution of the initial value problem on a-1 .. top."""
    if top < model.a:
        raise ValueError("top must be at least the grid origin a")
    k = model.kernel
    with model.workprec():
        lam = as_lambda_scalar(model, lam)
        check = k.needs_finite_checks
        state = (k.complex(0) + bd.c1, k.complex(0) + bd.c2)
        states = [state]
        for t in range(model.a, top + 1):
            state = _step_forward(_step_matrix(model, t, lam), state)
            if check:
                _check_finite(model, state, t)
            states.append(state)
        return _assemble(model, lam, states, top)


def propagate_backward(
    model: CoefficientSet, lam, terminal_state: tuple, top: int
) -> Trajectory:
    """Solve from a terminal state v(top) = (y1(top+1), y1q(top)) down to
    the left endpoint.  Used for stable recovery of forward-decaying
    solutions (backward stepping amplifies them instead of burying them)."""
    if top < model.a:
        raise ValueError("top must be at least the grid origin a")
    k = model.kernel
    with model.workprec():
        lam = as_lambda_scalar(model, lam)
        check = k.needs_finite_checks
        state = (k.complex(0) + terminal_state[0], k.complex(0) + terminal_state[1])
        states = [state]
        for t in range(top, model.a - 1, -1):
            state = _step_backward(_step_matrix(model, t, lam), state)
            if check:
                _check_finite(model, state, t)
            states.append(state)
        states.reverse()
        return _assemble(model, lam, states, top)


def fundamental_matrix(model: CoefficientSet, lam, top: int) -> tuple:
    """Transfer products Y(t) mapping v(a-1) to v(t), for t = a-1 .. top.

    Y(a-1) is the identity; each step has unit determinant, so det Y == 1
    throughout, and the columns are the trajectories with data (1,0) and
    (0,1).
    """
    if top < model.a:
        raise ValueError("top must be at least the grid origin a")
    k = model.kernel
    with model.workprec():
        lam = as_lambda_scalar(model, lam)
        one, zero = k.complex(1), k.complex(0)
        mat = ((one, zero), (zero, one))
        out = [mat]
        for t in range(model.a, top + 1):
            sm = _step_matrix(model, t, lam)
            col0 = _step_forward(sm, (mat[0][0], mat[1][0]))
            col1 = _step_forward(sm, (mat[0][1], mat[1][1]))
            mat = ((col0[0], col1[0]), (col0[1], col1[1]))
            out.append(mat)
        return tuple(out)


def oracle_three_term(
    model: CoefficientSet, lam, bd: BoundaryData, top: int
) -> Trajectory:
    """Independent scalar-recurrence solver (the oracle for propagate)."""
    if top < model.a:
        raise ValueError("top must be at least the grid origin a")
    k = model.kernel
    with model.workprec():
        lam = as_lambda_scalar(model, lam)
        a = model.a
        check = k.needs_finite_checks
        p_eff = {}
        for t in range(a - 1, top + 1):
            s = _derived_at(model, t, lam)
            p_eff[t] = s.p_tilde
            if s.p_tilde == 0:
                raise InadmissibleLambdaError(
                    f"effective leading coefficient vanishes at t={t}", t=t
                )
        c1 = k.complex(0) + bd.c1
        c2 = k.complex(0) + bd.c2
        alpha_left = _derived_at(model, a - 1, lam).alpha
        # quasi-difference seed: y1q(a-1) = p_eff(a-1) dy1(a-1) + alpha(a-1) y1(a)
        y1 = {a: c1, a - 1: c1 - (c2 - alpha_left * c1) / p_eff[a - 1]}
        for t in range(a, top + 1):
            s = _derived_at(model, t, lam)
            y1[t + 1] = (
                (p_eff[t] + p_eff[t - 1] + s.q_tilde - lam) * y1[t]
                - p_eff[t - 1] * y1[t - 1]
            ) / p_eff[t]
            if check and not k.isfinite(y1[t + 1]):
                raise PrecisionExhaustedError(
                    f"oracle value left the representable range near t={t}"
                )
        y2 = {}
        y1q = {}
        for t in range(a - 1, top + 1):
            c = model.coeff("c", t)
            h = model.coeff("h", t)
            den = lam - model.coeff("d", t)
            dy1 = y1[t + 1] - y1[t]
            y2[t] = c / den * dy1 + h / den * y1[t]
            y1q[t] = model.coeff("p", t) * dy1 + c * y2[t]
        return Trajectory(
            model=model, lam=lam, top=top,
            y1=tuple(y1[t] for t in range(a - 1, top + 2)),
            y2=tuple(y2[t] for t in range(a - 1, top + 1)),
            y1q=tuple(y1q[t] for t in range(a - 1, top + 1)),
        )


def residual_rows(model: CoefficientSet, traj: Trajectory, t: int) -> tuple:
    """Raw residuals of both equation rows at an interior t (row 1 needs
    a <= t <= top-? values up to t+1; row 2 holds from a-1)."""
    with model.workprec():
        lam = traj.lam
        c_t = model.coeff("c", t)
        h_t = model.coeff("h", t)
        d_t = model.coeff("d", t)
        row2 = (
            c_t * (traj.y1_at(t + 1) - traj.y1_at(t))
            + h_t * traj.y1_at(t)
            + d_t * traj.y2_at(t)
            - lam * traj.y2_at(t)
        )
        if t < model.a:
            return None, row2
        p_t = model.coeff("p", t)
        p_prev = model.coeff("p", t - 1)
        c_prev = model.coeff("c", t - 1)
        row1 = (
            -(p_t * (traj.y1_at(t + 1) - traj.y1_at(t))
              - p_prev * (traj.y1_at(t) - traj.y1_at(t - 1)))
            + model.coeff("q", t) * traj.y1_at(t)
            - (c_t * traj.y2_at(t) - c_prev * traj.y2_at(t - 1))
            + h_t * traj.y2_at(t)
            - lam * traj.y1_at(t)
        )
        return row1, row2


def relative_residual(model: CoefficientSet, traj: Trajectory, t: int) -> float:
    """Residuals normalized by the magnitude of the largest participating
    term, as a machine float."""
    k = model.kernel
    with model.workprec():
        lam = traj.lam
        row1, row2 = residual_rows(model, traj, t)
        scale2 = (
            k.absval(model.coeff("c", t) * (traj.y1_at(t + 1) - traj.y1_at(t)))
            + k.absval(model.coeff("h", t) * traj.y1_at(t))
            + k.absval(model.coeff("d", t) * traj.y2_at(t))
            + k.absval(lam * traj.y2_at(t))
            + 1
        )
        worst = float(k.to_mpf(k.absval(row2) / scale2))
        if row1 is not None:
            scale1 = (
                k.absval(model.coeff("p", t) * (traj.y1_at(t + 1) - traj.y1_at(t)))
                + k.absval(model.coeff("p", t - 1) * (traj.y1_at(t) - traj.y1_at(t - 1)))
                + k.absval(model.coeff("q", t) * traj.y1_at(t))
                + k.absval(model.coeff("c", t) * traj.y2_at(t))
                + k.absval(model.coeff("c", t - 1) * traj.y2_at(t - 1))
                + k.absval(model.coeff("h", t) * traj.y2_at(t))
                + k.absval(lam * traj.y1_at(t))
                + 1
            )
            worst = max(worst, float(k.to_mpf(k.absval(row1) / scale1)))
        return worst


def max_relative_residual(model: CoefficientSet, traj: Trajectory) -> float:
    return max(
        relative_residual(model, traj, t)
        for t in range(model.a - 1, traj.top + 1)
    )
