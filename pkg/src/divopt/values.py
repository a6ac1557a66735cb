"""Closed-form value functions V(x; strategy) and their derivatives.

Each strategy family has an explicit piecewise representation built from
f, g, J and a small set of coefficients:

* Hybrid (a, a_c, b), with l = a_c - a, d = b - a, y = b - a_c:

    V(x) = 0                                            x < 0
           C f(x)                                       0 <= x < a
           A g(x-a) + B e^{s1 (x-a)}
             + pv (x - a + mu/(g+d) + V(a))             a <= x < b
           beta (x - a_c) - chi + V(a_c)                x >= b

  C, B, A are the unique constants making V continuous at a and b and C^1
  at a. On [a, b) the derivative takes the two-exponential form
  A r1 e^{r1 u} + (B - A) s1 e^{s1 u} + pv.

* PeriodicBarrier(b): the hybrid branch structure in the limit of never
  paying immediately (the immediate barrier pushed to infinity); C then
  takes a closed-form limit independent of the removed barriers.

* PeriodicZero: V(x) = -(g mu/(g+d)^2) e^{s1 x} + pv (x + mu/(g+d)).

* Liquidation(b1, b2):

    V(x) = A g(x) + V(x; periodic-zero)                 0 <= x < b1
           beta x - chi                                 b1 <= x < b2
           B e^{s1 (x - b2)} + pv (x + mu/(g+d))        x >= b2 (b2 finite)

  with A fixed by continuity at b1 and B by continuity at b2. The branch
  beyond b2 is absent when b2 is infinite.

Derivatives are always analytic; at kink points the first derivative is
one-sided and callers choose the side (left by default, matching how the
smooth-fit conditions are stated).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import J, ModelParams, Roots, exp_guarded, f, f_d1, f_d2, g
from .errors import DegenerateDenominatorError
from .strategies import Hybrid, Liquidation, PeriodicBarrier, PeriodicZero, Strategy


@dataclass(frozen=True)
class HybridCoefficients:
    """Constants (C, B, A) of the hybrid piecewise form, plus V(a)."""

    C: float
    B: float
    A: float
    v_a: float  # V(a) = C f(a), cached to avoid branch recursion

    @property
    def a_tilde(self) -> float:
        """Coefficient of e^{r1 u} in V' on the middle branch."""
        return self.A

    @property
    def b_tilde(self) -> float:
        """Coefficient of e^{s1 u} in V' on the middle branch."""
        return self.B - self.A


@dataclass(frozen=True)
class LiquidationCoefficients:
    """A of the lower branch and, for finite b2, the upper-branch constant.

    b2_coef multiplies e^{s1 (x - b2)}; the shift keeps the stored number
    of moderate size for large b2. None when b2 is infinite.
    """

    A: float
    b2_coef: float | None


def hybrid_coefficients(
    params: ModelParams, roots: Roots, a: float, a_c: float, b: float
) -> HybridCoefficients:
    """Coefficients of V(.; Hybrid(a, a_c, b)).

    With d = b - a, l = a_c - a, g(d,l) = g(d) - g(l), J(d,l) = J(d) - J(l):

        C = [ (r1-s1)(alpha (d-l) - chi) + pv g(d,l) + (g mu/(g+d)^2) J(d,l) ]
            / [ (delta/(g+d)) f(a) J(d,l) + f'(a) g(d,l) ]
        B = (delta/(g+d)) C f(a) - pv mu/(g+d)
        A = (C f'(a) - B s1 - pv) / (r1 - s1)

    Requires b > a_c + chi/beta (immediate payments must net strictly
    positive) and 0 <= a <= a_c.
    """
    if not 0.0 <= a <= a_c:
        raise ValueError(f"need 0 <= a <= a_c, got ({a}, {a_c})")
    if not b > a_c + params.chi / params.beta:
        raise ValueError(
            f"need b > a_c + chi/beta = {a_c + params.chi / params.beta}, got b={b}"
        )
    gd = params.gamma + params.delta
    pv = roots.pvfactor
    l = a_c - a
    d = b - a
    if math.isinf(b):
        # Limit of never paying immediately: A = 0 and C takes the
        # closed-form limit (the d-dependent ratios converge).
        C = _periodic_barrier_C(params, roots, a)
        B = (params.delta / gd) * C * f(roots, a) - pv * params.mu / gd
        v_a = C * f(roots, a)
        return HybridCoefficients(C=C, B=B, A=(B - B), v_a=v_a)
    gdl = g(roots, d) - g(roots, l)
    Jdl = J(roots, d) - J(roots, l)
    den = (params.delta / gd) * f(roots, a) * Jdl + f_d1(roots, a) * gdl
    # compare against the undifferenced magnitudes: a denominator this many
    # orders below them is pure cancellation noise, not a number
    den_scale = (params.delta / gd) * f(roots, a) * J(roots, d) + f_d1(roots, a) * g(
        roots, d
    )
    if den == 0.0 or abs(den) <= 1e-12 * den_scale:
        raise DegenerateDenominatorError(
            f"C denominator degenerate at (a={a}, a_c={a_c}, b={b}): {den!r}"
        )
    num = (
        (roots.r1 - roots.s1) * (roots.alpha * (d - l) - params.chi)
        + pv * gdl
        + (params.gamma * params.mu / gd**2) * Jdl
    )
    C = num / den
    B = (params.delta / gd) * C * f(roots, a) - pv * params.mu / gd
    # cancellation-free equivalent of (C f'(a) - B s1 - pv)/(r1 - s1);
    # exact up to rounding and stable when A is exponentially small
    fa, fpa = float(f(roots, a)), float(f_d1(roots, a))
    P = fpa - roots.s1 * (params.delta / gd) * fa
    curv = params.mu * fpa - params.delta * fa
    A = (
        (roots.alpha * (d - l) - params.chi) * P
        + (pv / gd)
        * curv
        * (exp_guarded(roots.s1 * d) - exp_guarded(roots.s1 * l))
    ) / den
    return HybridCoefficients(C=C, B=B, A=A, v_a=C * fa)


def _periodic_barrier_C(params: ModelParams, roots: Roots, a: float) -> float:
    # l -> infinity limit of the hybrid C at lower barrier a.
    gd = params.gamma + params.delta
    num = params.gamma * params.mu / gd**2 - roots.pvfactor / roots.s1
    den = (params.delta / gd) * f(roots, a) - f_d1(roots, a) / roots.s1
    return num / den


def liquidation_A(params: ModelParams, roots: Roots, b1: float) -> float:
    """A(b1) = [alpha b1 - chi - (g mu/(g+d)^2)(1 - e^{s1 b1})] / g(b1).

    The division is carried out in exponent-shifted form so large r1 b1
    underflows to the true near-zero value instead of tripping the guard.
    """
    if not b1 > 0.0:
        raise ValueError(f"b1 must be > 0, got {b1}")
    gd = params.gamma + params.delta
    gm2 = params.gamma * params.mu / gd**2
    num = roots.alpha * b1 - params.chi - gm2 * (1.0 - math.exp(roots.s1 * b1))
    return num * math.exp(-roots.r1 * b1) / (1.0 - math.exp((roots.s1 - roots.r1) * b1))


class ValueFunction:
    """Piecewise evaluator for V, V' and V'' of one strategy.

    Pure and reentrant; accepts scalars or arrays. V' and V'' are analytic
    per branch; at a breakpoint the side selector picks the limit
    ('left' by default). At x = 0 the right limit is always returned, and
    x < 0 evaluates to 0 (the ruined state).
    """

    def __init__(self, params: ModelParams, roots: Roots, strategy: Strategy):
        self.params = params
        self.roots = roots
        self.strategy = strategy
        gd = params.gamma + params.delta
        pv = roots.pvfactor
        m1 = params.mu / gd
        r1, s1 = roots.r1, roots.s1
        pz_k = -params.gamma * params.mu / gd**2

        pieces = []  # (upper_bound, v, d1, d2); last upper bound is inf

        def pz_piece():
            return (
                math.inf,
                lambda x: pz_k * exp_guarded(s1 * x) + pv * (x + m1),
                lambda x: pz_k * s1 * exp_guarded(s1 * x) + pv,
                lambda x: pz_k * s1 * s1 * exp_guarded(s1 * x),
            )

        if isinstance(strategy, PeriodicZero):
            pieces.append(pz_piece())
            self.kinks: tuple[float, ...] = ()
            self.coefficients = None

        elif isinstance(strategy, PeriodicBarrier):
            b = strategy.b
            C = _periodic_barrier_C(params, roots, b)
            v_b = C * f(roots, b)
            B = (params.delta / gd) * C * f(roots, b) - pv * m1
            if b > 0.0:
                pieces.append(
                    (
                        b,
                        lambda x: C * f(roots, x),
                        lambda x: C * f_d1(roots, x),
                        lambda x: C * f_d2(roots, x),
                    )
                )
            pieces.append(
                (
                    math.inf,
                    lambda x: B * exp_guarded(s1 * (x - b)) + pv * (x - b + m1 + v_b),
                    lambda x: B * s1 * exp_guarded(s1 * (x - b)) + pv,
                    lambda x: B * s1 * s1 * exp_guarded(s1 * (x - b)),
                )
            )
            self.kinks = (b,) if b > 0.0 else ()
            self.coefficients = C

        elif isinstance(strategy, Hybrid):
            a, a_c, b = strategy.a_p, strategy.a_c, strategy.b
            coefs = hybrid_coefficients(params, roots, a, a_c, b)
            at, bt = coefs.a_tilde, coefs.b_tilde
            c0 = m1 + coefs.v_a

            def mid_v(x):
                u = np.asarray(x, dtype=float) - a
                return (
                    at * exp_guarded(r1 * u)
                    + bt * exp_guarded(s1 * u)
                    + pv * (u + c0)
                )

            def mid_d1(x):
                u = np.asarray(x, dtype=float) - a
                return at * r1 * exp_guarded(r1 * u) + bt * s1 * exp_guarded(s1 * u) + pv

            def mid_d2(x):
                u = np.asarray(x, dtype=float) - a
                return at * r1 * r1 * exp_guarded(r1 * u) + bt * s1 * s1 * exp_guarded(
                    s1 * u
                )

            if a > 0.0:
                pieces.append(
                    (
                        a,
                        lambda x: coefs.C * f(roots, x),
                        lambda x: coefs.C * f_d1(roots, x),
                        lambda x: coefs.C * f_d2(roots, x),
                    )
                )
            if math.isinf(b):
                pieces.append((math.inf, mid_v, mid_d1, mid_d2))
                self.kinks = ()
            else:
                pieces.append((b, mid_v, mid_d1, mid_d2))
                v_ac = float(mid_v(a_c))
                pieces.append(
                    (
                        math.inf,
                        lambda x: params.beta * (np.asarray(x, float) - a_c)
                        - params.chi
                        + v_ac,
                        lambda x: np.full_like(np.asarray(x, float), params.beta),
                        lambda x: np.zeros_like(np.asarray(x, float)),
                    )
                )
                self.kinks = (b,)
            self.coefficients = coefs

        elif isinstance(strategy, Liquidation):
            b1, b2 = strategy.b1, strategy.b2
            A = liquidation_A(params, roots, b1)
            # A g(x) evaluated in ratio form A g(x) = num g(x)/g(b1): the
            # numerator is O(1) and the ratio stays bounded on [0, b1]
            # even when g(b1) itself would overflow
            gm2 = params.gamma * params.mu / gd**2
            num = params.alpha * b1 - params.chi - gm2 * (
                1.0 - math.exp(s1 * b1)
            )
            den1 = 1.0 - math.exp((s1 - r1) * b1)  # g(b1) e^{-r1 b1}

            def ag(x, c_r=1.0, c_s=1.0):
                x = np.asarray(x, dtype=float)
                return (
                    num
                    * (
                        c_r * exp_guarded(r1 * (x - b1))
                        - c_s * exp_guarded(s1 * x - r1 * b1)
                    )
                    / den1
                )

            pieces.append(
                (
                    b1,
                    lambda x: ag(x)
                    + pz_k * exp_guarded(s1 * np.asarray(x, float))
                    + pv * (np.asarray(x, float) + m1),
                    lambda x: ag(x, r1, s1)
                    + pz_k * s1 * exp_guarded(s1 * np.asarray(x, float))
                    + pv,
                    lambda x: ag(x, r1 * r1, s1 * s1)
                    + pz_k * s1 * s1 * exp_guarded(s1 * np.asarray(x, float)),
                )
            )
            pieces.append(
                (
                    b2,
                    lambda x: params.beta * np.asarray(x, float) - params.chi,
                    lambda x: np.full_like(np.asarray(x, float), params.beta),
                    lambda x: np.zeros_like(np.asarray(x, float)),
                )
            )
            if math.isinf(b2):
                b2c = None
                self.kinks = (b1,)
            else:
                b2c = params.beta * b2 - params.chi - pv * (b2 + m1)
                pieces.append(
                    (
                        math.inf,
                        lambda x: b2c * exp_guarded(s1 * (np.asarray(x, float) - b2))
                        + pv * (np.asarray(x, float) + m1),
                        lambda x: b2c
                        * s1
                        * exp_guarded(s1 * (np.asarray(x, float) - b2))
                        + pv,
                        lambda x: b2c
                        * s1
                        * s1
                        * exp_guarded(s1 * (np.asarray(x, float) - b2)),
                    )
                )
                self.kinks = (b1, b2)
            self.coefficients = LiquidationCoefficients(A=A, b2_coef=b2c)

        else:
            raise TypeError(f"unknown strategy type: {strategy!r}")

        self._pieces = pieces
        self.breakpoints = tuple(ub for ub, *_ in pieces[:-1])

    def _eval(self, x, which: int, side: str):
        # side='right': piece i covers [lo_i, ub_i). side='left': (lo_i, ub_i],
        # except the first piece, which is closed at 0 so that x = 0 always
        # yields the right limit. x < 0 falls through to 0.
        if side not in ("left", "right"):
            raise ValueError(f"side must be 'left' or 'right', got {side!r}")
        x = np.asarray(x, dtype=float)
        scalar = x.ndim == 0
        xv = np.atleast_1d(x)
        out = np.zeros_like(xv)
        lo = 0.0
        for i, (ub, *fns) in enumerate(self._pieces):
            fn = fns[which]
            if side == "left":
                sel = (xv > lo) & (xv <= ub) if i > 0 else (xv >= 0.0) & (xv <= ub)
            else:
                sel = (xv >= lo) & (xv < ub)
            if sel.any():
                out[sel] = fn(xv[sel])
            lo = ub
        return float(out[0]) if scalar else out

    def __call__(self, x):
        return self._eval(x, 0, side="right")

    def d1(self, x, side: str = "left"):
        return self._eval(x, 1, side)

    def d2(self, x, side: str = "left"):
        return self._eval(x, 2, side)


def value(params: ModelParams, roots: Roots, strategy: Strategy, x):
    """V(x; strategy); 0 for x < 0."""
    return ValueFunction(params, roots, strategy)(x)


def value_d1(params: ModelParams, roots: Roots, strategy: Strategy, x, side="left"):
    """Analytic V'(x; strategy); one-sided at kinks (left by default)."""
    return ValueFunction(params, roots, strategy).d1(x, side=side)


def value_d2(params: ModelParams, roots: Roots, strategy: Strategy, x, side="left"):
    """Analytic V''(x; strategy); one-sided at kinks (left by default)."""
    return ValueFunction(params, roots, strategy).d2(x, side=side)
