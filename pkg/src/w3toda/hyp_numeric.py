"""Floating-point layer for the third-order hypergeometric reductions.

Everything numeric consumes the Euler-form operator encoding emitted with a
``HypergeometricSpec`` (terms ``scale * u^p * prod_s (theta + s)`` with
``theta = u d/du``), so the series recurrence and the companion ODE system
share one derivation path instead of hard-coded parameter formulas:

* ``gamma_fn`` guards the Gamma function (pole and overflow checks);
* ``paper_integrals`` evaluates three quadrature/closed-form pairs built
  from the Gamma factor G = Gamma(g^2/2) Gamma(1-g^2) / Gamma(1-g^2/2);
* ``series_eval`` / ``frobenius_solution`` sum the Frobenius series at an
  indicial exponent, coefficients from the recurrence read off the
  operator terms; logarithmic (resonant) cases are refused;
* ``ode_integrate`` runs adaptive Runge-Kutta on the order-3 companion
  system, whose derivative coefficient polynomials come from the same
  encoding via the Euler-to-derivative (Stirling) conversion;
* ``fundamental_matrix`` reports the value/derivative matrix of the three
  Frobenius solutions with its condition number;
* ``hyp_grid`` tabulates the solutions and their operator residuals on a
  grid, for CSV export.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.integrate import quad, solve_ivp

from .algebra_core import AlgebraError, RatFunc
from .ward_bpz import HypergeometricSpec

_TRUNC = 1e-15
_MAX_TERMS = 20000
_ROOT_TOL = 1e-9


def gamma_fn(x: float) -> float:
    """Gamma function with explicit pole and overflow errors."""
    xf = float(x)
    if xf <= 0 and xf == int(xf):
        raise AlgebraError(f"gamma pole at non-positive integer {x!r}")
    try:
        return math.gamma(xf)
    except (ValueError, OverflowError) as exc:
        raise AlgebraError(f"gamma evaluation failed at {x!r}: {exc}") from exc


# ---------------------------------------------------------------------------
# Quadrature identities
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class IntegralPair:
    """One quadrature value next to its closed form."""

    name: str
    numeric: float
    closed_form: float
    quad_error: float

    def to_json(self) -> dict:
        return {"name": self.name, "numeric": self.numeric,
                "closed_form": self.closed_form, "quad_error": self.quad_error,
                "rel_gap": abs(self.numeric - self.closed_form)
                / max(abs(self.closed_form), 1e-300)}


def paper_integrals(gamma: float, rel_tol: float = 1e-7) -> tuple:
    """Three integral/closed-form pairs controlled by the Gamma factor G.

    Integrands: y^(-1+g^2/2) (y-1)^(-g^2) and y^(-1+g^2/2) (y+1)^(-g^2)
    over (1, inf), and (1+x^2)^(-1+g^2/2) over the real line; closed forms
    G, cos(pi g^2/2) G, and 2^(g^2) sin(pi g^2/2) G.
    """
    g = float(gamma)
    if not 0 < g < 1:
        raise AlgebraError(f"integrals need gamma in (0, 1), got {gamma!r}")
    g2 = g * g
    big_g = gamma_fn(g2 / 2) * gamma_fn(1 - g2) / gamma_fn(1 - g2 / 2)
    jobs = (
        ("minus_kernel", lambda y: y ** (-1 + g2 / 2) * (y - 1) ** (-g2),
         (1.0, math.inf), big_g),
        ("plus_kernel", lambda y: y ** (-1 + g2 / 2) * (y + 1) ** (-g2),
         (1.0, math.inf), math.cos(math.pi * g2 / 2) * big_g),
        ("symmetric_profile", lambda x: (1 + x * x) ** (-1 + g2 / 2),
         (-math.inf, math.inf), 2 ** g2 * math.sin(math.pi * g2 / 2) * big_g),
    )
    out = []
    for name, f, (lo, hi), closed in jobs:
        res = quad(f, lo, hi, limit=200, full_output=1)
        value, err = res[0], res[1]
        if err > max(rel_tol * abs(value), 1e-12):
            raise AlgebraError(
                f"quadrature for {name} did not converge: achieved absolute "
                f"tolerance {err:.3e} on value {value:.6e}")
        out.append(IntegralPair(name, value, closed, err))
    return tuple(out)


# ---------------------------------------------------------------------------
# Operator encoding -> floats
# ---------------------------------------------------------------------------

def _as_float(x, where: str) -> float:
    if isinstance(x, RatFunc):
        raise AlgebraError(
            f"{where}: needs numeric data; substitute gamma into the "
            "hypergeometric data first")
    if isinstance(x, bool):
        raise AlgebraError(f"{where}: bool is not a scalar")
    if isinstance(x, (int, float, Fraction)):
        return float(x)
    raise AlgebraError(f"{where}: cannot interpret {x!r} as a float")


def substitute_gamma(spec: HypergeometricSpec, gamma) -> HypergeometricSpec:
    """Evaluate every symbolic entry of the spec at the given gamma."""
    def conv(x):
        if isinstance(x, RatFunc):
            return x.evaluate({"gamma": gamma})
        return x
    return HypergeometricSpec(
        spec.family, conv(spec.chi),
        tuple(conv(x) for x in spec.a), tuple(conv(x) for x in spec.b),
        tuple((anchor, conv(e)) for anchor, e in spec.prefactors),
        spec.variable)


def _float_terms(spec: HypergeometricSpec) -> tuple:
    out = []
    for scale, p, shifts in spec.operator_terms():
        out.append((_as_float(scale, "operator scale"), p,
                    tuple(_as_float(s, "operator shift") for s in shifts)))
    return tuple(out)


def _term_poly(x: float, scale: float, shifts) -> float:
    value = scale
    for s in shifts:
        value *= x + s
    return value


def _indicial_roots(spec: HypergeometricSpec) -> tuple:
    b1 = _as_float(spec.b[0], "B1")
    b2 = _as_float(spec.b[1], "B2")
    return (0.0, 1.0 - b1, 1.0 - b2)


def _check_sigma(spec: HypergeometricSpec, sigma: float) -> float:
    roots = _indicial_roots(spec)
    sf = float(sigma)
    if min(abs(sf - r) for r in roots) > _ROOT_TOL:
        raise AlgebraError(
            f"shift exponent {sigma!r} is not an indicial root of the "
            f"operator (roots {roots})")
    for r in roots:
        d = r - sf
        if d > 0.5 and abs(d - round(d)) < _ROOT_TOL:
            raise AlgebraError(
                "logarithmic case unsupported: another indicial exponent "
                f"exceeds the shift by the integer {round(d)}")
    return sf


def _coefficient_stream(spec: HypergeometricSpec, sigma: float):
    """Yield Frobenius coefficients c_0 = 1, c_1, ... from the recurrence
    sum_terms scale * P_shifts(sigma + m - p) * c_(m-p) = 0 read off the
    operator encoding."""
    terms = _float_terms(spec)
    zero_power = [t for t in terms if t[1] == 0]
    if len(zero_power) != 1:
        raise AlgebraError("operator encoding needs one variable-free term")
    scale0, _, shifts0 = zero_power[0]
    history = [1.0]
    yield 1.0
    m = 1
    while True:
        acc = 0.0
        for scale, p, shifts in terms:
            if p == 0 or m - p < 0:
                continue
            acc += _term_poly(sigma + m - p, scale, shifts) * history[m - p]
        den = _term_poly(sigma + m, scale0, shifts0)
        if abs(den) < 1e-13 * max(1.0, abs(acc)):
            raise AlgebraError(
                "logarithmic case unsupported: the recurrence denominator "
                f"vanishes at term {m}")
        c = -acc / den
        history.append(c)
        yield c
        m += 1


@dataclass(frozen=True)
class SeriesSolution:
    """Frobenius solution data: parameters, shift exponent, the leading
    coefficients, and the convergence radius guard."""

    a: tuple
    b: tuple
    sigma: float
    coefficients: tuple
    radius: float = 1.0

    def evaluate(self, u: float) -> float:
        _check_argument(u, self.sigma, self.radius)
        if u == 0:
            return 1.0 if self.sigma == 0 else 0.0
        total = 0.0
        for m, c in enumerate(self.coefficients):
            total += c * u ** (self.sigma + m)
        return total


def frobenius_solution(spec: HypergeometricSpec, sigma,
                       n_terms: int = 64) -> SeriesSolution:
    sf = _check_sigma(spec, sigma)
    stream = _coefficient_stream(spec, sf)
    coeffs = tuple(next(stream) for _ in range(n_terms))
    return SeriesSolution(tuple(float(x) for x in spec.a),
                          tuple(float(x) for x in spec.b), sf, coeffs)


def _check_argument(u: float, sigma: float, radius: float = 1.0) -> None:
    if abs(u) >= radius:
        raise AlgebraError(
            f"series argument must satisfy |u| < {radius}, got {u!r}")
    if u < 0 and sigma != int(sigma):
        raise AlgebraError(
            "fractional power of a negative argument; the series is defined "
            "for u >= 0 at a non-integer shift")


def series_derivatives(spec: HypergeometricSpec, sigma, u: float,
                       orders: int = 3) -> tuple:
    """Partial sums of the series and its first ``orders`` derivatives,
    truncated when the value term drops below 1e-15 of the partial sum."""
    sf = _check_sigma(spec, sigma)
    _check_argument(u, sf)
    if u == 0:
        if sf < 0:
            raise AlgebraError("series diverges at 0 for a negative shift")
        if orders == 0:
            return (1.0 if sf == 0 else 0.0,)
        if sf != int(sf):
            raise AlgebraError(
                "derivatives at 0 are singular for a non-integer shift")
        shift = int(sf)
        stream = _coefficient_stream(spec, sf)
        coeffs = [next(stream) for _ in range(orders + 1)]
        base = [0.0] * (orders + 1)
        for k in range(shift, orders + 1):
            base[k] = math.factorial(k) * coeffs[k - shift]
        return tuple(base)
    sums = [0.0] * (orders + 1)
    quiet = 0
    for m, c in enumerate(_coefficient_stream(spec, sf)):
        e = sf + m
        term = c * u ** e
        sums[0] += term
        for k in range(1, orders + 1):
            fall = 1.0
            for j in range(k):
                fall *= e - j
            sums[k] += c * fall * u ** (e - k)
        if m >= 4 and abs(term) < _TRUNC * max(abs(sums[0]), 1e-300):
            quiet += 1
            if quiet >= 3:
                return tuple(sums)
        else:
            quiet = 0
        if m >= _MAX_TERMS:
            raise AlgebraError(
                f"series did not converge within {_MAX_TERMS} terms at u={u!r}")


def series_eval(spec: HypergeometricSpec, sigma, u: float) -> float:
    """Frobenius solution value u^sigma * sum c_n u^n at ``u``."""
    return series_derivatives(spec, sigma, u, orders=0)[0]


# ---------------------------------------------------------------------------
# Companion ODE system
# ---------------------------------------------------------------------------

def _stirling2(n: int) -> tuple:
    """Row n of the Stirling numbers of the second kind, S(n, 0..n)."""
    row = [1]
    for k in range(n):
        nxt = [0] * (len(row) + 1)
        for j, v in enumerate(row):
            nxt[j] += j * v
            nxt[j + 1] += v
        row = nxt
    return tuple(row)


def _poly_from_shifts(scale: float, shifts) -> list:
    """Coefficients (low first) of scale * prod_s (x + s)."""
    poly = [scale]
    for s in shifts:
        poly = [poly[0] * s] + [poly[i] * s + poly[i - 1]
                                for i in range(1, len(poly))] + [poly[-1]]
    return poly


def derivative_coefficients(spec: HypergeometricSpec) -> tuple:
    """u-polynomials (coefficient lists, low degree first) multiplying
    f, f', f'', f''' in the expanded operator, derived from the encoding
    via theta^k = sum_j S(k, j) u^j d^j."""
    polys = [[], [], [], []]
    for scale, p, shifts in _float_terms(spec):
        theta_poly = _poly_from_shifts(scale, shifts)
        for k, alpha in enumerate(theta_poly):
            if alpha == 0:
                continue
            srow = _stirling2(k)
            for j, s_kj in enumerate(srow):
                if s_kj == 0:
                    continue
                deg = p + j
                target = polys[j]
                while len(target) <= deg:
                    target.append(0.0)
                target[deg] += alpha * s_kj
    return tuple(tuple(c) for c in polys)


def _poly_at(coeffs, u: float) -> float:
    total = 0.0
    for c in reversed(coeffs):
        total = total * u + c
    return total


def operator_residual(spec: HypergeometricSpec, sigma, u: float) -> float:
    """Value of the differential operator applied to the Frobenius solution
    at ``u``; numerically zero for a valid solution."""
    coeffs = derivative_coefficients(spec)
    derivs = series_derivatives(spec, sigma, u, orders=3)
    return sum(_poly_at(c, u) * d for c, d in zip(coeffs, derivs))


def _segment(u: float) -> int:
    if u < 0:
        return 0
    if u < 1:
        return 1
    return 2


def ode_integrate(spec: HypergeometricSpec, u0: float, y0, u1: float,
                  rtol: float = 1e-10) -> tuple:
    """Integrate the order-3 companion system from ``u0`` to ``u1``.

    ``y0`` is the triple (value, first, second derivative) at ``u0``; the
    returned triple is the state at ``u1``.  The path may not touch or
    cross the singular points 0 and 1.
    """
    if u0 in (0.0, 1.0) or u1 in (0.0, 1.0):
        raise AlgebraError("endpoints must avoid the singular points 0 and 1")
    if _segment(u0) != _segment(u1):
        raise AlgebraError(
            f"path from {u0!r} to {u1!r} crosses a singular point")
    y0 = tuple(float(v) for v in y0)
    if len(y0) != 3:
        raise AlgebraError("initial data must be (value, first, second derivative)")
    if u0 == u1:
        return y0
    coeffs = derivative_coefficients(spec)

    def rhs(u, y):
        lead = _poly_at(coeffs[3], u)
        forcing = sum(_poly_at(coeffs[k], u) * y[k] for k in range(3))
        return (y[1], y[2], -forcing / lead)

    sol = solve_ivp(rhs, (u0, u1), y0, method="DOP853",
                    rtol=rtol, atol=1e-13, dense_output=False)
    if not sol.success:
        raise AlgebraError(
            f"integration from {u0} to {u1} failed: {sol.message}")
    return tuple(float(v) for v in sol.y[:, -1])


def fundamental_matrix(spec: HypergeometricSpec, u0: float = 0.1) -> tuple:
    """Rows (f, f', f'') of the three Frobenius solutions at ``u0``, with
    the matrix condition number."""
    rows = []
    for sigma in _indicial_roots(spec):
        rows.append(series_derivatives(spec, sigma, u0, orders=2))
    matrix = np.array(rows, dtype=float)
    return matrix, float(np.linalg.cond(matrix))


def hyp_grid(spec: HypergeometricSpec, start: float, stop: float,
             step: float) -> list:
    """Rows (u, three solution values, three operator residuals) on the
    grid start, start+step, ..., up to stop (inclusive within 1e-12)."""
    if not 0 < start <= stop < 1:
        raise AlgebraError("grid must sit inside (0, 1)")
    if step <= 0:
        raise AlgebraError("grid step must be positive")
    roots = _indicial_roots(spec)
    rows = []
    u = start
    while u <= stop + 1e-12:
        values = [series_eval(spec, s, u) for s in roots]
        residuals = [operator_residual(spec, s, u) for s in roots]
        rows.append((u, *values, *residuals))
        u += step
    return rows
