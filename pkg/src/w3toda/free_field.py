"""Exact Coulomb-gas layer at vanishing interaction measures.

A configuration holds bulk insertions in the open upper half-plane, boundary
insertions on the real line, and the interaction-measure parameters.  All
closed-form work happens over the *doubled* coordinate list (bulk points,
their conjugates, then boundary points) with holomorphic logarithms carrying
half-weight exponents, so that descendant insertions become exact rational
functions of the probe point:

* ``coulomb_log_correlator`` returns the closed-form exponent table of the
  zero-measure correlator (requires neutrality);
* ``ipp_insert`` converts a derivative-field form into its Gaussian
  integration-by-parts pole sum, each factor ``<u, d^p Phi>`` mapping to
  ``(p-1)! * sum_k <u, a_k> / (2 (z_k - t)^p)`` over the doubled list;
* ``verify_derivative_identity`` checks the probe-derivative identities for
  the supported index lists as exact identities of rational functions;
* ``global_virasoro_row`` / ``global_w_row`` evaluate the global Ward rows,
  which vanish identically on neutral configurations and double as the
  decisive cross-check of the spin-3 realization.

Pole sums live in ``RationalField``: finite linear combinations of
``(z_k - t)^{-p}`` with exact complex-rational coefficients, closed under
sum, product (partial fractions) and d/dt.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

from .algebra_core import (
    E1,
    E2,
    H1,
    H2,
    H3,
    OMEGA1,
    OMEGA2,
    AlgebraError,
    CartanVector,
    CFrac,
    background_charge,
    conformal_weight,
    inner,
    q_of_gamma,
)
from .descendant_forms import (
    FieldPolynomial,
    l_form,
    miura_current_terms,
    miura_w_form,
)


# ---------------------------------------------------------------------------
# Exact parsing helpers (JSON values may be ints, floats, or "p/q" strings).
# ---------------------------------------------------------------------------

def _exact_real(x, where: str) -> Fraction:
    try:
        if isinstance(x, bool):
            raise ValueError
        if isinstance(x, (int, Fraction)):
            return Fraction(x)
        if isinstance(x, float):
            return Fraction(x)
        if isinstance(x, str):
            return Fraction(x)
    except (ValueError, ZeroDivisionError):
        pass
    raise AlgebraError(f"{where}: cannot interpret {x!r} as an exact real")


def _exact_complex(x, where: str) -> CFrac:
    if isinstance(x, CFrac):
        return x
    if isinstance(x, complex):
        return CFrac(Fraction(x.real), Fraction(x.imag))
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return CFrac(_exact_real(x[0], where), _exact_real(x[1], where))
    return CFrac(_exact_real(x, where))


def _weight(x, where: str) -> CartanVector:
    if isinstance(x, CartanVector):
        return x
    if isinstance(x, (list, tuple)) and len(x) == 2:
        return CartanVector(_exact_real(x[0], where), _exact_real(x[1], where))
    raise AlgebraError(f"{where}: weight needs two root-basis coordinates")


# ---------------------------------------------------------------------------
# Correlator configuration
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class CorrelatorConfig:
    """Immutable insertion data for a half-plane correlator.

    ``bulk`` is a tuple of (z, alpha) with z in the open upper half-plane;
    ``boundary`` a tuple of (s, beta) with strictly increasing real s;
    ``mu_bulk`` the two bulk measure weights; ``mu_boundary`` one (mu_1, mu_2)
    pair per boundary arc.  With M >= 1 boundary points the real line closes
    into M arcs (the last wraps through infinity); with M = 0 there is a
    single arc.
    """

    gamma: Fraction
    bulk: tuple = ()
    boundary: tuple = ()
    mu_bulk: tuple = (Fraction(0), Fraction(0))
    mu_boundary: tuple = None

    def __post_init__(self):
        g = _exact_real(self.gamma, "/gamma")
        if not 0 < g or g * g >= 2:
            raise AlgebraError("/gamma: must satisfy 0 < gamma < sqrt(2)")
        object.__setattr__(self, "gamma", g)

        bulk = []
        for k, (z, alpha) in enumerate(self.bulk):
            z = _exact_complex(z, f"/bulk/{k}/z")
            if z.im <= 0:
                raise AlgebraError(
                    f"/bulk/{k}/z: bulk insertion must lie in the open upper half-plane")
            bulk.append((z, _weight(alpha, f"/bulk/{k}/alpha")))
        object.__setattr__(self, "bulk", tuple(bulk))

        boundary = []
        prev = None
        for l, (s, beta) in enumerate(self.boundary):
            s = _exact_real(s, f"/boundary/{l}/s")
            if prev is not None and s <= prev:
                raise AlgebraError(
                    f"/boundary/{l}/s: boundary points must be strictly increasing")
            prev = s
            boundary.append((s, _weight(beta, f"/boundary/{l}/beta")))
        object.__setattr__(self, "boundary", tuple(boundary))

        if len(self.mu_bulk) != 2:
            raise AlgebraError("/mu_bulk: needs exactly two components")
        mu_bulk = tuple(_exact_real(x, f"/mu_bulk/{i}")
                        for i, x in enumerate(self.mu_bulk))
        if any(x < 0 for x in mu_bulk):
            raise AlgebraError("/mu_bulk: measure weights must be >= 0")
        object.__setattr__(self, "mu_bulk", mu_bulk)

        arcs = max(len(boundary), 1)
        if self.mu_boundary is None:
            object.__setattr__(self, "mu_boundary",
                               ((Fraction(0), Fraction(0)),) * arcs)
        if len(self.mu_boundary) != arcs:
            raise AlgebraError(
                f"/mu_boundary: needs one (mu_1, mu_2) pair per arc, "
                f"expected {arcs}, got {len(self.mu_boundary)}")
        mub = []
        for l, pair in enumerate(self.mu_boundary):
            if len(pair) != 2:
                raise AlgebraError(f"/mu_boundary/{l}: needs two components")
            pair = tuple(_exact_real(x, f"/mu_boundary/{l}/{i}")
                         for i, x in enumerate(pair))
            if any(x < 0 for x in pair):
                raise AlgebraError(f"/mu_boundary/{l}: measure weights must be >= 0")
            mub.append(pair)
        object.__setattr__(self, "mu_boundary", tuple(mub))

    # -- structure ---------------------------------------------------------

    @property
    def n_bulk(self) -> int:
        return len(self.bulk)

    @property
    def n_boundary(self) -> int:
        return len(self.boundary)

    @property
    def q(self) -> Fraction:
        return self.gamma + 2 / self.gamma

    @property
    def Q(self) -> CartanVector:
        return background_charge(self.q)

    def mu_right(self, l: int):
        """Arc measure immediately to the right of boundary point l."""
        return self.mu_boundary[l % len(self.mu_boundary)]

    def mu_left(self, l: int):
        """Arc measure immediately to the left of boundary point l."""
        return self.mu_boundary[(l - 1) % len(self.mu_boundary)]

    @property
    def all_mu_zero(self) -> bool:
        return (all(x == 0 for x in self.mu_bulk)
                and all(x == 0 for pair in self.mu_boundary for x in pair))

    def with_zero_mu(self) -> "CorrelatorConfig":
        arcs = max(self.n_boundary, 1)
        zero = (Fraction(0), Fraction(0))
        return CorrelatorConfig(self.gamma, self.bulk, self.boundary,
                                zero, (zero,) * arcs)

    # -- weight bookkeeping ------------------------------------------------

    @property
    def s_vector(self) -> CartanVector:
        total = CartanVector(0, 0)
        for _, alpha in self.bulk:
            total = total + alpha
        for _, beta in self.boundary:
            total = total + Fraction(1, 2) * beta
        return total - self.Q

    @property
    def neutral(self) -> bool:
        return self.s_vector.is_zero

    @property
    def seiberg_ok(self) -> bool:
        s = self.s_vector
        if not (inner(s, OMEGA1) > 0 and inner(s, OMEGA2) > 0):
            return False
        Qv = self.Q
        for _, alpha in self.bulk:
            for e in (E1, E2):
                if not inner(alpha - Qv, e) < 0:
                    return False
        return True

    # -- serialization -----------------------------------------------------

    def to_json(self) -> dict:
        return {
            "gamma": str(self.gamma),
            "bulk": [{"z": [str(z.re), str(z.im)],
                      "alpha": [str(a.c1), str(a.c2)]} for z, a in self.bulk],
            "boundary": [{"s": str(s), "beta": [str(b.c1), str(b.c2)]}
                         for s, b in self.boundary],
            "mu_bulk": [str(x) for x in self.mu_bulk],
            "mu_boundary": [[str(x) for x in pair] for pair in self.mu_boundary],
        }

    @staticmethod
    def from_json(data: dict) -> "CorrelatorConfig":
        if not isinstance(data, dict):
            raise AlgebraError("/: configuration must be a JSON object")
        if "gamma" not in data:
            raise AlgebraError("/gamma: required")
        bulk = []
        for k, entry in enumerate(data.get("bulk", [])):
            if not isinstance(entry, dict) or "z" not in entry or "alpha" not in entry:
                raise AlgebraError(f"/bulk/{k}: needs 'z' and 'alpha'")
            bulk.append((entry["z"], entry["alpha"]))
        boundary = []
        for l, entry in enumerate(data.get("boundary", [])):
            if not isinstance(entry, dict) or "s" not in entry or "beta" not in entry:
                raise AlgebraError(f"/boundary/{l}: needs 's' and 'beta'")
            boundary.append((entry["s"], entry["beta"]))
        arcs = max(len(boundary), 1)
        mu_bulk = data.get("mu_bulk", [0, 0])
        mu_boundary = data.get("mu_boundary", [[0, 0]] * arcs)
        return CorrelatorConfig(data["gamma"], tuple(bulk), tuple(boundary),
                                tuple(mu_bulk), tuple(tuple(p) for p in mu_boundary))


def doubled_insertions(cfg: CorrelatorConfig) -> list:
    """(z_1..z_N, conj z_1..conj z_N, s_1..s_M) with bulk weights duplicated."""
    out = [(z, alpha) for z, alpha in cfg.bulk]
    out += [(z.conj(), alpha) for z, alpha in cfg.bulk]
    out += [(CFrac(s), beta) for s, beta in cfg.boundary]
    return out


def doubled_neutral(cfg: CorrelatorConfig) -> bool:
    """Weights of the doubled list sum to twice the background charge."""
    total = CartanVector(0, 0)
    for _, w in doubled_insertions(cfg):
        total = total + w
    return total == 2 * cfg.Q


def coulomb_log_correlator(cfg: CorrelatorConfig) -> dict:
    """Exponent table of the closed-form zero-measure correlator.

    Keys (k, l) with k < l give the exponent of ln|zeta_k - zeta_l| over the
    doubled list; diagonal keys (k, k) for bulk k give the self-pair exponent
    +|alpha_k|^2/2 multiplying ln|z_k - conj z_k|.  Zero exponents are
    dropped.
    """
    if not cfg.neutral:
        raise AlgebraError("free-field closed form requires neutrality")
    pts = doubled_insertions(cfg)
    table = {}
    for k in range(len(pts)):
        for l in range(k + 1, len(pts)):
            e = -inner(pts[k][1], pts[l][1])
            if e != 0:
                table[(k, l)] = e
    for k in range(cfg.n_bulk):
        alpha = cfg.bulk[k][1]
        e = inner(alpha, alpha) * Fraction(1, 2)
        if e != 0:
            table[(k, k)] = e
    return table


# ---------------------------------------------------------------------------
# Rational functions of the probe point
# ---------------------------------------------------------------------------

class RationalField:
    """Finite sum  sum_{k,p} c_{k,p} / (z_k - t)^p  over fixed pole points.

    Closed under addition, multiplication (partial fractions), scalar
    multiples, and d/dt; coefficients are exact complex rationals.
    """

    __slots__ = ("points", "terms")

    def __init__(self, points, terms=None):
        self.points = tuple(points)
        clean = {}
        for (k, p), c in (terms or {}).items():
            if not 0 <= k < len(self.points):
                raise AlgebraError(f"pole index {k} outside the point list")
            if p < 1:
                raise AlgebraError(f"pole order must be >= 1, got {p}")
            c = c if isinstance(c, CFrac) else CFrac.of(c)
            if c == 0:
                continue
            prev = clean.get((k, p))
            clean[(k, p)] = c if prev is None else prev + c
        self.terms = {kp: c for kp, c in clean.items() if c != 0}

    @staticmethod
    def zero(points) -> "RationalField":
        return RationalField(points)

    @property
    def is_zero(self) -> bool:
        return not self.terms

    def _same(self, other: "RationalField"):
        if self.points != other.points:
            raise AlgebraError("rational fields live over different pole sets")

    def __add__(self, other):
        if not isinstance(other, RationalField):
            return NotImplemented
        self._same(other)
        out = dict(self.terms)
        for kp, c in other.terms.items():
            prev = out.get(kp)
            out[kp] = c if prev is None else prev + c
        return RationalField(self.points, out)

    def __neg__(self):
        return RationalField(self.points, {kp: -c for kp, c in self.terms.items()})

    def __sub__(self, other):
        if not isinstance(other, RationalField):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, RationalField):
            self._same(other)
            out = {}
            for (k, p), c1 in self.terms.items():
                for (l, q), c2 in other.terms.items():
                    c = c1 * c2
                    for kp, w in _pair_product(self.points, k, p, l, q):
                        prev = out.get(kp)
                        add = c * w
                        out[kp] = add if prev is None else prev + add
            return RationalField(self.points, out)
        try:
            c = other if isinstance(other, CFrac) else CFrac.of(other)
        except AlgebraError:
            return NotImplemented
        return RationalField(self.points,
                             {kp: v * c for kp, v in self.terms.items()})

    __rmul__ = __mul__

    def derivative(self) -> "RationalField":
        """d/dt of  sum c / (z_k - t)^p  =  sum p*c / (z_k - t)^(p+1)."""
        return RationalField(self.points,
                             {(k, p + 1): p * c for (k, p), c in self.terms.items()})

    def evaluate(self, t):
        if isinstance(t, CFrac) or isinstance(t, (int, Fraction)):
            t = t if isinstance(t, CFrac) else CFrac.of(t)
            total = CFrac(0)
            for (k, p), c in self.terms.items():
                total = total + c * (self.points[k] - t).reciprocal() ** p
            return total
        t = complex(t)
        total = 0j
        for (k, p), c in self.terms.items():
            total += complex(c) / (complex(self.points[k]) - t) ** p
        return total

    def __eq__(self, other):
        if not isinstance(other, RationalField):
            return NotImplemented
        return self.points == other.points and self.terms == other.terms

    __hash__ = None

    def __repr__(self):
        if not self.terms:
            return "RationalField(0)"
        bits = [f"({c!r})/(z{k}-t)^{p}"
                for (k, p), c in sorted(self.terms.items())]
        return " + ".join(bits)


def _pair_product(points, k, p, l, q):
    """Partial-fraction expansion of 1/((z_k-t)^p (z_l-t)^q) as
    ((index, order), weight) pairs."""
    if k == l:
        return (((k, p + q), CFrac(1)),)
    d = points[l] - points[k]
    if d == 0:
        # distinct indices at a coincident point still merge
        return (((k, p + q), CFrac(1)),)
    out = []
    dinv = d.reciprocal()
    for i in range(1, p + 1):
        w = CFrac(comb(q + p - i - 1, p - i)) * dinv ** (p + q - i)
        if (p - i) % 2:
            w = -w
        out.append(((k, i), w))
    for j in range(1, q + 1):
        w = CFrac(comb(p + q - j - 1, q - j)) * dinv ** (p + q - j)
        if p % 2:
            w = -w
        out.append(((l, j), w))
    return tuple(out)


# ---------------------------------------------------------------------------
# Gaussian integration by parts at zero interaction measure
# ---------------------------------------------------------------------------

def _ipp_factor(u: CartanVector, p: int, insertions) -> RationalField:
    points = tuple(z for z, _ in insertions)
    terms = {}
    pref = Fraction(factorial(p - 1), 2)
    for k, (_, w) in enumerate(insertions):
        c = pref * inner(u, w)
        if c != 0:
            terms[(k, p)] = CFrac.of(c)
    return RationalField(points, terms)


def _ipp_field(form: FieldPolynomial, insertions) -> RationalField:
    points = tuple(z for z, _ in insertions)
    total = RationalField.zero(points)
    for m, coeff in form.terms.items():
        piece = None
        for p, i in m.factors:
            u = CartanVector(1, 0) if i == 1 else CartanVector(0, 1)
            f = _ipp_factor(u, p, insertions)
            piece = f if piece is None else piece * f
        if piece is None:
            continue
        total = total + piece * coeff
    return total


def ipp_insert(form: FieldPolynomial, t, beta: CartanVector,
               cfg: CorrelatorConfig) -> RationalField:
    """Pole-sum ratio of a descendant insertion at probe t over the primary.

    Each factor <u, d^p Phi> maps to (p-1)! * sum_k <u, a_k> / (2 (z_k-t)^p)
    over the doubled list; for a bulk probe the conjugate point joins the
    list with the probe weight.  Valid only with every interaction measure
    zero.
    """
    if not cfg.all_mu_zero:
        raise AlgebraError(
            "integration-by-parts closed form requires all measures zero")
    t = _exact_complex(t, "probe")
    insertions = doubled_insertions(cfg)
    for z, _ in insertions:
        if z == t:
            raise AlgebraError(f"probe {t!r} collides with an insertion")
    if t.im != 0:
        insertions = insertions + [(t.conj(), beta)]
    return _ipp_field(form, insertions)


# ---------------------------------------------------------------------------
# Probe-derivative identities
# ---------------------------------------------------------------------------

def _log_derivative_at(insertions, k: int) -> CFrac:
    """d/d z_k of the engine log-correlator (half-weight exponents)."""
    zk, wk = insertions[k]
    total = CFrac(0)
    for l, (zl, wl) in enumerate(insertions):
        if l == k:
            continue
        total = total + CFrac.of(-Fraction(inner(wk, wl), 2)) * (zk - zl).reciprocal()
    return total


def verify_derivative_identity(lam, beta: CartanVector,
                               cfg: CorrelatorConfig):
    """Check the probe-derivative identity for index list lam; returns
    (holds, residual) with the residual an exact rational function of t.

    Supported: (1,) against d/dt of the log-correlator; (1,1) and (1,1,1)
    against the second and third normalized t-derivatives; (1,2) against
    d/dt composed with the sum over insertions of
    d/d z_k /(t - z_k) + Delta_k /(t - z_k)^2, with the half-weight
    engine value of Delta_k.
    """
    if isinstance(lam, int):
        lam = (lam,)
    lam = tuple(int(x) for x in lam)
    insertions = doubled_insertions(cfg)
    points = tuple(z for z, _ in insertions)
    q = q_of_gamma(cfg.gamma)
    lhs = _ipp_field(l_form(lam, beta, q=q), insertions)

    P = RationalField(points, {
        (k, 1): CFrac.of(Fraction(inner(beta, w), 2))
        for k, (_, w) in enumerate(insertions)
    })
    if lam == (1,):
        rhs = P
    elif lam == (1, 1):
        rhs = P.derivative() + P * P
    elif lam == (1, 1, 1):
        dP = P.derivative()
        rhs = dP.derivative() + 3 * (P * dP) + P * P * P
    elif lam == (1, 2):
        terms = {}
        for k, (_, w) in enumerate(insertions):
            terms[(k, 1)] = -_log_derivative_at(insertions, k)
            terms[(k, 2)] = CFrac.of(Fraction(inner(w, beta), 2)
                                     + engine_weight(w, q))
        R = RationalField(points, terms)
        rhs = R.derivative() + R * P
    else:
        raise AlgebraError(
            f"unsupported derivative multi-index {lam!r} for identity check")
    residual = lhs - rhs
    return residual.is_zero, residual


# ---------------------------------------------------------------------------
# Global Ward rows (engine-normalized constants)
# ---------------------------------------------------------------------------

def engine_weight(alpha_hat: CartanVector, q) -> Fraction:
    """Half-weight conformal constant attached to a doubled insertion."""
    return conformal_weight(alpha_hat, q=q) * Fraction(1, 2)


def engine_spin(alpha_hat: CartanVector, q) -> Fraction:
    """Half-weight spin constant attached to a doubled insertion.

    Equals half the closed-form spin of the doubled weight; it is the exact
    triple-pole coefficient of the current insertion at that point.
    """
    Qv = background_charge(q)
    prod = Fraction(1)
    for h in (H1, H2, H3):
        prod = prod * inner(h, alpha_hat - Qv)
    return prod


def descendant_ratio_at(cfg: CorrelatorConfig, k: int,
                        form: FieldPolynomial) -> CFrac:
    """Descendant/primary ratio for a form inserted at doubled index k,
    with pole sums over the other doubled insertions evaluated at z_k."""
    insertions = doubled_insertions(cfg)
    if not 0 <= k < len(insertions):
        raise AlgebraError(f"doubled index {k} out of range")
    zk = insertions[k][0]
    others = [(z, w) for i, (z, w) in enumerate(insertions) if i != k]
    total = CFrac(0)
    for m, coeff in form.terms.items():
        piece = CFrac.of(coeff) if not isinstance(coeff, CFrac) else coeff
        for p, i in m.factors:
            u = CartanVector(1, 0) if i == 1 else CartanVector(0, 1)
            s = CFrac(0)
            pref = Fraction(factorial(p - 1), 2)
            for z, w in others:
                c = pref * inner(u, w)
                if c != 0:
                    s = s + CFrac.of(c) * ((z - zk).reciprocal() ** p)
            piece = piece * s
        total = total + piece
    return total


def w_current_field(cfg: CorrelatorConfig) -> RationalField:
    """Full spin-3 current insertion ratio as an exact rational function.

    Its polar data reproduce, insertion by insertion, the mode ratios: the
    simple pole carries the level-2 form, the double pole the level-1 form,
    and the triple pole the half-weight spin constant of the local weight.
    """
    insertions = doubled_insertions(cfg)
    points = tuple(z for z, _ in insertions)
    q = cfg.q
    total = RationalField.zero(points)
    for coeff, factors in miura_current_terms(q=q):
        piece = None
        for u, p in factors:
            terms = {}
            pref = Fraction(factorial(p - 1), 2)
            for k, (_, w) in enumerate(insertions):
                c = pref * inner(u, w)
                if c != 0:
                    terms[(k, p)] = CFrac.of(c)
            f = RationalField(points, terms)
            piece = f if piece is None else piece * f
        if piece is not None:
            total = total + piece * coeff
    return total


def global_virasoro_row(cfg: CorrelatorConfig, n: int) -> CFrac:
    """Residual of the degree-n global Virasoro row (n in 0..2); identically
    zero on doubled-neutral configurations."""
    if n not in (0, 1, 2):
        raise AlgebraError(f"global Virasoro rows exist for n in 0..2, got {n}")
    insertions = doubled_insertions(cfg)
    q = cfg.q
    total = CFrac(0)
    for k, (zk, wk) in enumerate(insertions):
        l1 = descendant_ratio_at(cfg, k, l_form((1,), wk, q=q))
        total = total + zk ** n * l1
        if n >= 1:
            total = total + CFrac.of(n * engine_weight(wk, q)) * zk ** (n - 1)
    return total


def global_w_row(cfg: CorrelatorConfig, m: int) -> CFrac:
    """Residual of the degree-m global spin-3 row (m in 0..4); identically
    zero on doubled-neutral configurations with the realized spin-3 forms."""
    if m not in (0, 1, 2, 3, 4):
        raise AlgebraError(f"global spin-3 rows exist for m in 0..4, got {m}")
    insertions = doubled_insertions(cfg)
    q = cfg.q
    total = CFrac(0)
    for k, (zk, wk) in enumerate(insertions):
        w2 = descendant_ratio_at(cfg, k, miura_w_form(2, wk, q=q))
        total = total + zk ** m * w2
        if m >= 1:
            w1 = descendant_ratio_at(cfg, k, miura_w_form(1, wk, q=q))
            total = total + CFrac.of(m) * zk ** (m - 1) * w1
        if m >= 2:
            total = total + (CFrac.of(Fraction(m * (m - 1), 2))
                             * zk ** (m - 2) * CFrac.of(engine_spin(wk, q)))
    return total
