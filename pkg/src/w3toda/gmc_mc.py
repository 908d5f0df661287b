"""Monte Carlo layer: half-plane Gaussian field, chaos masses, correlators.

Desk-scale probabilistic checks of the exact layer.  The two-component free
field is sampled exactly on a finite point set (dense Cholesky of the
mollified covariance, factorized once and shared across replicas); the
interaction masses are grid quadratures of the renormalized exponential
field against the insertion-dependent shift weights; the zero-mode integral
factorizes over the two fundamental-weight directions and is evaluated by
Gauss-Legendre quadrature on an adaptively grown window whose tail
increment is reported.

Conventions, fixed here and used consistently throughout:

* covariance ``E <u, X(x)> <v, X(y)> = <u, v> G(x, y)`` with
  ``G(x, y) = Ghat(x, y) + Ghat(x, conj y)`` and
  ``Ghat(x, y) = ln 1/|x - y| + ln max(|x|, 1) + ln max(|y|, 1)``;
  mollification replaces every kernel entry by its exact expectation under
  independent Gaussian jitters of scale ``rho`` at each argument (closed
  form through the exponential integral), which keeps the matrix a true
  covariance at every ``rho`` and leaves separations beyond a few ``rho``
  untouched;
* the closed-form zero-measure correlator pairs the insertion charges over
  the doubled list (bulk points, their conjugates, then boundary points):
  each unordered pair contributes ``|zeta_k - zeta_l| ** (-inner/2)`` of the
  listed weights, so a boundary pair carries half the naive exponent while
  a merging bulk pair still shows the full one (two doubled pairs share
  each modulus);
* the chaos-mass weights exponentiate the pairing of ``gamma e_i`` (half of
  it on the boundary) against the shifted background: the full listed
  weight at every doubled point, plus the background ``|x|_+`` decay that
  the shift of the global field produces;
* insertions are expected inside the closed unit disk, where their own
  ``|zeta_k|_+`` normalization factors degenerate to one.

Replicas are organized in fixed blocks of 512: block ``b`` of seed ``S``
draws from ``default_rng([S, b])``, so any replica can be replayed
deterministically and partial runs merge by summing moments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from scipy.special import exp1

from .algebra_core import (
    E1,
    E2,
    OMEGA1,
    OMEGA2,
    AlgebraError,
    CartanVector,
    inner,
)
from .free_field import CorrelatorConfig, doubled_insertions

BLOCK = 512
MAX_GRID = 4096
_SQRT3 = math.sqrt(3.0)
_QUAD_NODES = 64

_FRAME = (E1, E1 + 2 * E2)          # orthogonal frame, norms sqrt(2), sqrt(6)
_FRAME_NORM = (math.sqrt(2.0), math.sqrt(6.0))


def frame_coefficients(u: CartanVector) -> tuple:
    """Coefficients of <u, X> over the two independent scalar components."""
    return tuple(float(inner(u, f)) / n for f, n in zip(_FRAME, _FRAME_NORM))


def _doubled_floats(cfg: CorrelatorConfig) -> tuple:
    """Doubled positions as complex floats with their listed charge weights."""
    pts, wts = [], []
    for z, alpha in doubled_insertions(cfg):
        pts.append(complex(z.re, z.im))
        wts.append(alpha)
    return np.asarray(pts, dtype=complex), tuple(wts)


# ---------------------------------------------------------------------------
# Gaussian field on a finite point set
# ---------------------------------------------------------------------------

_EULER_GAMMA = 0.5772156649015329
_CIRCLE_NODES = 64


def _smoothed_log(d2: np.ndarray, tau: float) -> np.ndarray:
    """E[-ln|d + Z|] for complex Gaussian Z with E|Z|^2 = tau^2: the exact
    Gaussian smoothing of the log kernel, -ln d - E1(d^2/tau^2)/2, finite
    at zero."""
    d2 = np.asarray(d2, dtype=float)
    safe = np.where(d2 > 0, d2, 1.0)
    smooth = -0.5 * np.log(safe) - 0.5 * exp1(safe / (tau * tau))
    at_zero = 0.5 * (_EULER_GAMMA - 2.0 * math.log(tau))
    return np.where(d2 > 0, smooth, at_zero)


def _smoothed_log_plus(p: np.ndarray, rho: float) -> np.ndarray:
    """Mollification of ln max(|x|, 1) at jitter scale rho: the function is
    the log-potential of the uniform unit-circle measure, so its smoothing
    is the circle average of the smoothed log kernel."""
    theta = 2 * math.pi * (np.arange(_CIRCLE_NODES) + 0.5) / _CIRCLE_NODES
    circle = np.exp(1j * theta)
    d2 = np.abs(p[:, None] - circle[None, :]) ** 2
    tau = math.sqrt(2.0) * rho          # one jitter: E|U|^2 = 2 rho^2
    return -_smoothed_log(d2, tau).mean(axis=1)


def mollified_covariance(points, rho: float) -> np.ndarray:
    """Covariance matrix of one scalar component of the rho-mollified field
    on the given points.

    Every ingredient is the exact expectation of the unmollified kernel
    over independent Gaussian jitters of the two arguments, so the matrix
    is a true covariance (positive semi-definite up to grid degeneracy):
    pair terms carry jitter variance 2 rho^2 per point (tau = 2 rho), the
    one-point plus-parts a single jitter (tau = sqrt(2) rho), and at
    separations beyond a few rho everything reduces to the unsmoothed
    kernel exponentially fast."""
    p = np.asarray(points, dtype=complex)
    tau = 2.0 * rho
    direct = _smoothed_log(np.abs(p[:, None] - p[None, :]) ** 2, tau)
    mirror = _smoothed_log(np.abs(p[:, None] - np.conj(p)[None, :]) ** 2, tau)
    lplus = _smoothed_log_plus(p, rho)
    return direct + mirror + 2.0 * (lplus[:, None] + lplus[None, :])


@dataclass(frozen=True)
class GffSample:
    """One replica of the two-component field on a fixed point set."""

    points: np.ndarray
    values: np.ndarray          # shape (2, n): the scalar components
    seed: int
    replica: int
    rho: float

    def pairing(self, u: CartanVector) -> np.ndarray:
        """<u, X(x)> over the point set."""
        c1, c2 = frame_coefficients(u)
        return c1 * self.values[0] + c2 * self.values[1]


class GffEnsemble:
    """Immutable covariance factorization shared by all replicas."""

    def __init__(self, points, rho: float):
        pts = np.asarray(list(points), dtype=complex)
        if pts.size == 0:
            raise AlgebraError("field sampling needs at least one point")
        if pts.size > MAX_GRID:
            raise AlgebraError(
                f"grid has {pts.size} points, over the dense factorization "
                f"budget of {MAX_GRID}")
        if not rho > 0:
            raise AlgebraError("mollification radius must be positive")
        self.points = pts
        self.rho = float(rho)
        self.cov = mollified_covariance(pts, self.rho)
        try:
            self.chol = np.linalg.cholesky(self.cov)
        except np.linalg.LinAlgError as exc:
            raise AlgebraError(
                "covariance is not positive semi-definite after "
                f"mollification; radius {rho} is too small for the grid "
                "spacing") from exc

    @property
    def n(self) -> int:
        return self.points.size

    def sample_block(self, seed: int, block: int) -> np.ndarray:
        """Replicas [block*BLOCK, (block+1)*BLOCK) as an array (2, n, BLOCK)."""
        rng = np.random.default_rng([int(seed), int(block)])
        normals = rng.standard_normal((self.n, 2 * BLOCK))
        mixed = self.chol @ normals
        return np.stack((mixed[:, :BLOCK], mixed[:, BLOCK:]))

    def sample(self, seed: int, replica: int = 0) -> GffSample:
        block = self.sample_block(seed, replica // BLOCK)
        return GffSample(self.points, block[:, :, replica % BLOCK],
                         int(seed), int(replica), self.rho)


def sample_gff(points, rho: float, seed: int) -> GffSample:
    """One-shot sample; factorizes the covariance for this call only."""
    return GffEnsemble(points, rho).sample(seed)


# ---------------------------------------------------------------------------
# Closed-form zero-measure correlator value
# ---------------------------------------------------------------------------

def coulomb_value(cfg: CorrelatorConfig) -> float:
    """Zero-measure correlator: the Gaussian pairing of the insertion
    charges, as the product over unordered doubled pairs of
    ``|zeta_k - zeta_l| ** (-inner(w_k, w_l) / 2)``."""
    pts, wts = _doubled_floats(cfg)
    log_value = 0.0
    for k in range(len(pts)):
        for l in range(k + 1, len(pts)):
            e = -0.5 * float(inner(wts[k], wts[l]))
            if e:
                log_value += e * math.log(abs(pts[k] - pts[l]))
    return math.exp(log_value)


# ---------------------------------------------------------------------------
# Quadrature grids over the truncated domains
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GridSpec:
    """Rectangular bulk lattice over [-extent, extent] x [delta, extent] and
    boundary lattice over [-extent, extent], with radius-eps neighbourhoods
    of the insertions removed."""

    extent: float = 2.0
    bulk_shape: tuple = (34, 24)
    boundary_n: int = 96


def _bulk_grid(delta, eps, spec, excluded):
    ext, (nx, ny) = spec.extent, spec.bulk_shape
    hx, hy = 2 * ext / nx, (ext - delta) / ny
    xs = -ext + hx * (np.arange(nx) + 0.5)
    ys = delta + hy * (np.arange(ny) + 0.5)
    pts = (xs[:, None] + 1j * ys[None, :]).ravel()
    keep = np.ones(pts.size, dtype=bool)
    for z in excluded:
        keep &= np.abs(pts - z) >= eps
    return pts[keep], np.full(int(keep.sum()), hx * hy)


def _boundary_grid(eps, spec, excluded):
    ext, n = spec.extent, spec.boundary_n
    h = 2 * ext / n
    xs = -ext + h * (np.arange(n) + 0.5)
    keep = np.ones(n, dtype=bool)
    for s in excluded:
        keep &= np.abs(xs - s) >= eps
    xs = xs[keep]
    return xs, np.full(xs.size, h)


def _arc_index(xs: np.ndarray, cfg: CorrelatorConfig) -> np.ndarray:
    """Arc label per boundary point: arc l spans (s_l, s_{l+1}); the last
    arc wraps through infinity."""
    svals = sorted(float(s) for s, _ in cfg.boundary)
    if not svals:
        return np.zeros(xs.size, dtype=int)
    return (np.searchsorted(svals, xs) - 1) % len(svals)


# ---------------------------------------------------------------------------
# Interaction masses
# ---------------------------------------------------------------------------

def _shift_log_weight(cfg, x: np.ndarray, direction: int) -> np.ndarray:
    """ln of the deterministic mass weight in direction i: the pairing of
    ``gamma e_i`` against the insertion shift (full listed weight at every
    doubled point) plus the background ``|x|_+ ** (-2 gamma q)`` decay."""
    e_i = (E1, E2)[direction - 1]
    g = float(cfg.gamma)
    q = float(cfg.q)
    pts, weights = _doubled_floats(cfg)
    lp = np.log(np.maximum(np.abs(x), 1.0))
    total = -2.0 * g * q * lp
    for zk, wk in zip(pts, weights):
        c = g * float(inner(e_i, wk))
        if c:
            total = total + c * (lp - np.log(np.abs(x - zk)))
    return total


class _MassModel:
    """Grids plus per-direction quadrature bases so that the replica mass is
    ``base_i . exp(field_i)``.  The grids depend only on the truncation data
    and exclusion set; ``rebound`` swaps the insertion weights while keeping
    the grids (and hence any shared field samples) fixed."""

    def __init__(self, cfg, delta, eps, rho, spec, extra_exclusions=()):
        self.rho = float(rho)
        self.spec = spec
        bulk_excl = [complex(z.re, z.im) for z, _ in cfg.bulk]
        bnd_excl = [float(s) for s, _ in cfg.boundary]
        for z in extra_exclusions:
            z = complex(z)
            if z.imag > 0:
                bulk_excl.append(z)
            else:
                bnd_excl.append(z.real)
        self.bulk_pts, self.bulk_w = _bulk_grid(delta, eps, spec, bulk_excl)
        self.bnd_pts, self.bnd_w = _boundary_grid(eps, spec, bnd_excl)
        self.points = np.concatenate([self.bulk_pts, self.bnd_pts])
        self.n_bulk_pts = self.bulk_pts.size
        self._bind(cfg)

    def _bind(self, cfg):
        self.cfg = cfg
        self.bnd_arc = _arc_index(self.bnd_pts, cfg)
        g = float(cfg.gamma)
        log_rho = math.log(self.rho)
        self.bulk_base, self.bnd_base = [], []
        for i in (1, 2):
            lw_bulk = _shift_log_weight(cfg, self.bulk_pts, i)
            lw_bnd = _shift_log_weight(cfg, self.bnd_pts.astype(complex), i)
            self.bulk_base.append(
                self.bulk_w * np.exp(g * g * log_rho + lw_bulk))
            self.bnd_base.append(
                self.bnd_w * np.exp(0.5 * (g * g * log_rho + lw_bnd)))

    def rebound(self, cfg) -> "_MassModel":
        clone = object.__new__(_MassModel)
        clone.__dict__.update(self.__dict__)
        clone._bind(cfg)
        return clone

    @property
    def mass_keys(self) -> tuple:
        arcs = max(self.cfg.n_boundary, 1)
        return tuple([("bulk", 1), ("bulk", 2)]
                     + [("boundary", i, a) for i in (1, 2) for a in range(arcs)])

    def masses(self, fields: np.ndarray) -> dict:
        """Replica masses from a block of scalar fields, shape (2, n, R)."""
        g = float(self.cfg.gamma)
        nb = self.n_bulk_pts
        arcs = max(self.cfg.n_boundary, 1)
        out = {}
        for i in (1, 2):
            c1, c2 = frame_coefficients((E1, E2)[i - 1])
            phi = g * (c1 * fields[0] + c2 * fields[1])
            out[("bulk", i)] = self.bulk_base[i - 1] @ np.exp(phi[:nb])
            weighted = self.bnd_base[i - 1][:, None] * np.exp(0.5 * phi[nb:])
            for arc in range(arcs):
                out[("boundary", i, arc)] = \
                    weighted[self.bnd_arc == arc].sum(axis=0)
        return out

    def expected_masses(self, cov_diag: np.ndarray) -> dict:
        """Deterministic expectations of the replica masses: the Gaussian
        exponential moment against the covariance diagonal."""
        g = float(self.cfg.gamma)
        nb = self.n_bulk_pts
        arcs = max(self.cfg.n_boundary, 1)
        out = {}
        for i in (1, 2):
            out[("bulk", i)] = float(
                self.bulk_base[i - 1] @ np.exp(g * g * cov_diag[:nb]))
            weighted = self.bnd_base[i - 1] * np.exp(
                0.25 * g * g * cov_diag[nb:])
            for arc in range(arcs):
                out[("boundary", i, arc)] = float(
                    weighted[self.bnd_arc == arc].sum())
        return out


# ---------------------------------------------------------------------------
# Zero-mode window
# ---------------------------------------------------------------------------

def zero_mode_window(sigma: float, gamma: float, bulk_term: float,
                     bnd_term: float, tol: float = 1e-8) -> tuple:
    """((lo, hi), tail) for one direction of the factorized zero-mode
    integral of ``exp(sigma v - P e^{gamma v} - Q e^{gamma v / 2})``.

    The window doubles around the mode until its integral increment falls
    below ``tol`` of the running total; the last increment, relative to the
    window mass, is the reported tail bound.
    """
    if not sigma > 0:
        raise AlgebraError(
            "zero-mode integral does not converge: the charge condition "
            f"needs a positive fundamental-weight pairing, got {sigma}")
    if bulk_term <= 0 and bnd_term <= 0:
        raise AlgebraError(
            "zero-mode integral does not converge: no interaction measure "
            "suppresses this direction")

    def exponent(v):
        return (sigma * v - bulk_term * np.exp(gamma * v)
                - bnd_term * np.exp(0.5 * gamma * v))

    def slope(v):
        return (sigma - gamma * bulk_term * math.exp(gamma * v)
                - 0.5 * gamma * bnd_term * math.exp(0.5 * gamma * v))

    hi = 0.0
    while slope(hi) > 0:
        hi += 2.0
    lo = hi - 2.0
    while slope(lo) < 0:
        lo -= 2.0
    while hi - lo > 1e-10:
        mid = 0.5 * (lo + hi)
        if slope(mid) > 0:
            lo = mid
        else:
            hi = mid
    mode = 0.5 * (lo + hi)

    width, prev, tail = 4.0, None, math.inf
    while width < 4096.0:
        grid = np.linspace(mode - width, mode + width, 801)
        total = float(np.trapezoid(
            np.exp(exponent(grid) - exponent(mode)), grid))
        if prev is not None and total > 0:
            tail = abs(total - prev) / total
            if tail <= tol:
                return (mode - width, mode + width), tail
        prev = total
        width *= 2.0
    raise AlgebraError(
        "zero-mode integral does not converge: window growth did not "
        f"stabilize (last increment {tail:.3e})")


def _gauss_nodes(window: tuple, sigma: float) -> tuple:
    x, w = np.polynomial.legendre.leggauss(_QUAD_NODES)
    lo, hi = window
    v = 0.5 * (hi - lo) * x + 0.5 * (hi + lo)
    return v, 0.5 * (hi - lo) * w * np.exp(sigma * v)


def _mu_totals(cfg) -> tuple:
    """Per-direction (bulk mu, per-arc boundary mu tuple) as floats."""
    mub = tuple(float(x) for x in cfg.mu_bulk)
    mu_arc = tuple(tuple(float(p[i]) for p in cfg.mu_boundary)
                   for i in (0, 1))
    return mub, mu_arc


def _check_convergence_conditions(cfg) -> None:
    s = cfg.s_vector
    for name, omega in (("first", OMEGA1), ("second", OMEGA2)):
        if not inner(s, omega) > 0:
            raise AlgebraError(
                "zero-mode integral does not converge: the total charge "
                f"must pair positively with the {name} fundamental weight")
    Qv = cfg.Q
    for k, (_, alpha) in enumerate(cfg.bulk, start=1):
        for idx, e in ((1, E1), (2, E2)):
            if not inner(alpha - Qv, e) < 0:
                raise AlgebraError(
                    "charge bound fails at bulk insertion "
                    f"{k}: the weight must pair below the background charge "
                    f"along simple root {idx}")
    mub, mu_arc = _mu_totals(cfg)
    for i in (1, 2):
        if mub[i - 1] <= 0 and sum(mu_arc[i - 1]) <= 0:
            raise AlgebraError(
                "zero-mode integral does not converge: no interaction "
                f"measure suppresses direction {i}")


def _windows_from_means(mean_masses: dict, cfg, tol: float) -> tuple:
    gamma = float(cfg.gamma)
    mub, mu_arc = _mu_totals(cfg)
    arcs = max(cfg.n_boundary, 1)
    s = cfg.s_vector
    sigma = (float(inner(s, OMEGA1)), float(inner(s, OMEGA2)))
    windows, tails = [], []
    for i in (1, 2):
        bulk_term = mub[i - 1] * mean_masses[("bulk", i)]
        bnd_term = sum(mu_arc[i - 1][a] * mean_masses[("boundary", i, a)]
                       for a in range(arcs))
        window, tail = zero_mode_window(sigma[i - 1], gamma, bulk_term,
                                        bnd_term, tol)
        windows.append(window)
        tails.append(tail)
    return windows, tails


def _zero_mode_values(masses: dict, cfg, windows,
                      chunk: int = 16384) -> np.ndarray:
    """Per-replica zero-mode integrals (1/sqrt(3)) prod_i I_i(replica)."""
    n = np.atleast_1d(masses[("bulk", 1)]).size
    if n > chunk:
        parts = []
        for lo in range(0, n, chunk):
            piece = {k: np.atleast_1d(v)[lo:lo + chunk]
                     for k, v in masses.items()}
            parts.append(_zero_mode_values(piece, cfg, windows, chunk))
        return np.concatenate(parts)
    gamma = float(cfg.gamma)
    mub, mu_arc = _mu_totals(cfg)
    arcs = max(cfg.n_boundary, 1)
    s = cfg.s_vector
    sigma = (float(inner(s, OMEGA1)), float(inner(s, OMEGA2)))
    total = None
    for i in (1, 2):
        v, lin = _gauss_nodes(windows[i - 1], sigma[i - 1])
        bulk = mub[i - 1] * np.atleast_1d(masses[("bulk", i)])
        bnd = sum(mu_arc[i - 1][a] * np.atleast_1d(masses[("boundary", i, a)])
                  for a in range(arcs))
        expo = (-np.exp(gamma * v)[:, None] * bulk[None, :]
                - np.exp(0.5 * gamma * v)[:, None] * bnd[None, :])
        part = lin @ np.exp(expo)
        total = part if total is None else total * part
    return total / _SQRT3


# ---------------------------------------------------------------------------
# Correlator estimation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GmcEstimate:
    """Monte Carlo value with per-direction chaos masses.

    ``masses`` maps ("bulk", i) and ("boundary", i, arc) to (mean, stderr);
    ``diagnostics`` records the zero-mode windows, tail increments, grid
    sizes, the closed-form Coulomb factor, and the deterministic mass
    expectations."""

    value: float
    stderr: float
    replicas: int
    masses: dict
    diagnostics: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        diag = {}
        for k, v in self.diagnostics.items():
            if isinstance(v, dict):
                diag[k] = {"_".join(map(str, kk)): vv for kk, vv in v.items()}
            else:
                diag[k] = v
        return {
            "value": self.value,
            "stderr": self.stderr,
            "replicas": self.replicas,
            "masses": {"_".join(map(str, k)): list(v)
                       for k, v in self.masses.items()},
            "diagnostics": diag,
        }


def estimate_correlator(cfg: CorrelatorConfig, delta: float, eps: float,
                        rho: float, replicas: int, *, seed: int = 0,
                        grid: GridSpec = GridSpec(),
                        window_tol: float = 1e-8) -> GmcEstimate:
    """Monte Carlo estimate of the correlator at truncation scales
    (delta, eps) and mollification rho.

    With every interaction measure zero the configuration must be neutral;
    the value is then the closed-form Coulomb product and the replicas only
    feed the mass diagnostics.  Otherwise the charge-convergence conditions
    must hold and the zero-mode integral is evaluated on the reported
    window, factorized over the two fundamental-weight directions.
    """
    if replicas <= 0:
        raise AlgebraError("no data: at least one replica is required")
    if not (delta > 0 and eps > 0 and rho > 0):
        raise AlgebraError(
            "truncation and mollification scales must be positive")
    free_case = cfg.all_mu_zero
    if free_case:
        if not cfg.neutral:
            raise AlgebraError(
                "zero-mode integral does not converge: with all measures "
                "zero the total charge must be neutral")
    else:
        _check_convergence_conditions(cfg)

    model = _MassModel(cfg, delta, eps, rho, grid)
    ensemble = GffEnsemble(model.points, rho)
    cov_diag = np.diag(ensemble.cov).copy()
    keys = model.mass_keys

    n_blocks = -(-replicas // BLOCK)
    block_masses = []
    for b in range(n_blocks):
        count = min(BLOCK, replicas - b * BLOCK)
        fields = ensemble.sample_block(seed, b)[:, :, :count]
        block_masses.append(model.masses(fields))
    pooled = {k: np.concatenate([m[k] for m in block_masses]) for k in keys}

    mass_stats = {}
    for k in keys:
        mean = float(pooled[k].mean())
        err = float(pooled[k].std(ddof=1) / math.sqrt(replicas)) \
            if replicas > 1 else 0.0
        mass_stats[k] = (mean, err)

    coulomb = coulomb_value(cfg)
    diagnostics = {
        "coulomb": coulomb,
        "grid_bulk": int(model.n_bulk_pts),
        "grid_boundary": int(model.bnd_pts.size),
        "rho": float(rho), "delta": float(delta), "eps": float(eps),
        "expected_masses": model.expected_masses(cov_diag),
    }

    if free_case:
        return GmcEstimate(coulomb, 0.0, replicas, mass_stats, diagnostics)

    windows, tails = _windows_from_means(
        {k: v[0] for k, v in mass_stats.items()}, cfg, window_tol)
    diagnostics["window"] = tuple(tuple(w) for w in windows)
    diagnostics["tail_increment"] = tuple(tails)

    values = _zero_mode_values(pooled, cfg, windows)
    mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(replicas)) \
        if replicas > 1 else 0.0
    return GmcEstimate(coulomb * mean, coulomb * stderr, replicas,
                       mass_stats, diagnostics)


# ---------------------------------------------------------------------------
# Fusion probe
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FusionReport:
    """Log-log slope of the estimated correlator along a merging ladder,
    next to the short-distance exponent and its positive-part correction."""

    slope: float
    exponent: float
    correction: float
    distances: tuple
    values: tuple
    stderrs: tuple

    @property
    def bound(self) -> float:
        return self.exponent + self.correction

    def satisfied(self, slack: float = 0.1) -> bool:
        return self.slope <= self.bound + slack

    def to_json(self) -> dict:
        return {"slope": self.slope, "exponent": self.exponent,
                "correction": self.correction, "bound": self.bound,
                "satisfied": self.satisfied(),
                "distances": list(self.distances),
                "values": list(self.values), "stderrs": list(self.stderrs)}


def _moved_config(cfg, kind, i, j, d):
    if kind == "bulk":
        bulk = [(complex(z.re, z.im), a) for z, a in cfg.bulk]
        bulk[j] = (bulk[i][0] + d, bulk[j][1])
        return CorrelatorConfig(cfg.gamma, tuple(bulk), cfg.boundary,
                                cfg.mu_bulk, cfg.mu_boundary)
    boundary = [(float(s), b) for s, b in cfg.boundary]
    boundary[j] = (boundary[i][0] + d, boundary[j][1])
    boundary.sort(key=lambda sb: sb[0])
    return CorrelatorConfig(cfg.gamma, cfg.bulk, tuple(boundary),
                            cfg.mu_bulk, cfg.mu_boundary)


def fusion_probe(cfg: CorrelatorConfig, pair, ladder, *, delta: float,
                 eps: float, rho: float, replicas: int, seed: int = 0,
                 grid: GridSpec = GridSpec()) -> FusionReport:
    """Fit the merging exponent of the estimated correlator as insertion
    ``j`` of the pair is re-placed at each ladder distance to the right of
    insertion ``i``.

    The grids and field replicas are shared across ladder rungs (every rung
    position is excluded from the quadrature grid up front), so rung values
    differ only through the insertion-dependent weights.  The predicted
    short-distance exponent is ``-inner`` of the pair weights for a bulk
    pair and ``-inner/2`` for a boundary pair, plus a positive-part
    correction in the second simple-root direction; the fitted slope is
    expected on or below that bound.
    """
    kind, i, j = pair
    if kind not in ("bulk", "boundary"):
        raise AlgebraError("pair kind must be 'bulk' or 'boundary'")
    store = cfg.bulk if kind == "bulk" else cfg.boundary
    if not (0 <= i < len(store) and 0 <= j < len(store) and i != j):
        raise AlgebraError("pair indices must name two distinct insertions")
    if replicas < 2:
        raise AlgebraError(
            "no data: the fusion fit needs at least two replicas")
    ladder = sorted(float(d) for d in ladder)
    if len(ladder) < 2:
        raise AlgebraError("distance ladder needs at least two rungs")
    if ladder[0] < 2 * rho:
        raise AlgebraError(
            "distance ladder reaches below the mollification scale: "
            f"{ladder[0]} < 2 * {rho}")

    a_i, a_j = store[i][1], store[j][1]
    hyp = inner(a_i + a_j - cfg.Q, E1)
    if not hyp < 0:
        raise AlgebraError(
            "fusion hypothesis fails: the merged charge must pair "
            f"negatively with the first simple root, got {hyp}")
    pairing = float(inner(a_i, a_j))
    exponent = -pairing if kind == "bulk" else -0.5 * pairing
    gap = float(inner(a_i + a_j - cfg.Q, E2))
    correction = (0.5 if kind == "bulk" else 0.25) * gap * gap \
        if gap > 0 else 0.0

    free_case = cfg.all_mu_zero
    if free_case:
        if not cfg.neutral:
            raise AlgebraError(
                "zero-mode integral does not converge: with all measures "
                "zero the total charge must be neutral")
    else:
        _check_convergence_conditions(cfg)

    if not free_case:
        if kind == "bulk":
            anchor = complex(store[i][0].re, store[i][0].im)
        else:
            anchor = complex(float(store[i][0]))
        positions = [anchor + d for d in ladder]
        base_model = _MassModel(cfg, delta, eps, rho, grid,
                                extra_exclusions=positions)
        ensemble = GffEnsemble(base_model.points, rho)
        n_blocks = -(-replicas // BLOCK)
        blocks = [
            ensemble.sample_block(seed, b)[:, :,
                                           :min(BLOCK, replicas - b * BLOCK)]
            for b in range(n_blocks)]

    values, errs = [], []
    windows = None
    for d in ladder:
        cfg_d = _moved_config(cfg, kind, i, j, d)
        coulomb = coulomb_value(cfg_d)
        if free_case:
            values.append(coulomb)
            errs.append(0.0)
            continue
        model = base_model.rebound(cfg_d)
        pooled = {k: np.concatenate([model.masses(f)[k] for f in blocks])
                  for k in model.mass_keys}
        if windows is None:
            windows, _ = _windows_from_means(
                {k: float(v.mean()) for k, v in pooled.items()}, cfg_d, 1e-8)
        value_r = _zero_mode_values(pooled, cfg_d, windows)
        values.append(coulomb * float(value_r.mean()))
        errs.append(coulomb * float(value_r.std(ddof=1) / math.sqrt(replicas)))

    logs = np.log(np.asarray(values))
    if np.ptp(logs) > 1e-14:
        slope = float(np.polyfit(np.log(np.asarray(ladder)), logs, 1)[0])
    else:
        slope = 0.0
    return FusionReport(slope, exponent, correction, tuple(ladder),
                        tuple(float(v) for v in values),
                        tuple(float(e) for e in errs))
