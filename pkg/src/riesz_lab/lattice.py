"""Renormalized energies of periodic configurations.

Two families of formulas live here.

In dimension 2, unit-covolume Bravais lattices are parametrized by
tau = x + iy in the upper half plane and their energy differences reduce
to differences of the Epstein zeta function Z_tau(alpha), evaluated two
ways: by direct lattice summation (absolutely convergent for alpha > 1,
with a midpoint-corrected integral tail) and through the Chowla-Selberg
expansion in Riemann zeta, Gamma, divisor sums and Bessel K, which also
provides the continuation to alpha < 1.

In dimension 1, the renormalized energy of an N-point unit-density torus
configuration is

    W = (c^2/N) sum_{i != j} G(a_i - a_j) + c^2 lim_{x->0} (G(x) - g(x)/c),

where G is the torus Green function of the fractional Laplacian of order
alpha with zero mean.  Its Fourier normalization is pinned by requiring
the small-x singularity to match g(x)/c exactly (this is what makes the
limit above finite): the cosine-series coefficients carry the constant
kappa_alpha = pi / (c Gamma(1-2 alpha) sin(pi alpha)), which equals 1/2
in the log case and reproduces G(x) = -(1/2 pi) log(2 sin(pi x)) on the
unit torus.
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, NumericError
from .kernels import KernelSpec, g_eval, make_kernel
from .specfun import bessel_k, gamma_fn, riemann_zeta, sigma_div

EULER_GAMMA = 0.5772156649015329
TRI_X = 0.5
TRI_Y = math.sqrt(0.75)


# ---------------------------------------------------------------------------
# lattice parametrization

@dataclass(frozen=True)
class Lattice2D:
    """Unit-covolume lattice y^(-1/2) ((x, y) Z + (1, 0) Z), tau = x + iy."""
    x: float
    y: float

    def __post_init__(self):
        if not self.y > 0.0:
            raise DomainError(f"tau must lie in the upper half plane, got y={self.y}")

    def basis(self) -> np.ndarray:
        r = self.y ** -0.5
        return np.array([[r * self.x, r * self.y], [r, 0.0]])

    def canonicalize(self) -> "Lattice2D":
        """Reduce tau to the fundamental domain |tau| >= 1, |x| <= 1/2."""
        x, y = self.x, self.y
        for _ in range(256):
            x -= round(x)
            n2 = x * x + y * y
            if n2 >= 1.0 - 1e-15:
                break
            x, y = -x / n2, y / n2
        return Lattice2D(x, y)


TRIANGULAR = Lattice2D(TRI_X, TRI_Y)


# ---------------------------------------------------------------------------
# Epstein zeta: direct summation (alpha > 1)

def _quadratic_form_sum(x: float, y: float, alpha: float, M: int) -> float:
    m = np.arange(-M, M + 1, dtype=float)
    mm, nn = np.meshgrid(m, m, indexing="ij")
    q2 = ((mm * x + nn) ** 2 + (mm * y) ** 2) / y
    q2[M, M] = 1.0
    vals = q2 ** (-alpha)
    vals[M, M] = 0.0
    return float(vals.sum())


def _direct_tail(x: float, y: float, alpha: float, M: int) -> float:
    """Integral tail over the cell complement plus the midpoint correction.

    The box sum over |m|, |n| <= M owns exactly the union of unit cells
    max(|s|,|t|) <= S with S = M + 1/2, so the remainder is the integral
    over the complement corrected by the second-order midpoint term, a
    pure boundary flux.  Remaining error is O(S^(-2 alpha - 2)).
    """
    a = alpha
    S = M + 0.5

    def F(s, t):
        return y ** a * ((s * x + t) ** 2 + (s * y) ** 2) ** (-a)

    # independent of Gamma: int (1+u^2)^(-a) du by quadrature
    bconst = quad(lambda u: (1.0 + u * u) ** (-a), -np.inf, np.inf, epsabs=1e-14)[0]
    tail_a = 2.0 * y ** a * bconst * y ** (1.0 - 2.0 * a) * S ** (2.0 - 2.0 * a) \
        / (2.0 * a - 2.0)

    def inner(s):
        f = lambda t: ((s * x + t) ** 2 + (s * y) ** 2) ** (-a) \
            + ((s * x - t) ** 2 + (s * y) ** 2) ** (-a)
        return quad(f, S, np.inf, epsabs=1e-14)[0]

    tail_b = y ** a * quad(inner, -S, S, epsabs=1e-13, limit=200)[0]

    def F_s(s, t):
        r2 = (s * x + t) ** 2 + (s * y) ** 2
        return -a * y ** a * r2 ** (-a - 1.0) * 2.0 * ((s * x + t) * x + s * y * y)

    def F_t(s, t):
        r2 = (s * x + t) ** 2 + (s * y) ** 2
        return -a * y ** a * r2 ** (-a - 1.0) * 2.0 * (s * x + t)

    flux = quad(lambda t: F_s(S, t) - F_s(-S, t), -S, S, epsabs=1e-15)[0] \
        + quad(lambda s: F_t(s, S) - F_t(s, -S), -S, S, epsabs=1e-15)[0]
    return tail_a + tail_b + flux / 24.0


def epstein_zeta_direct(lat: Lattice2D, alpha: float, tol: float = 1e-10) -> float:
    """Z_tau(alpha) by adaptive double summation, absolutely convergent range."""
    if not alpha > 1.0:
        raise DomainError(
            f"direct summation requires alpha > 1, got alpha={alpha}; "
            "use epstein_zeta_cs for the continuation")
    prev = None
    for M in (32, 64, 128, 256, 512):
        val = _quadratic_form_sum(lat.x, lat.y, alpha, M) \
            + _direct_tail(lat.x, lat.y, alpha, M)
        if prev is not None and abs(val - prev) < tol:
            return val
        prev = val
    raise NumericError("direct Epstein sum did not stabilize",
                       achieved=abs(val - prev))


# ---------------------------------------------------------------------------
# Epstein zeta: Chowla-Selberg expansion

def _bessel_series(x: float, y: float, alpha: float, tol: float = 1e-16) -> float:
    """sum_r r^(alpha-1/2) sigma_(1-2 alpha)(r) K_(alpha-1/2)(2 pi r y) cos(2 pi r x)."""
    acc = 0.0
    for r in range(1, 400):
        kval = bessel_k(alpha - 0.5, 2.0 * math.pi * r * y)
        term = r ** (alpha - 0.5) * sigma_div(1.0 - 2.0 * alpha, r) * kval
        acc += term * math.cos(2.0 * math.pi * r * x)
        if abs(term) < tol:
            return acc
    raise NumericError("Chowla-Selberg Bessel series did not converge (y too small?)")


@lru_cache(maxsize=8192)
def _cs_q_term(x: float, y: float, alpha: float) -> float:
    return 8.0 * math.pi ** alpha * math.sqrt(y) / gamma_fn(alpha) \
        * _bessel_series(x, y, alpha)


def _cs_smooth_term(y: float, alpha: float) -> float:
    """2 zeta(2a) y^a + 2 sqrt(pi) Gamma(a-1/2)/Gamma(a) zeta(2a-1) y^(1-a)."""
    b = math.sqrt(math.pi) * gamma_fn(alpha - 0.5) / gamma_fn(alpha)
    return 2.0 * riemann_zeta(2.0 * alpha) * y ** alpha \
        + 2.0 * b * riemann_zeta(2.0 * alpha - 1.0) * y ** (1.0 - alpha)


def epstein_zeta_cs(lat: Lattice2D, alpha: float) -> float:
    """Z_tau(alpha) through the Chowla-Selberg expansion.

    Valid on alpha in (0, 1/2) U (1/2, 1) U (1, inf); alpha = 1 is the
    genuine pole of Z and alpha = 1/2 is a removable singularity of the
    expansion (both factors have simple poles that cancel only in lattice
    differences, see epstein_zeta_cs_diff).
    """
    if alpha <= 0.0:
        raise DomainError(f"epstein_zeta_cs requires alpha > 0, got {alpha}")
    if abs(alpha - 1.0) < 1e-9 or abs(alpha - 0.5) < 1e-9:
        raise DomainError(
            f"alpha={alpha} is excluded: pole at alpha=1, removable pair of "
            "poles at alpha=1/2; evaluate differences via epstein_zeta_cs_diff")
    return _cs_smooth_term(lat.y, alpha) + _cs_q_term(lat.x, lat.y, alpha)


def epstein_zeta_cs_diff(lat: Lattice2D, ref: Lattice2D, alpha: float) -> float:
    """Z_tau(alpha) - Z_ref(alpha), continued over alpha = 1/2 and alpha = 1.

    At those two values the singular parts of the Chowla-Selberg expansion
    cancel between the lattices and the finite limits are

        alpha=1/2: 2(sy ln y - sy' ln y') + 2(gamma_E - ln 4 pi)(sy - sy')
        alpha=1:   2 zeta(2)(y - y') - pi ln(y/y')

    with sy = sqrt(y), plus the Bessel tails, which stay regular.
    """
    if alpha <= 0.0:
        raise DomainError(f"alpha must be positive, got {alpha}")
    qdiff = _cs_q_term(lat.x, lat.y, alpha) - _cs_q_term(ref.x, ref.y, alpha)
    y1, y2 = lat.y, ref.y
    if abs(alpha - 0.5) < 1e-9:
        s1, s2 = math.sqrt(y1), math.sqrt(y2)
        smooth = 2.0 * (s1 * math.log(y1) - s2 * math.log(y2)) \
            + 2.0 * (EULER_GAMMA - math.log(4.0 * math.pi)) * (s1 - s2)
    elif abs(alpha - 1.0) < 1e-9:
        smooth = 2.0 * riemann_zeta(2.0) * (y1 - y2) - math.pi * math.log(y1 / y2)
    else:
        smooth = _cs_smooth_term(y1, alpha) - _cs_smooth_term(y2, alpha)
    return smooth + qdiff


def relative_lattice_W(lat: Lattice2D, spec: KernelSpec) -> float:
    """Renormalized lattice energy relative to the triangular lattice:

        c^2 / (2 pi)^(2 alpha) * (Z_tau(alpha) - Z_tri(alpha)),

    for d = 2 Riesz kernels with s in (0, 2) and for the 2D log kernel
    (alpha = 1, evaluated as the pole-cancelled limit).
    """
    if spec.d != 2 or spec.case not in ("riesz", "log2d"):
        raise DomainError("relative lattice energies require a d=2 riesz or log2d kernel")
    alpha = spec.alpha
    diff = epstein_zeta_cs_diff(lat, TRIANGULAR, alpha)
    return spec.c_ds ** 2 / (2.0 * math.pi) ** (2.0 * alpha) * diff


def scan_fundamental_domain(spec: KernelSpec, grid_resolution: int):
    """Grid scan of relative_lattice_W over the fundamental domain.

    Z_tau is even in x and 1-periodic, so the half domain x in [0, 1/2],
    y in [sqrt(1 - x^2), 3] carries all lattices; the triangular point
    (1/2, sqrt(3)/2) is the grid corner at x = 1/2.  Returns
    (argmin (x, y), min value, rows) with one (x, y, value) row per node.
    """
    if grid_resolution < 16:
        raise DomainError("grid resolution must be at least 16")
    res = int(grid_resolution)
    rows = []
    best = (math.inf, None)
    for x in np.linspace(0.0, 0.5, res):
        y_min = math.sqrt(1.0 - x * x)
        for y in np.linspace(y_min, 3.0, res):
            val = relative_lattice_W(Lattice2D(float(x), float(y)), spec)
            rows.append((float(x), float(y), val))
            if val < best[0]:
                best = (val, (float(x), float(y)))
    return best[1], best[0], rows


# ---------------------------------------------------------------------------
# accelerated trigonometric series

def _wynn_epsilon_best(partial, tol):
    """Best Shanks/Wynn-epsilon estimate from a run of partial sums."""
    e_prev = np.zeros(len(partial) + 1, dtype=complex)
    e_curr = np.asarray(partial, dtype=complex)
    best = e_curr[-1]
    best_err = abs(e_curr[-1] - e_curr[-2]) if len(e_curr) > 1 else math.inf
    for col in range(1, len(partial) - 1):
        with np.errstate(divide="ignore", invalid="ignore"):
            diff = e_curr[1:] - e_curr[:-1]
            e_next = e_prev[1:len(e_curr)] + 1.0 / diff
        e_prev, e_curr = e_curr, e_next
        if col % 2 == 0 and len(e_curr) >= 2:
            err = abs(e_curr[-1] - e_curr[-2])
            if math.isfinite(err) and err < best_err:
                best, best_err = e_curr[-1], err
            if best_err < tol:
                break
    return best, best_err


def polylog_on_circle(a: float, theta: float, tol: float = 1e-12) -> complex:
    """Li_a(e^(i theta)) for theta in (0, 2 pi), by epsilon-accelerated sums."""
    theta = theta % (2.0 * math.pi)
    if theta == 0.0:
        raise DomainError("polylog series is singular at theta = 0")
    for m in (96, 192, 384, 768):
        k = np.arange(1, m + 1)
        terms = np.exp(1j * theta * k) / k ** a
        partial = np.cumsum(terms)
        best, err = _wynn_epsilon_best(partial, tol)
        if err < tol:
            return complex(best)
    raise NumericError("accelerated cosine series did not converge "
                       f"(theta={theta:.3e}); use the integral path", achieved=err)


def _cos_series_integral(a: float, theta: float) -> float:
    """sum_k cos(k theta)/k^a as Gamma(a)^(-1) int_0^inf t^(a-1) ... dt.

    The substitution t = u^(1/a) removes the endpoint singularity; the
    inner rational factor is the closed form of sum_k e^(-kt) cos(k theta).
    """
    c = math.cos(theta)

    def f(t):
        if t > 700.0:
            return 0.0
        e = math.exp(-t)
        return e * (c - e) / (1.0 - 2.0 * e * c + e * e)

    inv_a = 1.0 / a
    g = lambda u: f(u ** inv_a) * inv_a
    layer = theta ** a          # integrand structure near t ~ theta
    pts = sorted({p for p in (layer, 10.0 * layer) if 0.0 < p < 1.0}) or None
    i1 = quad(g, 0.0, 1.0, epsabs=1e-13, limit=400, points=pts)[0]
    i2 = quad(g, 1.0, np.inf, epsabs=1e-13, limit=200)[0]
    return (i1 + i2) / gamma_fn(a)


# ---------------------------------------------------------------------------
# 1D torus Green function, pinned normalization

def _spec_for_alpha_1d(alpha: float) -> KernelSpec:
    if not 0.0 < alpha <= 0.5:
        raise DomainError(
            f"1D torus Green function requires alpha in (0, 1/2], got {alpha}")
    if alpha == 0.5:
        return make_kernel("log1d", 1)
    return make_kernel("riesz", 1, 1.0 - 2.0 * alpha)


def green_kappa(spec: KernelSpec) -> float:
    """Normalizing constant of the pinned Fourier coefficients.

    kappa = pi / (c Gamma(1 - 2 alpha) sin(pi alpha)); the log case is the
    s -> 0 limit with c = 2 pi, where kappa = 1/2.
    """
    if spec.is_log:
        return 0.5
    a = spec.alpha
    return math.pi / (spec.c_ds * gamma_fn(1.0 - 2.0 * a) * math.sin(math.pi * a))


def _green_prefactor(N: float, spec: KernelSpec) -> float:
    a = spec.alpha
    return 2.0 * green_kappa(spec) * N ** (2.0 * a - 1.0) \
        / (2.0 * math.pi) ** (2.0 * a)


def _check_green_x(N: float, x: float) -> float:
    u = x % N
    if min(u, N - u) < 1e-12 * N:
        raise DomainError(f"Green function is singular at lattice points (x={x})")
    return u


def green_1d(N: float, alpha: float, x: float, method: str = "series") -> float:
    """Torus Green function G on the length-N torus, zero mean.

    method 'series' evaluates the accelerated cosine series, 'integral'
    the equivalent Laplace-type integral; 'both' returns their average
    after checking agreement to 1e-6.  For the log case (alpha = 1/2) the
    series sums to the closed form -(1/2 pi) log(2 sin(pi x / N)).
    """
    spec = _spec_for_alpha_1d(alpha)
    u = _check_green_x(N, x)
    theta = 2.0 * math.pi * u / N
    pref = _green_prefactor(N, spec)
    a = 2.0 * alpha
    if method == "series":
        return pref * polylog_on_circle(a, theta).real
    if method == "integral":
        return pref * _cos_series_integral(a, theta)
    if method == "both":
        s_val = pref * polylog_on_circle(a, theta).real
        i_val = pref * _cos_series_integral(a, theta)
        if abs(s_val - i_val) > 1e-6:
            raise NumericError(
                f"Green function paths disagree: series={s_val!r} integral={i_val!r}",
                achieved=abs(s_val - i_val))
        return 0.5 * (s_val + i_val)
    raise DomainError(f"unknown method {method!r}")


def green_1d_log_closed(N: float, x: float) -> float:
    """Closed form of the log-case Green function."""
    u = _check_green_x(N, x)
    return -math.log(2.0 * math.sin(math.pi * u / N)) / (2.0 * math.pi)


def green_1d_deriv(N: float, alpha: float, x: float) -> float:
    """dG/dx; odd around every lattice point.

    Log case in closed form; the Riesz case differentiates the integral
    path by central differences (the derivative series has exponent
    2 alpha - 1 < 1 and accelerates poorly).
    """
    spec = _spec_for_alpha_1d(alpha)
    u = _check_green_x(N, x)
    theta = 2.0 * math.pi * u / N
    if spec.is_log:
        return -math.cos(theta / 2.0) / math.sin(theta / 2.0) / (2.0 * N)
    pref = _green_prefactor(N, spec)
    a = 2.0 * alpha
    h = 1e-5 * min(theta, 2.0 * math.pi - theta, 1.0)
    slope = (_cos_series_integral(a, theta + h)
             - _cos_series_integral(a, theta - h)) / (2.0 * h)
    return pref * (2.0 * math.pi / N) * slope


# ---------------------------------------------------------------------------
# renormalized self energy and N-point periodic energy

@lru_cache(maxsize=None)
def _self_energy_limit(N: float, alpha: float) -> float:
    """lim_{x -> 0} (G(x) - g(x)/c) by Richardson extrapolation on x = 2^-j.

    G - g/c has an even Taylor expansion at 0, so each Richardson level
    removes two orders.  Divergence of the raw values (log-linear growth
    in j) would mean the Fourier normalization is inconsistent with the
    kernel singularity; it is detected and reported.
    """
    spec = _spec_for_alpha_1d(alpha)
    pref = _green_prefactor(N, spec)
    a = 2.0 * alpha
    xs = [0.25 * 2.0 ** (-j) for j in range(14)]
    vals = []
    for x in xs:
        g_over_c = g_eval(spec, x) / spec.c_ds
        vals.append(pref * _cos_series_integral(a, 2.0 * math.pi * x / N) - g_over_c)
    diffs = [abs(vals[j + 1] - vals[j]) for j in range(len(vals) - 1)]
    grow = sum(1 for j in range(len(diffs) - 1)
               if diffs[j + 1] > diffs[j] * 1.05)
    if grow >= 3 and diffs[-1] > diffs[0]:
        raise NumericError(
            "self-energy extrapolation diverges: Green-function normalization "
            "does not match the kernel singularity", achieved=diffs[-1])
    table = [vals]
    best_val, best_gap = math.nan, math.inf
    for lvl in range(1, 9):
        fac = 4.0 ** lvl
        prev = table[-1]
        table.append([(fac * prev[j + 1] - prev[j]) / (fac - 1.0)
                      for j in range(len(prev) - 1)])
        gap = abs(table[-1][-1] - table[-2][-1])
        if gap < best_gap:
            best_val, best_gap = table[-1][-1], gap
    if best_gap < 1e-8:
        return best_val
    raise NumericError("self-energy Richardson extrapolation did not reach 1e-8",
                       achieved=best_gap)


def renormalized_self_energy_1d(N: float, alpha: float,
                                spec: Optional[KernelSpec] = None) -> float:
    """c^2 lim_{x->0} (G(x) - g(x)/c), the per-point self term of W."""
    probe = _spec_for_alpha_1d(alpha)
    if spec is not None and (spec.d != 1 or abs(spec.alpha - alpha) > 1e-12):
        raise DomainError("spec inconsistent with requested alpha")
    return probe.c_ds ** 2 * _self_energy_limit(float(N), float(alpha))


def xi_1d(alpha: float = 0.5) -> float:
    """Next-order constant candidate xi = W(Z)/c from the unit 1D lattice."""
    spec = _spec_for_alpha_1d(alpha)
    return renormalized_self_energy_1d(1.0, alpha) / spec.c_ds


# ---------------------------------------------------------------------------
# N-point torus configurations

@dataclass(frozen=True)
class TorusConfig:
    d: int
    length: float                      # period cell edge (1D: length = N)
    points: np.ndarray

    @staticmethod
    def unit_density(points) -> "TorusConfig":
        pts = np.asarray(points, dtype=float).reshape(-1)
        if pts.size < 1:
            raise DomainError("a torus configuration needs at least one point")
        return TorusConfig(d=1, length=float(pts.size), points=pts % float(pts.size))

    @property
    def n(self) -> int:
        return self.points.shape[0]

    def min_spacing(self) -> float:
        if self.n < 2:
            return self.length
        u = np.sort(self.points % self.length)
        gaps = np.diff(np.concatenate([u, [u[0] + self.length]]))
        return float(gaps.min())


@dataclass(frozen=True)
class LatticeEnergyReport:
    W_value: float
    pair_term: float
    self_term: float
    eta: Optional[float] = None
    xi: Optional[float] = None

    def as_dict(self) -> dict:
        return {"W_value": self.W_value, "pair_term": self.pair_term,
                "self_term": self.self_term, "eta": self.eta, "xi": self.xi}


def _torus_pair_green(config: TorusConfig, spec: KernelSpec) -> float:
    """sum_{i != j} G(a_i - a_j) on the length-N torus."""
    N = config.length
    alpha = spec.alpha
    pts = config.points
    acc = 0.0
    for i in range(config.n):
        for j in range(i + 1, config.n):
            u = abs(pts[i] - pts[j])
            if spec.is_log:
                acc += green_1d_log_closed(N, u)
            else:
                acc += green_1d(N, alpha, u, method="integral")
    return 2.0 * acc


def periodic_W(config: TorusConfig, spec: KernelSpec) -> LatticeEnergyReport:
    """Renormalized energy of the periodic N-point configuration (d = 1).

    Coincident points carry infinite energy.  d = 2 configurations are out
    of scope here: Bravais lattices are served by relative_lattice_W.
    """
    if config.d != 1:
        raise DomainError("periodic_W covers d = 1; use relative_lattice_W for "
                          "2D Bravais lattices")
    if spec.d != 1:
        raise DomainError("kernel must be one-dimensional")
    if abs(config.length - config.n) > 1e-9:
        raise DomainError("torus volume must equal the point count (unit density)")
    self_term = renormalized_self_energy_1d(config.length, spec.alpha)
    if config.n >= 2 and config.min_spacing() < 1e-12:
        return LatticeEnergyReport(W_value=math.inf, pair_term=math.inf,
                                   self_term=self_term)
    pair = spec.c_ds ** 2 / config.length * _torus_pair_green(config, spec) \
        if config.n >= 2 else 0.0
    w = pair + self_term
    return LatticeEnergyReport(W_value=w, pair_term=pair, self_term=self_term,
                               xi=w / spec.c_ds)


# ---------------------------------------------------------------------------
# truncated periodic energy

def _extended_green_log(N: float, x: float, y: float) -> float:
    """Extended (harmonic in the cylinder) log-case Green function.

    Closed form -(1/4 pi) log(1 - 2 q cos(2 pi x/N) + q^2), q = e^(-2 pi |y|/N).
    """
    q = math.exp(-2.0 * math.pi * abs(y) / N)
    theta = 2.0 * math.pi * x / N
    val = 1.0 - 2.0 * q * math.cos(theta) + q * q
    if val <= 0.0:
        raise DomainError("extended Green function evaluated at its singularity")
    return -math.log(val) / (4.0 * math.pi)


def _extended_green_riesz(N: float, alpha: float, x: float, y: float,
                          max_terms: int = 4096) -> float:
    """Extended Riesz-case Green function via the Bessel-profile series.

    The weighted harmonic extension of each Fourier mode is
    psi(t) = 2^(1-alpha) t^alpha K_alpha(t) / Gamma(alpha), psi(0) = 1.
    """
    spec = _spec_for_alpha_1d(alpha)
    pref = _green_prefactor(N, spec)
    theta = 2.0 * math.pi * x / N
    rate = 2.0 * math.pi * abs(y) / N
    norm = 2.0 ** (1.0 - alpha) / gamma_fn(alpha)
    partial = []
    acc = 0.0
    for k in range(1, max_terms + 1):
        t = rate * k
        psi = norm * t ** alpha * bessel_k(alpha, t) if t > 0.0 else 1.0
        acc += math.cos(k * theta) * psi / k ** (2.0 * alpha)
        partial.append(acc)
        if t > 40.0 and k > 8:
            return pref * acc
        if k % 64 == 0 and k >= 192:
            best, err = _wynn_epsilon_best(np.array(partial[-64:]), 1e-11)
            if err < 1e-11:
                return pref * float(best.real)
    best, err = _wynn_epsilon_best(np.array(partial[-128:]), 1e-9)
    if err < 1e-9:
        return pref * float(best.real)
    raise NumericError("extended Green series did not converge", achieved=err)


def _extended_green(N: float, spec: KernelSpec, x: float, y: float) -> float:
    if spec.is_log:
        return _extended_green_log(N, x, y)
    return _extended_green_riesz(N, spec.alpha, x, y)


def _smearing_angles(spec: KernelSpec, m_points: int = 64):
    """Midpoint angles and |sin|^gamma weights of the smearing measure."""
    phis = (np.arange(m_points) + 0.5) * (2.0 * math.pi / m_points)
    w = np.abs(np.sin(phis)) ** spec.gamma
    return phis, w / w.sum()


def _smeared_green(config_len: float, spec: KernelSpec, x0: float, eta: float,
                   phis, weights) -> float:
    acc = 0.0
    for phi, w in zip(phis, weights):
        acc += w * _extended_green(config_len, spec, x0 + eta * math.cos(phi),
                                   eta * math.sin(phi))
    return acc


def truncated_periodic_energy(config: TorusConfig, spec: KernelSpec,
                              eta: float, m_points: int = 64) -> float:
    """Truncation-regularized periodic energy W_eta.

    Exact finite-eta version of periodic_W obtained by smearing every
    point charge over the sphere of radius eta in the extended space:

        W_eta = (c^2/N) sum_{i != j} <G(a_i - a_j + eta sigma)>
              + c^2 <G(eta sigma)> - c g(eta) + c int_cell f_eta,

    where <.> is the weighted average over the smearing sphere.  Requires
    eta below half the minimal spacing so the smeared charges stay
    disjoint; converges to periodic_W as eta -> 0.
    """
    if config.d != 1 or spec.d != 1:
        raise DomainError("truncated periodic energy covers d = 1")
    half_min = 0.5 * config.min_spacing()
    if not 0.0 < eta < min(half_min, 1.0):
        raise DomainError(
            f"eta must lie in (0, min(1, half min spacing)) = "
            f"(0, {min(half_min, 1.0):.6g}), got {eta}")
    N = config.length
    phis, weights = _smearing_angles(spec, m_points)
    pts = config.points
    pair = 0.0
    for i in range(config.n):
        for j in range(config.n):
            if i == j:
                continue
            pair += _smeared_green(N, spec, float(pts[i] - pts[j]), eta,
                                   phis, weights)
    pair *= spec.c_ds ** 2 / N
    self_avg = _smeared_green(N, spec, 0.0, eta, phis, weights)
    self_term = spec.c_ds ** 2 * self_avg - spec.c_ds * g_eval(spec, eta)
    if spec.is_log:
        background = spec.c_ds * 2.0 * eta
    else:
        s = spec.s
        background = spec.c_ds * 2.0 * eta ** (1.0 - s) * s / (1.0 - s)
    return pair + self_term + background


# ---------------------------------------------------------------------------
# scaling laws

def scale_W(value: float, m: float, spec: KernelSpec,
            eta: Optional[float] = None) -> float:
    """Rescale a unit-density energy to background density m.

    Riesz: W -> m^(1+s/d) W.  Log: W -> m (W - (2 pi / d) log m).  The
    optional eta is accepted for symmetry with W_eta values; the scaling
    factor does not depend on it.
    """
    if m <= 0.0:
        raise DomainError(f"density must be positive, got m={m}")
    if spec.is_log:
        return m * (value - 2.0 * math.pi / spec.d * math.log(m))
    return m ** (1.0 + spec.s / spec.d) * value


def unscale_W(value: float, m: float, spec: KernelSpec,
              eta: Optional[float] = None) -> float:
    """Inverse of scale_W."""
    if m <= 0.0:
        raise DomainError(f"density must be positive, got m={m}")
    if spec.is_log:
        return value / m + 2.0 * math.pi / spec.d * math.log(m)
    return value / m ** (1.0 + spec.s / spec.d)
