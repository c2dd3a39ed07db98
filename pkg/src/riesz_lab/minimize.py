"""Local minimization of the n-point energy and of the periodic torus energy.

Plain gradient descent with Armijo backtracking: the energy carries +inf
barriers at point collisions, so the line search simply rejects infeasible
steps.  Multistart draws i.i.d. initial configurations from the
equilibrium measure; with a fixed seed every result is reproducible.
"""

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from . import _backend
from .equilibrium import EquilibriumModel, quantile_table, zeta as eq_zeta
from .errors import DomainError, NumericError
from .hamiltonian import Configuration, hamiltonian
from .kernels import KernelSpec
from .lattice import TorusConfig, green_1d_deriv, periodic_W


@dataclass(frozen=True)
class MinimizeOptions:
    max_iterations: int = 5000
    gradient_tolerance: float = 1e-8    # stop at gradient max-norm <= tol * n
    armijo_c: float = 1e-4
    backtrack_factor: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.max_iterations <= 0 or self.gradient_tolerance <= 0:
            raise DomainError("iteration and tolerance options must be positive")
        if not 0.0 < self.armijo_c < 1.0 or not 0.0 < self.backtrack_factor < 1.0:
            raise DomainError("armijo_c and backtrack_factor must lie in (0, 1)")


@dataclass(frozen=True)
class SeparationReport:
    min_spacing: float
    scaled_spacing: float
    max_zeta: float
    all_in_support: bool

    def as_dict(self) -> dict:
        return {"min_spacing": self.min_spacing, "scaled_spacing": self.scaled_spacing,
                "max_zeta": self.max_zeta, "all_in_support": self.all_in_support}


@dataclass(frozen=True)
class MinimizeResult:
    config: Configuration
    value: float
    iterations: int
    converged: bool


def _energy(model, pts):
    return _backend.total_energy(pts, model.spec.s, model.spec.is_log, model.v_coeff)


def _grad(model, pts):
    return _backend.total_gradient(pts, model.spec.s, model.spec.is_log, model.v_coeff)


def minimize_local(model: EquilibriumModel, init: Configuration,
                   opts: MinimizeOptions = MinimizeOptions()) -> MinimizeResult:
    """Armijo gradient descent from init; energy never increases."""
    pts = init.points.copy()
    n = init.n
    energy = _energy(model, pts)
    if not math.isfinite(energy):
        raise DomainError("initial configuration has coincident points")
    step = 1.0 / max(n, 1)
    tol = opts.gradient_tolerance * n
    iterations = 0
    converged = False
    for iterations in range(1, opts.max_iterations + 1):
        grad = _grad(model, pts)
        gmax = float(np.max(np.abs(grad)))
        if gmax <= tol:
            converged = True
            break
        g2 = float(np.sum(grad * grad))
        accepted = False
        t = step
        while t > 1e-18:
            trial = pts - t * grad
            e_trial = _energy(model, trial)
            if math.isfinite(e_trial) and e_trial <= energy - opts.armijo_c * t * g2:
                pts, energy = trial, e_trial
                step = t * 2.0          # optimistic growth for the next step
                accepted = True
                break
            t *= opts.backtrack_factor
        if not accepted:
            # line-search underflow: report the last iterate
            break
    return MinimizeResult(Configuration(d=init.d, points=pts), energy,
                          iterations, converged)


def sample_initial(model: EquilibriumModel, n: int, seed: int) -> Configuration:
    """n i.i.d. draws from the equilibrium measure.

    1D by inverse CDF on a 4096-entry table; 2D by rejection from the
    bounding box of the support.
    """
    if n < 1:
        raise DomainError("need at least one point")
    rng = np.random.default_rng(seed)
    if model.spec.d == 1:
        table = _cached_quantiles(model.name)
        u = rng.random(n)
        idx = u * (table.size - 1)
        lo = np.floor(idx).astype(int)
        frac = idx - lo
        hi = np.minimum(lo + 1, table.size - 1)
        pts = table[lo] * (1.0 - frac) + table[hi] * frac
        return Configuration(d=1, points=pts.reshape(-1, 1))
    a = model.support_radius
    out = np.empty((n, 2))
    filled = 0
    while filled < n:
        cand = rng.uniform(-a, a, size=(2 * (n - filled) + 8, 2))
        keep = cand[np.linalg.norm(cand, axis=1) <= a]
        take = min(len(keep), n - filled)
        out[filled:filled + take] = keep[:take]
        filled += take
    return Configuration(d=2, points=out)


_QUANTILES = {}


def _cached_quantiles(name: str) -> np.ndarray:
    if name not in _QUANTILES:
        from .equilibrium import model_by_name
        _QUANTILES[name] = quantile_table(model_by_name(name))
    return _QUANTILES[name]


def multistart(model: EquilibriumModel, n: int, trials: int,
               opts: MinimizeOptions = MinimizeOptions(),
               threads: int = 1) -> MinimizeResult:
    """Best of `trials` local minimizations from seeded initial draws.

    Ties break toward the lowest trial index, so the result is a
    deterministic function of (n, trials, opts.seed) at any thread count.
    """
    if trials < 1:
        raise DomainError("need at least one trial")
    seeds = np.random.SeedSequence(opts.seed).generate_state(trials)

    def one(trial: int) -> MinimizeResult:
        init = sample_initial(model, n, int(seeds[trial]))
        return minimize_local(model, init, opts)

    if threads > 1:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, range(trials)))
    else:
        results = [one(trial) for trial in range(trials)]
    best = results[0]
    for res in results[1:]:
        if res.value < best.value:
            best = res
    return best


def separation_report(model: EquilibriumModel, config: Configuration,
                      support_tol: float = 1e-6) -> SeparationReport:
    """Minimal spacing (scaled by the typical distance (n m_bar)^(-1/d)),
    worst confinement value, and support membership."""
    pts = config.points
    n = config.n
    if n >= 2:
        diff = pts[:, None, :] - pts[None, :, :]
        dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
        iu = np.triu_indices(n, k=1)
        min_spacing = float(dist[iu].min())
    else:
        min_spacing = math.inf
    scaled = min_spacing * (n * model.m_bar) ** (1.0 / model.spec.d)
    zetas = [eq_zeta(model, x) for x in pts]
    all_in = all(model.in_support(x, tol=support_tol) for x in pts)
    return SeparationReport(min_spacing=min_spacing, scaled_spacing=scaled,
                            max_zeta=max(zetas) if zetas else 0.0,
                            all_in_support=all_in)


# ---------------------------------------------------------------------------
# periodic minimization on the 1D torus

def _periodic_energy_and_grad(points: np.ndarray, spec: KernelSpec,
                              length: float) -> Tuple[float, np.ndarray]:
    cfg = TorusConfig(d=1, length=length, points=points % length)
    report = periodic_W(cfg, spec)
    if not math.isfinite(report.W_value):
        return math.inf, np.zeros_like(points)
    n = points.size
    grad = np.zeros(n)
    pref = spec.c_ds ** 2 / length
    for i in range(n):
        acc = 0.0
        for j in range(n):
            if i == j:
                continue
            u = (points[i] - points[j]) % length
            acc += green_1d_deriv(length, spec.alpha, u)
        grad[i] = 2.0 * pref * acc
    return report.W_value, grad


def minimize_periodic(spec: KernelSpec, N: int, torus_length: float,
                      opts: MinimizeOptions = MinimizeOptions()) -> TorusConfig:
    """Gradient descent on the periodic energy over point positions mod N.

    Collisions have infinite energy and are rejected by the line search.
    """
    if spec.d != 1:
        raise DomainError("periodic minimization covers d = 1")
    if N < 2:
        raise DomainError("need at least two points")
    if abs(torus_length - N) > 1e-9:
        raise DomainError("torus length must equal N (unit density)")
    rng = np.random.default_rng(opts.seed)
    pts = np.sort(rng.uniform(0.0, torus_length, size=N))
    # nudge apart any near-coincident initial draws
    for _ in range(16):
        gaps = np.diff(np.concatenate([pts, [pts[0] + torus_length]]))
        if gaps.min() > 1e-3:
            break
        pts = np.sort(rng.uniform(0.0, torus_length, size=N))
    energy, grad = _periodic_energy_and_grad(pts, spec, torus_length)
    step = 0.5
    for _ in range(opts.max_iterations):
        gmax = float(np.max(np.abs(grad)))
        if gmax <= opts.gradient_tolerance * N:
            break
        g2 = float(np.sum(grad * grad))
        t = step
        accepted = False
        while t > 1e-18:
            trial = (pts - t * grad) % torus_length
            e_trial, g_trial = _periodic_energy_and_grad(trial, spec, torus_length)
            if math.isfinite(e_trial) and e_trial <= energy - opts.armijo_c * t * g2:
                pts, energy, grad = trial, e_trial, g_trial
                step = t * 2.0
                accepted = True
                break
            t *= opts.backtrack_factor
        if not accepted:
            break
    return TorusConfig(d=1, length=torus_length, points=np.sort(pts % torus_length))


# ---------------------------------------------------------------------------
# asymptotic-expansion fit

def fit_expansion(model: EquilibriumModel,
                  data: Sequence[Tuple[int, float]]):
    """Least-squares fit of minimal energies against the expansion basis.

    Riesz kernels fit value ~ E n^2 + C n^(1+s/d).  Log kernels fit
    value ~ E n^2 - (1/d) n log n + C n with the n log n coefficient
    frozen at -1/d (it is forced by the splitting identity and is nearly
    collinear with n at accessible n).  Returns (E_hat, next_order_hat,
    residuals).
    """
    data = list(data)
    if len(data) < 3:
        raise DomainError("need at least 3 data points")
    ns = np.array([float(n) for n, _ in data])
    if len(set(ns.tolist())) != len(data):
        raise DomainError("n values must be distinct")
    ys = np.array([float(v) for _, v in data])
    spec = model.spec
    if spec.is_log:
        target = ys + ns * np.log(ns) / spec.d
        basis = np.column_stack([ns ** 2, ns])
    else:
        target = ys
        basis = np.column_stack([ns ** 2, ns ** (1.0 + spec.s / spec.d)])
    coef, _, rank, _ = np.linalg.lstsq(basis, target, rcond=None)
    if rank < 2:
        raise NumericError("expansion fit is rank deficient")
    residuals = target - basis @ coef
    return float(coef[0]), float(coef[1]), residuals


def scaled_next_order_sequence(model: EquilibriumModel,
                               data: Sequence[Tuple[int, float]]) -> List[float]:
    """Scaled next-order values (value - n^2 E + (n/d) log n) / n^(1+s/d)."""
    out = []
    for n, v in data:
        n = float(n)
        if model.spec.is_log:
            out.append((v - n * n * model.energy_E + n / model.spec.d * math.log(n)) / n)
        else:
            out.append((v - n * n * model.energy_E)
                       / n ** (1.0 + model.spec.s / model.spec.d))
    return out
