"""The n-point energy, its gradient, and the exact splitting decomposition.

H_n(x_1..x_n) = sum_{i != j} g(x_i - x_j) + n sum_i V(x_i), with the pair
sum over ordered pairs.  The splitting identity rewrites H_n as

    n^2 E(mu_V) + 2n sum_i zeta(x_i) + (next-order term),

and the next-order term has a second, independent expression through the
equilibrium potential h = g * mu_V:

    sum_{i != j} g(x_i - x_j) - 2n sum_i h(x_i) + n^2 (E - int V dmu).

Both routes are computed and their gap reported; the identity is algebraic,
so the gap measures only floating-point consistency.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import _backend
from .equilibrium import EquilibriumModel, potential as eq_potential, zeta as eq_zeta
from .errors import DomainError


@dataclass(frozen=True)
class Configuration:
    d: int
    points: np.ndarray                  # shape (n, d)

    @staticmethod
    def from_points(points, d: int = None) -> "Configuration":
        """Build a configuration; 1D input arrays are read as n points in R^1."""
        pts = np.asarray(points, dtype=float)
        if pts.size == 0:
            return Configuration(d=d or 1, points=np.zeros((0, d or 1)))
        if pts.ndim == 1:
            pts = pts.reshape(-1, 1)
        if pts.ndim != 2:
            raise DomainError("points must form an (n, d) array")
        if d is not None and pts.shape[1] != d:
            raise DomainError(f"expected dimension {d}, got {pts.shape[1]}")
        if not np.all(np.isfinite(pts)):
            raise DomainError("all coordinates must be finite")
        return Configuration(d=pts.shape[1], points=np.ascontiguousarray(pts))

    @property
    def n(self) -> int:
        return self.points.shape[0]


@dataclass(frozen=True)
class SplitReport:
    H: float
    mean_field: float
    zeta_term: float
    log_correction: float
    next_order_direct: float
    next_order_potential_route: float
    route_gap: float

    def as_dict(self) -> dict:
        return {
            "H": self.H,
            "mean_field": self.mean_field,
            "zeta_term": self.zeta_term,
            "log_correction": self.log_correction,
            "next_order_direct": self.next_order_direct,
            "next_order_potential_route": self.next_order_potential_route,
            "route_gap": self.route_gap,
        }


def _check_config(model: EquilibriumModel, config: Configuration) -> None:
    if config.d != model.spec.d:
        raise DomainError(
            f"model dimension {model.spec.d} != configuration dimension {config.d}")


def pair_sum(model: EquilibriumModel, config: Configuration) -> float:
    """sum_{i != j} g(x_i - x_j); +inf when two points coincide."""
    return _backend.pair_energy(config.points, model.spec.s, model.spec.is_log)


def hamiltonian(model: EquilibriumModel, config: Configuration) -> float:
    _check_config(model, config)
    return _backend.total_energy(config.points, model.spec.s, model.spec.is_log,
                                 model.v_coeff)


def gradient(model: EquilibriumModel, config: Configuration) -> np.ndarray:
    _check_config(model, config)
    try:
        return _backend.total_gradient(config.points, model.spec.s,
                                       model.spec.is_log, model.v_coeff)
    except FloatingPointError:
        raise DomainError("gradient undefined at coincident points")


def split(model: EquilibriumModel, config: Configuration) -> SplitReport:
    """Exact splitting of H_n with the two next-order routes and their gap."""
    _check_config(model, config)
    n = config.n
    spec = model.spec
    h_val = hamiltonian(model, config)
    mean_field = n * n * model.energy_E
    zeta_sum = sum(eq_zeta(model, x) for x in config.points)
    zeta_term = 2.0 * n * zeta_sum
    log_correction = (n / spec.d) * math.log(n) if spec.is_log else 0.0

    direct = h_val - mean_field - zeta_term
    pairs = pair_sum(model, config)
    h_pot_sum = sum(eq_potential(model, x) for x in config.points)
    pot_route = pairs - 2.0 * n * h_pot_sum \
        + n * n * (model.energy_E - model.int_v_dmu)
    return SplitReport(
        H=h_val,
        mean_field=mean_field,
        zeta_term=zeta_term,
        log_correction=log_correction,
        next_order_direct=direct,
        next_order_potential_route=pot_route,
        route_gap=direct - pot_route,
    )


def next_order_scaled(model: EquilibriumModel, config: Configuration) -> float:
    """Scaled next-order energy: (H - n^2 E)/n^(1+s/d), with the extra
    (n/d) log n shift inside the parenthesis in the log cases."""
    _check_config(model, config)
    n = config.n
    spec = model.spec
    h_val = hamiltonian(model, config)
    if spec.is_log:
        return (h_val - n * n * model.energy_E + (n / spec.d) * math.log(n)) / n
    return (h_val - n * n * model.energy_E) / n ** (1.0 + spec.s / spec.d)


def ball_volume(d: int, radius: float) -> float:
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0) * radius ** d


def discrepancy(config: Configuration, a, L: float, m: float) -> float:
    """Point count in the open ball B_L(a) minus the background mass m |B_L|."""
    if L <= 0.0:
        raise DomainError(f"discrepancy radius must be positive, got L={L}")
    if m < 0.0:
        raise DomainError(f"background density must be nonnegative, got m={m}")
    a_arr = np.atleast_1d(np.asarray(a, dtype=float))
    if config.n:
        dist = np.linalg.norm(config.points - a_arr[None, :], axis=1)
        count = int(np.sum(dist < L))
    else:
        count = 0
    return count - m * ball_volume(config.d, L)
