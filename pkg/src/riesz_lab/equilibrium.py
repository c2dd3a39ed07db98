"""Confining potentials with closed-form equilibrium measures.

Two models ship: the semicircle law (d = 1, kernel -log|x|, V = x^2/2,
density sqrt(4 - x^2)/(2 pi) on [-2, 2]) and the circular law (d = 2,
kernel -log|x|, V = |x|^2, density 1/pi on the unit disk).  Each model
exposes the equilibrium potential h(x) = int g(x - y) dmu(y), the Robin
constant c with h + V/2 = c on the support, the effective confinement
zeta = h + V/2 - c >= 0, and the mean-field energy
E = int int g dmu dmu + int V dmu.

On the support, h is returned in the exact Frostman form c - V/2; off the
support it is computed by adaptive quadrature.  frostman_residual avoids
the short-circuit entirely and checks the defining conditions by
quadrature alone.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import quad

from .errors import DomainError, NumericError
from .kernels import KernelSpec, make_kernel

_QUAD_TOL = 1e-10


@dataclass(frozen=True)
class EquilibriumModel:
    name: str
    spec: KernelSpec
    v_coeff: float                      # V(x) = v_coeff * |x|^2
    support_radius: float               # Sigma = interval/ball of this radius
    robin_c: float
    energy_E: float
    m_bar: float
    density: Callable[[float], float] = field(repr=False)   # radial profile
    int_v_dmu: float = 0.0

    def potential_V(self, x) -> float:
        x = np.asarray(x, dtype=float)
        return self.v_coeff * float(np.dot(x, x))

    def grad_V(self, x) -> np.ndarray:
        return 2.0 * self.v_coeff * np.asarray(x, dtype=float)

    def in_support(self, x, tol: float = 0.0) -> bool:
        r = float(np.linalg.norm(np.atleast_1d(np.asarray(x, dtype=float))))
        return r <= self.support_radius + tol


def semicircle_model() -> EquilibriumModel:
    """1D log gas with V = x^2/2; equilibrium measure is the semicircle law."""
    spec = make_kernel("log1d", 1)
    # c = E - int (V/2) dmu with E = 3/4 and int x^2 dmu = 1
    return EquilibriumModel(
        name="semicircle",
        spec=spec,
        v_coeff=0.5,
        support_radius=2.0,
        robin_c=0.5,
        energy_E=0.75,
        m_bar=1.0 / math.pi,
        density=lambda x: math.sqrt(max(4.0 - x * x, 0.0)) / (2.0 * math.pi),
        int_v_dmu=0.5,
    )


def circular_law_model() -> EquilibriumModel:
    """2D log gas with V = |x|^2; equilibrium measure is uniform on the disk."""
    spec = make_kernel("log2d", 2)
    return EquilibriumModel(
        name="circular-law",
        spec=spec,
        v_coeff=1.0,
        support_radius=1.0,
        robin_c=0.5,
        energy_E=0.75,
        m_bar=1.0 / math.pi,
        density=lambda r: (1.0 / math.pi) if abs(r) <= 1.0 else 0.0,
        int_v_dmu=0.5,
    )


MODELS = {"semicircle": semicircle_model, "circular-law": circular_law_model}


def model_by_name(name: str) -> EquilibriumModel:
    try:
        return MODELS[name]()
    except KeyError:
        raise DomainError(f"unknown model {name!r}, expected one of {sorted(MODELS)}")


def _h_quadrature_1d(model: EquilibriumModel, x: float) -> float:
    """h(x) = -int log|x - y| dmu(y) on [-2, 2] by adaptive quadrature.

    The integrand is split at x when x falls inside the support so the
    logarithmic singularity sits at an interval endpoint.
    """
    a = model.support_radius

    def f(y: float) -> float:
        return -math.log(abs(x - y)) * model.density(y)

    pieces = []
    if -a < x < a:
        pieces = [(-a, x), (x, a)]
    else:
        pieces = [(-a, a)]
    total = 0.0
    for lo, hi in pieces:
        val, err = quad(f, lo, hi, epsabs=_QUAD_TOL, epsrel=0.0, limit=200)
        if err > 100.0 * _QUAD_TOL:
            raise NumericError(
                f"potential quadrature did not reach tolerance (err={err:.2e})",
                achieved=err)
        total += val
    return total


def _h_quadrature_2d(model: EquilibriumModel, x) -> float:
    """Disk potential by nested radial/angular quadrature (unit-mass disk)."""
    r0 = float(np.linalg.norm(np.asarray(x, dtype=float)))

    def ring(rho: float) -> float:
        if rho == 0.0:
            return -math.log(r0) * rho if r0 > 0 else 0.0

        def f(theta: float) -> float:
            d2 = r0 * r0 + rho * rho - 2.0 * r0 * rho * math.cos(theta)
            return -0.5 * math.log(d2)

        val, _ = quad(f, 0.0, 2.0 * math.pi, epsabs=1e-11, epsrel=0.0, limit=200)
        return val * rho / math.pi

    val, err = quad(ring, 0.0, 1.0, epsabs=_QUAD_TOL, epsrel=0.0, limit=200,
                    points=[min(r0, 1.0)] if r0 < 1.0 else None)
    if err > 100.0 * _QUAD_TOL:
        raise NumericError(
            f"potential quadrature did not reach tolerance (err={err:.2e})",
            achieved=err)
    return val


def potential(model: EquilibriumModel, x, exact_on_support: bool = True) -> float:
    """Equilibrium potential h(x).

    Inside the support the Frostman identity h = c - V/2 is exact and used
    directly; outside, the defining integral is evaluated by quadrature.
    The d = 2 model uses the radial closed form -log|x| off the disk
    (Newtonian potential of the uniform unit-mass disk).
    """
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if not np.all(np.isfinite(x_arr)):
        raise DomainError("potential requires a finite point")
    if exact_on_support and model.in_support(x_arr):
        return model.robin_c - 0.5 * model.potential_V(x_arr)
    if model.spec.d == 1:
        return _h_quadrature_1d(model, float(x_arr[0]))
    r = float(np.linalg.norm(x_arr))
    return -math.log(r)


def zeta(model: EquilibriumModel, x) -> float:
    """Effective confinement zeta = h + V/2 - c; identically 0 on the support."""
    x_arr = np.atleast_1d(np.asarray(x, dtype=float))
    if model.in_support(x_arr):
        return 0.0
    return potential(model, x_arr) + 0.5 * model.potential_V(x_arr) - model.robin_c


def frostman_residual(model: EquilibriumModel, grid) -> float:
    """Worst-case violation of the Frostman conditions over a grid of points.

    Uses quadrature for h everywhere (no Frostman short-circuit): on the
    support the residual is |h + V/2 - c|, off it max(0, c - h - V/2).
    """
    grid = list(grid)
    if not grid:
        raise DomainError("frostman_residual requires a nonempty grid")
    worst = 0.0
    for x in grid:
        x_arr = np.atleast_1d(np.asarray(x, dtype=float))
        if model.spec.d == 1:
            h = _h_quadrature_1d(model, float(x_arr[0]))
        else:
            h = _h_quadrature_2d(model, x_arr)
        res = h + 0.5 * model.potential_V(x_arr) - model.robin_c
        if model.in_support(x_arr):
            worst = max(worst, abs(res))
        else:
            worst = max(worst, max(0.0, -res))
    return worst


def mass(model: EquilibriumModel) -> float:
    """Total mass of the equilibrium density (should be 1)."""
    if model.spec.d == 1:
        val, _ = quad(model.density, -model.support_radius, model.support_radius,
                      epsabs=1e-12)
        return val
    val, _ = quad(lambda r: model.density(r) * 2.0 * math.pi * r,
                  0.0, model.support_radius, epsabs=1e-12)
    return val


def predicted_next_order_constant(model: EquilibriumModel, xi: float) -> float:
    """Predicted coefficient of the next-to-leading term of min H_n.

    Riesz kernels: xi * int mu^(1+s/d).  Log kernels:
    xi - (1/d) int mu log mu.  Integrals by quadrature at 1e-8.
    """
    spec = model.spec
    a = model.support_radius
    if spec.is_log:
        if spec.d == 1:
            def f(x):
                m = model.density(x)
                return m * math.log(m) if m > 0.0 else 0.0
            val, _ = quad(f, -a, a, epsabs=1e-9, limit=200)
        else:
            def f(r):
                m = model.density(r)
                return (m * math.log(m) if m > 0.0 else 0.0) * 2.0 * math.pi * r
            val, _ = quad(f, 0.0, a, epsabs=1e-9, limit=200)
        return xi - val / spec.d
    p = 1.0 + spec.s / spec.d
    if spec.d == 1:
        val, _ = quad(lambda x: model.density(x) ** p, -a, a, epsabs=1e-9, limit=200)
    else:
        val, _ = quad(lambda r: model.density(r) ** p * 2.0 * math.pi * r,
                      0.0, a, epsabs=1e-9, limit=200)
    return xi * val


def quantile_table(model: EquilibriumModel, size: int = 4096) -> np.ndarray:
    """Inverse-CDF table of the 1D density on a uniform probability grid.

    Entry j approximates F^(-1)((j + 1/2) / size); used for sampling and
    for the sorted 1-Wasserstein distance.
    """
    if model.spec.d != 1:
        raise DomainError("quantile_table is defined for 1D models only")
    a = model.support_radius
    xs = np.linspace(-a, a, 8 * size + 1)
    dens = np.array([model.density(x) for x in xs])
    cdf = np.concatenate([[0.0], np.cumsum((dens[1:] + dens[:-1]) * 0.5 * np.diff(xs))])
    cdf /= cdf[-1]
    probs = (np.arange(size) + 0.5) / size
    return np.interp(probs, cdf, xs)
