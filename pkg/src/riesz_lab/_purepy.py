"""NumPy implementations of the hot kernels.

Fallback lane used when the compiled extension is unavailable (or forced
via RIESZ_LAB_PURE=1).  Signatures and semantics match riesz_lab._core;
the Metropolis block walks the same pre-drawn random streams, so both
lanes make the same accept decisions (per-step energies agree up to
floating-point summation order).
"""

import math

import numpy as np


def pair_energy(pts: np.ndarray, s: float, is_log: bool) -> float:
    """Sum of g(x_i - x_j) over ordered pairs i != j; +inf on coincidence."""
    n = pts.shape[0]
    if n < 2:
        return 0.0
    diff = pts[:, None, :] - pts[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", diff, diff)
    iu = np.triu_indices(n, k=1)
    r2u = r2[iu]
    if np.any(r2u == 0.0):
        return math.inf
    with np.errstate(divide="ignore"):
        if is_log:
            vals = -0.5 * np.log(r2u)
        else:
            vals = r2u ** (-0.5 * s)
    return 2.0 * float(vals.sum())


def pair_gradient(pts: np.ndarray, s: float, is_log: bool) -> np.ndarray:
    """Gradient of the ordered-pair sum: rows 2 sum_{j!=i} g'(r) (x_i-x_j)/r."""
    n = pts.shape[0]
    grad = np.zeros_like(pts)
    if n < 2:
        return grad
    diff = pts[:, None, :] - pts[None, :, :]
    r2 = np.einsum("ijk,ijk->ij", diff, diff)
    np.fill_diagonal(r2, 1.0)
    if np.any(r2[~np.eye(n, dtype=bool)] == 0.0):
        raise FloatingPointError("coincident points in gradient evaluation")
    if is_log:
        w = -1.0 / r2                      # g'(r)/r = -1/r^2
    else:
        w = -s * r2 ** (-0.5 * s - 1.0)    # g'(r)/r = -s r^(-s-2)
    np.fill_diagonal(w, 0.0)
    return 2.0 * np.einsum("ij,ijk->ik", w, diff)


def total_energy(pts: np.ndarray, s: float, is_log: bool, v_coeff: float) -> float:
    n = pts.shape[0]
    return pair_energy(pts, s, is_log) + n * v_coeff * float(np.sum(pts * pts))


def total_gradient(pts: np.ndarray, s: float, is_log: bool, v_coeff: float) -> np.ndarray:
    n = pts.shape[0]
    return pair_gradient(pts, s, is_log) + 2.0 * n * v_coeff * pts


def _site_pair_energy(pts, i, x, s, is_log):
    """Interaction of point x (at slot i) with the rest, over ordered pairs."""
    diff = pts - x
    r2 = np.einsum("ij,ij->i", diff, diff)
    r2[i] = 1.0
    if np.any(r2[np.arange(len(r2)) != i] == 0.0):
        return math.inf
    with np.errstate(divide="ignore"):
        if is_log:
            vals = -0.5 * np.log(r2)
        else:
            vals = r2 ** (-0.5 * s)
    vals[i] = 0.0
    return 2.0 * float(vals.sum())


def mh_block(pts, s, is_log, v_coeff, beta, sigma, sites, normals, uniforms, energy_in):
    """Run one block of single-site Metropolis steps in place.

    Returns (energies_after_each_step, accept_count).  Proposals are
    x_i + sigma * normal; acceptance uses min(1, exp(-beta dH)) against the
    supplied uniforms so the walk is reproducible across lanes.
    """
    n = pts.shape[0]
    m = sites.shape[0]
    energies = np.empty(m)
    energy = float(energy_in)
    acc = 0
    for t in range(m):
        i = int(sites[t])
        x_old = pts[i].copy()
        x_new = x_old + sigma * normals[t]
        e_old = _site_pair_energy(pts, i, x_old, s, is_log)
        e_new = _site_pair_energy(pts, i, x_new, s, is_log)
        dh = (e_new - e_old) + n * v_coeff * (float(x_new @ x_new) - float(x_old @ x_old))
        if dh <= 0.0 or (math.isfinite(dh) and uniforms[t] < math.exp(-beta * dh)):
            pts[i] = x_new
            energy += dh
            acc += 1
        energies[t] = energy
    return energies, acc
