"""Metropolis sampling of the Gibbs measure exp(-beta H_n) / Z.

Single-site Gaussian proposals with the step size adapted toward a
20-50% acceptance rate during burn-in and frozen afterwards (adaptation
during sampling would break detailed balance).  Chains are driven by
pre-drawn random blocks, so a fixed seed gives identical trajectories on
both backend lanes and at any thread count.
"""

import math
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from . import _backend
from .equilibrium import EquilibriumModel, quantile_table
from .errors import DomainError, NumericError
from .hamiltonian import Configuration, hamiltonian, next_order_scaled
from .minimize import sample_initial


def metropolis_accept(delta_h: float, beta: float, uniform: float) -> bool:
    """The acceptance rule shared by every chain in this module."""
    if delta_h <= 0.0:
        return True
    if not math.isfinite(delta_h):
        return False
    return uniform < math.exp(-beta * delta_h)


@dataclass
class ChainState:
    config: Configuration
    energy: float
    rng: np.random.Generator
    proposal_sigma: float

    @staticmethod
    def initial(model: EquilibriumModel, n: int, seed: int,
                sigma: Optional[float] = None) -> "ChainState":
        config = sample_initial(model, n, seed)
        rng = np.random.default_rng(np.random.SeedSequence([seed, 0x5eed]))
        if sigma is None:
            sigma = 0.5 * n ** (-1.0 / model.spec.d)
        return ChainState(config=config, energy=hamiltonian(model, config),
                          rng=rng, proposal_sigma=sigma)


@dataclass
class SamplerStats:
    steps: int
    acceptance_rate: float
    energy_trace: np.ndarray
    w1_to_equilibrium: float
    mean_next_order: float
    proposal_sigma: float
    max_energy_drift: float = 0.0
    final: Optional[Configuration] = None

    def as_dict(self) -> dict:
        return {
            "steps": self.steps,
            "acceptance_rate": self.acceptance_rate,
            "w1_to_equilibrium": self.w1_to_equilibrium,
            "mean_next_order": self.mean_next_order,
            "proposal_sigma": self.proposal_sigma,
            "max_energy_drift": self.max_energy_drift,
        }


def _run_block(state: ChainState, model: EquilibriumModel, beta: float,
               m: int):
    n = state.config.n
    sites = state.rng.integers(0, n, size=m)
    normals = state.rng.standard_normal((m, state.config.d))
    uniforms = state.rng.random(m)
    pts = state.config.points.copy()
    energies, acc = _backend.mh_block(
        pts, model.spec.s, model.spec.is_log, model.v_coeff, beta,
        state.proposal_sigma, sites, normals, uniforms, state.energy)
    state.config = Configuration(d=state.config.d, points=pts)
    state.energy = float(energies[-1]) if m else state.energy
    return energies, acc


def mh_step(state: ChainState, model: EquilibriumModel, beta: float) -> ChainState:
    """One single-site Metropolis step (in place); returns the state."""
    if beta <= 0.0:
        raise DomainError("beta must be positive")
    _run_block(state, model, beta, 1)
    return state


def run_chain(model: EquilibriumModel, n: int, beta: float, steps: int,
              burn_in: int, seed: int, keep_final: bool = False,
              block: int = 512, audit_every: int = 20000) -> SamplerStats:
    """Run a seeded chain; statistics are collected after burn-in.

    The proposal width adapts every block during burn-in (targeting 30%
    acceptance) and is frozen at the first post-burn-in step.  The cached
    energy is audited against a full recomputation every audit_every
    steps; drift beyond 1e-9 relative would indicate a broken increment.
    """
    if not steps > burn_in >= 0:
        raise DomainError("need steps > burn_in >= 0")
    if beta <= 0.0:
        raise DomainError("beta must be positive")
    state = ChainState.initial(model, n, seed)
    done = 0
    accepted = 0
    kept_energy: List[float] = []
    kept_positions: List[np.ndarray] = []
    pos_stride = max(1, (steps - burn_in) // 256)
    max_drift = 0.0
    next_audit = audit_every
    while done < steps:
        # blocks never straddle the burn-in boundary
        limit = burn_in if done < burn_in else steps
        m = min(block, limit - done)
        energies, acc = _run_block(state, model, beta, m)
        if done >= burn_in:
            kept_energy.extend(energies)
            accepted += acc
        else:
            rate = acc / m
            state.proposal_sigma = float(np.clip(
                state.proposal_sigma * math.exp(1.2 * (rate - 0.3)),
                1e-4, 4.0))
        done += m
        if done >= burn_in and (done - burn_in) % pos_stride < m:
            kept_positions.append(state.config.points.copy())
        if done >= next_audit:
            full = hamiltonian(model, state.config)
            drift = abs(full - state.energy) / (1.0 + abs(full))
            max_drift = max(max_drift, drift)
            state.energy = full
            next_audit += audit_every
    post = steps - burn_in
    energy_trace = np.asarray(kept_energy)
    if energy_trace.size > 4096:
        idx = np.linspace(0, energy_trace.size - 1, 4096).astype(int)
        energy_trace = energy_trace[idx]
    spec = model.spec
    if spec.is_log:
        scaled = (energy_trace - n * n * model.energy_E
                  + n / spec.d * math.log(n)) / n
    else:
        scaled = (energy_trace - n * n * model.energy_E) / n ** (1.0 + spec.s / spec.d)
    w1 = _w1_distance(model, kept_positions) if spec.d == 1 else math.nan
    return SamplerStats(
        steps=steps,
        acceptance_rate=accepted / post if post else 0.0,
        energy_trace=energy_trace,
        w1_to_equilibrium=w1,
        mean_next_order=float(scaled.mean()),
        proposal_sigma=state.proposal_sigma,
        max_energy_drift=max_drift,
        final=state.config if keep_final else None,
    )


def _w1_distance(model: EquilibriumModel, snapshots: Sequence[np.ndarray]) -> float:
    """Exact sorted 1-Wasserstein distance of pooled samples to mu_V (1D)."""
    if not snapshots:
        return math.nan
    pooled = np.sort(np.concatenate([s.reshape(-1) for s in snapshots]))
    table = quantile_table(model)
    probs = (np.arange(pooled.size) + 0.5) / pooled.size
    targets = np.interp(probs, (np.arange(table.size) + 0.5) / table.size, table)
    return float(np.mean(np.abs(pooled - targets)))


def anneal(model: EquilibriumModel, n: int, beta_schedule: Sequence[float],
           steps_per_stage: int, seed: int) -> Configuration:
    """Cool the chain through an increasing beta schedule; returns the
    final configuration (a stochastic alternative to multistart)."""
    schedule = list(beta_schedule)
    if not schedule or any(b2 <= b1 for b1, b2 in zip(schedule, schedule[1:])):
        raise DomainError("beta schedule must be nonempty and increasing")
    if any(b <= 0 for b in schedule):
        raise DomainError("beta values must be positive")
    state = ChainState.initial(model, n, seed)
    block = 256
    for beta in schedule:
        done = 0
        adapt_until = steps_per_stage // 2
        while done < steps_per_stage:
            m = min(block, steps_per_stage - done)
            _, acc = _run_block(state, model, beta, m)
            if done < adapt_until:
                rate = acc / m
                state.proposal_sigma = float(np.clip(
                    state.proposal_sigma * math.exp(1.2 * (rate - 0.3)),
                    1e-5, 4.0))
            done += m
        state.energy = hamiltonian(model, state.config)
    return state.config
