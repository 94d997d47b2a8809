"""Simulated annealing over bath spectra.

The objective is the entropy production of erasing a maximally mixed qubit
with the energy-sorted max-cooling permutation, plus a quadratic penalty
pulling the final excited population towards a target. Every evaluation
goes through :func:`finitebath.engine.max_cool`.

Random numbers come from ``numpy.random.default_rng(seed)`` (PCG64), so a
seed fixes the whole run.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .engine import ProcessOutcome, max_cool
from .thermo import Spectrum, SystemDiag

FULL_ANNEAL_MAX_N = 10


@dataclass(frozen=True)
class AnnealConfig:
    initial_temperature: float = 1.0
    # Cools by 1e-4 over one chain of steps / restarts = 5000 steps.
    cooling_rate: float = 0.99816
    steps: int = 20_000
    move_scale: float = 0.3
    target_q: float = 0.01
    q_penalty_weight: float = 1e6
    seed: int = 0
    beta: float = 1.0
    log_every: int = 100
    degeneracy_move_prob: float = 0.3
    restarts: int = 4

    def __post_init__(self):
        if self.steps < 0:
            raise ValueError("steps must be >= 0")
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if not (0.0 < self.cooling_rate < 1.0):
            raise ValueError("cooling_rate must lie in (0, 1)")
        if not self.initial_temperature > 0:
            raise ValueError("initial_temperature must be positive")
        if not (0.0 < self.target_q < 0.5):
            raise ValueError("target_q must lie in (0, 1/2)")


@dataclass
class AnnealResult:
    spectrum: Spectrum
    outcome: ProcessOutcome
    objective: float
    initial_objective: float
    accepted: int
    history: list[tuple[int, float, float, float]] = field(default_factory=list)

    @property
    def improved(self) -> bool:
        return self.objective < self.initial_objective

    def history_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["step", "temperature", "objective", "best_objective"])
        w.writerows(self.history)
        return buf.getvalue()


def objective(spectrum: Spectrum, config: AnnealConfig) -> tuple[float, ProcessOutcome]:
    _, out = max_cool(SystemDiag.maximally_mixed(), spectrum, config.beta, "sorted")
    return out.sigma + config.q_penalty_weight * (out.q_excited - config.target_q) ** 2, out


def spectrum_from_log_r(log_r: Sequence[float], degeneracy: Sequence[int], beta: float) -> Spectrum:
    """Energies beta e_i = log Omega_{i+1} - log r_i, with Omega_L = total dimension."""
    dim = sum(degeneracy)
    nxt = [math.log(g) for g in degeneracy[1:]] + [math.log(dim)]
    return Spectrum.from_levels([(a - b) / beta for a, b in zip(nxt, log_r)], degeneracy, label="annealed")


def _check_degeneracy(n: int, degeneracy: Sequence[int]) -> list[int]:
    degs = [int(g) for g in degeneracy]
    if any(g < 1 for g in degs) or sum(degs) != 1 << n:
        raise ValueError(f"degeneracies must be positive and sum to 2**{n}")
    return degs


def anneal_energies(
    n: int,
    degeneracy: Sequence[int],
    config: AnnealConfig,
    initial_log_r: Sequence[float] | None = None,
) -> AnnealResult:
    """Metropolis search over level energies at fixed degeneracies.

    The state is the vector log r_i; log r_0 stays at its initial value to fix
    the irrelevant overall energy shift. Without ``initial_log_r`` each of the
    ``config.restarts`` chains starts from a draw uniform on [-4, 1] per level
    and the best chain wins; the step budget is split evenly between them.
    """
    degs = _check_degeneracy(n, degeneracy)
    rng = np.random.default_rng(config.seed)
    L = len(degs)
    if initial_log_r is not None:
        starts = [[float(v) for v in initial_log_r]]
        if len(starts[0]) != L:
            raise ValueError("initial_log_r must have one entry per level")
    else:
        starts = [list(rng.uniform(-4.0, 1.0, size=L)) for _ in range(config.restarts)]

    def evaluate(state):
        spec = spectrum_from_log_r(state, degs, config.beta)
        return (*objective(spec, config), spec)

    chain_steps = config.steps // len(starts)
    best = None
    for x in starts:
        f, out, spec = evaluate(x)
        res = _metropolis(x, f, out, spec, config, rng, _energy_move(L), evaluate, chain_steps)
        best = _merge(best, res)
    return best


def _merge(best: AnnealResult | None, res: AnnealResult) -> AnnealResult:
    if best is None:
        return res
    offset = best.history[-1][0] if best.history else 0
    res.history = best.history + [(offset + s, t, f, min(b, best.objective)) for s, t, f, b in res.history]
    res.accepted += best.accepted
    res.initial_objective = best.initial_objective
    if best.objective <= res.objective:
        res.spectrum, res.outcome, res.objective = best.spectrum, best.outcome, best.objective
    return res


def _energy_move(L: int):
    def move(state, rng, scale):
        if L < 2:
            return None
        k = int(rng.integers(1, L))
        new = list(state)
        new[k] += _step(rng, scale)
        return new
    return move


def anneal_full(n: int, config: AnnealConfig) -> AnnealResult:
    """Anneal energies and degeneracies of an (n+1)-level bath with 2**n states.

    The state is a pair (log r, degeneracies) read through
    :func:`spectrum_from_log_r`, so a degeneracy move also shifts the energies
    of the two levels it touches. A degeneracy move transfers microstates
    between two adjacent levels and never empties one. Restarts split the
    step budget as in :func:`anneal_energies`.
    """
    if n < 1 or n > FULL_ANNEAL_MAX_N:
        raise ValueError(f"anneal_full supports 1 <= n <= {FULL_ANNEAL_MAX_N}")
    rng = np.random.default_rng(config.seed)
    L = n + 1
    dim = 1 << n

    def draw():
        degs = [1] * L
        for _ in range(dim - L):
            degs[int(rng.integers(0, L))] += 1
        return (tuple(rng.uniform(-4.0, 1.0, size=L)), tuple(degs))

    starts = [draw() for _ in range(config.restarts)]

    def evaluate(st):
        spec = spectrum_from_log_r(st[0], st[1], config.beta)
        return (*objective(spec, config), spec)

    energy_move = _energy_move(L)

    def move(st, rng, scale):
        log_r, gs = st
        if rng.random() < config.degeneracy_move_prob:
            i = int(rng.integers(0, L - 1))
            src, dst = (i, i + 1) if rng.random() < 0.5 else (i + 1, i)
            if gs[src] <= 1:
                return None
            amount = int(rng.integers(1, gs[src] // 2 + 1))
            new_g = list(gs)
            new_g[src] -= amount
            new_g[dst] += amount
            return (log_r, tuple(new_g))
        new_r = energy_move(log_r, rng, scale)
        return None if new_r is None else (tuple(new_r), gs)

    best = None
    for state in starts:
        f, out, spec = evaluate(state)
        res = _metropolis(state, f, out, spec, config, rng, move, evaluate, config.steps // len(starts))
        best = _merge(best, res)
    return best


def _step(rng, scale: float) -> float:
    # Log-uniform width over [scale/100, 3 scale]: coarse moves explore, fine ones polish.
    return scale * 10.0 ** rng.uniform(-2.0, 0.5) * rng.standard_normal()


def _metropolis(state, f, out, spec, config: AnnealConfig, rng, move, evaluate, steps: int) -> AnnealResult:
    best = AnnealResult(spec, out, f, f, 0)
    temperature = config.initial_temperature
    accepted = 0
    for step in range(1, steps + 1):
        cand = move(state, rng, config.move_scale)
        if cand is not None:
            f_new, out_new, spec_new = evaluate(cand)
            delta = f_new - f
            if delta <= 0.0 or rng.random() < math.exp(-delta / temperature):
                state, f = cand, f_new
                accepted += 1
                if f < best.objective:
                    best.spectrum, best.outcome, best.objective = spec_new, out_new, f
        if step % config.log_every == 0 or step == steps:
            best.history.append((step, temperature, f, best.objective))
        temperature *= config.cooling_rate
    best.accepted = accepted
    return best
