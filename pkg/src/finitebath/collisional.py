"""Sequential full-swap erasure with a chain of fresh thermal qubits.

The system starts maximally mixed; collision k swaps it with a bath qubit
whose Gibbs excited population is p_k, so afterwards the system holds p_k
and the bath qubit holds the system's previous population. Each collision
leaves a product state, so the entropy production of step k is the binary
relative entropy D(p_{k-1} || p_k).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Sequence

from .bounds import binary_entropy, binary_kl
from .engine import ProcessOutcome

Family = Literal["linear", "geodesic", "geometric", "custom"]
FAMILIES = ("linear", "geodesic", "geometric")


@dataclass(frozen=True)
class Schedule:
    populations: tuple[float, ...]
    family: str = "custom"

    def __post_init__(self):
        pops = tuple(float(p) for p in self.populations)
        object.__setattr__(self, "populations", pops)
        if not pops:
            raise ValueError("schedule needs at least one collision")
        if any(not (0.0 < p <= 0.5) for p in pops):
            raise ValueError("populations must lie in (0, 1/2]")
        if any(b > a for a, b in zip(pops, pops[1:])):
            raise ValueError("populations must be non-increasing")

    @property
    def n(self) -> int:
        return len(self.populations)

    @property
    def q_final(self) -> float:
        return self.populations[-1]

    def energies(self, beta: float) -> list[float]:
        """Bath qubit gaps realizing the populations at inverse temperature beta."""
        return [math.log((1.0 - p) / p) / beta for p in self.populations]


def make_schedule(family: Family, n: int, q_target: float) -> Schedule:
    """Schedule families ending at ``q_target``.

    linear: populations evenly spaced; geodesic: p = sin(theta)**2 with theta
    evenly spaced, i.e. equal steps in the Fisher-Rao length; geometric:
    evenly spaced log-odds, i.e. equally spaced bath gaps.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if not (0.0 < q_target < 0.5):
        raise ValueError("q_target must lie in (0, 1/2)")
    ks = range(1, n + 1)
    if family == "linear":
        pops = [0.5 + (q_target - 0.5) * k / n for k in ks]
    elif family == "geodesic":
        start, stop = math.pi / 4.0, math.asin(math.sqrt(q_target))
        pops = [math.sin(start + (stop - start) * k / n) ** 2 for k in ks]
    elif family == "geometric":
        end = math.log(q_target / (1.0 - q_target))
        pops = [1.0 / (1.0 + math.exp(-end * k / n)) for k in ks]
    else:
        raise ValueError(f"unknown schedule family {family!r}")
    pops[-1] = q_target
    return Schedule(tuple(pops), family)


def run_chain(schedule: Schedule, beta: float = 1.0) -> ProcessOutcome:
    if not beta > 0:
        raise ValueError("beta must be positive")
    prev = 0.5
    heat, rel, bath_entropy = [], [], []
    for p, e in zip(schedule.populations, schedule.energies(beta)):
        heat.append(e * (prev - p))
        rel.append(binary_kl(prev, p))
        bath_entropy += [binary_entropy(prev), -binary_entropy(p)]
        prev = p
    q = schedule.q_final
    heat_q = math.fsum(heat)
    dS_system = binary_entropy(q) - math.log(2.0)
    d = math.fsum(rel)
    sigma = math.fsum((beta * heat_q, dS_system))
    return ProcessOutcome(
        beta=beta,
        heat_Q=heat_q,
        dS_system=dS_system,
        dS_bath=math.fsum(bath_entropy),
        mutual_info=0.0,
        rel_ent_bath=d,
        sigma=sigma,
        q_excited=q,
        identity_residual=abs(sigma - d),
    )


def chain_sigma(populations: Sequence[float]) -> float:
    """Total entropy production of a swap chain starting from 1/2."""
    prev = 0.5
    parts = []
    for p in populations:
        parts.append(binary_kl(prev, p))
        prev = p
    return math.fsum(parts)
