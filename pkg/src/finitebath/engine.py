"""Max-cooling permutations on the compressed system-bath state.

The joint state after a permutation is a list of chunks
``(sector, level, count, log_prob)``: ``count`` microstates of bath level
``level`` paired with system level ``sector``, all carrying the same
probability. Within one (sector, level) slot group the chunks are listed in
slot order, so the bath marginal can be recovered by overlaying sectors slot
by slot. The unitary itself is never formed.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import asdict, dataclass
from typing import Literal, NamedTuple

from .spectra import EngineeredParams, engineered_degeneracy, engineered_interacting
from .thermo import (
    Chunk,
    LevelDistribution,
    Spectrum,
    SystemDiag,
    gibbs_level_weights,
    log_partition,
    logsumexp,
    overlay,
)

Policy = Literal["sorted", "level_shift"]
POLICIES = ("sorted", "level_shift")
LOG_HALF = math.log(0.5)


class JointChunk(NamedTuple):
    sector: int
    level: int
    count: int
    log_prob: float
    # Product eigenvalue p[src_sector] * g[src_level] that landed in this slot.
    src_sector: int
    src_level: int


@dataclass(frozen=True)
class ChunkedJoint:
    spectrum: Spectrum
    system: SystemDiag
    beta: float
    chunks: tuple[JointChunk, ...]

    def slot_groups(self) -> dict[tuple[int, int], list[tuple[int, float]]]:
        groups: dict[tuple[int, int], list[tuple[int, float]]] = {}
        for c in self.chunks:
            groups.setdefault((c.sector, c.level), []).append((c.count, c.log_prob))
        return groups

    def value_multiset(self) -> Counter:
        out: Counter = Counter()
        for c in self.chunks:
            out[c.log_prob] += c.count
        return out


@dataclass(frozen=True)
class ProcessOutcome:
    beta: float
    heat_Q: float
    dS_system: float
    dS_bath: float
    mutual_info: float
    rel_ent_bath: float
    sigma: float
    q_excited: float
    identity_residual: float

    @property
    def beta_Q(self) -> float:
        return self.beta * self.heat_Q

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["beta_Q"] = self.beta_Q
        return rec


def _product_values(system: SystemDiag, spectrum: Spectrum, beta: float):
    log_z = log_partition(spectrum, beta)
    log_g = [-beta * e - log_z for e in spectrum.energies]
    log_p = [math.log(p) if p > 0 else -math.inf for p in system.populations]
    return log_p, log_g


def _sorted_fill(system: SystemDiag, spectrum: Spectrum, beta: float) -> list[JointChunk]:
    log_p, log_g = _product_values(system, spectrum, beta)
    degs = spectrum.degeneracies
    energies = spectrum.energies
    values = [
        (lp + lg, energies[i], s, i, degs[i])
        for s, lp in enumerate(log_p)
        for i, lg in enumerate(log_g)
    ]
    # Largest value first; ties go to the lower bath energy, then lower sector.
    values.sort(key=lambda v: (-v[0], v[1], v[2]))

    chunks: list[JointChunk] = []
    k = 0
    value, _, src_s, src_i, left = values[0]
    for s in range(len(log_p)):
        for i, need in enumerate(degs):
            while need:
                take = need if need < left else left
                chunks.append(JointChunk(s, i, take, value, src_s, src_i))
                need -= take
                left -= take
                if not left and k + 1 < len(values):
                    k += 1
                    value, _, src_s, src_i, left = values[k]
    return chunks


def _level_shift_fill(system: SystemDiag, spectrum: Spectrum, beta: float) -> list[JointChunk]:
    """Structured permutation on the engineered bath with a maximally mixed qubit.

    Ground sector: construction levels 0 and 1 take g_0/2, level i >= 2 takes
    g_{i-1}/2 on all its microstates. Excited sector: every slot takes g_n/2.
    """
    if len(system.populations) != 2 or any(abs(p - 0.5) > 1e-15 for p in system.populations):
        raise ValueError("level_shift needs a maximally mixed qubit")
    if spectrum.tags is None:
        raise ValueError("level_shift needs an engineered spectrum (construction tags missing)")
    n = spectrum.n_levels - 1
    pos = [spectrum.level_of_tag(i) for i in range(n + 1)]
    if any(spectrum.degeneracies[pos[i]] != engineered_degeneracy(i) for i in range(n + 1)):
        raise ValueError("level_shift needs degeneracies 1, 1, 2, ..., 2**(n-1)")

    log_p, log_g = _product_values(system, spectrum, beta)
    half = [log_p[0] + lg for lg in log_g]  # same float for both sectors
    degs = spectrum.degeneracies
    ground = [
        JointChunk(0, pos[0], 1, half[pos[0]], 0, pos[0]),
        JointChunk(0, pos[1], 1, half[pos[0]], 1, pos[0]),
    ]
    # Omega_i = 2 Omega_{i-1}: half of the copies come from each sector.
    ground += [
        JointChunk(0, pos[i], degs[pos[i]], half[pos[i - 1]], 0, pos[i - 1]) for i in range(2, n + 1)
    ]
    excited = [JointChunk(1, lev, g, half[pos[n]], 1, pos[n]) for lev, g in enumerate(degs)]
    chunks = sorted(ground, key=lambda c: c.level) + excited

    expected: Counter = Counter()
    for lp in log_p:
        for lg, g in zip(log_g, spectrum.degeneracies):
            expected[lp + lg] += g
    got: Counter = Counter()
    for c in chunks:
        got[c.log_prob] += c.count
    if got != expected:
        raise ValueError("level_shift is not a permutation for this spectrum")
    return chunks


def max_cool(
    system: SystemDiag,
    spectrum: Spectrum,
    beta: float,
    policy: Policy = "sorted",
) -> tuple[ChunkedJoint, ProcessOutcome]:
    """Apply a ground-occupation-maximizing permutation to ``system x Gibbs(beta)``.

    ``sorted`` assigns eigenvalues in decreasing order to slots ordered by
    system level and then bath energy, which also minimizes the heat among
    max-cooling permutations. ``level_shift`` is the structured permutation
    for the engineered bath.
    """
    if not (math.isfinite(beta) and beta > 0):
        raise ValueError("beta must be positive and finite")
    if policy == "sorted":
        chunks = _sorted_fill(system, spectrum, beta)
    elif policy == "level_shift":
        chunks = _level_shift_fill(system, spectrum, beta)
    else:
        raise ValueError(f"unknown policy {policy!r}")
    joint = ChunkedJoint(spectrum, system, beta, tuple(chunks))
    return joint, evaluate(joint)


def marginal_system(joint: ChunkedJoint) -> SystemDiag:
    parts: list[list[float]] = [[] for _ in joint.system.populations]
    for c, w in zip(joint.chunks, _RatioView(joint).chunk_weights):
        parts[c.sector].append(w)
    return SystemDiag(tuple(math.fsum(p) for p in parts))


def marginal_bath(joint: ChunkedJoint) -> LevelDistribution:
    groups = joint.slot_groups()
    d_s = len(joint.system.populations)
    chunks: list[Chunk] = []
    for i in range(joint.spectrum.n_levels):
        runs = [groups[(s, i)] for s in range(d_s)]
        for count, values in overlay(runs):
            chunks.append(Chunk(i, count, logsumexp(values)))
    return LevelDistribution(joint.spectrum, tuple(chunks))


class _RatioView:
    """Joint chunks measured against the Gibbs value of their own slot.

    A chunk holding p_s g_j in a slot of level i has ratio
    p_s exp(-beta (e_j - e_i)) to g_i. Working with these ratios keeps the
    O(n) magnitudes of log g out of every subtraction.
    """

    def __init__(self, joint: ChunkedJoint):
        spectrum = joint.spectrum
        beta = joint.beta
        self.gibbs_weights = gibbs_level_weights(spectrum, beta)
        log_p = [math.log(p) if p > 0 else -math.inf for p in joint.system.populations]
        e = spectrum.energies
        degs = spectrum.degeneracies
        self.log_ratio = [
            log_p[c.src_sector] - beta * (e[c.src_level] - e[c.level]) for c in joint.chunks
        ]
        self.fraction = [c.count / degs[c.level] for c in joint.chunks]
        self.chunk_weights = [
            self.gibbs_weights[c.level] * f * math.exp(lr)
            for c, f, lr in zip(joint.chunks, self.fraction, self.log_ratio)
        ]


def evaluate(joint: ChunkedJoint) -> ProcessOutcome:
    """All entropy-production functionals of a post-permutation joint state."""
    spectrum = joint.spectrum
    beta = joint.beta
    view = _RatioView(joint)
    w_tau = view.gibbs_weights
    d_s = len(joint.system.populations)

    # Bath marginal as ratios to Gibbs, slot interval by slot interval.
    runs: dict[tuple[int, int], list[tuple[int, float]]] = {}
    for c, lr in zip(joint.chunks, view.log_ratio):
        runs.setdefault((c.sector, c.level), []).append((c.count, lr))
    heat_terms = []
    rel_terms = []
    for i, (e, g) in enumerate(zip(spectrum.energies, spectrum.degeneracies)):
        parts = [-1.0]
        for count, lrs in overlay([runs[(s, i)] for s in range(d_s)]):
            lr = logsumexp(lrs)
            if lr == -math.inf:
                continue
            frac = count / g
            parts.append(frac * math.exp(lr))
            rel_terms.append(w_tau[i] * frac * math.exp(lr) * lr)
        heat_terms.append(e * w_tau[i] * math.fsum(parts))
    heat = math.fsum(heat_terms)
    rel = math.fsum(rel_terms)

    sector_parts: list[list[float]] = [[] for _ in range(d_s)]
    for c, w in zip(joint.chunks, view.chunk_weights):
        sector_parts[c.sector].append(w)
    sigma_s = SystemDiag(tuple(math.fsum(p) for p in sector_parts))

    s_sys_i = joint.system.entropy()
    s_sys_f = sigma_s.entropy()
    joint_cross = math.fsum(
        w * lr for w, lr in zip(view.chunk_weights, view.log_ratio) if w > 0.0
    )
    dS_system = s_sys_f - s_sys_i
    # S(sigma_B) - S(sigma_SB) = joint_cross - D(sigma_B || tau_B)
    mutual = math.fsum((s_sys_f, joint_cross, -rel))
    sigma = math.fsum((beta * heat, dS_system))
    residual = abs(math.fsum((beta * heat, dS_system, -mutual, -rel)))
    return ProcessOutcome(
        beta=beta,
        heat_Q=heat,
        dS_system=dS_system,
        dS_bath=beta * heat - rel,
        mutual_info=mutual,
        rel_ent_bath=rel,
        sigma=sigma,
        q_excited=sigma_s.q_excited,
        identity_residual=residual,
    )


def engineered_q(p: EngineeredParams) -> float:
    """Excited population Omega_n g_n left on the qubit by max-cooling."""
    spec = engineered_interacting(p)
    top = spec.level_of_tag(p.n)
    log_g = -p.beta0 * spec.energies[top] - log_partition(spec, p.beta0)
    return math.exp(spec.log_degeneracies[top] + log_g)


def run_engineered(n: int, alpha: float = 3.0, beta: float = 1.0, policy: Policy = "sorted"):
    """Erase a maximally mixed qubit with the engineered bath built at ``beta``."""
    spec = engineered_interacting(EngineeredParams(n, alpha, beta))
    return max_cool(SystemDiag.maximally_mixed(), spec, beta, policy)
