"""Thermodynamic primitives over compressed (level, degeneracy) spectra.

A bath of dimension ``2**n`` is never expanded. A :class:`Spectrum` keeps one
entry per distinct energy together with its exact integer degeneracy, and a
:class:`LevelDistribution` keeps, per level, a short run of chunks of
microstates sharing the same probability. Probabilities live in the log
domain; every reduction goes through :func:`math.fsum`.

Entropies are in nats.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, NamedTuple, Sequence

from .errors import NumericalError

LOG2 = math.log(2.0)


def log_count(count: int) -> float:
    """Natural log of a (possibly huge) positive integer."""
    return math.log(count)


def logsumexp(values: Sequence[float]) -> float:
    m = max(values)
    if m == -math.inf:
        return -math.inf
    return m + math.log(math.fsum(math.exp(v - m) for v in values))


def xlogx(p: float) -> float:
    return 0.0 if p <= 0.0 else p * math.log(p)


@dataclass(frozen=True)
class Spectrum:
    """Bath Hamiltonian as distinct energies with exact integer degeneracies.

    ``tags`` optionally records, for each (energy-sorted) level, the index the
    level had in the builder that produced it. Protocols defined in terms of
    that construction order (the level-shift permutation) rely on it.
    """

    energies: tuple[float, ...]
    degeneracies: tuple[int, ...]
    label: str = ""
    tags: tuple[int, ...] | None = None

    def __post_init__(self):
        if len(self.energies) == 0 or len(self.energies) != len(self.degeneracies):
            raise ValueError("energies and degeneracies must be non-empty and of equal length")
        for e in self.energies:
            if not math.isfinite(e):
                raise ValueError(f"non-finite energy {e!r}")
        for a, b in zip(self.energies, self.energies[1:]):
            if not a < b:
                raise ValueError("energies must be strictly increasing; use Spectrum.from_levels")
        for g in self.degeneracies:
            if not isinstance(g, int) or g < 1:
                raise ValueError(f"degeneracy must be a positive integer, got {g!r}")
        if self.tags is not None and len(self.tags) != len(self.energies):
            raise ValueError("tags must align with levels")

    @classmethod
    def from_levels(
        cls,
        energies: Iterable[float],
        degeneracies: Iterable[int],
        label: str = "",
        tags: Iterable[int] | None = None,
        dimension: int | None = None,
    ) -> "Spectrum":
        """Sort levels by energy and merge exactly equal energies.

        Tags survive only when no merge happened.
        """
        energies = [float(e) for e in energies]
        degeneracies = [int(g) for g in degeneracies]
        tag_list = list(range(len(energies))) if tags is None else [int(t) for t in tags]
        order = sorted(range(len(energies)), key=lambda k: energies[k])
        es: list[float] = []
        gs: list[int] = []
        ts: list[int] = []
        merged = False
        for k in order:
            if es and energies[k] == es[-1]:
                gs[-1] += degeneracies[k]
                merged = True
            else:
                es.append(energies[k])
                gs.append(degeneracies[k])
                ts.append(tag_list[k])
        keep_tags = None if (merged or tags is None) else tuple(ts)
        spec = cls(tuple(es), tuple(gs), label, keep_tags)
        if dimension is not None and spec.dimension != dimension:
            raise ValueError(f"degeneracies sum to {spec.dimension}, expected {dimension}")
        return spec

    @property
    def n_levels(self) -> int:
        return len(self.energies)

    @cached_property
    def dimension(self) -> int:
        return sum(self.degeneracies)

    @cached_property
    def log_degeneracies(self) -> tuple[float, ...]:
        return tuple(log_count(g) for g in self.degeneracies)

    @cached_property
    def energy_scale(self) -> float:
        return max(1.0, max(abs(e) for e in self.energies))

    def level_of_tag(self, tag: int) -> int:
        if self.tags is None:
            raise ValueError(f"spectrum {self.label!r} carries no construction tags")
        return self._tag_index[tag]

    @cached_property
    def _tag_index(self) -> dict[int, int]:
        return {t: i for i, t in enumerate(self.tags or ())}

    # serialization

    def to_json(self, beta: float | None = None) -> str:
        levels = [
            {
                "energy": e,
                "degeneracy_log2": math.log2(g),
                "degeneracy": str(g),
            }
            for e, g in zip(self.energies, self.degeneracies)
        ]
        doc: dict = {"label": self.label, "levels": levels}
        if self.tags is not None:
            doc["tags"] = list(self.tags)
        if beta is not None:
            doc["beta"] = beta
        return json.dumps(doc)

    @classmethod
    def from_json(cls, text: str) -> tuple["Spectrum", float | None]:
        """Inverse of :meth:`to_json`. Returns ``(spectrum, beta)``.

        A bare JSON array of level records is also accepted. Without an exact
        ``degeneracy`` field the count is recovered from ``degeneracy_log2``,
        which is only exact below 2**53 or for powers of two.
        """
        doc = json.loads(text)
        if isinstance(doc, list):
            doc = {"levels": doc}
        energies, degs = [], []
        for lev in doc["levels"]:
            energies.append(float(lev["energy"]))
            if "degeneracy" in lev:
                degs.append(int(lev["degeneracy"]))
            else:
                degs.append(_count_from_log2(float(lev["degeneracy_log2"])))
        tags = doc.get("tags")
        spec = cls(tuple(energies), tuple(degs), doc.get("label", ""),
                   None if tags is None else tuple(int(t) for t in tags))
        return spec, doc.get("beta")


def _count_from_log2(l2: float) -> int:
    if l2 < 0:
        raise ValueError("degeneracy_log2 must be >= 0")
    if l2 == int(l2) and l2 >= 53:
        return 1 << int(l2)
    count = round(2.0 ** l2)
    if abs(math.log2(count) - l2) > 4 * math.ulp(max(l2, 1.0)):
        raise ValueError(f"degeneracy_log2={l2} is not the log2 of an integer")
    return count


class Chunk(NamedTuple):
    level: int
    count: int
    log_prob: float


@dataclass(frozen=True)
class LevelDistribution:
    """Diagonal state on a spectrum's microstates, piecewise constant per level.

    Chunks of one level are listed in slot order and their counts add up to
    that level's degeneracy.
    """

    spectrum: Spectrum
    chunks: tuple[Chunk, ...]
    total: float = field(init=False, repr=False)

    def __post_init__(self):
        per_level = [0] * self.spectrum.n_levels
        for c in self.chunks:
            if c.count < 1:
                raise ValueError("chunk counts must be >= 1")
            if c.log_prob > 1e-15:
                raise ValueError("per-microstate probability above 1")
            per_level[c.level] += c.count
        if tuple(per_level) != self.spectrum.degeneracies:
            raise ValueError("chunk counts do not cover the spectrum's degeneracies")
        total = math.fsum(chunk_weight(c.count, c.log_prob) for c in self.chunks)
        if abs(total - 1.0) > 1e-12:
            raise ValueError(f"distribution not normalized (total={total!r})")
        object.__setattr__(self, "total", total)

    @cached_property
    def level_weights(self) -> tuple[float, ...]:
        """Total probability carried by each level."""
        parts: list[list[float]] = [[] for _ in range(self.spectrum.n_levels)]
        for c in self.chunks:
            parts[c.level].append(chunk_weight(c.count, c.log_prob))
        return tuple(math.fsum(p) for p in parts)

    def by_level(self) -> list[list[tuple[int, float]]]:
        out: list[list[tuple[int, float]]] = [[] for _ in range(self.spectrum.n_levels)]
        for c in self.chunks:
            out[c.level].append((c.count, c.log_prob))
        return out

    def dense(self) -> list[float]:
        """Expand to one probability per microstate (tests and tiny baths only)."""
        if self.spectrum.dimension > 1 << 16:
            raise ValueError("refusing to expand a bath larger than 2**16")
        return [math.exp(c.log_prob) for c in self.chunks for _ in range(c.count)]


def chunk_weight(count: int, log_prob: float) -> float:
    if log_prob == -math.inf:
        return 0.0
    return math.exp(log_count(count) + log_prob)


@dataclass(frozen=True)
class SystemDiag:
    populations: tuple[float, ...]

    def __post_init__(self):
        pops = tuple(float(p) for p in self.populations)
        object.__setattr__(self, "populations", pops)
        if len(pops) < 2:
            raise ValueError("system needs at least two levels")
        if any(p < 0.0 for p in pops):
            raise ValueError("negative population")
        if abs(math.fsum(pops) - 1.0) > 1e-12:
            raise ValueError(f"system populations not normalized: {pops}")

    @classmethod
    def maximally_mixed(cls, d: int = 2) -> "SystemDiag":
        return cls(tuple([1.0 / d] * d))

    @property
    def q_excited(self) -> float:
        """Probability outside the ground state."""
        return math.fsum(self.populations[1:])

    def entropy(self) -> float:
        return -math.fsum(xlogx(p) for p in self.populations)


class BetaStarResult(NamedTuple):
    beta_star: float
    matched_energy: float
    iterations: int
    infinite_temperature: bool = False


def gibbs(spectrum: Spectrum, beta: float) -> LevelDistribution:
    if not math.isfinite(beta):
        raise ValueError(f"beta must be finite, got {beta!r}")
    log_z = log_partition(spectrum, beta)
    chunks = tuple(
        Chunk(i, g, -beta * e - log_z)
        for i, (e, g) in enumerate(zip(spectrum.energies, spectrum.degeneracies))
    )
    return LevelDistribution(spectrum, chunks)


def log_partition(spectrum: Spectrum, beta: float) -> float:
    return logsumexp([lg - beta * e for lg, e in zip(spectrum.log_degeneracies, spectrum.energies)])


def gibbs_level_weights(spectrum: Spectrum, beta: float) -> list[float]:
    terms = [lg - beta * e for lg, e in zip(spectrum.log_degeneracies, spectrum.energies)]
    log_z = logsumexp(terms)
    return [math.exp(t - log_z) for t in terms]


def entropy(dist: LevelDistribution) -> float:
    return math.fsum(
        -chunk_weight(c.count, c.log_prob) * c.log_prob
        for c in dist.chunks
        if c.log_prob != -math.inf
    )


def overlay(runs: Sequence[Sequence[tuple[int, float]]]) -> list[tuple[int, tuple[float, ...]]]:
    """Merge several piecewise-constant runs over the same slots.

    Each run is a list of ``(count, value)`` in slot order and all runs span
    the same number of slots. Returns ``(count, values)`` on the common
    refinement of their breakpoints.
    """
    pos = [0] * len(runs)
    left = [r[0][0] for r in runs]
    out = []
    while pos[0] < len(runs[0]):
        take = min(left)
        out.append((take, tuple(r[p][1] for r, p in zip(runs, pos))))
        for k, r in enumerate(runs):
            left[k] -= take
            if left[k] == 0:
                pos[k] += 1
                if pos[k] < len(r):
                    left[k] = r[pos[k]][0]
    if any(p != len(r) for p, r in zip(pos, runs)):
        raise ValueError("runs do not span the same slots")
    return out


def relative_entropy(p: LevelDistribution, q: LevelDistribution) -> float:
    """D(p||q) in nats for two distributions on the same spectrum."""
    if p.spectrum != q.spectrum:
        raise ValueError("distributions live on different spectra")
    terms = []
    for runs_p, runs_q in zip(p.by_level(), q.by_level()):
        for count, (lp, lq) in overlay([runs_p, runs_q]):
            if lp == -math.inf:
                continue
            if lq == -math.inf:
                raise ValueError("support of p is not contained in support of q")
            terms.append(chunk_weight(count, lp) * (lp - lq))
    return math.fsum(terms)


def mean_energy(spectrum: Spectrum, dist: LevelDistribution) -> float:
    return math.fsum(w * e for w, e in zip(dist.level_weights, spectrum.energies))


def variance_energy(spectrum: Spectrum, dist: LevelDistribution) -> float:
    return _variance(spectrum.energies, dist.level_weights)


def _variance(energies: Sequence[float], weights: Sequence[float]) -> float:
    mean = math.fsum(w * e for w, e in zip(weights, energies))
    return math.fsum(w * (e - mean) ** 2 for w, e in zip(weights, energies))


def heat_capacity(spectrum: Spectrum, gamma: float) -> float:
    """gamma**2 times the energy variance of the Gibbs state at gamma."""
    if not gamma > 0:
        raise ValueError("gamma must be positive")
    return gamma * gamma * _variance(spectrum.energies, gibbs_level_weights(spectrum, gamma))


def gibbs_mean_energy(spectrum: Spectrum, gamma: float) -> float:
    weights = gibbs_level_weights(spectrum, gamma)
    return math.fsum(w * e for w, e in zip(weights, spectrum.energies))


def solve_beta_star(
    spectrum: Spectrum,
    target_energy: float,
    beta_floor: float = 1e-12,
    max_iter: int = 400,
) -> BetaStarResult:
    """Positive inverse temperature whose Gibbs state has the given mean energy.

    Bracketed bisection; the Gibbs mean energy is strictly decreasing in the
    inverse temperature. Targets at or above the infinite-temperature mean
    (within tolerance) return ``beta_star=0`` with ``infinite_temperature`` set.
    """
    e_min, e_max = spectrum.energies[0], spectrum.energies[-1]
    scale = spectrum.energy_scale
    tol = 1e-12 * scale
    if not (e_min < target_energy < e_max):
        raise ValueError(f"target energy {target_energy} outside ({e_min}, {e_max})")
    f_floor = gibbs_mean_energy(spectrum, beta_floor)
    if target_energy >= f_floor - tol:
        if target_energy > f_floor + max(tol, 1e-9 * scale):
            raise ValueError("target energy requires a negative temperature")
        return BetaStarResult(0.0, f_floor, 0, True)

    lo, hi = beta_floor, 1.0 / scale
    it = 0
    while gibbs_mean_energy(spectrum, hi) > target_energy:
        lo, hi = hi, 2.0 * hi
        it += 1
        if it > 2000:
            raise NumericalError("could not bracket beta*")
    f_mid = target_energy
    for it2 in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        f_mid = gibbs_mean_energy(spectrum, mid)
        if f_mid > target_energy:
            lo = mid
        else:
            hi = mid
    else:
        raise NumericalError("beta* bisection hit the iteration cap")
    beta = 0.5 * (lo + hi)
    f = gibbs_mean_energy(spectrum, beta)
    if abs(f - target_energy) > tol:
        # Resolution of the bracket exhausted before the energy tolerance.
        for cand in (lo, hi):
            fc = gibbs_mean_energy(spectrum, cand)
            if abs(fc - target_energy) < abs(f - target_energy):
                beta, f = cand, fc
        if abs(f - target_energy) > 1e3 * tol:
            raise NumericalError(f"beta* residual {abs(f - target_energy):.3e} above tolerance")
    return BetaStarResult(beta, f, it + it2 + 1, False)
