"""Bath spectrum builders.

Three families: independent qubits with a common gap, the engineered
interacting bath with exponentially growing degeneracies, and the two-level
maximally degenerate bath that maximizes the heat capacity.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

from scipy.optimize import minimize_scalar

from .thermo import LOG2, Spectrum, heat_capacity

MAX_QUBITS = 10**7


@dataclass(frozen=True)
class EngineeredParams:
    n: int
    alpha: float = 3.0
    beta0: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 2:
            raise ValueError("engineered bath needs n >= 2 qubits")
        if not self.alpha > 0:
            raise ValueError("alpha must be positive")
        if not self.beta0 > 0:
            raise ValueError("beta0 must be positive")

    @property
    def quadratic_regime(self) -> bool:
        """Whether alpha > 2, where the 1/n**2 decay is established."""
        return self.alpha > 2


@dataclass(frozen=True)
class CriticalParams:
    n: int
    a: float
    beta0: float = 1.0

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError("critical bath needs n >= 1")
        if not (2.0 ** -self.n < self.a < 1.0):
            raise ValueError(f"ground weight a must lie in (2**-n, 1), got {self.a}")
        if not self.beta0 > 0:
            raise ValueError("beta0 must be positive")

    @property
    def n_excited(self) -> int:
        return (1 << self.n) - 1


def non_interacting_qubits(n: int, gap: float = 1.0) -> Spectrum:
    if n < 1 or n > MAX_QUBITS:
        raise ValueError(f"n must be in [1, {MAX_QUBITS}]")
    if not gap > 0:
        raise ValueError("gap must be positive")
    degs = [math.comb(n, k) for k in range(n + 1)]
    return Spectrum(tuple(k * gap for k in range(n + 1)), tuple(degs),
                    label=f"noninteracting(n={n},gap={gap:g})")


def engineered_r(n: int, alpha: float) -> list[float]:
    """Occupation profile r_i = 1 + n**-alpha - cos(2 pi i / n), i = 0..n.

    The endpoints are set to n**-alpha exactly.
    """
    eps = float(n) ** -alpha
    r = [1.0 + eps - math.cos(2.0 * math.pi * i / n) for i in range(n + 1)]
    r[0] = r[n] = eps
    return r


def engineered_degeneracy(i: int) -> int:
    return 1 if i == 0 else 1 << (i - 1)


def engineered_interacting(p: EngineeredParams) -> Spectrum:
    """Engineered bath with degeneracies 1, 1, 2, ..., 2**(n-1).

    Level i sits at beta0 * e_i = log Omega_{i+1} - log r_i, with
    Omega_{n+1} taken as 2**n so that the top level follows the same rule.
    Levels come back energy-sorted with their construction index in ``tags``.
    """
    if not p.quadratic_regime:
        warnings.warn(f"alpha={p.alpha} <= 2: quadratic decay is not established here",
                      stacklevel=2)
    n = p.n
    r = engineered_r(n, p.alpha)
    beta_e = [i * LOG2 - math.log(r[i]) for i in range(n + 1)]
    energies = [x / p.beta0 for x in beta_e]
    degs = [engineered_degeneracy(i) for i in range(n + 1)]
    spec = Spectrum.from_levels(energies, degs, label=f"engineered(n={n},alpha={p.alpha:g})",
                                tags=range(n + 1), dimension=1 << n)
    if spec.tags is None:
        raise ValueError("engineered levels collided; the level-shift protocol is undefined")
    return spec


def critical_gap(p: CriticalParams) -> float:
    """Excited-level energy putting Gibbs weight exactly a on the ground state."""
    log_n = p.n * LOG2 + math.log1p(-(2.0 ** -p.n))
    return (log_n - math.log(1.0 / p.a - 1.0)) / p.beta0


def critical_degenerate(p: CriticalParams) -> Spectrum:
    return Spectrum((0.0, critical_gap(p)), (1, p.n_excited),
                    label=f"critical(n={p.n},a={p.a:g})")


def critical_peak_heat_capacity(n: int, beta0: float = 1.0) -> tuple[float, float]:
    """Ground weight a maximizing C(beta0) of the critical bath; returns (a, C).

    The search runs over logit(a) so the open interval (2**-n, 1) maps onto
    the real line.
    """
    lo = -n * LOG2 - math.log1p(-(2.0 ** -n))  # logit(2**-n)

    def neg_c(t: float) -> float:
        a = 1.0 / (1.0 + math.exp(-(lo + math.exp(t))))
        if not a < 1.0:
            return 0.0
        return -heat_capacity(critical_degenerate(CriticalParams(n, a, beta0)), beta0)

    res = minimize_scalar(neg_c, bounds=(-20.0, math.log(2.0 * n * LOG2 + 60.0)), method="bounded",
                          options={"xatol": 1e-10})
    a = 1.0 / (1.0 + math.exp(-(lo + math.exp(res.x))))
    return a, -float(res.fun)


def from_qubit_energies(energies: Sequence[float], rel_tol: float = 1e-12) -> Spectrum:
    """Product spectrum of independent qubits with individual gaps.

    Subset sums that agree to ``rel_tol`` are merged into one level.
    """
    if len(energies) > 20:
        raise ValueError("explicit product spectra are limited to 20 qubits")
    levels: dict[float, int] = {0.0: 1}
    for e in energies:
        nxt: dict[float, int] = dict(levels)
        for lev, g in levels.items():
            nxt[lev + e] = nxt.get(lev + e, 0) + g
        levels = nxt
    es = sorted(levels)
    scale = max(1.0, abs(es[-1]))
    out_e: list[float] = []
    out_g: list[int] = []
    for e in es:
        if out_e and e - out_e[-1] <= rel_tol * scale:
            out_g[-1] += levels[e]
        else:
            out_e.append(e)
            out_g.append(levels[e])
    return Spectrum(tuple(out_e), tuple(out_g), label=f"product({len(energies)} qubits)")


def build_spectrum(block: dict) -> Spectrum:
    """Build a spectrum from a JSON-style parameter block.

    ``{"family": "engineered", "n": 8, "alpha": 3, "beta0": 1}``,
    ``{"family": "critical", "n": 8, "a": 0.5}``,
    ``{"family": "noninteracting", "n": 8, "gap": 1}`` or
    ``{"family": "custom", "energies": [...], "degeneracies": [...]}``.
    """
    family = block.get("family")
    if family == "engineered":
        return engineered_interacting(EngineeredParams(int(block["n"]), float(block.get("alpha", 3.0)),
                                                       float(block.get("beta0", 1.0))))
    if family == "critical":
        return critical_degenerate(CriticalParams(int(block["n"]), float(block["a"]),
                                                  float(block.get("beta0", 1.0))))
    if family == "noninteracting":
        return non_interacting_qubits(int(block["n"]), float(block.get("gap", 1.0)))
    if family == "custom":
        return Spectrum.from_levels(block["energies"], block["degeneracies"],
                                    label=block.get("label", "custom"))
    raise ValueError(f"unknown spectrum family {family!r}")
