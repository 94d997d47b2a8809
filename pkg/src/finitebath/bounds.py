"""Closed-form and variational bounds on entropy production.

Covers the constrained relative-entropy minimum M(x, d) with its quadratic
lower bound, the linear-decay floor for non-interacting baths, the
dimension bound for arbitrary baths, the heat-capacity bound, and the exact
term-by-term energy bookkeeping of the engineered bath under the
level-shift permutation.
"""

from __future__ import annotations

import math
from typing import NamedTuple

from scipy.optimize import brentq, minimize_scalar

from .spectra import EngineeredParams, engineered_r
from .thermo import LOG2, Spectrum, heat_capacity

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def binary_entropy(a: float) -> float:
    return -_xlogx(a) - _xlogx(1.0 - a)


def binary_kl(a: float, b: float) -> float:
    """s(a, b) = a log(a/b) + (1-a) log((1-a)/(1-b)); infinite off-support."""
    out = 0.0
    for x, y in ((a, b), (1.0 - a, 1.0 - b)):
        if x > 0.0:
            if y <= 0.0:
                return math.inf
            out += x * (math.log(x) - math.log(y))
    return out


def _xlogx(p: float) -> float:
    return 0.0 if p <= 0.0 else p * math.log(p)


def _flat_entropy(a: float, d: int) -> float:
    # Entropy of (1-a, a/(d-1), ..., a/(d-1)); increasing on [0, (d-1)/d].
    return binary_entropy(a) + a * math.log(d - 1) if d > 2 else binary_entropy(a)


def _invert_flat_entropy(y: float, d: int) -> float:
    top = (d - 1) / d
    if y <= 0.0:
        return 0.0
    if y >= math.log(d):
        return top
    return brentq(lambda a: _flat_entropy(a, d) - y, 0.0, top, xtol=1e-15, rtol=8.9e-16, maxiter=500)


def m_function(x: float, d: int = 2, scan_points: int = 257) -> float:
    """Smallest binary relative entropy s(a, b) compatible with an entropy gap x.

    The minimum runs over a, b in [0, (d-1)/d] subject to
    h(a) - h(b) + (a - b) log(d - 1) = x, for |x| <= log d. The left-hand side
    is increasing in a, so for each b the matching a is a bracketed root;
    the outer minimization over b is a grid scan refined by golden section.
    ``M(log d, d)`` is infinite.
    """
    if d < 2 or int(d) != d:
        raise ValueError("d must be an integer >= 2")
    log_d = math.log(d)
    if abs(x) > log_d * (1 + 1e-15):
        raise ValueError(f"no feasible (a, b) for x={x} with d={d}")
    if x == 0.0:
        return 0.0
    x = max(-log_d, min(log_d, x))
    b_lo = _invert_flat_entropy(max(0.0, -x), d)
    b_hi = _invert_flat_entropy(min(log_d, log_d - x), d)

    def objective(b: float) -> float:
        a = _invert_flat_entropy(_flat_entropy(b, d) + x, d)
        return binary_kl(a, b)

    if b_hi - b_lo <= 0.0:
        return objective(b_lo)
    grid = [b_lo + (b_hi - b_lo) * k / (scan_points - 1) for k in range(scan_points)]
    vals = [objective(b) for b in grid]
    k = min(range(scan_points), key=vals.__getitem__)
    lo, hi = grid[max(k - 1, 0)], grid[min(k + 1, scan_points - 1)]
    best = vals[k]

    c = hi - GOLDEN * (hi - lo)
    e = lo + GOLDEN * (hi - lo)
    fc, fe = objective(c), objective(e)
    while hi - lo > 1e-13 * max(1.0, abs(hi)):
        if fc < fe:
            hi, e, fe = e, c, fc
            c = hi - GOLDEN * (hi - lo)
            fc = objective(c)
        else:
            lo, c, fc = c, e, fe
            e = lo + GOLDEN * (hi - lo)
            fe = objective(e)
    return min(best, fc, fe)


def m_quadratic_lower(x: float, d: int = 2) -> float:
    return x * x / (3.0 * math.log(d) ** 2)


def noninteracting_lower_bound(dS_system: float, d: int, n: int) -> float:
    """Floor (dS / log d)**2 / (3 n) for any bath of n non-interacting d-level units."""
    if n < 1 or d < 2:
        raise ValueError("need n >= 1 and d >= 2")
    return (dS_system / math.log(d)) ** 2 / (3.0 * n)


def rw_lower_bound(dS_system: float, env_dim_log: float) -> float:
    """2 dS**2 / (log**2(d_B - 1) + 4) with ``env_dim_log = log d_B``."""
    if env_dim_log < LOG2 * (1 - 1e-15):
        raise ValueError("environment dimension must be at least 2")
    log_dm1 = env_dim_log + math.log1p(-math.exp(-env_dim_log))
    return 2.0 * dS_system**2 / (log_dm1**2 + 4.0)


def max_heat_capacity(spectrum: Spectrum, gamma_a: float, gamma_b: float, grid: int = 513) -> tuple[float, float]:
    """Maximum of C(gamma) over the closed interval; returns (gamma, C)."""
    lo, hi = sorted((gamma_a, gamma_b))
    if not lo > 0:
        raise ValueError("temperatures must be positive")
    if hi - lo <= 1e-15 * hi:
        return lo, heat_capacity(spectrum, lo)
    pts = [lo + (hi - lo) * k / (grid - 1) for k in range(grid)]
    vals = [heat_capacity(spectrum, g) for g in pts]
    k = max(range(grid), key=vals.__getitem__)
    a, b = pts[max(k - 1, 0)], pts[min(k + 1, grid - 1)]
    res = minimize_scalar(lambda g: -heat_capacity(spectrum, g), bounds=(a, b), method="bounded",
                          options={"xatol": 1e-12 * hi})
    if -res.fun > vals[k]:
        return float(res.x), float(-res.fun)
    return pts[k], vals[k]


def heat_capacity_lower_bound(betaQ: float, spectrum: Spectrum, beta: float, beta_star: float) -> float:
    """(beta Q)**2 / (2 max C) with C maximized between beta and beta*.

    A bath without fluctuations (max C = 0) cannot absorb heat; should a
    nonzero ``betaQ`` be supplied anyway the bound is ``inf``.
    """
    if betaQ == 0.0:
        return 0.0
    _, c_max = max_heat_capacity(spectrum, beta, beta_star)
    if c_max <= 0.0:
        return math.inf
    return betaQ * betaQ / (2.0 * c_max)


def integral_F(x: float, a: float, b: float) -> float:
    """Antiderivative of cos(a x) log(b - cos(a x)) for b > 1, with F(0) = 0.

    The arctangent term is continued across the poles of tan(a x / 2) so
    that F is continuous in x.
    """
    if not b > 1.0:
        raise ValueError("integral_F needs b > 1")
    if a == 0.0:
        return x * math.log(b - 1.0)
    u = a * x
    root = math.sqrt(b * b - 1.0)
    c = (1.0 + b) / root
    theta = 0.5 * u
    phase = math.atan2(c * math.sin(theta), math.cos(theta))
    # The continuous branch stays within pi/2 of theta.
    phase += 2.0 * math.pi * round((theta - phase) / (2.0 * math.pi))
    return (2.0 * root * phase + math.sin(u) * (math.log(b - math.cos(u)) - 1.0) - b * u) / a


class AppendixBTerms(NamedTuple):
    A: float
    B: float
    C: float
    D: float
    betaQ_closed: float


def appendix_b_terms(p: EngineeredParams) -> AppendixBTerms:
    """Exact decomposition beta * dE_B = A - B - C - D for the level-shift run.

    The top-level occupation enters through Omega_n g_n-type factors
    2**(i-n-1) r_n, and Z = r_0 + sum_{i>=1} r_i / 2.
    """
    n = p.n
    r = engineered_r(n, p.alpha)
    z = math.fsum([r[0]] + [0.5 * ri for ri in r[1:]])
    top = [math.ldexp(r[n], i - n - 1) for i in range(n + 1)]
    log_r = [math.log(ri) for ri in r]
    A = math.fsum((r[i - 1] - r[i] + top[i]) * i * LOG2 for i in range(1, n + 1)) / (2 * z)
    B = math.fsum((r[i - 1] - r[i]) * log_r[i] for i in range(1, n + 1)) / (2 * z)
    C = math.fsum(top[i] * log_r[i] for i in range(1, n + 1)) / (2 * z)
    D = (math.ldexp(r[n], -n) - r[0]) * log_r[0] / (2 * z)
    return AppendixBTerms(A, B, C, D, math.fsum((A, -B, -C, -D)))


def engineered_partition_closed(n: int, alpha: float) -> float:
    return 0.5 * (n + n ** (1.0 - alpha) + 2.0 * n ** (-alpha))


def term_a_closed(n: int, alpha: float) -> float:
    """Closed form of A, keeping the 2**-n correction."""
    return (1.0 - (3.0 - 2.0 ** -n) / (n ** (alpha + 1.0) + n + 2.0)) * LOG2


def sigma_quadratic_bound(n: int, alpha: float = 3.0) -> float:
    """Leading 2 pi**2 / n**2 behaviour of the engineered protocol (alpha > 2)."""
    if not alpha > 2:
        raise ValueError("the quadratic estimate is only derived for alpha > 2")
    return 2.0 * math.pi**2 / n**2
