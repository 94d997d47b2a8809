"""Row builders behind the command-line experiments.

Every function returns plain dicts keyed by the column tuples below, so the
same rows serialize to CSV or JSON. Column tuples are versioned through
``SCHEMAS``; bump the version when a column changes.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Iterable, Sequence

from .bounds import (
    appendix_b_terms,
    heat_capacity_lower_bound,
    noninteracting_lower_bound,
    rw_lower_bound,
    sigma_quadratic_bound,
)
from .collisional import FAMILIES, make_schedule, run_chain
from .engine import POLICIES, ProcessOutcome, engineered_q, max_cool
from .spectra import (
    CriticalParams,
    EngineeredParams,
    critical_degenerate,
    engineered_interacting,
    non_interacting_qubits,
)
from .thermo import LOG2, Spectrum, SystemDiag, gibbs_mean_energy, heat_capacity, solve_beta_star

Q_CONVENTIONS = ("exact", "half", "caption")

OUTCOME_COLUMNS = ("q", "betaQ", "dS_system", "mutual_info", "rel_ent_bath", "sigma", "residual")
BOUND_COLUMNS = ("lb_nonint", "lb_rw", "lb_heatcap", "ub_quadratic")
ERASURE_COLUMNS = ("n", "alpha", "beta", "policy") + OUTCOME_COLUMNS + BOUND_COLUMNS
COLLISIONAL_COLUMNS = ("n", "alpha", "beta", "policy", "q_convention") + OUTCOME_COLUMNS + BOUND_COLUMNS
BOUNDS_COLUMNS = ("n", "alpha", "beta", "policy", "q", "dS_system", "sigma") + BOUND_COLUMNS + (
    "A", "B", "C", "D", "betaQ_closed")
HEAT_COLUMNS = ("panel", "family", "n", "gamma", "heat_capacity", "c_over_n", "c_over_n2")
CRITICAL_COLUMNS = ("n", "a", "x", "beta", "q_convention", "q_target", "q_formula") + OUTCOME_COLUMNS + (
    "guide_inv_n", "guide_inv_n2")
FIG1_COLUMNS = ("n", "curve", "alpha", "beta", "q_convention") + OUTCOME_COLUMNS

SCHEMAS = {
    "erasure": ("erasure/1", ERASURE_COLUMNS),
    "collisional": ("collisional/1", COLLISIONAL_COLUMNS),
    "bounds": ("bounds/1", BOUNDS_COLUMNS),
    "heat": ("heat/1", HEAT_COLUMNS),
    "critical": ("critical/1", CRITICAL_COLUMNS),
    "fig1": ("fig1/1", FIG1_COLUMNS),
}

FIG1_CURVES = (
    "engineered_sorted",
    "engineered_level_shift",
    "chain_linear",
    "chain_geodesic",
    "chain_geometric",
    "ref_nonint",
    "ref_rw",
    "ref_quadratic",
)


def map_ordered(fn: Callable, items: Iterable, threads: int = 1) -> list:
    """``list(map(fn, items))``, spread over worker processes when threads > 1."""
    items = list(items)
    if threads <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def target_q(n: int, alpha: float, beta: float = 1.0, convention: str = "exact") -> float:
    """Final excited population used to line protocols up against the engineered bath.

    exact: the engineered max-cooling value n**-alpha / (2 Z); half: n**-alpha / 2;
    caption: n**-alpha.
    """
    if convention == "exact":
        return engineered_q(EngineeredParams(n, alpha, beta))
    if convention == "half":
        return 0.5 * float(n) ** -alpha
    if convention == "caption":
        return float(n) ** -alpha
    raise ValueError(f"unknown q convention {convention!r}")


def outcome_columns(out: ProcessOutcome) -> dict:
    return {
        "q": out.q_excited,
        "betaQ": out.beta_Q,
        "dS_system": out.dS_system,
        "mutual_info": out.mutual_info,
        "rel_ent_bath": out.rel_ent_bath,
        "sigma": out.sigma,
        "residual": out.identity_residual,
    }


def heatcap_bound(spectrum: Spectrum, beta: float, out: ProcessOutcome) -> float:
    """(beta Q)**2 / (2 max C) with beta* matching the post-protocol bath energy."""
    if out.heat_Q == 0.0:
        return 0.0
    target = gibbs_mean_energy(spectrum, beta) + out.heat_Q
    beta_star = solve_beta_star(spectrum, target).beta_star
    return heat_capacity_lower_bound(out.beta_Q, spectrum, beta, max(beta_star, 1e-12))


def bound_columns(n: int, alpha: float, dS_system: float, lb_heatcap: float = math.nan) -> dict:
    return {
        "lb_nonint": noninteracting_lower_bound(dS_system, 2, n),
        "lb_rw": rw_lower_bound(dS_system, n * LOG2),
        "lb_heatcap": lb_heatcap,
        "ub_quadratic": sigma_quadratic_bound(n, alpha) if alpha > 2 else math.nan,
    }


def erasure_row(n: int, alpha: float = 3.0, beta: float = 1.0, policy: str = "sorted",
                with_heatcap: bool = True) -> dict:
    spec = engineered_interacting(EngineeredParams(n, alpha, beta))
    _, out = max_cool(SystemDiag.maximally_mixed(), spec, beta, policy)
    lb_hc = heatcap_bound(spec, beta, out) if with_heatcap else math.nan
    return {"n": n, "alpha": alpha, "beta": beta, "policy": policy,
            **outcome_columns(out), **bound_columns(n, alpha, out.dS_system, lb_hc)}


def _erasure_job(args):
    return erasure_row(*args)


def erasure_sweep(n_list: Sequence[int], alpha: float = 3.0, beta: float = 1.0,
                  policies: Sequence[str] = POLICIES, threads: int = 1) -> list[dict]:
    jobs = [(n, alpha, beta, p) for n in n_list for p in policies]
    return map_ordered(_erasure_job, jobs, threads)


def collisional_row(family: str, n: int, alpha: float = 3.0, beta: float = 1.0,
                    q_convention: str = "exact") -> dict:
    q = target_q(n, alpha, beta, q_convention)
    out = run_chain(make_schedule(family, n, q), beta)
    return {"n": n, "alpha": alpha, "beta": beta, "policy": family, "q_convention": q_convention,
            **outcome_columns(out), **bound_columns(n, alpha, out.dS_system)}


def collisional_sweep(n_list: Sequence[int], families: Sequence[str] = FAMILIES, alpha: float = 3.0,
                      beta: float = 1.0, q_convention: str = "exact") -> list[dict]:
    return [collisional_row(f, n, alpha, beta, q_convention) for n in n_list for f in families]


def bounds_row(n: int, alpha: float = 3.0, beta: float = 1.0, policy: str = "level_shift") -> dict:
    row = erasure_row(n, alpha, beta, policy)
    terms = appendix_b_terms(EngineeredParams(n, alpha, beta))
    out = {k: row[k] for k in ("n", "alpha", "beta", "policy", "q", "dS_system", "sigma") + BOUND_COLUMNS}
    out.update(terms._asdict())
    return out


def _bounds_job(args):
    return bounds_row(*args)


def bounds_sweep(n_list: Sequence[int], alpha: float = 3.0, beta: float = 1.0,
                 policy: str = "level_shift", threads: int = 1) -> list[dict]:
    return map_ordered(_bounds_job, [(n, alpha, beta, policy) for n in n_list], threads)


def gamma_grid(lo: float, hi: float, points: int) -> list[float]:
    """Evenly spaced grid whose endpoints are exactly ``lo`` and ``hi``."""
    if points < 2:
        raise ValueError("need at least two grid points")
    grid = [lo + (hi - lo) * k / (points - 1) for k in range(points)]
    grid[0], grid[-1] = lo, hi
    return grid


def _heat_spectrum(family: str, n: int, alpha: float, beta0: float) -> Spectrum:
    if family == "engineered":
        return engineered_interacting(EngineeredParams(n, alpha, beta0))
    if family == "noninteracting":
        return non_interacting_qubits(n, 1.0)
    raise ValueError(f"heat-capacity family must be engineered or noninteracting, got {family!r}")


def heat_rows(n_list: Sequence[int], families: Sequence[str], gammas: Sequence[float],
              alpha: float = 3.0, beta0: float = 1.0, panel: str = "main") -> list[dict]:
    rows = []
    for fam in families:
        for n in n_list:
            spec = _heat_spectrum(fam, n, alpha, beta0)
            for g in gammas:
                c = heat_capacity(spec, g)
                rows.append({"panel": panel, "family": fam, "n": n, "gamma": g, "heat_capacity": c,
                             "c_over_n": c / n, "c_over_n2": c / n**2})
    return rows


def fig2_rows(n_list: Sequence[int], alpha: float = 3.0, beta0: float = 1.0,
              gamma_lo: float = 0.5, gamma_hi: float = 2.0, points: int = 61) -> list[dict]:
    """Main panel: C/n against gamma; inset: C(n) at gamma = beta0."""
    fams = ("engineered", "noninteracting")
    main = heat_rows(n_list, fams, gamma_grid(gamma_lo, gamma_hi, points), alpha, beta0, "main")
    inset = heat_rows(n_list, fams, [beta0], alpha, beta0, "inset")
    return main + inset


def critical_a_for_q(n: int, q: float) -> float:
    """Ground weight a whose critical protocol leaves excited population q.

    The protocol gives q = (1 - x)/2 with x = a - (1 - a)/N and N = 2**n - 1,
    which inverts to a = x + (1 - x) 2**-n.
    """
    if not (0.0 < q < 0.5):
        raise ValueError("q must lie in (0, 1/2)")
    x = 1.0 - 2.0 * q
    return x + math.ldexp(1.0 - x, -n)


def critical_row(n: int, a: float, beta: float = 1.0, q_convention: str = "", q_target: float = math.nan) -> dict:
    spec = critical_degenerate(CriticalParams(n, a, beta))
    _, out = max_cool(SystemDiag.maximally_mixed(), spec, beta, "sorted")
    x = a - (1.0 - a) / ((1 << n) - 1)
    return {"n": n, "a": a, "x": x, "beta": beta, "q_convention": q_convention, "q_target": q_target,
            "q_formula": 0.5 * (1.0 - x), **outcome_columns(out)}


def fig3_rows(n_list: Sequence[int], alpha: float = 3.0, beta: float = 1.0,
              q_convention: str = "exact") -> list[dict]:
    """Critical-bath protocol at the engineered q target, with 1/n and 1/n**2 guides.

    Both guides pass through the first data point.
    """
    rows = []
    for n in n_list:
        q = target_q(n, alpha, beta, q_convention)
        rows.append(critical_row(n, critical_a_for_q(n, q), beta, q_convention, q))
    if rows:
        n0, s0 = rows[0]["n"], rows[0]["sigma"]
        for r in rows:
            r["guide_inv_n"] = s0 * n0 / r["n"]
            r["guide_inv_n2"] = s0 * (n0 / r["n"]) ** 2
    return rows


def _fig1_engineered(args):
    n, alpha, beta, policy = args
    return erasure_row(n, alpha, beta, policy, with_heatcap=False)


def fig1_rows(n_list: Sequence[int], alpha: float = 3.0, beta: float = 1.0, q_convention: str = "exact",
              curves: Sequence[str] = FIG1_CURVES, threads: int = 1) -> list[dict]:
    """One row per (n, curve).

    Engineered curves always use the exact engineered bath; ``q_convention``
    sets the target of the collisional chains and of the reference bounds.
    """
    curves = list(curves)
    if not curves:
        raise ValueError("no curves selected")
    unknown = [c for c in curves if c not in FIG1_CURVES]
    if unknown:
        raise ValueError(f"unknown curves {unknown}")
    policies = [c.removeprefix("engineered_") for c in curves if c.startswith("engineered_")]
    eng = map_ordered(_fig1_engineered, [(n, alpha, beta, p) for n in n_list for p in policies], threads)
    eng_by_key = {(r["n"], r["policy"]): r for r in eng}

    rows = []
    blank = dict.fromkeys(OUTCOME_COLUMNS, math.nan)
    for n in n_list:
        q = target_q(n, alpha, beta, q_convention)
        ds = binary_entropy_change(q)
        for curve in curves:
            row = {"n": n, "curve": curve, "alpha": alpha, "beta": beta, "q_convention": q_convention}
            if curve.startswith("engineered_"):
                src = eng_by_key[(n, curve.removeprefix("engineered_"))]
                row.update({k: src[k] for k in OUTCOME_COLUMNS})
            elif curve.startswith("chain_"):
                out = run_chain(make_schedule(curve.removeprefix("chain_"), n, q), beta)
                row.update(outcome_columns(out))
            else:
                ref = {
                    "ref_nonint": noninteracting_lower_bound(ds, 2, n),
                    "ref_rw": rw_lower_bound(ds, n * LOG2),
                    "ref_quadratic": sigma_quadratic_bound(n, alpha) if alpha > 2 else math.nan,
                }[curve]
                row.update(blank, q=q, dS_system=ds, sigma=ref)
            rows.append(row)
    return rows


def binary_entropy_change(q: float) -> float:
    """Entropy change of a qubit going from maximally mixed to excited population q."""
    h = -sum(p * math.log(p) for p in (q, 1.0 - q) if p > 0.0)
    return h - LOG2
