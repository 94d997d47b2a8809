import math
from collections import Counter

import numpy as np
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from finitebath.bounds import binary_entropy, binary_kl, m_function, noninteracting_lower_bound
from finitebath.collisional import Schedule, run_chain
from finitebath.engine import max_cool
from finitebath.thermo import (
    Chunk,
    LevelDistribution,
    Spectrum,
    SystemDiag,
    entropy,
    gibbs,
    gibbs_mean_energy,
    heat_capacity,
    log_partition,
    mean_energy,
    relative_entropy,
    solve_beta_star,
)

from dense_oracle import dense_max_cool

weights = st.floats(0.05, 1.0)


@st.composite
def spectra(draw, max_levels=6, max_deg=12):
    n = draw(st.integers(1, max_levels))
    start = draw(st.floats(-3.0, 3.0))
    gaps = draw(st.lists(st.floats(0.01, 2.0), min_size=n - 1, max_size=n - 1))
    es = [start + math.fsum(gaps[:k]) for k in range(n)]
    degs = draw(st.lists(st.integers(1, max_deg), min_size=n, max_size=n))
    return Spectrum.from_levels(es, degs)


@st.composite
def systems(draw):
    d = draw(st.integers(2, 3))
    w = draw(st.lists(weights, min_size=d, max_size=d))
    s = sum(w)
    return SystemDiag(tuple(x / s for x in w))


def level_dist(spec, w):
    s = sum(w)
    return LevelDistribution(spec, tuple(Chunk(i, g, math.log(x / s / g))
                                         for i, (x, g) in enumerate(zip(w, spec.degeneracies))))


@given(spectra(), st.data(), st.floats(0.2, 3.0))
def test_pythagorean_identity(spec, data, beta):
    assume(spec.n_levels >= 2)
    w = data.draw(st.lists(weights, min_size=spec.n_levels, max_size=spec.n_levels))
    sigma = level_dist(spec, w)
    e = mean_energy(spec, sigma)
    lo, hi = spec.energies[0], gibbs_mean_energy(spec, 1e-9)
    assume(lo + 1e-6 < e < hi - 1e-6)
    bstar = solve_beta_star(spec, e).beta_star
    omega, tau = gibbs(spec, bstar), gibbs(spec, beta)
    lhs = relative_entropy(sigma, tau)
    rhs = relative_entropy(sigma, omega) + relative_entropy(omega, tau)
    assert abs(lhs - rhs) <= 1e-10
    # Gibbs maximizes entropy at fixed mean energy.
    assert entropy(sigma) <= entropy(omega) + 1e-12


@given(spectra(), st.floats(0.05, 5.0), st.floats(0.01, 1.0))
def test_mean_energy_monotone_and_capacity_nonnegative(spec, g, dg):
    assume(spec.n_levels >= 2)
    assert gibbs_mean_energy(spec, g + dg) < gibbs_mean_energy(spec, g)
    assert heat_capacity(spec, g) >= 0.0


@settings(max_examples=30)
@given(st.floats(-0.65, 0.65), st.floats(-0.65, 0.65), st.floats(0.0, 1.0), st.sampled_from([2, 3]))
def test_m_convex(x1, x2, p, d):
    mid = p * x1 + (1 - p) * x2
    assert m_function(mid, d) <= p * m_function(x1, d) + (1 - p) * m_function(x2, d) + 1e-8


@given(spectra(), systems(), st.floats(0.1, 4.0))
def test_sorted_fill_invariants(spec, system, beta):
    joint, out = max_cool(system, spec, beta)
    log_z = log_partition(spec, beta)
    expected = Counter()
    for p in system.populations:
        for e, g in zip(spec.energies, spec.degeneracies):
            expected[math.log(p) + (-beta * e - log_z)] += g
    assert joint.value_multiset() == expected
    assert out.identity_residual <= 1e-10
    assert out.sigma >= -1e-15 and out.mutual_info >= -1e-15 and out.rel_ent_bath >= -1e-15
    d = dense_max_cool(spec, system.populations, beta)
    assert abs(out.sigma - d.sigma) <= 1e-12
    assert abs(out.q_excited - d.q_excited) <= 1e-12


@given(spectra(max_levels=4, max_deg=8), systems(), st.floats(0.2, 3.0), st.integers(0, 2**32 - 1))
def test_ground_occupation_beats_random_permutations(spec, system, beta, seed):
    assume(spec.dimension <= 64)
    best = 1.0 - max_cool(system, spec, beta)[1].q_excited
    vals = dense_max_cool(spec, system.populations, beta).joint.ravel()
    rng = np.random.default_rng(seed)
    d_b = spec.dimension
    for _ in range(50):
        assert rng.permutation(vals)[:d_b].sum() <= best + 1e-12


@given(st.lists(st.floats(0.01, 0.5), min_size=1, max_size=12))
def test_chain_consistency(pops):
    pops = sorted(pops, reverse=True)
    out = run_chain(Schedule(tuple(pops)))
    prev = [0.5] + pops[:-1]
    parts = [binary_kl(a, b) for a, b in zip(prev, pops)]
    dS_bath = math.fsum(binary_entropy(a) - binary_entropy(b) for a, b in zip(prev, pops))
    n = len(pops)
    link = n * m_function(dS_bath / n, 2)
    assert out.sigma >= math.fsum(parts) - 1e-12
    assert math.fsum(parts) >= link - 1e-9
    assert link >= noninteracting_lower_bound(out.dS_system, 2, n) - 1e-12
