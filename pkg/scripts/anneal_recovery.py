"""Anneal bath energies at fixed engineered degeneracies and compare with the ansatz, per seed."""

import argparse
import time

from finitebath.engine import engineered_q, run_engineered
from finitebath.optimizer import AnnealConfig, anneal_energies
from finitebath.spectra import EngineeredParams, engineered_degeneracy


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=4)
    ap.add_argument("--alpha", type=float, default=3.0)
    ap.add_argument("--seeds", type=int, default=10)
    ap.add_argument("--steps", type=int, default=AnnealConfig.steps)
    a = ap.parse_args()

    q = engineered_q(EngineeredParams(a.n, a.alpha))
    _, ref = run_engineered(a.n, a.alpha)
    degs = [engineered_degeneracy(i) for i in range(a.n + 1)]
    print(f"n={a.n} target q={q:.6e} ansatz sigma={ref.sigma:.6f}")
    hits = 0
    for seed in range(a.seeds):
        t = time.perf_counter()
        res = anneal_energies(a.n, degs, AnnealConfig(target_q=q, seed=seed, steps=a.steps))
        out = res.outcome
        ok = out.sigma <= 1.05 * ref.sigma and abs(out.q_excited / q - 1) <= 0.01
        hits += ok
        print(f"seed {seed:>3}: sigma={out.sigma:.6f} q/q_t={out.q_excited / q:.5f} "
              f"{'ok' if ok else '--'} ({time.perf_counter() - t:.1f} s)")
    print(f"{hits}/{a.seeds} seeds within 5% of the ansatz at q within 1%")


if __name__ == "__main__":
    main()
