"""Print sigma(n) for the max-cool policies and the collisional chains, with doubling ratios."""

import argparse

from finitebath.collisional import FAMILIES, make_schedule, run_chain
from finitebath.engine import POLICIES, engineered_q, run_engineered
from finitebath.spectra import EngineeredParams


def table(n_max: int, alpha: float) -> list[tuple[str, int, float, float]]:
    rows = []
    ns = [2**k for k in range(2, n_max.bit_length()) if 2**k <= n_max]
    for label in POLICIES + FAMILIES:
        prev = None
        for n in ns:
            if label in POLICIES:
                sigma = run_engineered(n, alpha, 1.0, label)[1].sigma
            else:
                q = engineered_q(EngineeredParams(n, alpha))
                sigma = run_chain(make_schedule(label, n, q)).sigma
            rows.append((label, n, sigma, prev / sigma if prev else float("nan")))
            prev = sigma
    return rows


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n-max", type=int, default=1024)
    ap.add_argument("--alpha", type=float, default=3.0)
    a = ap.parse_args()
    print(f"{'protocol':<12} {'n':>6} {'sigma':>14} {'sigma(n/2)/sigma(n)':>20}")
    for label, n, sigma, ratio in table(a.n_max, a.alpha):
        print(f"{label:<12} {n:>6} {sigma:>14.6e} {ratio:>20.4f}")
