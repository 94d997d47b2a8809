"""Write CSV and SVG outputs for the three figure reproductions.

Usage: python scripts/reproduce_figures.py [outdir] [--threads N]
"""

import argparse
import pathlib

from finitebath.cli import main


def run(outdir: pathlib.Path, threads: int) -> None:
    outdir.mkdir(parents=True, exist_ok=True)
    for fig in ("fig1", "fig2", "fig3"):
        for fmt in ("csv", "svg"):
            target = outdir / f"{fig}.{fmt}"
            code = main([fig, "--format", fmt, "--out", str(target), "--threads", str(threads)])
            if code:
                raise SystemExit(code)
            print(f"wrote {target}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir", nargs="?", default="outputs")
    ap.add_argument("--threads", type=int, default=1)
    a = ap.parse_args()
    run(pathlib.Path(a.outdir), a.threads)
