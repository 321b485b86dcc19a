"""Run the bundled experiment configs and print the per-n table and rate fits.

    python scripts/run_rates.py                 # every config in scripts/configs
    python scripts/run_rates.py d2_iid d3_iid   # a selection
    python scripts/run_rates.py --out results   # also write CSV files
"""
import argparse
import math
from pathlib import Path

from aktfourier.experiments import ExperimentConfig, emit_results, fit_rate, run_experiment

CONFIG_DIR = Path(__file__).parent / "configs"


def report(name, cfg, rows):
    print(f"== {name}: d={cfg.dimension}, sampler={cfg.sampler.kind}, trials={cfg.trials}")
    print(f"{'n':>7} {'mean':>10} {'stderr':>10} {'reference':>10} {'mean*sqrt(n)':>13}")
    for r in rows:
        print(f"{r.n:>7} {r.mean:>10.5f} {r.stderr:>10.5f} {r.paper_bound:>10.4f} {r.mean * math.sqrt(r.n):>13.4f}")
    pts = [(r.n, r.mean) for r in rows]
    if len(pts) >= 3:
        for model in ("power", "sqrtlog"):
            f = fit_rate(pts, model)
            beta = f"beta={f.beta:.4f} " if f.beta is not None else ""
            print(f"   {model:8s} C={f.C:.4f} {beta}rel.mse={f.mse_relative:.2e}")


def main():
    ap = argparse.ArgumentParser(description=__doc__, formatter_class=argparse.RawDescriptionHelpFormatter)
    ap.add_argument("names", nargs="*", help="config names without .json")
    ap.add_argument("--out", type=Path, help="directory for CSV output")
    ap.add_argument("--jobs", type=int, default=1)
    args = ap.parse_args()
    names = args.names or sorted(p.stem for p in CONFIG_DIR.glob("*.json"))
    for name in names:
        cfg = ExperimentConfig.from_json_file(CONFIG_DIR / f"{name}.json")
        records, rows = run_experiment(cfg, jobs=args.jobs)
        report(name, cfg, rows)
        if args.out:
            args.out.mkdir(parents=True, exist_ok=True)
            emit_results(records, rows, None, "csv", args.out / f"{name}.csv", cfg)


if __name__ == "__main__":
    main()
