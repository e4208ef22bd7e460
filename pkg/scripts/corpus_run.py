"""Run the bundled end-to-end corpus (or any config) and write its report."""

import argparse
import sys

from pbpsamp.scenario import load_config, run_scenario


def main(argv=None):
    p = argparse.ArgumentParser(description=__doc__)
    p.add_argument("config", nargs="?", default="corpus")
    p.add_argument("--seed", type=int)
    p.add_argument("--count", type=int, help="override the corpus size")
    p.add_argument("--out", default="reports")
    args = p.parse_args(argv)
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg["seed"] = args.seed
    if args.count is not None and "corpus" in cfg:
        cfg["corpus"] = {**cfg["corpus"], "count": args.count}
    report = run_scenario(cfg)
    paths = report.write(args.out, cfg.get("name"), ndjson=True)
    agg = report.aggregate
    print(f"{agg['instances']} instances, max error {agg['max_error']} ({agg['max_error_display']}) vs eps {agg['epsilon']}")
    print(f"gate failures: {agg['gate_failures']}")
    for kind, path in sorted(paths.items()):
        print(f"wrote {path}")
    return 0 if report.passed else 1


if __name__ == "__main__":
    sys.exit(main())
