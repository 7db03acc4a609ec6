"""Regenerate every experiment table into one directory.

    python scripts/reproduce_all.py --out results --threads 4

Takes several hours single-threaded at the default run counts; pass
``--runs`` to override all of them for a quick look.
"""

import argparse
import sys
import time

from rulsif.cli import DEFAULT_RUNS, main


def run(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--out", default="results")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--threads", type=int, default=1)
    parser.add_argument("--runs", type=int, default=None)
    parser.add_argument("--fast", action="store_true")
    args = parser.parse_args(argv)
    for name in DEFAULT_RUNS:
        start = time.perf_counter()
        cmd = ["repro", name, "--out", args.out, "--seed", str(args.seed), "--threads", str(args.threads)]
        if args.runs is not None:
            cmd += ["--runs", str(args.runs)]
        if args.fast:
            cmd.append("--fast")
        code = main(cmd)
        print(f"{name}: exit {code} in {time.perf_counter() - start:.0f}s", file=sys.stderr)
        if code:
            return code
    return 0


if __name__ == "__main__":
    sys.exit(run())
