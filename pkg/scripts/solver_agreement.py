"""Compare solver verdicts against the built-in oracle on random instances.

Every instance is encoded in all six fragments at n = chi-1, chi, chi+1 and sent
to each configured solver. Disagreements are listed; timing is summarised per
fragment.
"""

import argparse
import random
import statistics
import tempfile
from collections import defaultdict
from pathlib import Path

from petrismt.concurrency import chromatic_number
from petrismt.encoder import FRAGMENTS, EncodingConfig, encode, print_smtlib
from petrismt.generators import random_graph
from petrismt.solver import load_solver_config, run_solver


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--solvers", type=Path, default=Path(__file__).resolve().parent.parent / "data" / "solvers.json")
    ap.add_argument("--instances", type=int, default=20)
    ap.add_argument("--max-places", type=int, default=10)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    specs = load_solver_config(args.solvers)
    rng = random.Random(args.seed)
    times = defaultdict(list)
    disagreements = []
    with tempfile.TemporaryDirectory() as tmp:
        for i in range(args.instances):
            places, rel = random_graph(rng, rng.randint(2, args.max_places))
            num = {p: k for k, p in enumerate(places, start=1)}
            chi = chromatic_number(places, rel)
            for n in sorted({max(1, chi - 1), chi, chi + 1}):
                for fragment in FRAGMENTS:
                    script = encode(places, rel, num, EncodingConfig(fragment, n, emit_status_hint=True))
                    path = Path(tmp) / f"g{i}_{fragment}_n{n}.smt2"
                    path.write_text(print_smtlib(script))
                    for spec in specs:
                        run = run_solver(spec, path)
                        times[(spec.name, fragment)].append(run.wall_time)
                        if run.status != script.status():
                            disagreements.append((path.name, spec.name, run.status, script.status()))

    print("solver\tfragment\truns\tmedian_s\tmax_s")
    for (name, fragment), ts in sorted(times.items()):
        print(f"{name}\t{fragment}\t{len(ts)}\t{statistics.median(ts):.3f}\t{max(ts):.3f}")
    print(f"{len(disagreements)} disagreements")
    for d in disagreements:
        print("  " + "\t".join(d))


if __name__ == "__main__":
    main()
