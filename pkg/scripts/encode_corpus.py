"""Generate random safe nets, encode each in all six fragments, print a stats table.

    python scripts/encode_corpus.py --nets 5 --out /tmp/corpus
"""

import argparse
import random
from dataclasses import dataclass
from pathlib import Path

from petrismt.concurrency import chromatic_number, net_relation
from petrismt.encoder import FRAGMENTS, EncodingConfig, encode, formula_stats, print_smtlib
from petrismt.generators import random_safe_net
from petrismt.net import format_net, numbering

COLUMNS = ["logic", "#variables", "card", "card_in", "card_out", "#asserts", "#ops"]


@dataclass
class CorpusConfig:
    nets: int = 5
    components: int = 4
    places_per_component: int = 4
    transitions: int = 10
    slack: int = 1  # units above the chromatic number
    seed: int = 0
    out: Path | None = None


def run(cfg: CorpusConfig):
    rng = random.Random(cfg.seed)
    rows = []
    for i in range(cfg.nets):
        net = random_safe_net(
            rng, cfg.components, cfg.places_per_component, cfg.transitions, name=f"rand{i:02d}"
        )
        rel = net_relation(net)
        num = numbering(net)
        n = chromatic_number(net.places, rel) + cfg.slack
        if cfg.out:
            cfg.out.mkdir(parents=True, exist_ok=True)
            (cfg.out / f"{net.name}.pnet").write_text(format_net(net))
        for fragment in FRAGMENTS:
            script = encode(net.places, rel, num, EncodingConfig(fragment, n, emit_status_hint=True))
            if cfg.out:
                (cfg.out / f"{net.name}_{fragment}_n{n}.smt2").write_text(print_smtlib(script))
            row = formula_stats(script).row()
            rows.append([net.name, str(n), *(row[c] for c in COLUMNS)])
    return rows


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--nets", type=int, default=5)
    ap.add_argument("--components", type=int, default=4)
    ap.add_argument("--places-per-component", type=int, default=4)
    ap.add_argument("--transitions", type=int, default=10)
    ap.add_argument("--slack", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--out", type=Path, default=None, help="also write .pnet and .smt2 files here")
    args = ap.parse_args()
    rows = run(CorpusConfig(**vars(args)))
    print("\t".join(["net", "n", *COLUMNS]))
    for r in rows:
        print("\t".join(r))


if __name__ == "__main__":
    main()
