"""Write a seeded synthetic persona-blog corpus: <out>/<domain>/<Raw_Name>.txt"""

import argparse

from mavens.testkit import SyntheticCorpusSpec, generate_corpus


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("out")
    ap.add_argument("--entities", type=int, default=10)
    ap.add_argument("--sentences", type=int, default=60)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--bias", action="append", default=[], metavar="DOMAIN=VALUE", help="e.g. military=-0.2")
    args = ap.parse_args()
    bias = {k: float(v) for k, v in (b.split("=") for b in args.bias)}
    spec = SyntheticCorpusSpec(entities_per_domain=args.entities, sentences_per_entity=args.sentences, seed=args.seed, polarity_bias=bias)
    names = generate_corpus(spec, args.out)
    print(f"wrote {sum(len(v) for v in names.values())} entity files under {args.out}")


if __name__ == "__main__":
    main()
