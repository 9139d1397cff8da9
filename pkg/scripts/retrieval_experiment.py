"""Seed-averaged area under the precision-recall curve for every scheme.

    python3 scripts/retrieval_experiment.py [--seeds 5] [--T 10] [--K 64 128 256 512]
    python3 scripts/retrieval_experiment.py --ratings ml-100k/u.data --f 50
"""

import argparse

import numpy as np

from mipslsh.benchmark import DEFAULT_PARAMS, SIGN_ALSH_ALT, pr_auc, run_retrieval, scheme_label
from mipslsh.factorization import ingest_ratings, pure_svd, synthetic_factorization


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--seeds", type=int, default=5)
    ap.add_argument("--T", type=int, default=10)
    ap.add_argument("--K", type=int, nargs="+", default=[64, 128, 256, 512])
    ap.add_argument("--n-queries", type=int, default=500)
    ap.add_argument("--f", type=int, default=50)
    ap.add_argument("--ratings", help="user<TAB>item<TAB>rating file; synthetic data if omitted")
    args = ap.parse_args()

    configs = list(DEFAULT_PARAMS.items()) + [("sign-alsh", SIGN_ALSH_ALT)]
    auc = {(scheme_label(s, p), K): [] for s, p in configs for K in args.K}
    ratings = ingest_ratings(args.ratings) if args.ratings else None
    for seed in range(args.seeds):
        if ratings is not None:
            fact = pure_svd(ratings, args.f, seed=seed)
        else:
            fact = synthetic_factorization(500, 1000, args.f, seed=seed)
        for scheme, params in configs:
            for cv in run_retrieval(scheme, params, fact, [args.T], args.K, args.n_queries, seed, threads=4):
                auc[(cv.scheme, cv.K)].append(pr_auc(cv))

    width = max(len(label) for label, _ in auc)
    print(f"{'scheme':<{width}}  " + "  ".join(f"K={K:<6}" for K in args.K))
    for s, p in configs:
        label = scheme_label(s, p)
        print(f"{label:<{width}}  " + "  ".join(f"{np.mean(auc[(label, K)]):.4f}  " for K in args.K))


if __name__ == "__main__":
    main()
