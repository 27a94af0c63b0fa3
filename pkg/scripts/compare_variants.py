"""Classic vs improved scattering, side by side.

Generates (or reuses) the synthetic dataset, extracts features once per
variant, trains one classifier per variant with identical settings, and
prints per-class test metrics next to each other.
"""

import argparse
import os
import tempfile
from dataclasses import replace

from wavescat import PipelineConfig, TrainConfig, run_extract, run_train, synth_dataset


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--work", metavar="DIR", help="working directory (default: fresh temp dir)")
    ap.add_argument("--per-class", type=int, default=40)
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--epochs", type=int, default=200)
    args = ap.parse_args()

    work = args.work or tempfile.mkdtemp(prefix="wavescat-variants-")
    os.makedirs(work, exist_ok=True)
    manifest = synth_dataset(os.path.join(work, "data"), per_class=args.per_class,
                             seed=args.seed)
    base = PipelineConfig(width=64, height=64)
    tcfg = replace(TrainConfig(), epochs=args.epochs, seed=args.seed)

    reports = {}
    for variant in ("classic", "improved"):
        pcfg = replace(base, scatter=replace(base.scatter, variant=variant))
        feat = os.path.join(work, f"{variant}.features")
        run_extract(pcfg, manifest, feat)
        _, reports[variant] = run_train(pcfg, tcfg, feat, manifest,
                                        os.path.join(work, f"{variant}.model"))

    cl, im = reports["classic"], reports["improved"]
    print(f"seed {args.seed}, {args.per_class} images/class, {args.epochs} epochs, "
          f"8:2 split ({cl.test_count} test samples)")
    print(f"{'':14} {'classic':>27}   {'improved':>27}")
    print(f"{'class':<14} {'tpr':>8} {'ppv':>8} {'acc':>8}   {'tpr':>8} {'ppv':>8} {'acc':>8}")

    def fmt(v):
        return "   -  " if v is None else f"{v:.4f}"

    for (name, *a), (_, *b) in zip(cl.per_class, im.per_class):
        row_a = " ".join(f"{fmt(v):>8}" for v in a)
        row_b = " ".join(f"{fmt(v):>8}" for v in b)
        print(f"{name:<14} {row_a}   {row_b}")
    print(f"{'overall acc':<14} {cl.test_accuracy:>26.4f}   {im.test_accuracy:>27.4f}")
    print(f"working files under {work}")


if __name__ == "__main__":
    main()
