"""Pipeline FLOPs across input resolutions.

Every stage of the cascade (and the first fc of the head) scales with the
pixel count, so the per-pixel cost should be flat across resolutions.
"""

import argparse

from wavescat import ScatterConfig, pipeline_flops

RESOLUTIONS = ((960, 540), (1280, 720), (1920, 1080))


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--classes", type=int, default=5)
    args = ap.parse_args()

    cfg = ScatterConfig()
    print(f"{'resolution':>12} {'pixels':>10} {'total FLOPs':>14} {'GFLOPs':>8} {'per pixel':>10}")
    rows = []
    for w, h in RESOLUTIONS:
        rep = pipeline_flops(w, h, cfg, args.classes)
        rows.append((w, h, rep.total))
        print(f"{f'{w}x{h}':>12} {w * h:>10} {rep.total:>14} "
              f"{rep.total / 1e9:>8.4f} {rep.total / (w * h):>10.2f}")
    base = rows[1]
    print("ratios vs 1280x720:")
    for w, h, total in rows:
        print(f"  {w}x{h}: pixels {w * h / (base[0] * base[1]):.4f}, "
              f"flops {total / base[2]:.4f}")


if __name__ == "__main__":
    main()
