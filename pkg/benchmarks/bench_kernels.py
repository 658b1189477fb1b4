"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeats 20]

Shapes match the training loop at N=30: the two strided GTS encoder convs
over a 3500-step training series, one MTGNN inception branch on a batch of
32 windows, a (32, 30, 12) masked-MAE batch and a 30x30 top-K.
"""

from __future__ import annotations

import argparse
import importlib
import timeit

import numpy as np

from latentgraph._kernels import _fallback


def conv_case(rng, x_shape, w_shape, stride):
    x, w = rng.normal(size=x_shape), rng.normal(size=w_shape)
    l_out = (x_shape[2] - w_shape[2]) // stride + 1
    g = rng.normal(size=(x_shape[0], w_shape[0], l_out))
    return (lambda k: k.conv1d_forward(x, w, stride, 1)), (lambda k: k.conv1d_backward(g, x, w, stride, 1))


def cases(rng):
    gts1 = conv_case(rng, (30, 1, 3500), (8, 1, 8), 4)
    gts2 = conv_case(rng, (30, 8, 874), (16, 8, 8), 4)
    mtgnn = conv_case(rng, (960, 16, 20), (5, 16, 5), 1)
    pred, target = rng.normal(size=(32, 30, 12)), rng.normal(size=(32, 30, 12))
    mask = (rng.random((32, 30, 12)) > 0.1).astype(np.float64)
    scores = rng.normal(size=(30, 30))
    return {
        "gts conv1 fwd": gts1[0],
        "gts conv1 bwd": gts1[1],
        "gts conv2 fwd": gts2[0],
        "gts conv2 bwd": gts2[1],
        "mtgnn conv fwd": mtgnn[0],
        "mtgnn conv bwd": mtgnn[1],
        "masked_abs_error": lambda k: k.masked_abs_error(pred.ravel(), target.ravel(), mask.ravel()),
        "topk_mask": lambda k: k.topk_mask(scores, 8, True),
    }


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeats", type=int, default=20)
    args = ap.parse_args(argv)
    try:
        core = importlib.import_module("latentgraph._kernels._core")
    except ImportError:
        print("compiled core not built; run `python3 setup.py build_ext --inplace`")
        return 1
    print(f"{'kernel':<18}{'cython ms':>12}{'numpy ms':>12}{'speedup':>10}")
    for name, fn in cases(np.random.default_rng(0)).items():
        fast = min(timeit.repeat(lambda: fn(core), number=1, repeat=args.repeats)) * 1e3
        slow = min(timeit.repeat(lambda: fn(_fallback), number=1, repeat=args.repeats)) * 1e3
        print(f"{name:<18}{fast:>12.3f}{slow:>12.3f}{slow / fast:>9.2f}x")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
