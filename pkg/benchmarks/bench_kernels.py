"""Time the compiled kernels against the numpy fallback.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints one line per kernel with the best-of-N wall time of each backend, the
speedup and the largest absolute difference between their outputs. Also times
one model training step end to end under each backend.
"""
from __future__ import annotations

import argparse
import time

import numpy as np

from csiauth import autograd as ag, kernels, transformer as tf
from csiauth.channel import temporal_correlation


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases(rng):
    col = temporal_correlation(8.0, 3.0, 2000)
    col[0] += 1e-10
    z = rng.standard_normal((2000, 16))
    scores = rng.standard_normal((64, 4, 20, 20))
    mask = tf.causal_mask(20)
    y = kernels.backends()["python"].softmax_forward(scores, mask)
    gy = rng.standard_normal(y.shape)
    x = rng.standard_normal((64, 20, 64))
    g, b = rng.standard_normal(64), rng.standard_normal(64)
    _, xhat, inv = kernels.backends()["python"].layer_norm_forward(x, g, b, 1e-5)
    gx = rng.standard_normal(x.shape)
    return {
        "toeplitz_cholesky_apply n=2000": lambda m: m.toeplitz_cholesky_apply(col, z),
        "softmax_forward (64,4,20,20)": lambda m: m.softmax_forward(scores, mask),
        "softmax_backward (64,4,20,20)": lambda m: m.softmax_backward(y, gy),
        "layer_norm_forward (64,20,64)": lambda m: m.layer_norm_forward(x, g, b, 1e-5)[0],
        "layer_norm_backward (64,20,64)": lambda m: m.layer_norm_backward(gx, xhat, inv, g)[0],
    }


def train_step_time(repeat):
    rng = np.random.default_rng(0)
    model = tf.CsiTransformer(tf.ModelConfig(), seed=0)
    x = rng.standard_normal((64, 104, 20))
    y = rng.standard_normal((64, 104, 5))
    params = model.parameters()

    def step():
        tape = ag.Tape()
        with tape:
            loss = tf.nmse_loss(model.forward(x), y)
        tape.backward(loss, params)

    return best_of(step, repeat)[0]


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=5)
    args = parser.parse_args(argv)
    backends = kernels.backends()
    if "cython" not in backends:
        print("compiled kernels not built; only the numpy fallback is available")
    rng = np.random.default_rng(1)
    print(f"{'kernel':34s} {'python':>10s} {'cython':>10s} {'speedup':>8s} {'max|diff|':>10s}")
    for name, fn in cases(rng).items():
        t_py, out_py = best_of(lambda: fn(backends["python"]), args.repeat)
        if "cython" in backends:
            t_cy, out_cy = best_of(lambda: fn(backends["cython"]), args.repeat)
            diff = float(np.max(np.abs(out_py - out_cy)))
            print(f"{name:34s} {t_py * 1e3:9.2f}ms {t_cy * 1e3:9.2f}ms {t_py / t_cy:7.1f}x {diff:10.1e}")
        else:
            print(f"{name:34s} {t_py * 1e3:9.2f}ms {'-':>10s}")
    # whole training step, switching the dispatch table
    for label in backends:
        mod = backends[label]
        for fn_name in ("softmax_forward", "softmax_backward", "layer_norm_forward", "layer_norm_backward"):
            setattr(kernels, fn_name, getattr(mod, fn_name))
        print(f"train step (batch 64, d_m 64) with {label:6s}: {train_step_time(args.repeat) * 1e3:.1f} ms")


if __name__ == "__main__":
    main()
