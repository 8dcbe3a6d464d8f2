"""Compare the compiled and numpy unfold/fold kernels on the network's conv shapes.

    python benchmarks/bench_kernels.py [--repeat 20]

Also times one full-objective training step with each backend.
"""
import argparse
import importlib
import os
import sys
import timeit

import numpy as np

from stylehall.engine import kernels

# (channels, extent, stride, pad_top, pad_left) for each 3x3 conv at batch 8
SHAPES = [
    ("L0.0", 3, 64, 1, 1, 1), ("L0.1", 16, 64, 1, 1, 1),
    ("L1.0", 16, 64, 2, 1, 1), ("L1.1", 32, 32, 1, 1, 1),
    ("L2.0", 32, 32, 2, 1, 1), ("L2.1", 64, 16, 1, 1, 1),
]


def out_extent(n, stride, pad_top):
    # stride 2 pads one side only; stride 1 pads both
    total = pad_top * (2 if stride == 1 else 1)
    return (n + total - 3) // stride + 1


def bench_shape(mod, c, n, stride, pt, pl, repeat, batch=8):
    rng = np.random.default_rng(0)
    x = rng.standard_normal((batch, c, n, n)).astype(np.float32)
    ho = out_extent(n, stride, pt)
    col = mod.im2col(x, 3, stride, pt, pl, ho, ho)
    t_fwd = min(timeit.repeat(lambda: mod.im2col(x, 3, stride, pt, pl, ho, ho), number=1, repeat=repeat))
    t_bwd = min(timeit.repeat(lambda: mod.col2im(col, x.shape, 3, stride, pt, pl, ho, ho),
                              number=1, repeat=repeat))
    return t_fwd, t_bwd, col


def bench_step(backend, repeat):
    """Time one dual forward/backward of the full objective in a fresh process state."""
    os.environ["STYLEHALL_KERNELS"] = backend
    for name in list(sys.modules):
        if name.startswith("stylehall"):
            del sys.modules[name]
    train = importlib.import_module("stylehall.train")
    basis_mod = importlib.import_module("stylehall.basis")
    model_mod = importlib.import_module("stylehall.model")
    hall = importlib.import_module("stylehall.hallucination")
    rng = np.random.default_rng(0)
    model = model_mod.SegNet(seed=0)
    retro = model_mod.RetroModel(model_mod.Encoder(np.random.default_rng(1)))
    x = rng.random((8, 3, 64, 64)).astype(np.float32)
    y = rng.integers(0, 8, (8, 64, 64))
    bank = basis_mod.collect_styles(model, rng.random((32, 3, 64, 64)).astype(np.float32), "L0")
    strat = hall.StyleStrategy("shm", basis_mod.fps_select(bank))

    def step():
        model.zero_grad()
        train.training_objective(model, x, y, strat, np.random.default_rng(2), retro)

    return min(timeit.repeat(step, number=1, repeat=repeat))


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=20)
    args = ap.parse_args()
    if kernels.cython_kernels is None:
        sys.exit("compiled kernels are not built; run `pip install -e . --no-build-isolation`")
    print(f"{'conv':<6}{'kernel':>8}{'python ms':>11}{'cython ms':>11}{'speedup':>9}  identical")
    for name, c, n, stride, pt, pl in SHAPES:
        py = bench_shape(kernels.python_kernels, c, n, stride, pt, pl, args.repeat)
        cy = bench_shape(kernels.cython_kernels, c, n, stride, pt, pl, args.repeat)
        same = py[2].tobytes() == cy[2].tobytes()
        for label, a, b in (("im2col", py[0], cy[0]), ("col2im", py[1], cy[1])):
            print(f"{name:<6}{label:>8}{a * 1e3:11.3f}{b * 1e3:11.3f}{a / b:9.2f}  {same}")
    reps = max(3, args.repeat // 4)
    t_py, t_cy = bench_step("python", reps), bench_step("cython", reps)
    print(f"full objective step, batch 8: python {t_py * 1e3:.1f} ms, cython {t_cy * 1e3:.1f} ms "
          f"({t_py / t_cy:.2f}x)")


if __name__ == "__main__":
    main()
