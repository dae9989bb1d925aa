#!/usr/bin/env python3
"""Compare the compiled and pure-Python kernel backends.

Micro cases hit ``multiply`` and ``marginalize`` directly on synthetic
factors; macro cases run full posteriors over the bundled models so
dispatch, elimination ordering, and normalization are included. Every
case is checked for agreement between backends before it is timed.

    python3 benchmarks/bench_kernels.py --repeats 5
"""

import argparse
import time

import numpy as np

from bloomlab import kernels
from bloomlab.compose import flatten
from bloomlab.core import Evidence
from bloomlab.dbn import unroll
from bloomlab.demo import demo_dynamic, demo_science
from bloomlab.infer import posterior_one


def best_of(fn, repeats, inner):
    best = float("inf")
    for _ in range(repeats):
        start = time.perf_counter()
        for _ in range(inner):
            fn()
        best = min(best, (time.perf_counter() - start) / inner)
    return best


def micro_cases(rng):
    """(label, thunk, inner) triples over growing factor sizes."""
    cases = []
    for n_axes, card in ((4, 3), (7, 3), (9, 3), (10, 4)):
        out_cards = np.full(n_axes, card, dtype=np.int64)
        a_pos = np.arange(n_axes - 1, dtype=np.int64)
        b_pos = np.sort(
            rng.choice(n_axes, size=n_axes - 1, replace=False).astype(np.int64)
        )
        a = rng.random(card ** (n_axes - 1))
        b = rng.random(card ** (n_axes - 1))
        cases.append(
            (
                f"multiply    -> {card}^{n_axes}",
                lambda oc=out_cards, x=a, xp=a_pos, y=b, yp=b_pos: kernels.multiply(
                    oc, x, xp, y, yp
                ),
                max(1, 20000 // card ** n_axes),
            )
        )
        table = rng.random(card ** n_axes)
        axes = np.array([0, n_axes // 2], dtype=np.int64)
        cases.append(
            (
                f"marginalize <- {card}^{n_axes}",
                lambda t=table, c=out_cards, ax=axes: kernels.marginalize(t, c, ax),
                max(1, 20000 // card ** n_axes),
            )
        )
    return cases


def macro_cases():
    science = flatten(demo_science())
    storm = Evidence(
        {
            "nutrients.DissolvedIron": "Medium",
            "nutrients.DissolvedNitrogen": "Medium",
            "nutrients.DissolvedOrganics": "Medium",
            "nutrients.DissolvedPhosphorus": "Medium",
            "light.LightClimate": "Optimal",
            "air.Temperature": "High",
            "air.WindSpeed": "High",
        }
    )
    seasonal = unroll(demo_dynamic(), 5)
    return [
        (
            "posterior: science storm (23 nodes)",
            lambda: posterior_one(science, "BloomInitiation", storm),
            5,
        ),
        (
            "posterior: season March (110 nodes)",
            lambda: posterior_one(seasonal, "Mar.BloomInitiation"),
            2,
        ),
    ]


def as_comparable(value):
    if isinstance(value, np.ndarray):
        return value
    return np.array(list(value.probabilities.values()))


def main(argv=None):
    parser = argparse.ArgumentParser(
        description="Benchmark the compiled kernels against the numpy fallback."
    )
    parser.add_argument("--repeats", type=int, default=5, help="timed repeats per case")
    args = parser.parse_args(argv)

    if "compiled" not in kernels.available_backends():
        raise SystemExit("compiled backend unavailable; build the extension first")

    rng = np.random.default_rng(7)
    rows = []
    for label, fn, inner in micro_cases(rng) + macro_cases():
        outputs = {}
        timings = {}
        for backend in ("python", "compiled"):
            previous = kernels.set_backend(backend)
            try:
                outputs[backend] = as_comparable(fn())
                timings[backend] = best_of(fn, args.repeats, inner)
            finally:
                kernels.set_backend(previous)
        np.testing.assert_allclose(
            outputs["python"], outputs["compiled"], atol=1e-12,
            err_msg=f"backends disagree on {label}",
        )
        rows.append((label, timings["python"], timings["compiled"]))

    width = max(len(label) for label, _, _ in rows)
    print(f"{'case':<{width}}  {'python':>12}  {'compiled':>12}  {'speedup':>8}")
    for label, py, compiled in rows:
        print(
            f"{label:<{width}}  {py * 1e6:>10.1f}us  {compiled * 1e6:>10.1f}us"
            f"  {py / compiled:>7.2f}x"
        )
    print(f"\nactive backend on import: {kernels.backend_name()}")


if __name__ == "__main__":
    main()
