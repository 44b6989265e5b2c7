"""Compare compiled and pure-Python kernels.

    python benchmarks/bench_kernels.py [--repeat N]
"""
import argparse
import random
import timeit

from toonbench import _accel
from toonbench import _kernels as pure
from toonbench.toon import parse_toon, serialize_toon


def sample_inputs(seed=0):
    rng = random.Random(seed)
    rows = [{"id": i, "name": f"user {i}", "score": rng.randint(0, 999), "tag": '"a,b"'} for i in range(2000)]
    text = serialize_toon({"rows": rows})
    line = ",".join(f'"cell {i},x"' if i % 3 == 0 else f"v{i}" for i in range(60))
    doubled = [rng.randint(1, 50) for _ in range(25)]
    return text, line, doubled


def bench(label, fn, repeat):
    best = min(timeit.repeat(fn, number=1, repeat=repeat))
    print(f"  {label:<22} {best * 1e3:9.3f} ms")
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    text, line, doubled = sample_inputs()

    impls = [("python", pure)]
    if _accel.compiled is not None:
        impls.append(("compiled", _accel.compiled))
    else:
        print("compiled extension not built; pure-Python timings only")

    results = {}
    for name, k in impls:
        print(name)
        results[name] = [
            bench("scan_lines", lambda: k.scan_lines(text), args.repeat),
            bench("split_cells x200", lambda: [k.split_cells(line, ",") for _ in range(200)], args.repeat),
            bench("signed_rank_counts", lambda: k.signed_rank_counts(doubled), args.repeat),
        ]
    if len(results) == 2:
        print("speedup")
        for label, p, c in zip(("scan_lines", "split_cells", "signed_rank_counts"), results["python"], results["compiled"]):
            print(f"  {label:<22} {p / c:8.1f}x")

    print(f"parse_toon end to end ({_accel.BACKEND} kernels, {len(text)} bytes)")
    bench("parse_toon", lambda: parse_toon(text), args.repeat)


if __name__ == "__main__":
    main()
