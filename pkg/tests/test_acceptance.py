import csv
import random
import statistics
import time
from contextlib import contextmanager

import pytest
from click.testing import CliRunner

from strategies import random_table, random_value
from test_stats import brute_force, pairs_from, random_diffs
from toonbench.cli import main
from toonbench.formats import serialize_json
from toonbench.scoring import crossing_gamma, gamma_sweep, gcs, gcs_env
from toonbench.stats import WilcoxonMethod, wilcoxon_signed_rank
from toonbench.sustainability import DEFAULT_X_REF, ees
from toonbench.toon import parse_toon, serialize_toon
from toonbench.value import normalized_equal

JSON_ROW = dict(render=0.990, syntax=0.802, ees=0.926)
TOON_ROW = dict(render=0.630, syntax=0.484, ees=0.980)


@contextmanager
def within(seconds):
    start = time.perf_counter()
    yield
    elapsed = time.perf_counter() - start
    assert elapsed < seconds, f"took {elapsed:.2f}s, budget {seconds}s"


def composite(row):
    return gcs(row["render"], row["syntax"])


@pytest.mark.criterion(1, "aggregate score arithmetic")
def test_aggregate_arithmetic():
    with within(1):
        assert composite(JSON_ROW) == pytest.approx(0.840, abs=0.002)
        assert composite(TOON_ROW) == pytest.approx(0.513, abs=0.002)
        assert gcs_env(composite(JSON_ROW), JSON_ROW["ees"]) == pytest.approx(0.883, abs=0.002)
        assert gcs_env(composite(TOON_ROW), TOON_ROW["ees"]) == pytest.approx(0.747, abs=0.002)


@pytest.mark.criterion(2, "efficiency anchors and monotonicity")
def test_efficiency_anchors():
    with within(1):
        assert ees(0.0) == 1.0
        assert ees(DEFAULT_X_REF) == 0.5
        rng = random.Random(7)
        xs = sorted(rng.uniform(0, 100 * DEFAULT_X_REF) for _ in range(10_000))
        scores = [ees(x) for x in xs]
        assert all(0 < s <= 1 for s in scores)
        assert all(b <= a for a, b in zip(scores, scores[1:]))


@pytest.mark.criterion(3, "ranking crossover weight")
def test_crossover_weight():
    with within(1):
        json_pt = (composite(JSON_ROW), JSON_ROW["ees"])
        toon_pt = (composite(TOON_ROW), TOON_ROW["ees"])
        assert crossing_gamma(json_pt, toon_pt) == pytest.approx(0.858, abs=0.005)
        a = gamma_sweep(*json_pt, steps=1001)
        b = gamma_sweep(*toon_pt, steps=1001)
        signs = [(ya - yb) > 0 for (_, ya), (_, yb) in zip(a, b) if ya != yb]
        assert sum(1 for s, t in zip(signs, signs[1:]) if s != t) == 1


@pytest.mark.criterion(4, "codec round trip on random values")
def test_random_round_trip():
    rng = random.Random(20240611)
    failures = []
    with within(30):
        for i in range(10_000):
            v = random_value(rng, depth=4)
            try:
                ok = normalized_equal(parse_toon(serialize_toon(v)), v)
            except Exception as exc:  # noqa: BLE001 - every failure is counted
                ok = False
                v = (v, exc)
            if not ok:
                failures.append((i, v))
    assert failures == []


@pytest.mark.criterion(5, "tabular compactness against compact JSON")
def test_tabular_compactness():
    rng = random.Random(5)
    reductions = []
    with within(5):
        for _ in range(200):
            table = {"rows": random_table(rng, rng.randint(2, 20), rng.randint(2, 8))}
            toon = len(serialize_toon(table).encode())
            js = len(serialize_json(table).encode())
            assert toon < js
            reductions.append(1 - toon / js)
    assert statistics.median(reductions) >= 0.20


@pytest.mark.criterion(6, "exact signed-rank test against enumeration")
def test_exact_signed_rank():
    rng = random.Random(6)
    with within(60):
        checked = 0
        while checked < 500:
            diffs = random_diffs(rng, rng.randint(1, 12))
            if not any(diffs):
                continue
            res = wilcoxon_signed_rank(pairs_from(diffs))
            w, p = brute_force(diffs)
            assert res.method is WilcoxonMethod.EXACT
            assert res.w_statistic == pytest.approx(w)
            assert res.p_value == pytest.approx(p, abs=1e-12)
            checked += 1
        assert wilcoxon_signed_rank(pairs_from([1, 2, 3, 4, 5])).p_value == pytest.approx(0.0625)


def _pipeline(runner, out, corpus_path, replay_path):
    steps = [
        ["run", "--corpus", corpus_path, "--backend", "replay", "--replay-file", replay_path, "--out", out],
        ["score", "--records", out / "records.jsonl", "--corpus", corpus_path, "--out", out],
        ["report", "--scored", out / "scored.jsonl", "--out", out],
    ]
    for args in steps:
        result = runner.invoke(main, [str(a) for a in args], catch_exceptions=False)
        assert result.exit_code == 0, result.output
    return {name: (out / name).read_bytes() for name in ("summary.csv", "pairs.csv", "gamma_sweep.csv")}


@pytest.mark.criterion(7, "deterministic replay pipeline")
def test_deterministic_pipeline(tmp_path, corpus_path, replay_path, golden_dir):
    runner = CliRunner()
    with within(10):
        first = _pipeline(runner, tmp_path / "a", corpus_path, replay_path)
        second = _pipeline(runner, tmp_path / "b", corpus_path, replay_path)
    assert first == second
    for name, data in first.items():
        assert data == (golden_dir / name).read_bytes(), name


@pytest.mark.criterion(8, "weight extremes reduce to component scores")
@pytest.mark.parametrize("gamma,target", [("0", "gcs"), ("1", "ees")])
def test_weight_extremes(tmp_path, corpus_path, replay_path, gamma, target):
    runner = CliRunner()
    with within(1):
        out = tmp_path
        for args in (
            ["run", "--corpus", corpus_path, "--backend", "replay", "--replay-file", replay_path, "--out", out],
            ["score", "--records", out / "records.jsonl", "--corpus", corpus_path, "--gamma", gamma, "--out", out],
        ):
            assert runner.invoke(main, [str(a) for a in args]).exit_code == 0
        with open(out / "summary.csv", newline="") as fh:
            rows = {(r["format"], r["metric"]): r for r in csv.DictReader(fh)}
    formats = {fmt for fmt, _ in rows}
    assert formats
    for fmt in formats:
        assert float(rows[(fmt, "gcs_env")]["mean"]) == pytest.approx(float(rows[(fmt, target)]["mean"]), abs=1e-12)
