import itertools
import math
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from toonbench.stats import (
    AllZeroDifferences,
    EmptyInput,
    PairedSample,
    WilcoxonMethod,
    average_ranks,
    mean_std,
    wilcoxon_signed_rank,
)


def pairs_from(diffs):
    return [PairedSample(f"i{k}", d, 0.0) for k, d in enumerate(diffs)]


def brute_force(diffs):
    """(W, p) by enumerating every sign assignment of the observed ranks."""
    d = [x for x in diffs if x != 0]
    ranks = average_ranks([abs(x) for x in d])
    total = sum(ranks)
    w_plus = sum(r for r, x in zip(ranks, d) if x > 0)
    w = min(w_plus, total - w_plus)
    extreme = 0
    for signs in itertools.product((0, 1), repeat=len(d)):
        wp = sum(r for r, s in zip(ranks, signs) if s)
        if min(wp, total - wp) <= w + 1e-9:
            extreme += 1
    return w, extreme / 2 ** len(d)


def random_diffs(rng, n):
    # small integer pool so ties and zeros are common
    pool = rng.choice([3, 6, 50])
    return [rng.randint(-pool, pool) * rng.choice([1, 0.5]) for _ in range(n)]


class TestMeanStd:
    def test_examples(self):
        assert mean_std([1, 2, 3]) == (2.0, 1.0)
        assert mean_std([5]) == (5.0, 0.0)
        m, s = mean_std([0.8, 0.9, 1.0, 0.7])
        assert m == pytest.approx(0.85)
        assert s == pytest.approx(math.sqrt(0.05 / 3))

    def test_empty(self):
        with pytest.raises(EmptyInput):
            mean_std([])


class TestRanks:
    def test_ties_share_mean_rank(self):
        assert average_ranks([3, 1, 3, 2]) == [3.5, 1.0, 3.5, 2.0]
        assert average_ranks([]) == []


class TestWilcoxon:
    def test_all_positive_five(self):
        r = wilcoxon_signed_rank(pairs_from([1, 2, 3, 4, 5]))
        assert r.w_statistic == 0
        assert r.method is WilcoxonMethod.EXACT
        assert r.p_value == 0.0625
        assert not r.significant

    def test_symmetric_pair(self):
        r = wilcoxon_signed_rank(pairs_from([1, -1]))
        assert (r.w_plus, r.w_minus) == (1.5, 1.5)
        assert r.p_value == 1.0

    def test_all_zero(self):
        with pytest.raises(AllZeroDifferences):
            wilcoxon_signed_rank(pairs_from([0, 0, 0]))

    def test_empty(self):
        with pytest.raises(EmptyInput):
            wilcoxon_signed_rank([])

    def test_zeros_are_dropped_and_counted(self):
        r = wilcoxon_signed_rank(pairs_from([0, 1, 2, 0, 3]))
        assert (r.n_effective, r.n_zero) == (3, 2)
        assert r.p_value == 0.25

    def test_non_finite_pair(self):
        with pytest.raises(ValueError):
            PairedSample("x", float("nan"), 1.0)

    def test_method_switch(self):
        assert wilcoxon_signed_rank(pairs_from(range(1, 26))).method is WilcoxonMethod.EXACT
        assert wilcoxon_signed_rank(pairs_from(range(1, 27))).method is WilcoxonMethod.NORMAL_APPROX

    def test_significance_flag(self):
        r = wilcoxon_signed_rank(pairs_from(range(1, 11)), alpha_level=0.01)
        assert r.p_value == pytest.approx(2 / 1024)
        assert r.significant

    @pytest.mark.parametrize("seed", range(40))
    def test_exact_matches_enumeration(self, seed):
        rng = random.Random(seed)
        diffs = random_diffs(rng, rng.randint(1, 10))
        if not any(diffs):
            diffs[0] = 1
        r = wilcoxon_signed_rank(pairs_from(diffs), method="exact")
        w, p = brute_force(diffs)
        assert r.w_statistic == w
        assert r.p_value == pytest.approx(p, rel=1e-12, abs=0)

    @pytest.mark.parametrize("seed", range(10))
    def test_matches_scipy(self, seed):
        scipy_stats = pytest.importorskip("scipy.stats")
        rng = random.Random(seed)
        exact_d = [rng.uniform(-1, 1.3) for _ in range(rng.randint(5, 20))]
        ref = scipy_stats.wilcoxon(exact_d, method="exact")
        assert wilcoxon_signed_rank(pairs_from(exact_d)).p_value == pytest.approx(ref.pvalue, rel=1e-9)
        tied_d = random_diffs(rng, 40)
        ours = wilcoxon_signed_rank(pairs_from(tied_d))
        ref = scipy_stats.wilcoxon([d for d in tied_d if d], method="approx", correction=True)
        assert ours.method is WilcoxonMethod.NORMAL_APPROX
        assert ours.w_statistic == ref.statistic
        assert ours.p_value == pytest.approx(ref.pvalue, rel=1e-9)

    @given(st.lists(st.integers(-20, 20), min_size=1, max_size=15).filter(any))
    def test_antisymmetry(self, diffs):
        a = wilcoxon_signed_rank(pairs_from(diffs))
        b = wilcoxon_signed_rank([PairedSample(p.instance_id, p.value_b, p.value_a) for p in pairs_from(diffs)])
        assert a.p_value == b.p_value
        assert (a.w_plus, a.w_minus) == (b.w_minus, b.w_plus)

    @given(st.lists(st.integers(-20, 20), min_size=1, max_size=30).filter(any), st.sampled_from([0.001, 3, 1e6]))
    def test_scale_invariance(self, diffs, k):
        a = wilcoxon_signed_rank(pairs_from(diffs))
        b = wilcoxon_signed_rank(pairs_from([d * k for d in diffs]))
        assert a.p_value == pytest.approx(b.p_value, rel=1e-12)

    @pytest.mark.parametrize("seed", range(25))
    def test_exact_and_normal_agree_at_twenty(self, seed):
        rng = random.Random(1000 + seed)
        diffs = [rng.gauss(0.3, 1.0) for _ in range(20)]
        exact = wilcoxon_signed_rank(pairs_from(diffs), method="exact").p_value
        approx = wilcoxon_signed_rank(pairs_from(diffs), method="normal_approx").p_value
        assert abs(exact - approx) < 0.03
