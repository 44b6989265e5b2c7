import itertools
import os
import subprocess
import sys

import pytest
from hypothesis import given
from hypothesis import strategies as st

from toonbench import _accel
from toonbench import _kernels as pure

BACKENDS = [pytest.param(pure, id="python")]
BACKENDS.append(
    pytest.param(_accel.compiled, id="compiled", marks=pytest.mark.skipif(_accel.compiled is None, reason="extension not built"))
)

line_text = st.text(alphabet=' \t\n\r,|"\\ab:é-', max_size=60)


@pytest.fixture(params=BACKENDS, scope="module")
def kernels(request):
    return request.param


class TestScanLines:
    def test_basic(self, kernels):
        assert kernels.scan_lines("a: 1\n\n  b:  \n\t c\n   \n") == [(1, 0, "a: 1"), (3, 2, "b:"), (4, -1, "\t c")]

    def test_empty(self, kernels):
        assert kernels.scan_lines("") == []

    @given(line_text)
    def test_matches_python(self, kernels, text):
        assert kernels.scan_lines(text) == pure.scan_lines(text)


class TestSplitCells:
    def test_quotes_protect_delimiters(self, kernels):
        assert kernels.split_cells(' 1, "a,b" ,"x\\"y",', ",") == ["1", '"a,b"', '"x\\"y"', ""]

    def test_open_quote(self, kernels):
        assert kernels.split_cells('a,"b', ",") is None

    @given(line_text, st.sampled_from([",", "|", "\t"]))
    def test_matches_python(self, kernels, text, delim):
        assert kernels.split_cells(text, delim) == pure.split_cells(text, delim)


class TestSignedRankCounts:
    def test_against_enumeration(self, kernels):
        doubled = [2, 4, 7, 7, 10]
        expected = [0] * (sum(doubled) + 1)
        for signs in itertools.product((0, 1), repeat=len(doubled)):
            expected[sum(r for r, s in zip(doubled, signs) if s)] += 1
        assert kernels.signed_rank_counts(doubled) == expected

    def test_mass_is_two_to_the_n(self, kernels):
        doubled = list(range(2, 52, 2))
        assert sum(kernels.signed_rank_counts(doubled)) == 2 ** 25

    @given(st.lists(st.integers(1, 50), max_size=25))
    def test_matches_python(self, kernels, doubled):
        assert kernels.signed_rank_counts(doubled) == pure.signed_rank_counts(doubled)


def test_env_var_forces_pure_python():
    code = "import toonbench; print(toonbench.KERNEL_BACKEND)"
    env = dict(os.environ, TOONBENCH_PURE="1")
    out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
