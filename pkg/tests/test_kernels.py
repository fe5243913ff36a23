import pytest

from qdeform import _backend, _kernels_py
from qdeform.partitions import crossings, enumerate_pair_partitions, enumerate_set_partitions, nestings

compiled = pytest.importorskip("qdeform._kernels")


def test_backend_selected():
    assert _backend.BACKEND in ("cython", "python")
    assert _backend.kernels is (compiled if _backend.BACKEND == "cython" else _kernels_py)


@pytest.mark.parametrize("n", range(0, 8))
def test_pair_histogram_backends_agree(n):
    assert compiled.pair_stat_histogram(n) == _kernels_py.pair_stat_histogram(n)


@pytest.mark.parametrize("n", range(1, 7))
def test_pair_histogram_matches_enumeration(n):
    hist = {}
    for v in enumerate_pair_partitions(2 * n):
        key = (crossings(v), nestings(v))
        hist[key] = hist.get(key, 0) + 1
    assert _kernels_py.pair_stat_histogram(n) == hist


@pytest.mark.parametrize("n", range(1, 9))
@pytest.mark.parametrize("statistic", ["biane_cr", "nica_c0"])
def test_set_table_backends_agree(n, statistic):
    assert compiled.set_partition_table(n, statistic) == _kernels_py.set_partition_table(n, statistic)


@pytest.mark.parametrize("n", range(1, 7))
def test_set_stats_backends_agree(n):
    for p in enumerate_set_partitions(n):
        rgs = p.rgs()
        assert tuple(compiled.set_partition_stats(rgs)) == tuple(_kernels_py.set_partition_stats(rgs))


def test_pure_python_env(monkeypatch):
    import importlib

    monkeypatch.setenv("QDEFORM_PURE_PYTHON", "1")
    mod = importlib.reload(_backend)
    try:
        assert mod.BACKEND == "python" and mod.kernels is _kernels_py
    finally:
        monkeypatch.delenv("QDEFORM_PURE_PYTHON")
        importlib.reload(_backend)
