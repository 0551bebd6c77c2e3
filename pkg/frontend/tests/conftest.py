import pytest

from dumpfixtures import bench_csv_text, write_dump


@pytest.fixture
def bench_csv(tmp_path):
    rows = [("case2", m, 129, K, 0.13 + 0.01 * (K == 8), 0.05 * K)
            for m in ("space-time", "semi-discrete") for K in (8, 16, 32, 64)]
    path = tmp_path / "bench.csv"
    path.write_text(bench_csv_text(rows))
    return path


@pytest.fixture
def dump_dir(tmp_path):
    return write_dump(tmp_path / "dump")
