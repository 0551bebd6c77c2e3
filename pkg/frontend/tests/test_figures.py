import numpy as np
import pytest

from plotkit.cli import main
from plotkit.figures import make_figure, save_figure
from plotkit.io import EmptySelectionError
from dumpfixtures import write_dump


def render(tmp_path, kind, name="fig.png", **kwargs):
    fig = make_figure(kind, **kwargs)
    out = tmp_path / name
    save_figure(fig, out)
    return out


def test_j_vs_k_png(tmp_path, bench_csv):
    out = render(tmp_path, "j-vs-k", csv_path=bench_csv, case="case2")
    assert out.stat().st_size > 1000


def test_cpu_vs_k_svg(tmp_path, bench_csv):
    out = render(tmp_path, "cpu-vs-k", name="fig.svg", csv_path=bench_csv)
    body = out.read_text()
    assert "<svg" in body
    assert "dc:date" not in body  # no timestamps in the output


def test_convergence(tmp_path, dump_dir):
    out = render(tmp_path, "convergence", dump_dirs=[dump_dir])
    assert out.stat().st_size > 1000


def test_control_profile_multiple_dumps(tmp_path):
    d1 = write_dump(tmp_path / "a", K=3)
    d2 = write_dump(tmp_path / "b", K=6, method="semi-discrete")
    out = render(tmp_path, "control-profile", dump_dirs=[d1, d2])
    assert out.stat().st_size > 1000


def test_control_profile_2d(tmp_path):
    d = tmp_path / "d2"
    d.mkdir()
    (d / "manifest.txt").write_text(
        "case = case2d\nmethod = space-time\ndim = 2\naxis_nodes = 3,3\n"
        "n_h = 9\nK = 2\ndt = 0.5\nT = 1.0\n")
    (d / "history.csv").write_text(
        "iteration,objective,misfit,regularization,step_size\n"
        "0,1.0,0.5,0.5,nan\n1,0.5,0.25,0.25,1.0\n")
    axes = np.linspace(0, 1, 3)
    for ell in range(2):
        lines = [f"{x:.6e} {y:.6e} {x * y:.6e}" for x in axes for y in axes]
        (d / f"control_k{ell:04d}.txt").write_text("\n".join(lines) + "\n")
    out = render(tmp_path, "control-profile", dump_dirs=[d])
    assert out.stat().st_size > 1000


def test_deterministic_bytes(tmp_path, bench_csv, dump_dir):
    for kind, kwargs in (("j-vs-k", {"csv_path": bench_csv}),
                         ("convergence", {"dump_dirs": [dump_dir]})):
        for ext in ("png", "svg"):
            a = render(tmp_path, kind, name=f"a.{ext}", **kwargs)
            b = render(tmp_path, kind, name=f"b.{ext}", **kwargs)
            assert a.read_bytes() == b.read_bytes(), f"{kind}/{ext} not deterministic"


def test_selection_errors(tmp_path, bench_csv):
    with pytest.raises(EmptySelectionError):
        make_figure("j-vs-k", csv_path=bench_csv, case="nope")
    with pytest.raises(EmptySelectionError):
        make_figure("convergence")
    with pytest.raises(ValueError):
        make_figure("heatmap")


def test_bad_extension(tmp_path, bench_csv):
    fig = make_figure("j-vs-k", csv_path=bench_csv)
    with pytest.raises(ValueError):
        save_figure(fig, tmp_path / "fig.pdf")


def test_cli_happy_and_error_paths(tmp_path, bench_csv, dump_dir, capsys):
    out = tmp_path / "cli.png"
    assert main(["j-vs-k", "--csv", str(bench_csv), "--case", "case2",
                 "--out", str(out)]) == 0
    assert out.exists()
    assert main(["j-vs-k", "--csv", str(bench_csv), "--case", "missing",
                 "--out", str(tmp_path / "x.png")]) == 2
    assert "no rows match" in capsys.readouterr().err
    assert main(["convergence", "--dump", str(dump_dir),
                 "--out", str(tmp_path / "c.svg")]) == 0
