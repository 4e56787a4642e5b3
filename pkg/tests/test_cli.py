import csv
import io
import json
import subprocess
import sys
from fractions import Fraction as F

import pytest

from bincover import __version__
from bincover.bench import COLUMNS, read_csv
from bincover.cli import main, parse_params
from bincover.core import UsageError
from bincover.exact import CAP_ENV
from bincover.io import assignment_from_json, read_instance


def run(argv, capsys):
    code = main(argv)
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def example1(tmp_path, capsys):
    path = tmp_path / "ex.txt"
    assert run(["gen", "--family", "example1", "--params", "eps=1/10", "--out", str(path)],
               capsys)[0] == 0
    return path


def test_version(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["--version"])
    assert exc.value.code == 0
    assert capsys.readouterr().out.strip() == f"bincover {__version__}"


def test_module_entry_point():
    out = subprocess.run([sys.executable, "-m", "bincover.cli", "--version"],
                         capture_output=True, text=True)
    assert out.returncode == 0 and __version__ in out.stdout


def test_missing_subcommand_is_a_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main([])
    assert exc.value.code == 2


def test_gen_example1_round_trips(example1):
    inst = read_instance(example1)
    assert inst.m == 4 and inst.n == 6
    assert inst.demands() == [4, F(14, 5), F(14, 5), F(14, 5)]
    assert sorted(inst.items) == [F(9, 10)] * 3 + [F(19, 10)] * 3


def test_gen_to_stdout(capsys):
    code, out, _ = run(["gen", "--family", "partition", "--params", "sizes=1,2,3;m=4"], capsys)
    assert code == 0 and out.startswith("mode unit")


def test_gen_uniform_is_seeded(capsys):
    args = ["gen", "--family", "uniform", "--params", "n=5;m=3", "--seed", "7"]
    first = run(args, capsys)[1]
    assert run(args, capsys)[1] == first
    assert run(args[:-1] + ["8"], capsys)[1] != first


@pytest.mark.parametrize("argv", [
    ["gen", "--family", "nope"],
    ["gen", "--family", "partition", "--params", "m=3"],
    ["gen", "--family", "partition", "--params", "sizes=a,b;m=3"],
    ["gen", "--family", "example1", "--params", "eps=zero"],
    ["gen", "--family", "example1", "--params", "eps"],
])
def test_gen_bad_params_exit_2(argv, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2 and err.startswith("error:")


def test_parse_params():
    assert parse_params("sizes=1,2,3; m=4") == {"sizes": "1,2,3", "m": "4"}
    assert parse_params("") == {}
    with pytest.raises(UsageError):
        parse_params("junk")


@pytest.mark.parametrize("alg, expected", [("nfd", "4/1"), ("gbc5", "4/1"),
                                           ("exact", "42/5")])
def test_solve_example1(alg, expected, example1, capsys):
    code, out, _ = run(["solve", "--alg", alg, "--input", str(example1), "--id", "ex"], capsys)
    assert code == 0
    rec = json.loads(out)
    assert rec["instance"] == "ex" and rec["algorithm"] == alg
    assert rec["profit"] == expected
    inst = read_instance(example1)
    a = assignment_from_json(rec)
    assert sum((inst.bins[i].profit for i in a.sets), F(0)) == F(expected)


def test_solve_nfd_trace(example1, capsys):
    code, out, _ = run(["solve", "--alg", "nfd", "--input", str(example1), "--trace"], capsys)
    trace = json.loads(out)["trace"]
    assert code == 0 and trace["bin_order"] == [0, 1, 2, 3]
    assert len(trace["outcomes"]) == 4


def test_solve_gbc5_stages(example1, tmp_path, capsys):
    dest = tmp_path / "sol.json"
    code, out, _ = run(["solve", "--alg", "gbc5", "--input", str(example1), "--dump-stages",
                        "--output", str(dest)], capsys)
    assert code == 0 and out == ""
    stages = json.loads(dest.read_text())["stages"]
    assert stages["raw"]["modified_profit"] == "42/5"
    assert set(stages) >= {"raw", "merged", "maximal", "final"}


def test_solve_aptas(tmp_path, capsys):
    path = tmp_path / "inf.txt"
    path.write_text("mode infinite\nclass variable\nbins 1\n1\nitems 3\n1\n1\n1\n")
    code, out, _ = run(["solve", "--alg", "aptas", "--input", str(path), "--k", "2"], capsys)
    rec = json.loads(out)
    assert code == 0 and rec["profit"] == "3/1"
    # items as large as the demand are committed before grouping
    assert rec["stats"]["committed_items"] == 3


def test_solve_aptas_budget_refusal(tmp_path, capsys):
    path = tmp_path / "inf.txt"
    items = "\n".join(["1/10"] * 8)
    path.write_text(f"mode infinite\nclass variable\nbins 1\n1\nitems 8\n{items}\n")
    code, _, err = run(["solve", "--alg", "aptas", "--input", str(path), "--k", "8",
                        "--budget", "10"], capsys)
    assert code == 3 and err.startswith("refused:")


def test_solve_aptas_on_unit_instance_is_usage_error(example1, capsys):
    assert run(["solve", "--alg", "aptas", "--input", str(example1)], capsys)[0] == 2


def test_exact_refuses_large_instance(tmp_path, capsys):
    path = tmp_path / "big.txt"
    assert run(["gen", "--family", "uniform", "--params", "n=50;m=3", "--out", str(path)],
               capsys)[0] == 0
    code, _, err = run(["solve", "--alg", "exact", "--input", str(path)], capsys)
    assert code == 3 and "refused" in err


def test_cap_environment_variable(tmp_path, capsys, monkeypatch):
    path = tmp_path / "mid.txt"
    run(["gen", "--family", "uniform", "--params", "n=12;m=3", "--out", str(path)], capsys)
    assert run(["solve", "--alg", "exact", "--input", str(path)], capsys)[0] == 3
    monkeypatch.setenv(CAP_ENV, "12")
    assert run(["solve", "--alg", "exact", "--input", str(path)], capsys)[0] == 0


def test_missing_and_malformed_input_exit_2(tmp_path, capsys):
    assert run(["solve", "--alg", "nfd", "--input", str(tmp_path / "none")], capsys)[0] == 2
    bad = tmp_path / "bad.txt"
    bad.write_text("mode unit\nclass variable\nbins 1\n-1\nitems 0\n")
    code, _, err = run(["solve", "--alg", "nfd", "--input", str(bad)], capsys)
    assert code == 2 and "error" in err


def test_bad_eps_argument(example1, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["solve", "--alg", "aptas", "--input", str(example1), "--eps", "x"])
    assert exc.value.code == 2


def bench(tmp_path, capsys, *extra, name="out.csv"):
    dest = tmp_path / name
    code, out, err = run(["bench", "--out", str(dest), *extra], capsys)
    return code, dest, out


def test_bench_writes_rows_and_summary(tmp_path, capsys):
    code, dest, out = bench(tmp_path, capsys, "--algs", "nfd,gbc5", "--grid", "n=4..5,m=2",
                            "--trials", "2")
    assert code == 0
    rows = read_csv(dest.open())
    assert len(rows) == 2 * 2 * 2
    assert "max ratio nfd:" in out and "max ratio gbc5:" in out
    for row in rows:
        assert row["ratio"] is None or row["ratio"] >= 1
        if row["ratio"] is not None:
            assert row["ratio"] == row["oracle"] / row["profit"]


def test_bench_csv_cells_are_exact_fractions(tmp_path, capsys):
    _, dest, _ = bench(tmp_path, capsys, "--algs", "nfd", "--grid", "n=4,m=2", "--trials", "3")
    with dest.open() as fh:
        raw = list(csv.DictReader(fh))
    assert list(raw[0]) == COLUMNS
    for row in raw:
        for col in ("profit", "oracle"):
            num, den = row[col].split("/")
            assert F(int(num), int(den)) == F(row[col])


def test_bench_is_deterministic(tmp_path, capsys):
    args = ("--algs", "nfd,gbc5", "--grid", "n=4..6,m=2..3", "--trials", "2", "--seed", "5")
    _, a, _ = bench(tmp_path, capsys, *args, name="a.csv")
    _, b, _ = bench(tmp_path, capsys, *args, "--jobs", "2", name="b.csv")

    def strip(path):
        return [{k: v for k, v in row.items() if k != "wall_ns"} for row in read_csv(path.open())]
    assert strip(a) == strip(b)


def test_bench_zero_trials_is_header_only(tmp_path, capsys):
    code, dest, _ = bench(tmp_path, capsys, "--trials", "0")
    assert code == 0 and dest.read_text().strip() == ",".join(COLUMNS)


def test_bench_without_oracle(tmp_path, capsys):
    _, dest, out = bench(tmp_path, capsys, "--algs", "nfd", "--grid", "n=4,m=2",
                         "--trials", "1", "--oracle", "none")
    rows = read_csv(dest.open())
    assert rows[0]["oracle"] is None and rows[0]["ratio"] is None
    assert "max ratio nfd: NA" in out


def test_bench_oracle_refusal_is_a_warning(tmp_path, capsys, caplog):
    code, dest, _ = bench(tmp_path, capsys, "--algs", "nfd", "--grid", "n=14,m=2",
                          "--trials", "1")
    assert code == 0
    assert read_csv(dest.open())[0]["oracle"] is None
    assert "refused" in caplog.text


def test_bench_aptas_on_infinite_family(tmp_path, capsys):
    code, dest, _ = bench(tmp_path, capsys, "--algs", "aptas", "--family", "infinite",
                          "--grid", "n=5,m=2", "--trials", "2", "--k", "2")
    rows = read_csv(dest.open())
    assert code == 0 and len(rows) == 2
    assert all(r["profit"] <= r["oracle"] for r in rows)


@pytest.mark.parametrize("extra", [
    ("--algs", "magic"),
    ("--family", "nope"),
    ("--grid", "n=5..3"),
    ("--grid", "n"),
    ("--trials", "-1"),
])
def test_bench_usage_errors(extra, tmp_path, capsys):
    assert bench(tmp_path, capsys, *extra)[0] == 2


def test_bench_to_stdout(capsys):
    code, out, err = run(["bench", "--algs", "nfd", "--grid", "n=4,m=2", "--trials", "1"],
                         capsys)
    assert code == 0
    assert list(csv.reader(io.StringIO(out)))[0] == COLUMNS
    assert "max ratio nfd" in err
