import csv
import io
import math

import numpy as np
import pytest
from scipy import stats

from wsnsens.cli import EXIT_CONFIG, EXIT_DATA, main, parse_command
from wsnsens.config import INTEGER_PARAMETERS, PARAMETER_LABELS, PARAMETER_NAMES, ArenaSpec, CostModel, WsnConfig
from wsnsens.profiler import DEFAULT_BOUNDS, dataset_from_columns, load_dataset, save_dataset
from wsnsens.sim import run
from wsnsens.stats import CSV_HEADER, linear_corr, rows_from_csv
from wsnsens.sweep import SWEEP_HEADER, sweep

SMALL_SETUP = """\
# small arena so campaigns finish quickly
width = 200
height = 200
stimulus_rate = 2
duration = 12
network_density.low = 0.0005
network_density.high = 0.002
transmission_radius.low = 20
transmission_radius.high = 60
"""

# reference sensitivity table: linear correlation per parameter
TABLE_CORR = {
    "transmission_interval": -0.2842,
    "num_hops": 0.2411,
    "sensor_interval": -0.1580,
    "sense_radius": 0.1355,
    "network_density": 0.1095,
    "transmission_radius": 0.0694,
    "num_sinks": 0.0557,
    "num_neighbors": 0.0541,
}


@pytest.fixture
def setup_file(tmp_path):
    path = tmp_path / "small.conf"
    path.write_text(SMALL_SETUP)
    return path


def _random_columns(rng, m):
    cols = {}
    for name in PARAMETER_NAMES:
        low, high = DEFAULT_BOUNDS[name]
        if name in INTEGER_PARAMETERS:
            cols[name] = rng.integers(low, high + 1, m)
        else:
            cols[name] = rng.uniform(low, high, m)
    return cols


def table_shaped_columns(m, seed):
    """Gaussian copula whose energy column reproduces the table's correlations.

    Each parameter is a probit-transformed latent normal mapped onto its range
    (floored for integer parameters). Energy is a linear blend of the
    standardised columns plus a component orthogonal to all of them; solving
    C w = target against the realised column correlation matrix C makes the
    sample correlations hit the targets.
    """
    rng = np.random.default_rng(seed)
    k = len(PARAMETER_NAMES)
    z = rng.normal(size=(m, k + 1))
    cols = {}
    for j, name in enumerate(PARAMETER_NAMES):
        u = stats.norm.cdf(z[:, j])
        low, high = DEFAULT_BOUNDS[name]
        if name in INTEGER_PARAMETERS:
            cols[name] = np.minimum(np.floor(u * (high - low + 1)) + low, high).astype(int)
        else:
            cols[name] = low + u * (high - low)
    x = np.column_stack([cols[name] for name in PARAMETER_NAMES]).astype(float)
    x = (x - x.mean(axis=0)) / x.std(axis=0)
    target = np.array([TABLE_CORR[name] for name in PARAMETER_NAMES])
    w = np.linalg.solve(x.T @ x / m, target)
    free = z[:, k] - x @ np.linalg.lstsq(x, z[:, k], rcond=None)[0]
    free = (free - free.mean()) / free.std()
    latent_energy = x @ w + math.sqrt(1 - target @ w) * free
    return cols, 5.0e6 + 4.0e5 * latent_energy


def _analyze(tmp_path, cols, energy, name="d"):
    path = save_dataset(dataset_from_columns(cols, energy), tmp_path / f"{name}.jsonl")
    out = tmp_path / f"{name}.csv"
    assert main(["analyze", "--dataset", str(path), "--out", str(out)]) == 0
    return rows_from_csv(out.read_text()), out


class TestParseCommand:
    def test_well_formed_analyze(self):
        args = parse_command(["analyze", "--dataset", "d.jsonl", "--alpha", "0.05", "--out", "report.csv"])
        assert args.command == "analyze" and args.alpha == 0.05
        assert str(args.dataset) == "d.jsonl" and str(args.out) == "report.csv"

    def test_missing_dataset_names_option(self, capsys):
        with pytest.raises(SystemExit) as info:
            parse_command(["analyze"])
        assert info.value.code == 2
        assert "--dataset" in capsys.readouterr().err

    @pytest.mark.parametrize("alpha", ["1.5", "0", "1", "-0.1", "abc"])
    def test_alpha_range(self, alpha, capsys):
        with pytest.raises(SystemExit) as info:
            parse_command(["analyze", "--dataset", "d.jsonl", "--alpha", alpha])
        assert info.value.code == 2
        assert "--alpha" in capsys.readouterr().err

    def test_unknown_sweep_parameter_lists_valid(self, capsys):
        with pytest.raises(SystemExit) as info:
            parse_command(["sweep", "--param", "antenna_gain", "--values", "1,2", "--out", "s.csv"])
        assert info.value.code == 2
        err = capsys.readouterr().err
        assert all(name in err for name in PARAMETER_NAMES)

    def test_unknown_option_rejected(self):
        with pytest.raises(SystemExit) as info:
            parse_command(["simulate", "--bogus", "1"])
        assert info.value.code == 2

    def test_exactly_one_subcommand(self):
        with pytest.raises(SystemExit):
            parse_command([])

    def test_profile_defaults(self):
        args = parse_command(["profile", "--out", "d.jsonl"])
        assert args.runs == 800 and args.scheme == "uniform" and args.workers == 1


class TestProfileAndAnalyze:
    def test_empty_campaign(self, tmp_path, setup_file):
        out = tmp_path / "empty.jsonl"
        assert main(["profile", "--config", str(setup_file), "-M", "0", "--out", str(out)]) == 0
        assert out.read_text().endswith("\n")
        assert load_dataset(out).M == 0

    def test_rerun_is_byte_identical(self, tmp_path, setup_file, capsys):
        outs = []
        for name in ("a", "b"):
            out = tmp_path / f"{name}.jsonl"
            assert main(["profile", "--config", str(setup_file), "-M", "6", "--seed", "3", "--out", str(out)]) == 0
            outs.append(out.read_bytes())
        assert outs[0] == outs[1]
        assert "M = 6" in capsys.readouterr().out

    def test_profile_feeds_analyze(self, tmp_path, setup_file):
        data = tmp_path / "d.jsonl"
        main(["profile", "--config", str(setup_file), "-M", "8", "--seed", "1", "--out", str(data)])
        report = tmp_path / "r.csv"
        assert main(["analyze", "--dataset", str(data), "--out", str(report)]) == 0
        rows = rows_from_csv(report.read_text())
        assert sorted(r.parameter for r in rows) == sorted(PARAMETER_NAMES)
        assert report.with_suffix(".txt").read_text().startswith(" ")

    def test_self_dependence(self, tmp_path):
        cols = _random_columns(np.random.default_rng(2), 60)
        rows, _ = _analyze(tmp_path, cols, cols["sensor_interval"] * 1000.0)
        assert rows[0].parameter == "sensor_interval" and rows[0].effective
        assert rows[0].corr_linear == pytest.approx(1.0, abs=1e-12)

    def test_noise_report_well_formed(self, tmp_path):
        rng = np.random.default_rng(21)
        rows, out = _analyze(tmp_path, _random_columns(rng, 120), rng.uniform(1e5, 2e5, 120))
        text = out.read_text()
        assert text.endswith("\n")
        records = list(csv.reader(io.StringIO(text)))
        assert tuple(records[0]) == CSV_HEADER and len(records) == 9
        assert all(0.0 <= r.p_value <= 1.0 for r in rows)
        assert [r.p_value for r in rows] == sorted(r.p_value for r in rows)
        table = out.with_suffix(".txt").read_text().splitlines()
        stars = [line for line in table[2:10] if line.startswith("*")]
        assert len(stars) == sum(r.effective for r in rows)

    def test_table_shaped_input_gives_four(self, tmp_path):
        m = 260
        cols, energy = table_shaped_columns(m, seed=17)
        for name, target in TABLE_CORR.items():
            assert linear_corr(cols[name], energy) == pytest.approx(target, abs=0.02), name
        rows, _ = _analyze(tmp_path, cols, energy)
        flagged = {r.parameter for r in rows if r.effective}
        assert flagged == {"transmission_interval", "num_hops", "sensor_interval", "sense_radius"}
        assert [r.parameter for r in rows[:4]] == list(TABLE_CORR)[:4]

    def test_constant_column_warns_and_exits_zero(self, tmp_path, capsys):
        cols = _random_columns(np.random.default_rng(4), 40)
        cols["num_sinks"] = np.full(40, 3)
        rows, out = _analyze(tmp_path, cols, np.random.default_rng(5).uniform(1, 2, 40))
        assert "num_sinks" in capsys.readouterr().err
        assert "num_sinks,nan,nan,nan,degenerate" in out.read_text()

    def test_corrupt_dataset_is_data_error(self, tmp_path, capsys):
        bad = tmp_path / "bad.jsonl"
        bad.write_text('{"format": "nope"\n')
        assert main(["analyze", "--dataset", str(bad)]) == EXIT_DATA
        assert "line 1" in capsys.readouterr().err

    def test_missing_dataset_is_data_error(self, tmp_path):
        assert main(["analyze", "--dataset", str(tmp_path / "absent.jsonl")]) == EXIT_DATA

    def test_bad_config_is_config_error(self, tmp_path):
        conf = tmp_path / "bad.conf"
        conf.write_text("num_hops = -3\n")
        assert main(["simulate", "--config", str(conf)]) == EXIT_CONFIG
        conf.write_text("warp_factor = 9\n")
        assert main(["simulate", "--config", str(conf)]) == EXIT_CONFIG

    def test_report_rerenders(self, tmp_path, capsys):
        cols = _random_columns(np.random.default_rng(6), 50)
        _, out = _analyze(tmp_path, cols, cols["num_hops"] * 2.0 + 1.0)
        capsys.readouterr()
        table = tmp_path / "t.txt"
        assert main(["report", "--report", str(out), "--out", str(table)]) == 0
        assert table.read_text() == capsys.readouterr().out
        assert PARAMETER_LABELS["num_hops"] in table.read_text()


class TestSimulate:
    def test_simulate_prints_record(self, tmp_path, setup_file, capsys):
        out = tmp_path / "one.jsonl"
        assert main(["simulate", "--config", str(setup_file), "--seed", "5", "--out", str(out)]) == 0
        printed = capsys.readouterr().out
        assert printed == out.read_text()
        rec = run(WsnConfig(), ArenaSpec(width=200, height=200, stimulus_rate=2, duration=12), CostModel(), 5)
        assert f'"total_energy": {rec.total_energy:.16e}' in printed


class TestSweep:
    ARENA = ArenaSpec(width=200, height=200, stimulus_rate=2.0, duration=20)
    BASE = WsnConfig(network_density=0.001, transmission_radius=45.0)

    def test_single_value_single_repeat(self):
        result = sweep("num_hops", [3], self.BASE, self.ARENA, CostModel(), repeats=1, master_seed=2)
        (row,) = result.rows
        from wsnsens.profiler import derive_seed

        rec = run(self.BASE.replace(num_hops=3), self.ARENA, CostModel(), derive_seed(2, 0))
        assert row.mean_energy == rec.total_energy
        assert row.mean_delivered == rec.packets_delivered
        assert row.std_energy == 0.0 and row.std_delivered == 0.0 and row.repeats == 1

    def test_rows_follow_request(self):
        result = sweep("sense_radius", [10.0, 30.0, 20.0], self.BASE, self.ARENA, CostModel(), repeats=3)
        assert [r.value for r in result.rows] == [10.0, 30.0, 20.0]
        assert all(r.repeats == 3 for r in result.rows)

    def test_mean_over_exactly_r_runs(self):
        from wsnsens.profiler import derive_seed

        result = sweep("num_hops", [2], self.BASE, self.ARENA, CostModel(), repeats=4, master_seed=9)
        energies = [
            run(self.BASE.replace(num_hops=2), self.ARENA, CostModel(), derive_seed(9, r)).total_energy
            for r in range(4)
        ]
        assert result.rows[0].mean_energy == pytest.approx(np.mean(energies), rel=1e-15)
        assert result.rows[0].std_energy == pytest.approx(np.std(energies, ddof=1) / 2, rel=1e-12)

    def test_cli_writes_csv(self, tmp_path, setup_file):
        out = tmp_path / "s.csv"
        argv = ["sweep", "--config", str(setup_file), "--param", "num_hops", "--values", "2,4", "--repeats", "2"]
        assert main(argv + ["--out", str(out)]) == 0
        lines = out.read_text().splitlines()
        assert lines[0] == ",".join(SWEEP_HEADER)
        assert [line.split(",")[0] for line in lines[1:]] == ["2", "4"]

    def test_cli_out_of_bounds_value(self, tmp_path, setup_file):
        argv = ["sweep", "--config", str(setup_file), "--param", "num_hops", "--values", "99"]
        assert main(argv + ["--out", str(tmp_path / "s.csv")]) == EXIT_CONFIG
