import csv
import json

import numpy as np
import pytest

from migmdp import (
    CSV_COLUMNS,
    SOLVER_NAMES,
    ExperimentConfig,
    RngStream,
    emit_results,
    flatten_records,
    random_instance,
    run_beta_sweep,
    run_compare,
)


def small_config(**overrides):
    base = dict(
        min_offset=-4,
        max_offset=4,
        gamma=0.9,
        betas=(0.5, 2.0),
        epsilon=0.1,
        instances=3,
        seed=7,
    )
    base.update(overrides)
    return ExperimentConfig(**base)


class TestRandomInstance:
    def test_stays_on_simplex(self):
        root = RngStream(0)
        for i in range(500):
            p, q = random_instance("uniform-simplex", root.child(i))
            assert p >= 0.0 and q >= 0.0 and p + q <= 1.0

    def test_deterministic(self):
        assert random_instance("uniform-simplex", RngStream(5)) == random_instance(
            "uniform-simplex", RngStream(5)
        )

    def test_uniform_over_triangle(self):
        root = RngStream(1)
        draws = np.array(
            [random_instance("uniform-simplex", root.child(i)) for i in range(30000)]
        )
        # each coordinate of a uniform triangle draw has mean 1/3
        assert abs(draws[:, 0].mean() - 1 / 3) < 0.01
        assert abs(draws[:, 1].mean() - 1 / 3) < 0.01

    def test_unknown_rule(self):
        with pytest.raises(ValueError, match="rule"):
            random_instance("adversarial", RngStream(0))


class TestExperimentConfig:
    def test_defaults_are_valid(self):
        config = ExperimentConfig()
        assert config.solvers == SOLVER_NAMES
        assert config.rule == "uniform-simplex"

    def test_rejects_bad_window(self):
        with pytest.raises(ValueError):
            small_config(min_offset=0)

    def test_rejects_bad_gamma(self):
        with pytest.raises(ValueError, match="gamma"):
            small_config(gamma=1.0)

    def test_rejects_empty_solvers(self):
        with pytest.raises(ValueError, match="empty"):
            small_config(solvers=())

    def test_rejects_unknown_solver(self):
        with pytest.raises(ValueError, match="unknown solver"):
            small_config(solvers=("threshold", "simplex"))

    def test_rejects_unknown_rule(self):
        with pytest.raises(ValueError, match="rule"):
            small_config(rule="clustered")

    def test_rejects_empty_betas(self):
        with pytest.raises(ValueError, match="beta"):
            small_config(betas=())

    def test_rejects_nonpositive_instances(self):
        with pytest.raises(ValueError, match="instances"):
            small_config(instances=0)


@pytest.fixture(scope="module")
def compare_records():
    return run_compare(small_config())


@pytest.fixture(scope="module")
def emit_records():
    return run_compare(small_config(instances=2))


class TestRunCompare:
    @pytest.fixture
    def records(self, compare_records):
        return compare_records

    def test_one_record_per_beta_instance(self, records):
        assert len(records) == 6
        keys = [(rec.beta, rec.seed) for rec in records]
        assert keys == sorted(keys)

    def test_every_solver_reported(self, records):
        for rec in records:
            assert set(rec.results) == set(SOLVER_NAMES)

    def test_exact_solvers_agree(self, records):
        for rec in records:
            res = rec.results
            assert abs(res["threshold"].v_s0 - res["policy_iteration"].v_s0) <= 1e-9
            assert abs(res["threshold"].v_s0 - res["value_iteration"].v_s0) <= 0.1
            assert res["never_migrate"].v_s0 >= res["threshold"].v_s0 - 1e-9
            assert res["always_migrate"].v_s0 >= res["threshold"].v_s0 - 1e-9

    def test_bookkeeping_fields(self, records):
        for rec in records:
            for name, outcome in rec.results.items():
                assert outcome.wall_time_s >= 0.0
                if name == "threshold":
                    assert outcome.k1 is not None and outcome.k2 is not None
                    assert outcome.linear_solves >= 1
                else:
                    assert outcome.k1 is None and outcome.k2 is None
                if name in ("never_migrate", "always_migrate"):
                    assert outcome.iterations == 0
                    assert outcome.linear_solves == 1
                if name == "value_iteration":
                    assert outcome.linear_solves == 0
                    assert outcome.iterations >= 1

    def test_instances_reconstructible_from_recorded_seed(self, records):
        for rec in records:
            p, q = random_instance("uniform-simplex", RngStream(rec.seed))
            assert (p, q) == (rec.p, rec.q)

    def test_deterministic_apart_from_timing(self):
        first = run_compare(small_config())
        second = run_compare(small_config())
        for a, b in zip(first, second):
            assert (a.beta, a.seed, a.p, a.q) == (b.beta, b.seed, b.p, b.q)
            for name in SOLVER_NAMES:
                x, y = a.results[name], b.results[name]
                assert (x.v_s0, x.k1, x.k2, x.iterations, x.linear_solves) == (
                    y.v_s0,
                    y.k1,
                    y.k2,
                    y.iterations,
                    y.linear_solves,
                )


class TestRunBetaSweep:
    def test_summary_means(self):
        config = small_config()
        records, summary = run_beta_sweep(config)
        assert len(summary) == len(config.betas) * len(SOLVER_NAMES)
        for row in summary:
            matching = [rec.results[row.solver].v_s0 for rec in records if rec.beta == row.beta]
            assert row.instances == len(matching) == config.instances
            assert abs(row.mean_v_s0 - np.mean(matching)) <= 1e-12

    def test_summary_solver_order(self):
        _, summary = run_beta_sweep(small_config(betas=(1.0,), instances=2))
        assert tuple(row.solver for row in summary) == SOLVER_NAMES


class TestEmitResults:
    @pytest.fixture
    def records(self, emit_records):
        return emit_records

    def test_csv_layout(self, records, tmp_path_factory):
        path = tmp_path_factory.mktemp("out") / "results.csv"
        emit_results(records, "csv", str(path))
        lines = path.read_text().splitlines()
        assert lines[0] == ",".join(CSV_COLUMNS)
        assert len(lines) == 1 + len(records) * len(SOLVER_NAMES)
        for row in csv.DictReader(lines):
            empty = row["k1"] == "" and row["k2"] == ""
            assert empty == (row["solver"] != "threshold")
            assert float(row["v_s0"]) >= 0.0

    def test_csv_round_trip(self, records, tmp_path_factory):
        path = tmp_path_factory.mktemp("out") / "results.csv"
        emit_results(records, "csv", str(path))
        with open(path) as fh:
            parsed = list(csv.DictReader(fh))
        flat = flatten_records(records)
        assert len(parsed) == len(flat)
        for got, want in zip(parsed, flat):
            assert got["solver"] == want["solver"]
            assert float(got["v_s0"]) == float(format(want["v_s0"], ".9g"))
            assert int(got["linear_solves"]) == want["linear_solves"]

    def test_json_mirrors_csv(self, records, tmp_path_factory):
        out = tmp_path_factory.mktemp("out")
        emit_results(records, "json", str(out / "results.json"))
        with open(out / "results.json") as fh:
            data = json.load(fh)
        flat = flatten_records(records)
        assert [row["solver"] for row in data] == [row["solver"] for row in flat]
        for got, want in zip(data, flat):
            assert set(got) == set(CSV_COLUMNS)
            assert got["v_s0"] == float(format(want["v_s0"], ".9g"))
            if got["solver"] != "threshold":
                assert got["k1"] is None and got["k2"] is None

    def test_reruns_byte_identical_except_wall_time(self, tmp_path):
        def strip_wall_time(text):
            column = CSV_COLUMNS.index("wall_time_s")
            kept = []
            for line in text.splitlines():
                cells = line.split(",")
                del cells[column]
                kept.append(",".join(cells))
            return "\n".join(kept)

        paths = []
        for run in range(2):
            path = tmp_path / f"run{run}.csv"
            emit_results(run_compare(small_config()), "csv", str(path))
            paths.append(path)
        first, second = (strip_wall_time(p.read_text()) for p in paths)
        assert first == second
        assert first.count("\n") > len(SOLVER_NAMES)
        # the raw files differ only by timing
        assert paths[0].read_text() != paths[1].read_text()

    def test_stdout_destination(self, records, capsys):
        emit_results(records, "csv", "-")
        out = capsys.readouterr().out
        assert out.startswith(",".join(CSV_COLUMNS))

    def test_rejects_empty_records(self):
        with pytest.raises(ValueError, match="record"):
            emit_results([], "csv", "-")

    def test_rejects_unknown_format(self, records):
        with pytest.raises(ValueError, match="format"):
            emit_results(records, "xml", "-")
