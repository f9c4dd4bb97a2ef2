"""Config validation, protocol runners, delimited output, bundled recipes,
and the command line interface."""

import json

import numpy as np
import pytest
import yaml

from lmgbattery import NumericsError
from lmgbattery.experiment import (
    ConfigError,
    load_config,
    run_config,
    validate_config,
    write_csv,
    write_json,
)
from lmgbattery.experiment import cli
from lmgbattery.experiment.recipes import (
    load_recipe,
    recipe_catalog,
    recipe_names,
    recipe_text,
)
from lmgbattery.experiment.runner import tables_payload

MINIMAL = {
    "spectrum": {"protocol": "spectrum", "N": 10, "h": [0.5, 1.5], "levels": 3},
    "wpd": {"protocol": "wpd", "N": 10, "h_i": 0.5, "h_c": [1.5, 2.0]},
    "quench": {"protocol": "quench", "N": 8, "h_i": 0.5, "h_c": 2.0,
               "t_max": 5.0, "points": 40},
    "quench-sweep": {"protocol": "quench-sweep", "N": 8, "h_i": 0.5,
                     "h_c": {"start": 0.5, "stop": 2.0, "num": 3},
                     "t_max": 5.0, "points": 40},
    "bath": {"protocol": "bath", "N": 2, "h_i": 0.5, "g": 0.25, "omega": 0.7,
             "n_init": 2, "n_max": 8, "t_max": 3.0, "points": 30},
    "bath-sweep": {"protocol": "bath-sweep", "N": 2, "h_i": 0.5, "g": [0.0, 0.5],
                   "omega": 0.7, "n_init": 2, "n_max": 8, "t_max": 3.0, "points": 30},
    "isotropic-check": {"protocol": "isotropic-check", "N": 10,
                        "field_grid": [0.5, 1.5], "levels": 2,
                        "h_i": [0.0], "h_c": 2.0},
}


def minimal(protocol, **overrides):
    data = dict(MINIMAL[protocol])
    data.update(overrides)
    return data


class TestValidateConfig:
    @pytest.mark.parametrize("protocol", sorted(MINIMAL))
    def test_minimal_configs_validate(self, protocol):
        config = validate_config(minimal(protocol))
        assert config.protocol == protocol

    def test_round_trip_is_identity(self):
        raw = minimal("quench", M=[4, 8], gamma=0.5)
        config = validate_config(raw)
        assert config.to_dict() == raw
        config.to_dict()["N"] = 99
        assert config.num_spins == 8

    def test_non_mapping_rejected(self):
        with pytest.raises(ConfigError):
            validate_config(["protocol", "quench"])

    def test_protocol_required_and_suggested(self):
        with pytest.raises(ConfigError, match="protocol"):
            validate_config({"N": 10})
        with pytest.raises(ConfigError, match="quench"):
            validate_config({"protocol": "quenh", "N": 10})

    def test_missing_required_key(self):
        with pytest.raises(ConfigError, match="h_c"):
            validate_config({"protocol": "wpd", "N": 10, "h_i": 0.5})

    def test_unknown_key_suggested(self):
        raw = minimal("quench", lamda=1.0)
        with pytest.raises(ConfigError, match="lambda"):
            validate_config(raw)

    def test_boolean_values_rejected(self):
        with pytest.raises(ConfigError):
            validate_config(minimal("quench", N=True))
        with pytest.raises(ConfigError):
            validate_config(minimal("quench", h_i=True))

    def test_grid_specs(self):
        config = validate_config(minimal("quench-sweep",
                                         h_c={"start": 0.0, "stop": 2.0, "num": 5}))
        assert np.allclose(config.grid("h_c"), np.linspace(0.0, 2.0, 5))
        with pytest.raises(ConfigError):
            validate_config(minimal("quench-sweep", h_c={"start": 0.0, "stop": 2.0}))
        with pytest.raises(ConfigError):
            validate_config(minimal("quench-sweep", h_c={"start": -1.0, "stop": 2.0, "num": 5}))

    def test_negative_fields_rejected(self):
        with pytest.raises(ConfigError):
            validate_config(minimal("wpd", h_i=-0.5))

    @pytest.mark.parametrize(
        "protocol,overrides,fragment",
        [
            ("spectrum", {"levels": 11}, "levels"),
            ("spectrum", {"boundary_pairs": 6}, "boundary_pairs"),
            ("quench", {"M": 9}, "M"),
            ("bath", {"n_max": 4}, "n_max"),
            ("isotropic-check", {"gamma": 0.0}, "gamma"),
            ("isotropic-check", {"field_grid": [0.5, 1.0]}, "field_grid"),
            ("quench", {"gamma": 1.5}, "gamma"),
        ],
    )
    def test_cross_checks(self, protocol, overrides, fragment):
        with pytest.raises(ConfigError, match=fragment):
            validate_config(minimal(protocol, **overrides))

    def test_isotropic_quench_keys_come_together(self):
        raw = minimal("isotropic-check")
        del raw["h_c"]
        with pytest.raises(ConfigError, match="together"):
            validate_config(raw)

    def test_isotropic_needs_some_work(self):
        with pytest.raises(ConfigError):
            validate_config({"protocol": "isotropic-check", "N": 10})

    def test_isotropic_anisotropy_forced(self):
        config = validate_config(minimal("isotropic-check"))
        assert config.anisotropy == 1.0

    def test_defaults(self):
        config = validate_config(minimal("wpd"))
        assert config.coupling == 1.0
        assert config.anisotropy == 0.0
        assert config.t_max == 50.0
        assert config.points == 2000
        assert config.output_format == "csv"
        assert config.output_stem is None


class TestLoadConfig:
    def test_reads_yaml(self, tmp_path):
        path = tmp_path / "run.yaml"
        path.write_text(yaml.safe_dump(minimal("wpd")))
        config = load_config(path)
        assert config.protocol == "wpd"
        assert config.to_dict() == minimal("wpd")

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="cannot read"):
            load_config(tmp_path / "absent.yaml")

    def test_invalid_yaml(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text("protocol: [unclosed")
        with pytest.raises(ConfigError, match="YAML"):
            load_config(path)


class TestRunners:
    def test_spectrum_tables(self):
        config = validate_config(minimal("spectrum", boundary_pairs=2,
                                         h={"start": 0.0, "stop": 1.0, "num": 9}))
        result = run_config(config)
        gaps = result.table("gaps")
        assert gaps.columns == ["h", "gap_1", "gap_2", "gap_3"]
        assert len(gaps.rows) == 9
        assert np.allclose(gaps.column("h"), np.linspace(0.0, 1.0, 9))
        assert np.all(gaps.column("gap_1") >= -1e-12)
        boundary = result.table("boundary")
        assert len(boundary.rows) == 2
        assert boundary.columns == ["pair", "critical_field"]

    def test_missing_table_raises(self):
        result = run_config(validate_config(minimal("spectrum")))
        with pytest.raises(KeyError):
            result.table("series")

    def test_wpd_rows_normalized_per_pair(self):
        result = run_config(validate_config(minimal("wpd")))
        table = result.table("wpd")
        assert table.columns == ["h_i", "h_c", "work", "probability"]
        assert len(table.rows) == 2 * 11
        for h_c in (1.5, 2.0):
            mask = table.column("h_c") == h_c
            assert table.column("probability")[mask].sum() == pytest.approx(1.0, abs=1e-10)

    def test_quench_tables(self):
        config = validate_config(minimal("quench", M=[4, 8]))
        result = run_config(config)
        series = result.table("series")
        assert series.columns == ["h_i", "h_c", "t", "work", "power", "entropy"]
        assert len(series.rows) == 40
        assert np.isnan(series.column("power")[0])
        summary = result.table("summary")
        assert len(summary.rows) == 1
        assert summary.column("work_max")[0] == pytest.approx(
            np.max(series.column("work")), abs=1e-12
        )
        subsystem = result.table("subsystem")
        assert len(subsystem.rows) == 2 * 40
        full_block = subsystem.column("M") == 8
        charged = full_block & (subsystem.column("block_work") > 1e-6)
        assert np.allclose(subsystem.column("ratio")[charged], 1.0, atol=1e-6)

    def test_no_quench_summary_has_empty_optimum(self):
        config = validate_config(minimal("quench", h_c=0.5))
        summary = run_config(config).table("summary")
        assert np.isnan(summary.column("optimal_time")[0])
        assert summary.column("power_max")[0] == 0.0

    def test_quench_sweep_tables(self):
        config = validate_config(minimal("quench-sweep", M=4))
        result = run_config(config)
        assert len(result.table("summary").rows) == 3
        block = result.table("subsystem_summary")
        assert block.columns == ["h_i", "h_c", "M", "ergotropy_max",
                                 "ergotropy_max_time", "ratio_at_peak"]
        assert len(block.rows) == 3

    def test_bath_tables(self):
        result = run_config(validate_config(minimal("bath")))
        series = result.table("series")
        assert series.columns == ["h_i", "g", "t", "work", "photons", "ergotropy", "ratio"]
        assert len(series.rows) == 30
        occupations = result.table("occupations")
        assert len(occupations.rows) == 3
        assert occupations.column("population").sum() == pytest.approx(1.0, abs=1e-10)
        summary = result.table("summary")
        assert summary.column("work_max")[0] == pytest.approx(
            np.max(series.column("work")), abs=1e-12
        )

    def test_bath_sweep_zero_coupling_row(self):
        result = run_config(validate_config(minimal("bath-sweep")))
        summary = result.table("summary")
        assert len(summary.rows) == 2
        assert abs(summary.column("work_max")[0]) < 1e-10
        assert summary.column("work_max")[1] > 0.0

    def test_bath_resonance_needs_frequency(self):
        raw = minimal("bath", h_i=[0.0])
        del raw["omega"]
        config = validate_config(raw)
        with pytest.raises(ConfigError, match="omega"):
            run_config(config)

    def test_isotropic_tables(self):
        result = run_config(validate_config(minimal("isotropic-check")))
        gaps = result.table("gaps")
        assert len(gaps.rows) == 2 * 2
        closings = result.table("closings")
        # level 1 closes at (2p+1)/10 five times, level 2 at (2p+2)/10 four times
        assert len(closings.rows) == 9
        wpd = result.table("wpd")
        assert len(wpd.rows) == 1
        assert wpd.column("probability")[0] == 1.0

    def test_thread_counts_do_not_change_results(self):
        config = validate_config(minimal("quench-sweep"))
        serial = tables_payload(run_config(config, threads=1))
        threaded = tables_payload(run_config(config, threads=4))
        assert serial == threaded


class TestSerialization:
    def test_csv_layout(self, tmp_path):
        result = run_config(validate_config(minimal("spectrum")))
        path = tmp_path / "out.csv"
        write_csv(result, path)
        lines = path.read_text().splitlines()
        assert lines[0].startswith("# lmgbattery ")
        assert lines[1].startswith("# config: ")
        assert lines[2].startswith("# written: ")
        assert "# table: gaps" in lines
        header = lines[lines.index("# table: gaps") + 1]
        assert header == "h[lambda],gap_1[lambda],gap_2[lambda],gap_3[lambda]"
        payload = [line for line in lines if not line.startswith("#")]
        assert len(payload) == 1 + 2  # header plus one row per field

    def test_csv_cells_round_trip(self, tmp_path):
        result = run_config(validate_config(minimal("wpd")))
        path = tmp_path / "out.csv"
        write_csv(result, path)
        lines = [line for line in path.read_text().splitlines() if not line.startswith("#")]
        first_row = lines[1].split(",")
        table = result.table("wpd")
        assert float(first_row[2]) == table.rows[0][2]
        assert float(first_row[3]) == table.rows[0][3]

    def test_csv_none_cell_is_empty(self, tmp_path):
        result = run_config(validate_config(minimal("quench", h_c=0.5)))
        path = tmp_path / "out.csv"
        write_csv(result, path)
        summary_rows = [
            line for line in path.read_text().splitlines()
            if not line.startswith("#") and line.count(",") == 7
        ]
        # optimal_time (column 6 of 8) is None for the no-quench run
        assert summary_rows[-1].split(",")[5] == ""

    def test_json_document(self, tmp_path):
        result = run_config(validate_config(minimal("spectrum")))
        path = tmp_path / "out.json"
        write_json(result, path)
        document = json.loads(path.read_text())
        assert set(document) == {"meta", "tables"}
        assert document["meta"]["config"] == minimal("spectrum")
        assert document["tables"] == tables_payload(result)

    def test_payload_deterministic_across_runs(self, tmp_path):
        config = validate_config(minimal("bath"))
        first = tables_payload(run_config(config))
        second = tables_payload(run_config(config))
        assert first == second


class TestRecipes:
    def test_catalog_is_substantial(self):
        names = recipe_names()
        assert len(names) >= 8
        assert names == sorted(names)

    @pytest.mark.parametrize("name", recipe_names())
    def test_every_recipe_validates_and_round_trips(self, name):
        config = load_recipe(name)
        assert yaml.safe_load(recipe_text(name)) == config.to_dict()

    def test_catalog_entries_documented(self):
        for entry in recipe_catalog():
            assert entry["name"]
            assert entry["protocol"]
            assert entry["description"]
            assert entry["expected_runtime"]

    def test_unknown_recipe(self):
        with pytest.raises(ConfigError):
            recipe_text("fig999")

    def test_unknown_recipe_load(self):
        with pytest.raises(ConfigError):
            load_recipe("fig999")


class TestCli:
    def write_config(self, tmp_path, protocol="wpd", **overrides):
        path = tmp_path / "run.yaml"
        path.write_text(yaml.safe_dump(minimal(protocol, **overrides)))
        return path

    def test_validate_ok(self, tmp_path, capsys):
        path = self.write_config(tmp_path)
        assert cli.main(["validate", str(path)]) == 0
        assert "OK:" in capsys.readouterr().out

    def test_validate_recipe_name(self, capsys):
        assert cli.main(["validate", "fig2a"]) == 0
        assert "(spectrum)" in capsys.readouterr().out

    def test_run_writes_csv(self, tmp_path, capsys):
        path = self.write_config(tmp_path)
        code = cli.main(["run", str(path), "--output-dir", str(tmp_path), "--no-figures"])
        assert code == 0
        assert (tmp_path / "run.csv").exists()
        assert "wrote" in capsys.readouterr().out

    def test_run_format_override(self, tmp_path):
        path = self.write_config(tmp_path)
        code = cli.main(["run", str(path), "--output-dir", str(tmp_path),
                         "--format", "json", "--no-figures"])
        assert code == 0
        document = json.loads((tmp_path / "run.json").read_text())
        assert "tables" in document

    def test_run_renders_figures(self, tmp_path):
        path = self.write_config(tmp_path, protocol="spectrum")
        code = cli.main(["run", str(path), "--output-dir", str(tmp_path)])
        assert code == 0
        assert (tmp_path / "run_gaps.png").exists()

    def test_output_dir_from_environment(self, tmp_path, monkeypatch):
        target = tmp_path / "results"
        monkeypatch.setenv(cli.OUTPUT_DIR_ENV, str(target))
        path = self.write_config(tmp_path)
        assert cli.main(["run", str(path), "--no-figures"]) == 0
        assert (target / "run.csv").exists()

    def test_output_stem_from_config(self, tmp_path):
        path = self.write_config(tmp_path, output="custom")
        assert cli.main(["run", str(path), "--output-dir", str(tmp_path),
                         "--no-figures"]) == 0
        assert (tmp_path / "custom.csv").exists()

    def test_unknown_argument_is_config_error(self, tmp_path, capsys):
        assert cli.main(["run", str(tmp_path / "nope.yaml"), "--no-figures"]) == 2
        assert "config error" in capsys.readouterr().err

    def test_invalid_config_exits_2(self, tmp_path):
        path = tmp_path / "bad.yaml"
        path.write_text(yaml.safe_dump({"protocol": "wpd", "N": 10}))
        assert cli.main(["validate", str(path)]) == 2

    def test_bad_thread_count_exits_2(self, tmp_path):
        path = self.write_config(tmp_path)
        assert cli.main(["run", str(path), "--threads", "0", "--no-figures"]) == 2

    def test_numerics_failure_exits_3(self, tmp_path, monkeypatch):
        path = self.write_config(tmp_path)

        def explode(config, threads=None):
            raise NumericsError("cross-check failed")

        monkeypatch.setattr(cli, "run_config", explode)
        assert cli.main(["run", str(path), "--no-figures",
                         "--output-dir", str(tmp_path)]) == 3

    def test_recipes_listing(self, capsys):
        assert cli.main(["recipes"]) == 0
        out = capsys.readouterr().out
        assert "fig2a" in out
        assert "spectrum" in out
