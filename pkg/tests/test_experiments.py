"""Config validation, artifact layout and exit codes of the experiment runner."""
import hashlib
import json
import subprocess
import sys

import pytest

from ergolab.cli import main
from ergolab.errors import ConfigError, PrecisionExhaustedError
from ergolab.experiments import (
    check_run_directory,
    list_presets,
    preset_config,
    run_experiment,
    validate_config,
)

PRESET_NAMES = [
    "krygin-atkinson",
    "shneiberg",
    "theorem-a",
    "theorem-b-flow",
    "theorem-b-winding",
    "theorem-c-induced",
    "theorem-d-weiss",
    "skew-construct",
]


def small_zero_sum_config(count=10, directory="zs"):
    return {
        "system": {"kind": "rotation", "angle": "rational:1/2"},
        "cocycle": {"kind": "step", "breakpoints": ["0", "1/2"], "values": [1, -1]},
        "detector": {"kind": "zero_sums", "start": "1/10", "count": count},
        "output": {"directory": directory, "formats": ["csv"]},
    }


# --------------------------------------------------------------------------- #
# validation
# --------------------------------------------------------------------------- #


def test_preset_catalog_is_complete():
    assert [name for name, _ in list_presets()] == PRESET_NAMES
    for name in PRESET_NAMES:
        validate_config(preset_config(name))


def test_unknown_preset_is_a_config_error():
    with pytest.raises(ConfigError, match="unknown preset"):
        preset_config("theorem-e")


@pytest.mark.parametrize(
    "mangle, message",
    [
        (lambda c: c.pop("system"), "missing config block"),
        (lambda c: c["system"].update(kind="cylinder"), "unknown kind"),
        (lambda c: c["detector"].update(count=-5), "at least 1"),
        (lambda c: c["detector"].update(typo=True), "unknown keys"),
        (lambda c: c["output"].update(directory="/abs/path"), "must be relative"),
        (lambda c: c["output"].update(formats=["yaml"]), "formats"),
        (lambda c: c["detector"].update(start=0.1), "strings or integers"),
        (lambda c: c["system"].update(angle="rational:1/0"), "angle"),
    ],
)
def test_malformed_configs_raise_config_errors(mangle, message):
    config = small_zero_sum_config()
    mangle(config)
    with pytest.raises(ConfigError, match=message):
        validate_config(config)


def test_sampled_detectors_require_a_seed():
    config = {
        "system": {"kind": "rotation", "angle": "preset:golden"},
        "cocycle": {"kind": "step", "breakpoints": ["0", "1/2"], "values": [1, -1]},
        "detector": {"kind": "induced", "target": {"intervals": [["0", "1/2"]]}},
        "sampling": {"samples": 200},
        "output": {"directory": "ind", "formats": ["json"]},
    }
    with pytest.raises(ConfigError, match="seed"):
        validate_config(config)
    config["sampling"]["seed"] = 1
    validate_config(config)


def test_flow_detector_rejects_step_cocycle():
    config = {
        "system": {
            "kind": "special_flow",
            "angle": "preset:golden",
            "roof_breakpoints": ["0", "1/2"],
            "roof_heights": ["1", "1"],
        },
        "cocycle": {"kind": "step", "breakpoints": ["0", "1/2"], "values": [1, -1]},
        "detector": {
            "kind": "flow_set_returns",
            "start": {"x": "1/10", "height": "0"},
            "t_max": "10",
            "target": {"intervals": [["0", "1"]]},
        },
        "output": {"directory": "flow", "formats": ["csv"]},
    }
    with pytest.raises(ConfigError, match="phase"):
        validate_config(config)


def test_config_error_writes_no_files(tmp_path):
    config = small_zero_sum_config(count=-3, directory="nothing")
    with pytest.raises(ConfigError):
        run_experiment(config, out_root=tmp_path)
    assert not (tmp_path / "nothing").exists()


# --------------------------------------------------------------------------- #
# artifacts
# --------------------------------------------------------------------------- #


def test_period_two_flow_target_rows(tmp_path):
    """The half-circle target run reports exactly the in-set zeros 2, 4, 6."""
    manifest = run_experiment(preset_config("theorem-a"), out_root=tmp_path)
    csv_text = (tmp_path / "theorem-a" / "results.csv").read_text()
    assert csv_text == "time,value,in_set\n2,0,1\n4,0,1\n6,0,1\n"
    assert manifest.status == "ok"
    assert any("rational" in w for w in manifest.warnings)


def test_manifest_records_provenance(tmp_path):
    config = small_zero_sum_config()
    manifest = run_experiment(config, out_root=tmp_path)
    out = tmp_path / "zs"
    stored = json.loads((out / "manifest.json").read_text())
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    assert stored["config_digest"] == hashlib.sha256(canonical).hexdigest()
    assert stored["config_digest"] == manifest.config_digest
    assert stored["tool_version"] == "0.1.0"
    assert stored["precision_scale"] == 192
    assert stored["outputs"] == ["config.json", "results.csv"]
    assert stored["status"] == "ok"
    assert stored["duration_seconds"] >= 0
    assert check_run_directory(out)


def test_digest_check_catches_tampering(tmp_path):
    run_experiment(small_zero_sum_config(), out_root=tmp_path)
    out = tmp_path / "zs"
    config = json.loads((out / "config.json").read_text())
    config["detector"]["count"] = 999
    (out / "config.json").write_text(json.dumps(config, sort_keys=True, separators=(",", ":")))
    assert not check_run_directory(out)


def test_rerun_is_byte_identical(tmp_path):
    """Same config, same seed: result files match byte for byte."""
    config = preset_config("theorem-d-weiss")
    config["sampling"]["samples"] = 500
    run_experiment(config, out_root=tmp_path / "a")
    run_experiment(config, out_root=tmp_path / "b")
    for name in ("config.json", "results.csv"):
        first = (tmp_path / "a" / "theorem-d-weiss" / name).read_bytes()
        second = (tmp_path / "b" / "theorem-d-weiss" / name).read_bytes()
        assert first == second


def test_failed_run_still_writes_manifest(tmp_path):
    """A budget blow-up records status and error before re-raising."""
    from ergolab.errors import ReturnBudgetError

    config = {
        "system": {"kind": "rotation", "angle": "preset:golden"},
        "cocycle": {"kind": "step", "breakpoints": ["0", "1/2"], "values": [1, -1]},
        "detector": {
            "kind": "induced",
            "target": {"intervals": [["0", "1/1000000"]]},
            "budget": 10,
        },
        "sampling": {"samples": 100, "seed": 0},
        "output": {"directory": "sliver", "formats": ["json"]},
    }
    with pytest.raises(ReturnBudgetError):
        run_experiment(config, out_root=tmp_path)
    stored = json.loads((tmp_path / "sliver" / "manifest.json").read_text())
    assert stored["status"] == "error"
    assert "ReturnBudgetError" in stored["error"]


# --------------------------------------------------------------------------- #
# command line
# --------------------------------------------------------------------------- #


def test_cli_run_preset(tmp_path, capsys):
    assert main(["run", "--preset", "theorem-a", "--out", str(tmp_path)]) == 0
    printed = capsys.readouterr().out.split()
    assert "results.csv" in printed
    assert (tmp_path / "theorem-a" / "results.csv").exists()


def test_cli_validate(tmp_path, capsys):
    good = tmp_path / "good.json"
    good.write_text(json.dumps(small_zero_sum_config()))
    assert main(["validate", str(good)]) == 0

    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps(small_zero_sum_config(count=-1)))
    assert main(["validate", str(bad)]) == 1
    assert "config error" in capsys.readouterr().err


def test_cli_missing_and_malformed_files_exit_one(tmp_path, capsys):
    assert main(["run", str(tmp_path / "absent.json")]) == 1
    broken = tmp_path / "broken.json"
    broken.write_text("{not json")
    assert main(["run", str(broken)]) == 1
    assert "config error" in capsys.readouterr().err


def test_cli_budget_exit_code(tmp_path, capsys):
    config = {
        "system": {"kind": "rotation", "angle": "preset:golden"},
        "cocycle": {"kind": "step", "breakpoints": ["0", "1/2"], "values": [1, -1]},
        "detector": {
            "kind": "induced",
            "target": {"intervals": [["0", "1/1000000"]]},
            "budget": 10,
        },
        "sampling": {"samples": 100, "seed": 0},
        "output": {"directory": "sliver", "formats": ["json"]},
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(config))
    assert main(["run", str(path), "--out", str(tmp_path)]) == 3
    assert "budget" in capsys.readouterr().err


def test_cli_precision_exit_code(tmp_path, monkeypatch, capsys):
    """Exit code 2 is reserved for precision exhaustion (mapping test)."""
    import ergolab.cli as cli_module

    def explode(raw, out_root=None):
        raise PrecisionExhaustedError("ambiguous comparison", step=17)

    monkeypatch.setattr(cli_module, "run_experiment", explode)
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(small_zero_sum_config()))
    assert main(["run", str(path)]) == 2
    assert "step 17" in capsys.readouterr().err


def test_cli_presets_lists_catalog(capsys):
    assert main(["presets"]) == 0
    out = capsys.readouterr().out
    for name in PRESET_NAMES:
        assert name in out


def test_cli_module_entry_point(tmp_path):
    """The installed console script path works end to end in a subprocess."""
    env = {"ERGOLAB_OUTPUT_ROOT": str(tmp_path), "PATH": "/usr/bin:/bin"}
    proc = subprocess.run(
        [sys.executable, "-m", "ergolab.cli", "run", "--preset", "theorem-a"],
        capture_output=True,
        text=True,
        env=env,
        cwd=str(tmp_path),
    )
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "theorem-a" / "manifest.json").exists()
