from click.testing import CliRunner

from gfsdro.cli.base import EXIT_FAILURE, EXIT_INVALID, EXIT_OK, main
from gfsdro.harness import serialize_spec, validate_spec
from test_harness import LS_SPEC, ORACLE_SPEC


def _invoke(*args):
    return CliRunner().invoke(main, ["--no-log-file", *args])


def test_validate_ok(tmp_path):
    path = tmp_path / "spec.toml"
    path.write_text(ORACLE_SPEC.format(method="wgf-ula", epsilon=0.5))
    result = _invoke("validate", str(path))
    assert result.exit_code == EXIT_OK
    assert "Valid spec" in result.output


def test_validate_echoes_canonical_spec(tmp_path):
    text = ORACLE_SPEC.format(method="wgf-ula", epsilon=0.5)
    path = tmp_path / "spec.toml"
    path.write_text(text)
    result = _invoke("validate", str(path))
    spec = validate_spec(text).ok_value
    echo = serialize_spec(spec)
    assert echo in result.output
    assert validate_spec(echo).ok_value == spec


def test_validate_invalid(tmp_path):
    path = tmp_path / "spec.toml"
    path.write_text(ORACLE_SPEC.format(method="svgd", epsilon=0.0))
    result = _invoke("validate", str(path))
    assert result.exit_code == EXIT_INVALID
    assert "svgd" in result.output


def test_run_invalid_spec(tmp_path):
    path = tmp_path / "spec.toml"
    path.write_text(ORACLE_SPEC.format(method="wgf-ula", epsilon=0.5).replace("tau = 0.5", "tau = -1.0"))
    result = _invoke("run", str(path), "--output-dir", str(tmp_path / "out"))
    assert result.exit_code == EXIT_INVALID


def test_run_writes_tables(tmp_path):
    path = tmp_path / "spec.toml"
    path.write_text(LS_SPEC.format(method="saa", name=""))
    out = tmp_path / "out"
    result = _invoke("run", str(path), "--output-dir", str(out), "--no-progress")
    assert result.exit_code == EXIT_OK, result.output
    assert (out / "robustness_curve.csv").exists()


def test_runtime_failure(tmp_path):
    features = tmp_path / "features.txt"
    features.write_text("gfsdro-features v1 n=2 d=1 classes=2\n0.5 1\n")
    path = tmp_path / "spec.toml"
    path.write_text(
        "\n".join(
            [
                'experiment = "feature-robustness"',
                'method = "saa"',
                "seed = 0",
                "[params]",
                "tau = 1.0",
                "epsilon = 0.1",
                "[dataset]",
                'kind = "feature-file"',
                f'path = "{features.as_posix()}"',
                "[outer]",
                "epochs = 1",
                "stepsize = 0.1",
            ]
        )
    )
    result = _invoke("run", str(path), "--output-dir", str(tmp_path / "out"))
    assert result.exit_code == EXIT_FAILURE


def test_compare_mismatch(tmp_path):
    first = tmp_path / "a.toml"
    second = tmp_path / "b.toml"
    first.write_text(LS_SPEC.format(method="saa", name=""))
    second.write_text(LS_SPEC.format(method="saa", name="").replace("seed = 3", "seed = 5"))
    result = _invoke("compare", str(first), str(second), "--output-dir", str(tmp_path / "cmp"))
    assert result.exit_code == EXIT_FAILURE


def test_gradcheck():
    result = _invoke("gradcheck", "--points", "3")
    assert result.exit_code == EXIT_OK


def test_missing_feature_file(tmp_path):
    path = tmp_path / "spec.toml"
    path.write_text(
        "\n".join(
            [
                'experiment = "feature-robustness"',
                'method = "saa"',
                "seed = 0",
                "[params]",
                "tau = 1.0",
                "epsilon = 0.1",
                "[dataset]",
                'kind = "feature-file"',
                f'path = "{(tmp_path / "nope.txt").as_posix()}"',
                "[outer]",
                "epochs = 1",
                "stepsize = 0.1",
            ]
        )
    )
    result = _invoke("run", str(path), "--output-dir", str(tmp_path / "out"))
    assert result.exit_code == EXIT_FAILURE
