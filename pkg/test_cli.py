#!/usr/bin/env python3
"""Test the command-line surface end to end with click's runner."""
from pathlib import Path

import orjson
import pytest
from click.testing import CliRunner

from app.main import cli

DATA = Path(__file__).parent / "data"
QUINTUPLE = DATA / "quintuple_degree6.json"


@pytest.fixture
def runner():
    return CliRunner()


def _json(result):
    assert result.exit_code == 0, result.output
    return orjson.loads(result.stdout)


def test_dims_json(runner):
    payload = _json(runner.invoke(cli, ["--format", "json", "dims"]))
    rows = {row["d"]: (row["U"], row["sym"], row["sgn"]) for row in payload["rows"]}
    assert rows[6] == (1, 0, 1)
    assert rows[16] == (1313, 39, 10)
    assert payload["provenance"]["command"] == "dims"
    assert "threads" not in payload["provenance"]


def test_dims_text(runner):
    result = runner.invoke(cli, ["dims", "--max-degree", "8"])
    assert result.exit_code == 0
    lines = result.stdout.strip().splitlines()
    assert lines[0].split() == ["d", "U", "sym", "sgn"]
    assert lines[-1].split() == ["8", "36", "4", "0"]


def test_dims_out_of_range_is_input_error(runner):
    result = runner.invoke(cli, ["dims", "--max-degree", "40"])
    assert result.exit_code == 2
    assert "input error" in result.stderr


def test_sample_then_eval_vanishes_at_rank_five(runner, tmp_path):
    tensor = tmp_path / "t.json"
    sampled = _json(runner.invoke(cli, ["--format", "json", "--seed", "4", "sample", "--rank", "5", "--out", str(tensor)]))
    assert tensor.exists()
    assert all(rank <= 4 for rank in sampled["flattening_ranks"].values())
    result = runner.invoke(cli, ["eval", str(QUINTUPLE), str(tensor)])
    assert result.exit_code == 0, result.output
    assert result.stdout.strip() == "0"


def test_eval_generic_is_nonzero_and_modular(runner, tmp_path):
    tensor = tmp_path / "g.json"
    assert runner.invoke(cli, ["--seed", "9", "sample", "--generic", "--out", str(tensor)]).exit_code == 0
    exact = _json(runner.invoke(cli, ["--format", "json", "eval", str(QUINTUPLE), str(tensor)]))
    p = 1000000007
    modular = _json(runner.invoke(cli, ["--format", "json", "eval", "--modulus", str(p), str(QUINTUPLE), str(tensor)]))
    assert int(exact["value"]) % p == int(modular["value"])
    assert modular["provenance"]["primes"] == [str(p)]


def test_eval_rejects_composite_modulus(runner, tmp_path):
    tensor = tmp_path / "g.json"
    runner.invoke(cli, ["sample", "--generic", "--out", str(tensor)])
    result = runner.invoke(cli, ["eval", "--modulus", "15", str(QUINTUPLE), str(tensor)])
    assert result.exit_code == 2


def test_sample_needs_exactly_one_mode(runner):
    assert runner.invoke(cli, ["sample"]).exit_code == 2
    assert runner.invoke(cli, ["sample", "--rank", "2", "--generic"]).exit_code == 2


def test_malformed_json_is_input_error(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 5,\n "entries": {\n')
    result = runner.invoke(cli, ["eval", str(QUINTUPLE), str(bad)])
    assert result.exit_code == 2
    assert "invalid JSON" in result.stderr


def test_schema_error_reports_line(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{\n  "n": 5,\n  "entries": {\n    "00000": [1]\n  }\n}\n')
    result = runner.invoke(cli, ["eval", str(QUINTUPLE), str(bad)])
    assert result.exit_code == 2
    assert "schema error" in result.stderr
    assert "line 4" in result.stderr


def test_bad_tensor_key_is_schema_error(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"n": 5, "entries": {"0101": "1"}}')
    result = runner.invoke(cli, ["eval", str(QUINTUPLE), str(bad)])
    assert result.exit_code == 2


def test_missing_file_is_input_error(runner, tmp_path):
    result = runner.invoke(cli, ["eval", str(QUINTUPLE), str(tmp_path / "nope.json")])
    assert result.exit_code == 2


def test_verify_f6_passes(runner):
    payload = _json(runner.invoke(cli, ["--format", "json", "verify-f6", "--points", "3"]))
    assert payload["pass"] is True
    assert payload["checks"]["c_secant_vanishing"]["points"] == 3
    assert payload["provenance"]["points"] == 3


def test_lift_passes(runner):
    payload = _json(runner.invoke(cli, ["--format", "json", "lift", "--trials", "3"]))
    assert payload["pass"] is True
    assert len(payload["trials"]) == 3
    assert payload["generic_witness"] is not None


def test_lift_needs_five_factors(runner):
    assert runner.invoke(cli, ["lift", "--factors", "4"]).exit_code == 2


def test_lift_inherits_to_larger_dimensions(runner):
    payload = _json(runner.invoke(cli, ["--format", "json", "lift", "--dims", "3,2,2,2,2", "--trials", "2"]))
    assert payload["pass"] is True
    assert payload["dims"] == [3, 2, 2, 2, 2]
    assert [t["value"] for t in payload["trials"]] == ["0", "0"]
    assert payload["provenance"]["dims"] == [3, 2, 2, 2, 2]


def test_lift_rejects_bad_dims(runner):
    assert runner.invoke(cli, ["lift", "--dims", "3,2,2"]).exit_code == 2
    assert runner.invoke(cli, ["lift", "--dims", "3,1,2,2,2"]).exit_code == 2


def test_search_degree6(runner):
    payload = _json(runner.invoke(cli, ["--format", "json", "search", "--degree", "6", "--symmetry", "sgn", "--rank", "5"]))
    assert payload["kernel"]["dimension"] == 1
    assert payload["quotient"]["new_generators"] == 0
    assert payload["provenance"]["degree"] == 6
    assert payload["known_outcome"]["matches"] is True


def test_search_text(runner):
    result = runner.invoke(cli, ["search", "--degree", "4", "--symmetry", "sym", "--rank", "5", "--no-quotient"])
    assert result.exit_code == 0, result.output
    assert "kernel dimension: 0" in result.stdout
    assert "matches the known rank-5 outcome: kernel 0, 0 new" in result.stdout


def test_search_extended_guard(runner):
    result = runner.invoke(cli, ["search", "--degree", "12", "--symmetry", "sgn", "--rank", "5"])
    assert result.exit_code == 2


def test_search_bad_modulus(runner):
    result = runner.invoke(cli, ["search", "--degree", "6", "--symmetry", "sgn", "--rank", "5", "--modulus", "12"])
    assert result.exit_code == 2
    result = runner.invoke(cli, ["search", "--degree", "6", "--symmetry", "sgn", "--rank", "5", "--modulus", "many"])
    assert result.exit_code == 2


def test_search_writes_checkpoint_artifacts(runner, tmp_path):
    args = ["--format", "json", "--checkpoint", str(tmp_path), "search", "--degree", "6", "--symmetry", "sgn", "--rank", "5"]
    first = runner.invoke(cli, args)
    assert first.exit_code == 0, first.output
    assert (tmp_path / "checkpoint.db").exists()
    assert (tmp_path / "basis-s0-d6-sgn-exact.json").exists()
    report = orjson.loads((tmp_path / "search-d6-sgn-r5-s0.json").read_bytes())
    assert report["kernel"]["dimension"] == 1
    second = runner.invoke(cli, args)
    assert second.stdout == first.stdout


@pytest.mark.parametrize("args", [
    ["dims"],
    ["sample", "--rank", "3"],
    ["search", "--degree", "4", "--symmetry", "full", "--rank", "5", "--no-quotient"],
])
def test_output_is_byte_identical_across_runs_and_threads(runner, args):
    outputs = {
        runner.invoke(cli, ["--format", "json", "--seed", "12", "--threads", threads] + args).stdout
        for threads in ("1", "3", "1")
    }
    assert len(outputs) == 1
