import json
import subprocess
import sys

import pytest

from fullgroup.cli import main
from fullgroup.cylinder import CylinderSet
from fullgroup.equidecompose import EquidecompResult
from fullgroup.maps import SWAP, TableMap, from_leaf_perm, LeafPerm


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def tables(tmp_path):
    swap = tmp_path / "swap.tbl"
    swap.write_text(json.dumps(SWAP.to_json()))
    ident = tmp_path / "id.tbl"
    ident.write_text(json.dumps({"pairs": [["", ""]]}))
    return swap, ident


def test_du_example(capsys, tables):
    swap, ident = tables
    code, out, _ = run(capsys, "du", "--lambda", "2/3", "--left", str(swap), "--right", str(ident))
    assert code == 0 and out.strip() == "1/1"


def test_census_example(capsys, tables):
    swap, _ = tables
    code, out, _ = run(capsys, "census", "--lambda", "2/3", "--level", "2", "--tuple", str(swap), "--json")
    data = json.loads(out)
    assert code == 0 and len(data) == 1
    assert data[0]["type"] == "2:1,0" and data[0]["count"] == 2 and data[0]["mass"] == "1/1"
    assert data[0]["blocks"] == [[0, 2], [1, 3]]


def test_equidecompose_obstruction_exit(capsys):
    code, _, err = run(capsys, "equidecompose", "--lambda", "1/2", "--A", "0", "--B", "10")
    assert code == 1 and "invariant-measure obstruction" in err


def test_parse_errors_exit_two(capsys):
    assert run(capsys, "measure", "--set", "0a1")[0] == 2
    assert run(capsys, "compose", "--left", "{bad json", "--right", "id")[0] == 2
    assert run(capsys, "compose", "--left", "/no/such/file", "--right", "id")[0] == 2


def test_domain_error_prints_certificate(capsys):
    code, _, err = run(capsys, "prec", "--A", "0", "--B", "10")
    assert code == 1
    assert json.loads(err.strip().splitlines()[-1]) == {"kraft_A": "1/2", "kraft_B": "1/4"}


def test_json_outputs_round_trip(capsys, tmp_path):
    code, out, _ = run(capsys, "compose", "--left", "swap", "--right", "odometer:3", "--json")
    assert code == 0
    f = TableMap.from_json(json.loads(out))
    assert TableMap.from_json(f.to_json()) == f
    code, out, _ = run(capsys, "equidecompose", "--lambda", "2/3", "--epsilon", "1/8",
                       "--A", "0", "--B", "10", "--json", "--output", str(tmp_path / "r.json"))
    r = EquidecompResult.from_json(json.loads(out))
    assert r.to_json() == json.loads(out)
    assert (tmp_path / "r.json").read_text().strip() == out.strip()
    code, out, _ = run(capsys, "measure", "--set", "00,01,110", "--json")
    assert CylinderSet.from_json(json.loads(out)["set"]).to_json() == ["0", "110"]


def test_leaf_perm_input(capsys):
    spec = json.dumps({"level": 2, "perm": [1, 0, 2, 3]})
    code, out, _ = run(capsys, "support", "--map", spec, "--json")
    assert code == 0 and json.loads(out) == ["0"]


@pytest.mark.parametrize("argv", [
    ["measure", "--set", "X", "--lambda", "2/3"],
    ["cocycle", "--map", "swap", "--lambda", "1/3"],
    ["odometer", "--depth", "3", "--lambda", "2/3"],
    ["en-check", "--tuple", "id", "--level", "1", "--s", "1", "--N", "2"],
    ["conjugate", "--source", "swap", "--target", json.dumps({"level": 2, "perm": [1, 0, 3, 2]}),
     "--level", "2"],
    ["three-cycle", "--lambda", "2/3"],
    ["psi", "--sigma", "1,2,3,0"],
    ["phi", "--map", "swap"],
    ["densify", "--tuple", "id", "--level", "1", "--lambda", "2/3", "--epsilon", "3/8"],
    ["orbit-member", "--fn", json.dumps({"pieces": [["0", 1], ["1", 2]]}), "--degree", "3"],
    ["prec", "--A", "00", "--B", "1"],
])
def test_subcommands_succeed(capsys, argv):
    code, out, _ = run(capsys, *argv)
    assert code == 0 and out.strip()
    code, out, _ = run(capsys, *argv, "--json")
    json.loads(out)


def test_orbit_member_refusal(capsys):
    fn = json.dumps({"pieces": [["0", 0], ["1", 2]]})
    code, _, err = run(capsys, "orbit-member", "--fn", fn, "--degree", "3", "--gens", "1,0,2")
    assert code == 1 and '["1", 2]' in err


def test_max_depth_flag(capsys):
    code, _, err = run(capsys, "equidecompose", "--lambda", "2/3", "--epsilon", "1/20",
                       "--A", "0", "--B", "10", "--max-depth", "8")
    assert code == 1 and "MAX_DEPTH=8" in err
    from fullgroup import cylinder
    assert cylinder.MAX_DEPTH == 32


def test_output_is_byte_identical():
    argv = [sys.executable, "-m", "fullgroup", "conjugate", "--lambda", "2/3", "--epsilon", "1/16",
            "--source", json.dumps({"level": 3, "perm": [1, 0, 2, 3, 4, 5, 6, 7]}),
            "--target", json.dumps({"level": 3, "perm": [0, 1, 2, 3, 5, 4, 7, 6]}), "--json"]
    first = subprocess.run(argv, capture_output=True, check=True).stdout
    second = subprocess.run(argv, capture_output=True, check=True).stdout
    assert first == second and json.loads(first)["residual"] == "379/6561"
