import json
import subprocess
import sys
from fractions import Fraction

import pytest

from conftest import DATA
from opcmlink.cli import main
from opcmlink.relational import load_hierarchies, load_relation, natural_join, relation_rows

HIER = str(DATA / "post_hierarchy.json")


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_check_laws_targets(capsys):
    for target in (f"prefix:{DATA / 'post.txt'}", "possibility:3", "flat:3", "product:flat:2,flat:2"):
        code, out, _ = run(capsys, "check-laws", target)
        assert code == 0, out
        assert ": ok" in out.splitlines()[0]


def test_check_laws_groth(capsys):
    code, out, _ = run(capsys, "check-laws", f"groth:{DATA / 'schema_ab.json'}")
    assert code == 0
    assert "functor/composition" in out


def test_check_laws_mutated_dump(capsys):
    code, out, _ = run(capsys, "check-laws", f"table:{DATA / 'post_mutated.txt'}")
    assert code == 1
    assert "witness: SA, SA1 3" in out
    code, _, _ = run(capsys, "check-laws", f"table:{DATA / 'post_dump.txt'}")
    assert code == 0


def test_check_laws_json(capsys):
    code, out, _ = run(capsys, "check-laws", "possibility:2", "--json")
    data = json.loads(out)
    assert code == 0 and data["ok"] is True
    assert set(data["laws"]) == {"preorder", "OPCM1", "OPCM2", "OPCM3", "OPCM4"}


def test_check_laws_bad_targets(capsys):
    assert run(capsys, "check-laws", "bogus:1")[0] == 2
    assert run(capsys, "check-laws", "flat")[0] == 2
    assert run(capsys, "check-laws", "prefix:/nonexistent/file")[0] == 2
    with pytest.raises(SystemExit) as exc:
        main(["no-such-command"])
    assert exc.value.code == 2


def test_join_golden(tmp_path, capsys):
    out = tmp_path / "out.csv"
    code, stdout, _ = run(capsys, "join", DATA / "suspects.csv", DATA / "owners.csv", out)
    assert code == 0
    assert out.read_bytes() == (DATA / "join_golden.csv").read_bytes()
    assert stdout.splitlines()[-1].endswith("2 rows")
    R, _ = load_relation(DATA / "suspects.csv")
    S, _ = load_relation(DATA / "owners.csv")
    rows = relation_rows(natural_join(R, S), ["person", "addr", "person2"])
    assert out.read_text().splitlines()[1:] == [",".join(r) for r in rows]


def test_join_with_full_relation_pads(tmp_path, capsys):
    full = tmp_path / "full.csv"
    full.write_text("addr,flag\n1 High St,y\n1 High St,n\n2 Mill Ln,y\n2 Mill Ln,n\n3 Quay Rd,y\n3 Quay Rd,n\n")
    out = tmp_path / "out.csv"
    assert run(capsys, "join", DATA / "suspects.csv", full, out)[0] == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "person,addr,flag"
    assert len(lines) - 1 == 3 * 2


def test_join_disjoint_is_cartesian(tmp_path, capsys):
    other = tmp_path / "colours.csv"
    other.write_text("colour\nred\nblue\n")
    out = tmp_path / "out.csv"
    assert run(capsys, "join", DATA / "suspects.csv", other, out)[0] == 0
    assert len(out.read_text().splitlines()) - 1 == 3 * 2


def test_join_inconsistent(tmp_path, capsys):
    other = tmp_path / "o.csv"
    other.write_text("addr,person2\n7 Nowhere,zed\n")
    code, _, err = run(capsys, "join", DATA / "suspects.csv", other, tmp_path / "out.csv")
    assert code == 1
    assert "inconsistent: empty join" in err


def test_join_collapses_duplicates(tmp_path, capsys, caplog):
    dup = tmp_path / "dup.csv"
    dup.write_text("person,addr\nalice,1 High St\nalice,1 High St\n")
    out = tmp_path / "out.csv"
    code, stdout, err = run(capsys, "join", dup, DATA / "owners.csv", out)
    assert code == 0
    assert "2 rows, 1 distinct" in stdout
    assert "collapsed 1 duplicate" in caplog.text
    assert out.read_text().splitlines()[1:] == ["alice,1 High St,dave"]


def test_join_help_mentions_set_semantics(capsys):
    with pytest.raises(SystemExit):
        main(["join", "--help"])
    assert "set semantics" in capsys.readouterr().out


def test_generalize_golden(tmp_path, capsys):
    out = tmp_path / "b.csv"
    code, _, _ = run(
        capsys, "generalize", DATA / "postcodes.csv", out,
        "--attr", "Postcode", "--level", "sector", "--hierarchy", HIER, "--drop", "User ID",
    )
    assert code == 0
    assert out.read_bytes() == (DATA / "postcodes_sector_golden.csv").read_bytes()


def test_generalize_leaf_and_root(tmp_path, capsys):
    leaf, root = tmp_path / "leaf.csv", tmp_path / "root.csv"
    args = ("--attr", "Postcode", "--hierarchy", HIER)
    assert run(capsys, "generalize", DATA / "postcodes.csv", leaf, "--level", "unit", *args)[0] == 0
    assert leaf.read_bytes() == (DATA / "postcodes.csv").read_bytes()
    assert run(capsys, "generalize", DATA / "postcodes.csv", root, "--level", "0", *args)[0] == 0
    assert {ln.split(",")[1] for ln in root.read_text().splitlines()[1:]} == {"ε"}


def test_generalize_uncovered(tmp_path, capsys):
    bad = tmp_path / "bad.csv"
    bad.write_text("User ID,Postcode\n1,SW1A 1AA\n")
    code, _, err = run(
        capsys, "generalize", bad, tmp_path / "o.csv",
        "--attr", "Postcode", "--level", "sector", "--hierarchy", HIER,
    )
    assert code == 1 and "SW1A 1AA" in err


def test_freq_examples(capsys):
    code, out, _ = run(capsys, "freq", DATA / "postcodes_sector.csv", "--attr", "Postcode", "--at-least", "SA2", "--hierarchy", HIER)
    assert code == 0 and out.splitlines() == ["3/4", "0.750000"]
    assert run(capsys, "freq", DATA / "postcodes_sector.csv", "--attr", "Postcode", "--at-least", "ε")[1].splitlines()[0] == "1"
    assert run(capsys, "freq", DATA / "postcodes.csv", "--attr", "Postcode", "--at-least", "SA2 8PP")[1].splitlines()[0] == "1/4"
    code, out, _ = run(capsys, "freq", DATA / "postcodes_sector.csv", "--attr", "Postcode", "--at-least", "SA2", "--json")
    assert json.loads(out)["fraction"] == "3/4"


def test_freq_invalid_code(capsys):
    assert run(capsys, "freq", DATA / "postcodes_sector.csv", "--attr", "Postcode", "--at-least", "SW1", "--hierarchy", HIER)[0] == 1
    assert run(capsys, "freq", DATA / "postcodes_sector.csv", "--attr", "Postcode", "--at-least", "SW1")[0] == 1
    assert run(capsys, "freq", DATA / "postcodes_sector.csv", "--attr", "Nope", "--at-least", "SA")[0] == 2


def test_freq_antitone_along_hierarchy(capsys):
    h = load_hierarchies(HIER)["Postcode"]
    nodes = sorted(h.nodes())

    def freq(path, code):
        code_, out, _ = run(capsys, "freq", path, "--attr", "Postcode", "--at-least", code, "--hierarchy", HIER)
        assert code_ == 0
        return Fraction(out.splitlines()[0])

    for path in (DATA / "postcodes.csv", DATA / "postcodes_sector.csv"):
        values = {c: freq(path, c) for c in nodes}
        for c in nodes:
            for d in nodes:
                if h.is_ancestor(c, d):
                    assert values[d] <= values[c]


def test_audit_examples(tmp_path, capsys):
    assert run(capsys, "audit", DATA / "postcodes.csv", "--quasi", "Postcode")[1].splitlines()[0] == "unique: 4/4"
    code, out, _ = run(capsys, "audit", DATA / "postcodes_sector.csv", "--quasi", "Postcode", "--json")
    data = json.loads(out)
    assert code == 0 and data["fraction"] == "1/4" and data["histogram"] == {"1": 1, "3": 1}
    one = tmp_path / "one.csv"
    one.write_text("a\nx\n")
    assert run(capsys, "audit", one, "--quasi", "a")[1].splitlines()[0] == "unique: 1/1"
    assert run(capsys, "audit", one, "--quasi", "b")[0] == 2


def test_generalize_never_increases_uniqueness(tmp_path, capsys):
    def unique(path):
        out = run(capsys, "audit", path, "--quasi", "Postcode", "--json")[1]
        d = json.loads(out)
        return Fraction(d["unique"], d["rows"])

    base = unique(DATA / "postcodes.csv")
    for level in range(5):
        out = tmp_path / f"g{level}.csv"
        run(capsys, "generalize", DATA / "postcodes.csv", out, "--attr", "Postcode", "--level", level, "--hierarchy", HIER)
        assert unique(out) <= base


def test_outputs_are_deterministic(tmp_path, capsys):
    outs = []
    for k in range(2):
        out = tmp_path / f"j{k}.csv"
        run(capsys, "join", DATA / "suspects.csv", DATA / "owners.csv", out)
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "opcmlink", "check-laws", "possibility:2"],
        capture_output=True, text=True, check=False,
    )
    assert proc.returncode == 0
    assert "OPCM4" in proc.stdout
