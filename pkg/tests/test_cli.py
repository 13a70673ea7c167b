"""Network loader and the command-line surface, end to end."""

from __future__ import annotations

import numpy as np
import pytest

from kgnp.cli import main
from kgnp.errors import DataError
from kgnp.network import load_network
from kgnp.terms import Atom

TRIPLES = """
(Li, directed, Hero)
(Li, born-in, Beijing)
(Gong, starred-in, Hero)
class(Person, Li)
class(Person, Gong)
schema(Films)
"""

FAMILY = """
parent('Tom', 'Bob').
parent('Tom', 'Liz').
parent('Bob', 'Ann').
grandparent(X, Z) <- parent(X, Y), parent(Y, Z).
"""


def cardio_csv(path, count=60, labelled=True, start=0):
    header = "id;age;gender;height;weight;ap_hi;ap_lo;cholesterol;gluc;smoke;alco;active"
    if labelled:
        header += ";cardio"
    rows = [header]
    rng = np.random.default_rng(7)
    for i in range(count):
        pos = i % 2 == 0
        age = int(rng.integers(60, 75)) if pos else int(rng.integers(30, 45))
        ap_hi = int(rng.integers(150, 175)) if pos else int(rng.integers(105, 125))
        ap_lo = int(rng.integers(90, 105)) if pos else int(rng.integers(65, 78))
        chol = 3 if pos else 1
        row = "%d;%d;%d;%.2f;%d;%d;%d;%d;1;0;0;1" % (
            start + i, age, 1 + i % 2, 1.6 + 0.01 * (i % 20), 60 + i % 30,
            ap_hi, ap_lo, chol,
        )
        if labelled:
            row += ";%d" % (1 if pos else 0)
        rows.append(row)
    path.write_text("\n".join(rows) + "\n")
    return path


def without_timing(text):
    return "\n".join(l for l in text.splitlines() if not l.startswith("# time:"))


# -- network loader --------------------------------------------------------


def write_network(tmp_path, policy_lines=""):
    (tmp_path / "films.triples").write_text(TRIPLES)
    (tmp_path / "films.kgnpl").write_text("local-hit('Li') <- directed('Li', X).")
    toml = (
        '[[graph]]\nname = "films"\ntriples = "films.triples"\n'
        'program = "films.kgnpl"\n' + policy_lines
    )
    toml += '\n[[graph]]\nname = "other"\ntriples = "films.triples"\n'
    toml += '\n[[link]]\nfrom = "films"\nto = "other"\n'
    path = tmp_path / "net.toml"
    path.write_text(toml)
    return path


def test_load_network(tmp_path):
    net = load_network(write_network(tmp_path))
    assert set(net.graphs) == {"films", "other"}
    assert net.has_link("films", "other")
    assert not net.has_link("other", "films")
    assert net.graph("films").local_program is not None
    assert len(net.graph("films").triplets) == 3


def test_load_network_policy(tmp_path):
    policy = (
        "[graph.policy]\n"
        'entity_blocklist = ["\'Gong\'"]\n'
        'deny_read = ["Secret"]\n'
        "lpp_only = true\n"
        'function_blocklist = ["output"]\n'
        "[graph.policy.loop_caps]\nsnapshot = 250\n"
    )
    net = load_network(write_network(tmp_path, policy))
    p = net.graph("films").policy
    assert p.entity_blocklist == {Atom("Gong")}
    assert p.group_rules == {("secret", "deny-read")}
    assert p.lpp_only is True
    assert p.function_blocklist == {"output"}
    assert p.loop_caps == {"snapshot": 250}


def test_load_network_errors(tmp_path):
    bad = tmp_path / "bad.toml"
    bad.write_text("this is not toml [[[")
    with pytest.raises(DataError):
        load_network(bad)
    bad.write_text('[[graph]]\nname = "g"\ntriples = "missing.triples"\n')
    with pytest.raises(DataError):
        load_network(bad)
    (tmp_path / "g.triples").write_text("(a, r, b)\n")
    bad.write_text(
        '[[graph]]\nname = "g"\ntriples = "g.triples"\n[graph.policy]\nfrobnicate = 1\n'
    )
    with pytest.raises(DataError):
        load_network(bad)


# -- run -------------------------------------------------------------------


def test_run_plain(tmp_path, capsys):
    prog = tmp_path / "family.kgnpl"
    prog.write_text(FAMILY)
    assert main(["run", str(prog), "--query", "? grandparent('Tom', Z)."]) == 0
    assert capsys.readouterr().out == "Z = 'Ann'\n"


def test_run_no_solutions(tmp_path, capsys):
    prog = tmp_path / "family.kgnpl"
    prog.write_text(FAMILY)
    assert main(["run", str(prog), "--query", "? parent('Ann', X)."]) == 0
    assert capsys.readouterr().out == "no\n"


def test_run_csv_and_json(tmp_path, capsys):
    prog = tmp_path / "family.kgnpl"
    prog.write_text(FAMILY)
    assert main(["run", str(prog), "--format", "csv", "--query", "? parent('Tom', X)."]) == 0
    assert capsys.readouterr().out == "X\n'Bob'\n'Liz'\n"
    assert main(["run", str(prog), "--format", "json", "--query", "? parent(P, 'Ann')."]) == 0
    out = capsys.readouterr().out
    assert '"P": "\'Bob\'"' in out


def test_run_output_file_includes_sink(tmp_path):
    prog = tmp_path / "p.kgnpl"
    prog.write_text("go <- output(hello).")
    out = tmp_path / "result.txt"
    assert main(["run", str(prog), "--output", str(out), "--query", "? go."]) == 0
    assert out.read_text() == "hello\nyes\n"


def test_run_against_network(tmp_path, capsys):
    net = write_network(tmp_path)
    assert (
        main(["run", "--network", str(net), "--query", "? #films# directed('Li', F)."])
        == 0
    )
    assert capsys.readouterr().out == "F = 'Hero'\n"


def test_run_exit_codes(tmp_path, capsys):
    prog = tmp_path / "p.kgnpl"
    prog.write_text("p(a).")
    assert main(["frobnicate"]) == 1
    assert main(["run", str(tmp_path / "missing.kgnpl"), "--query", "? p(X)."]) == 2
    bad = tmp_path / "bad.kgnpl"
    bad.write_text("p(a")
    assert main(["run", str(bad), "--query", "? p(X)."]) == 2
    assert main(["run", str(prog), "--query", "? nosuch(X)."]) == 3
    capsys.readouterr()


# -- train / classify / sweep-k -------------------------------------------


@pytest.fixture(scope="module")
def trained(tmp_path_factory):
    tmp = tmp_path_factory.mktemp("trained")
    data = cardio_csv(tmp / "data.csv")
    cfg = tmp / "cfg.toml"
    cfg.write_text('n = 16\nepochs = 12\nlearning_rate = 0.01\nc = 0.2\n')
    out = tmp / "space.kgv"
    assert main(["train", "--data", str(data), "--config", str(cfg), "--out", str(out)]) == 0
    return tmp, out


def test_train_reports_and_persists(trained, capsys):
    tmp, out = trained
    assert out.exists()
    # retrain to observe its report lines (the fixture ate the first ones)
    out2 = tmp / "space2.kgv"
    cfg = tmp / "cfg.toml"
    assert main(
        ["train", "--data", str(tmp / "data.csv"), "--config", str(cfg), "--out", str(out2)]
    ) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("trained 60 records into")
    assert lines[1].startswith("# time: train ")
    assert out.read_bytes() == out2.read_bytes()  # same seed, same space


def test_train_rejects_unknown_config(tmp_path, capsys):
    data = cardio_csv(tmp_path / "d.csv", count=10)
    cfg = tmp_path / "cfg.toml"
    cfg.write_text("zzz = 1\n")
    assert main(["train", "--data", str(data), "--config", str(cfg), "--out", "x"]) == 2
    capsys.readouterr()


def test_classify(trained, tmp_path, capsys):
    _, space = trained
    records = cardio_csv(tmp_path / "unseen.csv", count=6, labelled=False, start=900)
    assert main(["classify", "--space", str(space), "--record", str(records)]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "id;chance"
    assert len(lines) == 7
    for line in lines[1:]:
        rid, chance = line.split(";")
        assert 0.0 <= float(chance) <= 1.0


def test_classify_deterministic(trained, tmp_path, capsys):
    _, space = trained
    records = cardio_csv(tmp_path / "unseen.csv", count=4, labelled=False, start=900)
    argv = ["classify", "--space", str(space), "--record", str(records), "-J", "3", "-K", "7"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    assert capsys.readouterr().out == first


def test_sweep_k(trained, tmp_path, capsys):
    _, space = trained
    records = cardio_csv(tmp_path / "unseen.csv", count=3, labelled=False, start=900)
    plot = tmp_path / "sweep.png"
    argv = [
        "sweep-k", "--space", str(space), "--records", str(records),
        "-J", "3", "-K", "5,10,20", "--plot", str(plot),
    ]
    assert main(argv) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "K,900,901,902,average"
    assert [l.split(",")[0] for l in lines[1:]] == ["5", "10", "20"]
    assert plot.exists() and plot.stat().st_size > 0
    assert main(["sweep-k", "--space", str(space), "--records", str(records), "-K", "x"]) == 1
    capsys.readouterr()


def test_import_vectors_cli(tmp_path, capsys):
    vec = tmp_path / "v.csv"
    lab = tmp_path / "l.csv"
    vec.write_text("a,1.0,0.0\nb,0.0,1.0\n")
    lab.write_text("a,1\nb,0\n")
    out = tmp_path / "imported.kgv"
    assert main(["import-vectors", "--vectors", str(vec), "--labels", str(lab), "--out", str(out)]) == 0
    assert "imported 2 vectors (n=2)" in capsys.readouterr().out
    assert out.exists()


# -- argue -----------------------------------------------------------------


def test_argue_cli(tmp_path, capsys):
    session = tmp_path / "session.txt"
    session.write_text(
        "d1/A1 cure-rate(40%) <- regimen-a.\n"
        "d2/A2 cure-rate(70%) <- regimen-b.\n"
        "d1/A3 cure-rate(70%) <- regimen-c.\n"
    )
    dot = tmp_path / "graph.dot"
    assert main(
        ["argue", "--session", str(session), "--prefer", "cure-rate", "--dot", str(dot)]
    ) == 0
    out = capsys.readouterr().out
    assert "regimen-b=regimen-c" in out
    assert "regimen-a -> regimen-b=regimen-c" in out
    assert dot.read_text().startswith("digraph competition {")


def test_argue_modes_differ(tmp_path, capsys):
    session = tmp_path / "session.txt"
    session.write_text(
        "d/1 rate(4), rate(6) <- a.\n"
        "d/2 rate(2), rate(8) <- b.\n"
    )
    assert main(["argue", "--session", str(session), "--merge", "union", "--mode", "angelic"]) == 0
    angelic = capsys.readouterr().out
    assert main(["argue", "--session", str(session), "--merge", "union", "--mode", "demonic"]) == 0
    demonic = capsys.readouterr().out
    assert "a -> b" in angelic
    assert "b -> a" in demonic


# -- stats -----------------------------------------------------------------


def test_stats_deterministic_and_plots(tmp_path, capsys):
    data = cardio_csv(tmp_path / "data.csv", count=200)
    plot = tmp_path / "rates.png"
    argv = ["stats", "--data", str(data), "--sample", "150", "--plot", str(plot)]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    second = capsys.readouterr().out
    assert without_timing(first) == without_timing(second)
    lines = without_timing(first).splitlines()
    assert len(lines) == 9
    rates = [float(l.split(";")[1]) for l in lines]
    assert rates == sorted(rates, reverse=True)
    assert plot.exists() and plot.stat().st_size > 0


# -- gain ------------------------------------------------------------------


def test_gain_cli(capsys):
    assert main(["gain", "0.7080", "0.6875", "6.25", "1.00"]) == 0
    assert capsys.readouterr().out == "6.069032485875707\n"
    assert main(["gain", "0.5", "0.5", "1.0", "0"]) == 2
    capsys.readouterr()
