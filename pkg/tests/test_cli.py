import io
import json
import subprocess
import sys

import numpy as np
import pydot
import pytest

from tnuca.cli import main
from tnuca.serialize import RenderSpec, read_dot, read_ppm

import oracle

BLUE, RED, WHITE = (0, 0, 255), (255, 0, 0), (255, 255, 255)


def run(*argv):
    buf = io.StringIO()
    code = main(list(argv), out=buf)
    return code, buf.getvalue()


def run_json(*argv):
    code, text = run(*argv)
    assert code == 0
    return json.loads(text)


def test_classify_json():
    doc = run_json("classify", "--f", "170", "--g", "85", "--n", "4", "--seq", "A005408")
    assert doc["schemaVersion"] == 1
    assert doc["verdicts"]["reversible"] is True
    doc = run_json("classify", "--f", "229", "--g", "85", "--n", "5", "--seq", "A001651")
    assert doc["verdicts"]["weaklyReversible"] is True
    assert doc["witnesses"]["collision"] == [0, 31, 31]


def test_classify_cin_verifies():
    doc = run_json("classify", "--f", "7", "--g", "40", "--n", "4", "--seq", "A001651")
    cin = ",".join(map(str, doc["witnesses"]["Cin"]))
    ver = run_json("verify", "--f", "7", "--g", "40", "--n", "4", "--seq", "A001651", "--cin", cin)
    assert ver["restrictedReversible"] is True and ver["missing"] == []


def test_diagram_combined_counts():
    code, text = run("diagram", "--f", "14", "--g", "243", "--n", "4", "--mode", "combined")
    assert code == 0
    nodes, edges = read_dot(text)
    assert len(nodes) == 16 and len(edges) == 32
    colors = {(e[2]["label"], e[2]["color"]) for e in edges}
    assert colors == {("F", "black"), ("G", "blue")}


def test_diagram_edges_match_oracle():
    _, text = run("diagram", "--f", "15", "--g", "180", "--n", "5", "--mode", "combined")
    _, edges = read_dot(text)
    got = sorted((int(a), int(b), d["label"]) for a, b, d in edges)
    tf, tg = oracle.image_table(15, 5), oracle.image_table(180, 5)
    expected = sorted([(v, tf[v], "F") for v in range(32)] + [(v, tg[v], "G") for v in range(32)])
    assert got == expected


def test_diagram_parses_with_pydot():
    for mode in ("combined", "single-f", "single-g"):
        _, text = run("diagram", "--f", "14", "--g", "243", "--n", "4", "--mode", mode)
        (graph,) = pydot.graph_from_dot_data(text)
        n_edges = 32 if mode == "combined" else 16
        assert len(graph.get_edges()) == n_edges
    _, text = run("diagram", "--f", "7", "--g", "40", "--n", "4", "--seq", "A001651",
                  "--mode", "partial", "--cin", "0,3,5,6,9,10,12")
    (graph,) = pydot.graph_from_dot_data(text)
    fills = {n.get_name(): n.get("fillcolor").strip('"') for n in graph.get_nodes() if n.get("fillcolor")}
    assert len(fills) == 16
    assert {k for k, v in fills.items() if v == "white"} == {"0", "3", "5", "6", "9", "10", "12"}
    assert set(fills.values()) == {"white", "gray"}


def test_diagram_partial_auto_and_all():
    for cin in ("auto", "all"):
        code, text = run("diagram", "--f", "7", "--g", "40", "--n", "4", "--seq", "A001651",
                         "--mode", "partial", "--cin", cin)
        assert code == 0 and len(read_dot(text)[0]) == 16


def test_diagram_to_file(tmp_path):
    out = tmp_path / "d.dot"
    code, text = run("diagram", "--f", "14", "--g", "243", "--n", "4", "--mode", "combined", "--out", str(out))
    assert code == 0 and text == ""
    assert out.read_text().startswith("digraph")


def _rows(path):
    img = read_ppm(path)
    return img, [{tuple(px) for px in row} - {WHITE} for row in img]


def test_spacetime_periodic_tint(tmp_path):
    out = tmp_path / "a.ppm"
    code, _ = run("spacetime", "--f", "90", "--g", "73", "--n", "64", "--seq", "A001651",
                  "--steps", "64", "--init", "center", "--out", str(out))
    assert code == 0
    img, rows = _rows(out)
    assert img.shape == (65, 64, 3)
    assert rows[0] == {BLUE}
    assert img[0, 32].tolist() == list(BLUE) and (img[0] == BLUE).all(axis=1).sum() == 1
    for t in range(1, 65):
        if rows[t]:
            assert rows[t] == ({RED} if t % 3 == 0 else {BLUE})


def test_spacetime_prime_rows(tmp_path):
    out = tmp_path / "b.ppm"
    run("spacetime", "--f", "90", "--g", "73", "--n", "64", "--seq", "A018252",
        "--steps", "64", "--init", "center", "--out", str(out))
    _, rows = _rows(out)
    red = {t for t in range(1, 65) if rows[t] == {RED}}
    nonempty = {t for t in range(1, 65) if rows[t]}
    assert red == {t for t in nonempty if oracle.is_prime_trial(t)}


def test_spacetime_geometry(tmp_path):
    out = tmp_path / "c.ppm"
    code, _ = run("spacetime", "--f", "30", "--g", "90", "--n", "10", "--seq", "A005408",
                  "--steps", "0", "--init", "5", "--out", str(out), "--scale", "3")
    assert code == 0
    img = read_ppm(out)
    assert img.shape == (3, 30, 3)
    assert out.read_bytes().startswith(b"P6\n30 3\n255\n")
    # encoding 5 = cells 0 and 2 set; leftmost column is the most significant cell
    assert [tuple(img[0, 3 * j]) != WHITE for j in range(10)] == [False] * 7 + [True, False, True]


def test_spacetime_random_seed_deterministic(tmp_path):
    a, b = tmp_path / "a.ppm", tmp_path / "b.ppm"
    for p in (a, b):
        run("spacetime", "--f", "30", "--g", "90", "--n", "20", "--seq", "A005408",
            "--steps", "10", "--init", "random:42", "--out", str(p))
    assert a.read_bytes() == b.read_bytes()


def test_render_spec_validation():
    with pytest.raises(ValueError):
        RenderSpec(scale=0)
    with pytest.raises(ValueError):
        RenderSpec(f_color=RED, g_color=RED)


def test_cycles_json():
    doc = run_json("cycles", "--f", "7", "--g", "40", "--n", "4", "--seq", "A001651", "--init", "5", "--target", "10")
    (rec,) = doc["records"]
    assert rec["block"] == [1, 1, 4] and rec["K"] == 6
    doc = run_json("cycles", "--f", "3", "--g", "15", "--n", "4", "--seq", "A001651", "--init", "5", "--target", "5")
    assert doc["records"][0]["status"] == "TRANSIENT"
    doc = run_json("cycles", "--f", "204", "--g", "204", "--seq", "pat:1", "--n", "4", "--init", "0", "--target", "0")
    assert doc["records"][0]["K"] == 1


def test_graph_json():
    doc = run_json("graph", "--f", "210", "--g", "51", "--n", "5")
    big = max(doc["components"], key=lambda c: c["vertexCount"])
    assert big["alternatingEulerLength"] == 60 and len(big["alternatingEuler"]) == 60
    doc = run_json("graph", "--f", "204", "--g", "204", "--n", "4")
    assert doc["componentCount"] == 16
    assert all(c["eulerian"] and c["alternatingEulerLength"] == 2 for c in doc["components"])
    assert run_json("graph", "--f", "14", "--g", "243", "--n", "4")["fullyEulerian"] is False


@pytest.mark.parametrize("argv", [
    ["classify", "--f", "256", "--g", "85", "--n", "4", "--seq", "A005408"],
    ["classify", "--f", "14", "--g", "85", "--n", "4", "--seq", "A000045"],
    ["classify", "--f", "14", "--g", "85", "--n", "0", "--seq", "A005408"],
    ["diagram", "--f", "14", "--g", "85", "--n", "4", "--mode", "bogus"],
    ["cycles", "--f", "7", "--g", "40", "--n", "4", "--seq", "A018252", "--init", "5"],
    ["cycles", "--f", "7", "--g", "40", "--n", "4", "--seq", "A001651", "--init", "99"],
    ["spacetime", "--f", "7", "--g", "40", "--n", "4", "--seq", "A001651", "--steps", "4",
     "--init", "1", "--out", "/nonexistent/dir/x.ppm"],
    ["spacetime", "--f", "7", "--g", "40", "--n", "4", "--seq", "A001651", "--steps", "-1",
     "--init", "1", "--out", "x.ppm"],
])
def test_usage_errors(argv, capsys):
    try:
        code = main(argv, out=io.StringIO())
    except SystemExit as e:
        code = e.code
    assert code == 1
    assert "error" in capsys.readouterr().err


def test_error_names_flag(capsys):
    main(["classify", "--f", "256", "--g", "85", "--n", "4", "--seq", "A005408"], out=io.StringIO())
    assert "--f" in capsys.readouterr().err
    main(["cycles", "--f", "7", "--g", "40", "--n", "4", "--seq", "A018252", "--init", "5"], out=io.StringIO())
    assert "--horizon" in capsys.readouterr().err


def test_budget_exit_code():
    code, _ = run("graph", "--f", "30", "--g", "90", "--n", "12", "--budget", "1000")
    assert code == 2


DETERMINISM_CASES = [
    ["classify", "--f", "229", "--g", "85", "--n", "5", "--seq", "A001651"],
    ["diagram", "--f", "7", "--g", "40", "--n", "4", "--seq", "A001651", "--mode", "partial", "--cin", "auto"],
    ["cycles", "--f", "3", "--g", "15", "--n", "4", "--seq", "A001651", "--init", "4"],
    ["graph", "--f", "210", "--g", "51", "--n", "5"],
]


@pytest.mark.parametrize("argv", DETERMINISM_CASES)
def test_byte_identical_across_processes(argv, tmp_path):
    outs = []
    for _ in range(2):
        proc = subprocess.run([sys.executable, "-m", "tnuca", *argv], capture_output=True, check=True)
        outs.append(proc.stdout)
    assert outs[0] == outs[1] and outs[0]


def test_spacetime_byte_identical_across_processes(tmp_path):
    blobs = []
    for i in range(2):
        p = tmp_path / f"{i}.ppm"
        subprocess.run([sys.executable, "-m", "tnuca", "spacetime", "--f", "90", "--g", "73", "--n", "32",
                        "--seq", "A018252", "--steps", "16", "--init", "random:7", "--out", str(p)], check=True)
        blobs.append(p.read_bytes())
    assert blobs[0] == blobs[1]
    assert np.frombuffer(blobs[0][-32 * 3:], dtype=np.uint8).size == 96
