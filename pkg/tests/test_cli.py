import json
import subprocess
import sys

import numpy as np
import pytest

from conftest import write_edges, write_tudataset
from wldist.cli import main, read_csv, read_matrix_csv, write_csv
from wldist.graph import complete_graph, cycle_graph, path_graph, star_graph


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def reports(text):
    return [json.loads(line) for line in text.splitlines() if line.strip()]


@pytest.fixture
def graphs(tmp_path):
    return {
        "K2": write_edges(tmp_path / "k2.txt", 2, [(0, 1)]),
        "2K1": write_edges(tmp_path / "2k1.txt", 2, []),
        "C6": write_edges(tmp_path / "c6.txt", 6, [(i, (i + 1) % 6) for i in range(6)]),
        "2K3": write_edges(tmp_path / "2k3.txt", 6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5),
                                                     (3, 5)]),
        "K1": write_edges(tmp_path / "k1.txt", 1, []),
    }


@pytest.fixture
def dataset(tmp_path):
    gs = [cycle_graph(5), path_graph(5), star_graph(4), complete_graph(3)]
    return write_tudataset(tmp_path / "tiny", "TINY", gs, [1, 1, -1, -1])


def test_dist_examples(capsys, graphs):
    code, out, _ = run(capsys, "dist", graphs["K2"], graphs["2K1"], "--metric", "wasserstein",
                       "--h", 1, "--exact")
    (rep,) = reports(out)
    assert code == 0
    assert rep["value"] == 0.5 and rep["exact"] == "1/2" and rep["h"] == 1
    assert rep["schema_version"] == 1 and rep["metric"] == "wasserstein"
    assert {"stabilization_index", "wall_time_ms"} <= rep.keys()
    _, out, _ = run(capsys, "dist", graphs["C6"], graphs["2K3"], "--metric", "prokhorov",
                    "--h", 4)
    assert reports(out)[0]["value"] == 0
    for metric in ("P", "W"):
        _, out, _ = run(capsys, "dist", graphs["C6"], graphs["C6"], "--metric", metric)
        assert reports(out)[0]["value"] == 0


def test_dist_at_infinity(capsys, graphs):
    _, out, _ = run(capsys, "dist", graphs["K2"], graphs["2K1"], "--metric", "P", "--h", "inf")
    rep = reports(out)[0]
    assert rep["h"] == "inf" and rep["value"] == 0.5 and rep["exact"] == "1/2"
    _, out, _ = run(capsys, "dist", graphs["K2"], graphs["2K1"], "--h", "inf", "--eps", "1e-4")
    rep = reports(out)[0]
    assert abs(rep["value"] - 0.5) <= rep["error"] <= 1e-4


def test_errors_exit_cleanly(capsys, tmp_path, graphs):
    code, _, err = run(capsys, "dist", tmp_path / "missing.txt", graphs["K1"])
    assert code == 2 and "wldist: error" in err
    bad = tmp_path / "bad.txt"
    bad.write_text("0 1\n2\n")
    code, _, err = run(capsys, "dist", bad, graphs["K1"])
    assert code == 2 and "line 2" in err
    with pytest.raises(SystemExit):
        main(["dist", graphs["K1"], graphs["K1"], "--h", "-1"])


def test_csv_round_trip(tmp_path):
    path = tmp_path / "t.csv"
    rows = [[0, 0.1, "x"], [1, 1 / 3, "y"]]
    write_csv(str(path), ["i", "value", "tag"], rows)
    assert path.read_text().startswith("# schema_version=1\ni,value,tag\n")
    header, back = read_csv(str(path))
    assert header == ["i", "value", "tag"]
    assert [[int(a), float(b), c] for a, b, c in back] == rows


def test_matrix_command(capsys, dataset, tmp_path):
    out = tmp_path / "m.csv"
    code, _, _ = run(capsys, "matrix", "--dataset", dataset, "--name", "TINY", "--metric", "W",
                     "--h-mode", "fixed:3", "--out", out)
    assert code == 0
    header, _ = read_csv(str(out))
    assert header == ["graph", "0", "1", "2", "3"]
    M = read_matrix_csv(str(out))
    assert M.shape == (4, 4) and np.array_equal(M, M.T) and not np.diag(M).any()
    assert (M >= 0).all() and (tmp_path / "m.csv.ckpt").exists()


def test_matrix_jobs_bitwise_identical(capsys, dataset, tmp_path):
    texts = []
    for jobs in (1, 2):
        out = tmp_path / f"m{jobs}.csv"
        run(capsys, "matrix", "--dataset", dataset, "--name", "TINY", "--h-mode",
            "stable-plus:3", "--out", out, "--jobs", jobs)
        texts.append(out.read_bytes())
    assert texts[0] == texts[1]


def test_knn_command(capsys, tmp_path):
    gs = [cycle_graph(6)] * 5 + [complete_graph(4)] * 5
    ds = write_tudataset(tmp_path / "two", "TWO", gs, [0] * 5 + [1] * 5)
    mat = tmp_path / "two.csv"
    run(capsys, "matrix", "--dataset", ds, "--name", "TWO", "--h-mode", "fixed:2",
        "--out", mat)
    code, out, _ = run(capsys, "knn", "--dataset", ds, "--name", "TWO", "--metric-matrix", mat)
    rep = reports(out)[0]
    assert code == 0 and rep["mean"] == 100.0 and len(rep["accuracies"]) == 10
    assert rep["initial_coloring"] == "constant"
    small = tmp_path / "small.csv"
    write_csv(str(small), ["graph", 0, 1], [[0, 0.0, 1.0], [1, 1.0, 0.0]])
    code, _, err = run(capsys, "knn", "--dataset", ds, "--name", "TWO", "--metric-matrix", small)
    assert code == 2 and "2 rows" in err


def test_trees_command(capsys, graphs, tmp_path):
    outs = {}
    for name in ("C6", "2K3"):
        path = tmp_path / f"{name}.csv"
        run(capsys, "trees", graphs[name], "--max-order", 3, "--out", path)
        outs[name] = read_csv(str(path))
    assert outs["C6"] == outs["2K3"]
    header, rows = outs["C6"]
    assert header[:3] == ["tree", "order", "height"] and len(rows) == 3
    path = tmp_path / "k1.csv"
    run(capsys, "trees", graphs["K1"], "--max-order", 1, "--out", path)
    assert [r[header.index("density")] for r in read_csv(str(path))[1]] == ["1"]


def test_embed_command(capsys, dataset, tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    for path in (a, b):
        run(capsys, "embed", "--dataset", dataset, "--name", "TINY", "--model", "8x2:tanh",
            "--seed", 5, "--out", path)
    assert a.read_bytes() == b.read_bytes()
    header, rows = read_csv(str(a))
    assert header == ["graph", *(f"e{k}" for k in range(8))] and len(rows) == 4


def test_embed_from_saved_model(capsys, dataset, tmp_path):
    from wldist.mpnn import embed, random_model, save_model
    model = random_model((1, 3, 2), seed=1)
    path = tmp_path / "model.json"
    save_model(model, path)
    run(capsys, "embed", "--dataset", dataset, "--name", "TINY", "--model", path,
        "--out", tmp_path / "e.csv")
    _, rows = read_csv(str(tmp_path / "e.csv"))
    assert float(rows[3][1]) == float(embed(complete_graph(3), model)[0])


def test_sbm_command(capsys, tmp_path):
    out = tmp_path / "sbm.csv"
    code, text, _ = run(capsys, "sbm", "--n", 10, "--count", 5, "--h", 2, "--models",
                        "4x2:relu", "--out", out)
    assert code == 0
    header, rows = read_csv(str(out))
    assert header == ["i", "q", "h", "graph_distance", "embedding_distance[4x2:relu]",
                      "lower_bound[4x2:relu]"]
    assert float(rows[-1][3]) == 0 and len(rows) == 5
    assert all(float(r[5]) <= float(r[3]) + 1e-7 for r in rows)
    rep = reports(text)[0]
    assert rep["model"] == "4x2:relu" and rep["lower_bound_sound"] is True


def test_console_script_entry(graphs):
    res = subprocess.run([sys.executable, "-m", "wldist", "dist", graphs["K2"], graphs["2K1"],
                          "--h", "1"], capture_output=True, text=True, check=True)
    assert json.loads(res.stdout)["value"] == 0.5
