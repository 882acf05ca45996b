import json

import pytest

from hdxcones.cli import main


def run(argv):
    return main(argv)


class TestBuild:
    def test_octahedron_roundtrip_stable(self, tmp_path, capsys):
        out = tmp_path / "oct.json"
        assert run(["build", "--kind", "octahedron", "--out", str(out)]) == 0
        first = out.read_text()
        data = json.loads(first)
        assert data["meta"]["face_counts"] == {"0": 6, "1": 12, "2": 8}
        # byte-stable on rebuild
        assert run(["build", "--kind", "octahedron", "--out", str(out)]) == 0
        assert out.read_text() == first

    def test_an_opposition_counts(self, tmp_path, capsys):
        assert run(["build", "--kind", "an-opposition", "--q", "3", "--dim", "3",
                    "--flag", "full", "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert len(data["vertices"]) == 18
        assert data["meta"]["face_counts"]["1"] == 27

    def test_kms_build(self, tmp_path, capsys):
        assert run(["build", "--kind", "kms-sl", "--n", "2", "--q", "2",
                    "--f", "1,1,1", "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["meta"]["report"]["group_order"] == 60480

    def test_bad_kind_exits_2(self):
        with pytest.raises(SystemExit) as err:
            run(["build", "--kind", "dodecahedron"])
        assert err.value.code == 2


class TestConeCommands:
    def test_bfs_and_verify(self, tmp_path, capsys):
        cx = tmp_path / "c6.json"
        cone = tmp_path / "cone.json"
        run(["build", "--kind", "cycle", "--m", "6", "--out", str(cx)])
        capsys.readouterr()
        assert run(["cone", "--method", "bfs", "--in", str(cx), "--apex", "0",
                    "--out", str(cone), "--json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["verified"] and report["radius_profile"]["0"] == 3
        assert run(["verify-cone", "--complex", str(cx), "--cone", str(cone),
                    "--json"]) == 0
        verdict = json.loads(capsys.readouterr().out)
        assert verdict["verified"]

    def test_solve_no_cone_exit_4(self, tmp_path):
        cx = tmp_path / "c3.json"
        run(["build", "--kind", "cycle", "--m", "3", "--out", str(cx)])
        code = run(["cone", "--method", "solve", "--in", str(cx), "--k", "1",
                    "--apex", "0", "--out", str(tmp_path / "x.json")])
        assert code == 4

    def test_filtration(self, tmp_path, capsys):
        assert run(["cone", "--method", "filtration", "--kind", "an-opposition",
                    "--q", "3", "--dim", "3", "--flag", "full", "--json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["verified"]
        assert report["ledger"]["final"]["within_R_n"]

    def test_transport_coeff(self, tmp_path, capsys):
        cx = tmp_path / "c4.json"
        run(["build", "--kind", "cycle", "--m", "4", "--out", str(cx)])
        capsys.readouterr()
        assert run(["cone", "--method", "bfs", "--in", str(cx), "--apex", "0",
                    "--coeff", "Z/2", "--json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["verified"] and report["cone"]["coeff"] == "Z/2"

    def test_subdivision(self, capsys):
        assert run(["cone", "--method", "subdivision", "--q", "3", "--dim", "4",
                    "--form", "hyperbolic", "--flag", "none", "--json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["verified"]
        assert max(report["radius_profile"].values()) <= report["bound"]


class TestExpansionCommands:
    def test_coboundary(self, tmp_path, capsys):
        cx = tmp_path / "tri.json"
        run(["build", "--kind", "simplex", "--m", "3", "--out", str(cx)])
        capsys.readouterr()
        assert run(["expansion", "--in", str(cx), "--mode", "coboundary",
                    "--k", "0", "--coeff", "2", "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["h_cb"] == "2/1"

    def test_spectral(self, tmp_path, capsys):
        cx = tmp_path / "oct.json"
        run(["build", "--kind", "octahedron", "--out", str(cx)])
        capsys.readouterr()
        assert run(["expansion", "--in", str(cx), "--mode", "spectral",
                    "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["all_links_connected"]
        assert len(data["links"]) == 7

    def test_bound_with_cone_file(self, tmp_path, capsys):
        cx = tmp_path / "c6.json"
        cone = tmp_path / "cone.json"
        run(["build", "--kind", "cycle", "--m", "6", "--out", str(cx)])
        run(["cone", "--method", "bfs", "--in", str(cx), "--apex", "0",
             "--out", str(cone)])
        capsys.readouterr()
        assert run(["expansion", "--in", str(cx), "--mode", "bound", "--k", "0",
                    "--cone", str(cone), "--transitive", "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert "holds" in data["verdict"]

    def test_report(self, tmp_path, capsys):
        cx = tmp_path / "oct.json"
        run(["build", "--kind", "octahedron", "--out", str(cx)])
        capsys.readouterr()
        assert run(["report", "--in", str(cx), "--coeff", "2", "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["links_brute_forced"] == 7

    def test_cap_exit_3(self, tmp_path, monkeypatch):
        monkeypatch.setenv("HDX_CAPS", "bruteforce=4")
        cx = tmp_path / "oct.json"
        run(["build", "--kind", "octahedron", "--out", str(cx)])
        assert run(["expansion", "--in", str(cx), "--mode", "coboundary",
                    "--k", "0", "--coeff", "2"]) == 3


class TestGenericCoset:
    def test_coset_kind(self, tmp_path, capsys):
        gens = {
            "field": "GF(2)",
            "degree": 3,
            "generators": [
                [[0, 1, 0], [1, 0, 0], [0, 0, 1]],
                [[1, 0, 0], [0, 0, 1], [0, 1, 0]],
            ],
            "subgroups": [[0], [1]],
        }
        gens_path = tmp_path / "gens.json"
        gens_path.write_text(json.dumps(gens))
        assert run(["build", "--kind", "coset", "--gens", str(gens_path),
                    "--json"]) == 0
        data = json.loads(capsys.readouterr().out)
        assert data["meta"]["group_order"] == 6
        assert len(data["vertices"]) == 6  # the S3 hexagon


class TestApexMethod:
    def test_apex_star_on_star_complex(self, tmp_path, capsys):
        cx = tmp_path / "tri.json"
        run(["build", "--kind", "simplex", "--m", "3", "--out", str(cx)])
        capsys.readouterr()
        assert run(["cone", "--method", "apex", "--in", str(cx), "--apex", "0",
                    "--k", "1", "--json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["verified"]
        assert max(report["radius_profile"].values()) <= 1


class TestExtendMethod:
    def test_octahedron_extend(self, tmp_path, capsys):
        from hdxcones.cli import load_complex
        from hdxcones.simplicial import Complex

        octa = Complex.octahedron()
        sub = octa.full_subcomplex(["n", "a", "b", "c", "d"])
        oct_path = tmp_path / "oct.json"
        sub_path = tmp_path / "sub.json"
        oct_path.write_text(octa.to_json())
        sub_path.write_text(sub.to_json())
        base_path = tmp_path / "base.json"
        apex_idx = sub.index_of("n")
        run(["cone", "--method", "apex", "--in", str(sub_path),
             "--apex", str(apex_idx), "--k", "1", "--out", str(base_path)])
        capsys.readouterr()
        w_idx = octa.index_of("s")
        sub_idx = ",".join(str(octa.index_of(v)) for v in sub.labels)
        assert run(["cone", "--method", "extend", "--in", str(oct_path),
                    "--cone", str(base_path), "--sub", sub_idx,
                    "--w", str(w_idx), "--json"]) == 0
        report = json.loads(capsys.readouterr().out)
        assert report["verified"]
        assert report["radius_profile"]["1"] <= 4
