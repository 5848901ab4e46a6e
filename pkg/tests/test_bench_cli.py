import json

import numpy as np
import pytest

from quadbayes import bench, pnm
from quadbayes.cli import main
from quadbayes.quadtree import HyperParams


@pytest.fixture
def pbm_file(tmp_path):
    rng = np.random.default_rng(7)
    img = (rng.random((16, 16)) < 0.25).astype(np.uint8)
    path = tmp_path / "in.pbm"
    path.write_bytes(pnm.write_pbm(img))
    return path, img


class TestBench:
    def test_exp1_structure_and_ordering(self):
        report = bench.experiment1(count=8, d_max=4, seed=5)
        names = [r["config"] for r in report["results"]]
        assert names == ["quadtree", "fixed-4", "fixed-8", "fixed-16"]
        for r in report["results"]:
            assert len(r["per_image_bpp"]) == 8
            assert r["mean_bpp"] == pytest.approx(
                float(np.mean(r["per_image_bpp"])))
            assert set(r) == {"config", "seed", "per_image_bpp", "mean_bpp",
                              "wall_time_ms"}

    def test_exp1_drops_oversized_baselines(self):
        report = bench.experiment1(count=2, d_max=3, seed=5)
        names = [r["config"] for r in report["results"]]
        assert names == ["quadtree", "fixed-4", "fixed-8"]

    def test_exp1_deterministic_json(self):
        a = bench.experiment1(count=4, d_max=3, seed=9)
        b = bench.experiment1(count=4, d_max=3, seed=9)
        for rep in (a, b):
            for r in rep["results"]:
                r["wall_time_ms"] = 0.0
        assert bench.to_json(a) == bench.to_json(b)

    def test_exp2_runs_on_any_binary_image(self):
        rng = np.random.default_rng(8)
        img = (rng.random((32, 32)) < 0.4).astype(np.uint8)
        report = bench.experiment2(img, source="mem")
        assert [r["config"] for r in report["results"]] == \
            ["quadtree", "fixed-4", "fixed-8", "fixed-16"]
        table = bench.format_table(report)
        assert "quadtree" in table and "bit/pel" in table


class TestCli:
    def test_compress_decompress_roundtrip(self, pbm_file, tmp_path):
        path, img = pbm_file
        out = tmp_path / "out.qtb"
        back = tmp_path / "back.pbm"
        assert main(["compress", str(path), str(out)]) == 0
        assert main(["decompress", str(out), str(back)]) == 0
        assert back.read_bytes() == path.read_bytes()

    def test_decompress_wrong_params_fails(self, pbm_file, tmp_path, capsys):
        path, _ = pbm_file
        out = tmp_path / "out.qtb"
        main(["compress", str(path), str(out)])
        code = main(["decompress", str(out), str(tmp_path / "x.pbm"),
                     "--alpha", "2.0"])
        assert code == 1
        assert "mismatch" in capsys.readouterr().err

    def test_rate_quadtree_and_fixed(self, pbm_file, capsys):
        path, _ = pbm_file
        assert main(["rate", str(path)]) == 0
        assert "quadtree" in capsys.readouterr().out
        assert main(["rate", str(path), "--fixed", "8"]) == 0
        assert "fixed-8" in capsys.readouterr().out

    def test_rate_on_grayscale_with_threshold(self, tmp_path, capsys):
        rng = np.random.default_rng(17)
        gray = rng.integers(0, 256, size=(32, 32)).astype(np.uint8)
        src = tmp_path / "g.pgm"
        src.write_bytes(pnm.write_pgm(gray))
        assert main(["rate", str(src), "--fixed", "8",
                     "--threshold", "128"]) == 0
        out = capsys.readouterr().out
        assert "fixed-8" in out and "bpp" in out

    def test_rate_fixed_invalid(self, pbm_file, capsys):
        path, _ = pbm_file
        assert main(["rate", str(path), "--fixed", "3"]) == 1
        assert "error" in capsys.readouterr().err

    def test_map_overlay_and_dump(self, pbm_file, tmp_path):
        path, img = pbm_file
        overlay = tmp_path / "overlay.pgm"
        dump = tmp_path / "tree.txt"
        assert main(["map", str(path), str(overlay),
                     "--dump", str(dump)]) == 0
        out = pnm.read_pnm(overlay.read_bytes())
        assert (out.height, out.width) == img.shape
        lines = dump.read_text().splitlines()
        assert lines[0].endswith(("inner", "leaf"))

    def test_gen_writes_images_and_sidecars(self, tmp_path):
        out = tmp_path / "corpus"
        assert main(["gen", str(out), "--dmax", "3", "--count", "2",
                     "--seed", "4"]) == 0
        files = sorted(p.name for p in out.iterdir())
        assert files == ["img_0000.json", "img_0000.pbm",
                         "img_0001.json", "img_0001.pbm"]
        meta = json.loads((out / "img_0000.json").read_text())
        assert meta["seed"] == 4 and meta["d_max"] == 3
        img = pnm.read_pnm((out / "img_0000.pbm").read_bytes())
        assert (img.height, img.width) == (8, 8)
        assert set(meta["theta"]) == {
            line.split()[0] for line in meta["model"]
            if line.endswith("leaf")}

    def test_gen_reproducible(self, tmp_path):
        a, b = tmp_path / "a", tmp_path / "b"
        main(["gen", str(a), "--dmax", "2", "--count", "3", "--seed", "1"])
        main(["gen", str(b), "--dmax", "2", "--count", "3", "--seed", "1"])
        for name in ("img_0002.pbm", "img_0002.json"):
            assert (a / name).read_bytes() == (b / name).read_bytes()

    def test_verify_passes(self, capsys):
        assert main(["verify", "--dmax", "2", "--images", "2"]) == 0
        out = capsys.readouterr().out
        assert "FAIL" not in out
        assert out.count("ok") >= 5

    def test_verify_dmax3_prior_checks_only(self, capsys):
        assert main(["verify", "--dmax", "3"]) == 0
        assert "skipped" in capsys.readouterr().out

    def test_bench_exp1_cli_json(self, tmp_path, capsys):
        out = tmp_path / "exp1.json"
        assert main(["bench", "exp1", "--count", "3", "--dmax", "4",
                     "--seed", "2", "--json", str(out)]) == 0
        report = json.loads(out.read_text())
        assert report["experiment"] == "exp1"
        assert len(report["results"]) == 4

    def test_bench_exp2_cli(self, pbm_file, capsys):
        path, _ = pbm_file
        assert main(["bench", "exp2", str(path)]) == 0
        assert "quadtree" in capsys.readouterr().out

    def test_compress_pgm_with_threshold(self, tmp_path):
        gray = np.arange(256, dtype=np.uint8).reshape(16, 16)
        src = tmp_path / "g.pgm"
        src.write_bytes(pnm.write_pgm(gray))
        out = tmp_path / "g.qtb"
        back = tmp_path / "g.pbm"
        assert main(["compress", str(src), str(out),
                     "--threshold", "100"]) == 0
        assert main(["decompress", str(out), str(back)]) == 0
        img = pnm.read_pnm(back.read_bytes())
        assert np.array_equal(img.pixels, pnm.binarize(gray, 100))

    def test_missing_file_error(self, tmp_path, capsys):
        assert main(["compress", str(tmp_path / "none.pbm"),
                     str(tmp_path / "x.qtb")]) == 1
        assert "error" in capsys.readouterr().err
