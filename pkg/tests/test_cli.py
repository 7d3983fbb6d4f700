import json
import math
import subprocess
import sys
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from reuleaux import io as rio
from reuleaux.area import area_regular_reuleaux
from reuleaux.cli import main
from reuleaux.geometry import build_regular_reuleaux
from reuleaux.optimize import random_reuleaux

SVG = "{http://www.w3.org/2000/svg}"


def run(capsys, *argv):
    code = main(list(argv))
    return code, capsys.readouterr().out


@pytest.fixture
def polygon_file(tmp_path):
    path = tmp_path / "poly.json"
    rio.save_polygon(random_reuleaux(7, 21), path)
    return path


class TestSweep:
    def test_seven(self, capsys):
        code, out = run(capsys, "sweep", "7")
        assert code == 0
        lines = out.strip().splitlines()
        assert lines[0] == "n,A_n" and len(lines) == 4
        for line in lines[1:]:
            n, a = line.split(",")
            assert float(a) == pytest.approx(area_regular_reuleaux(int(n)), abs=1e-15)

    def test_three(self, capsys):
        code, out = run(capsys, "sweep", "3")
        assert code == 0
        n, a = out.strip().splitlines()[1].split(",")
        assert n == "3" and float(a) == pytest.approx((math.pi - math.sqrt(3)) / 2, abs=1e-15)

    @pytest.mark.parametrize("bad", ["4", "1"])
    def test_even_is_usage_error(self, capsys, bad):
        with pytest.raises(SystemExit) as exc:
            main(["sweep", bad])
        assert exc.value.code == 2
        assert "n_max" in capsys.readouterr().err


class TestQueries:
    def test_area(self, capsys):
        code, out = run(capsys, "area", "--input", "regular:5")
        data = json.loads(out)
        assert code == 0 and data["n"] == 5
        assert data["area"] == pytest.approx(area_regular_reuleaux(5), abs=1e-12)
        assert data["area"] == pytest.approx(data["polygon_part"] + sum(data["segment_parts"]), abs=1e-14)

    def test_grad(self, capsys, polygon_file):
        code, out = run(capsys, "grad", "-i", str(polygon_file))
        data = json.loads(out)
        assert code == 0 and np.array(data["gradients"]).shape == (7, 2)
        assert data["classification"] == "non_critical"

    def test_grad_regular(self, capsys):
        data = json.loads(run(capsys, "grad", "-i", "regular:9")[1])
        assert data["max_norm"] < 1e-12 and data["classification"] == "regular_max_candidate"

    @pytest.mark.parametrize("variables", ["vertices", "centers"])
    def test_hess(self, capsys, variables):
        code, out = run(capsys, "hess", "-i", "regular:7", "--variables", variables)
        h = np.loadtxt(out.strip().splitlines(), delimiter=",")
        assert code == 0 and h.shape == (14, 14)
        np.testing.assert_allclose(h, h.T, atol=1e-12)

    def test_multipliers(self, capsys):
        data = json.loads(run(capsys, "multipliers", "-i", "regular:7")[1])
        np.testing.assert_allclose(data["lambda"], -math.tan(math.pi / 14), atol=1e-12)
        data = json.loads(run(capsys, "multipliers", "-i", "regular:7", "--variables", "centers")[1])
        np.testing.assert_allclose(data["lambda"], math.tan(math.pi / 14), atol=1e-12)

    def test_seed_is_deterministic(self, capsys):
        a = run(capsys, "area", "-i", "random:9", "--seed", "3")[1]
        b = run(capsys, "area", "-i", "random:9:seed=3")[1]
        c = run(capsys, "area", "-i", "random:9", "--seed", "4")[1]
        assert a == b != c

    def test_output_file(self, capsys, tmp_path):
        out = tmp_path / "a.json"
        code, stdout = run(capsys, "area", "-i", "regular:3", "-o", str(out))
        assert code == 0 and stdout == ""
        assert json.loads(out.read_text())["n"] == 3


class TestOptimize:
    def test_writes_polygon_and_trace(self, capsys, tmp_path, polygon_file):
        before = polygon_file.read_bytes()
        out, trace = tmp_path / "final.json", tmp_path / "trace.csv"
        code, stdout = run(capsys, "optimize", "-i", str(polygon_file), "-o", str(out), "--trace", str(trace))
        assert code == 0
        summary = json.loads(stdout)
        assert summary["area"] == pytest.approx(area_regular_reuleaux(7), abs=1e-8)
        final = rio.load_polygon(out)
        assert final.n == 7 and np.ptp(final.theta) < 1e-6
        assert trace.read_text().startswith("iter,n,area,grad_norm,theta_min,theta_max\n")
        assert polygon_file.read_bytes() == before

    def test_minimize(self, capsys):
        code, out = run(capsys, "optimize", "-i", "regular:9", "--mode", "minimize")
        data = json.loads(out)
        assert code == 0 and data["n"] == 3 and data["classification"] == "triangle"


class TestRender:
    def _svg(self, capsys, tmp_path, *extra):
        path = tmp_path / "out.svg"
        code, _ = run(capsys, "render", "-o", str(path), *extra)
        assert code == 0
        return ET.fromstring(path.read_text())

    def test_triangle_arcs(self, capsys, tmp_path):
        root = self._svg(capsys, tmp_path, "-i", "regular:3")
        d = root.find(f"{SVG}path").get("d")
        assert d.count("A ") == 3
        assert len(root.findall(f"{SVG}circle")) == 3

    def test_gradient_arrows(self, capsys, tmp_path):
        root = self._svg(capsys, tmp_path, "-i", "random:7:seed=2", "--show-gradient")
        assert len(root.findall(f"{SVG}line[@class='gradient-arrow']")) == 7

    def test_regular_has_no_arrows(self, capsys, tmp_path):
        root = self._svg(capsys, tmp_path, "-i", "regular:7", "--show-gradient")
        assert root.findall(f"{SVG}line") == []

    def test_arc_radius_is_scale(self, capsys, tmp_path):
        root = self._svg(capsys, tmp_path, "-i", "regular:5", "--scale", "100")
        assert "A 100.000000 100.000000" in root.find(f"{SVG}path").get("d")

    def test_requires_output(self):
        with pytest.raises(SystemExit) as exc:
            main(["render", "-i", "regular:3"])
        assert exc.value.code == 2


class TestErrors:
    def test_malformed_json(self, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text("{not json")
        assert main(["area", "-i", str(bad)]) == 2

    def test_missing_file(self, tmp_path):
        assert main(["area", "-i", str(tmp_path / "absent.json")]) == 2

    def test_not_constant_width(self, tmp_path):
        x = build_regular_reuleaux(7).vertices * 1.02
        path = tmp_path / "wide.json"
        path.write_text(json.dumps({"n": 7, "vertices": x.tolist()}))
        assert main(["area", "-i", str(path)]) == 2

    def test_count_mismatch(self, tmp_path):
        path = tmp_path / "n.json"
        path.write_text(json.dumps({"n": 5, "vertices": build_regular_reuleaux(7).vertices.tolist()}))
        assert main(["area", "-i", str(path)]) == 2

    def test_bad_generator(self):
        assert main(["area", "-i", "regular:4"]) == 2
        assert main(["area", "-i", "hexagon:7"]) == 2

    def test_missing_input(self):
        with pytest.raises(SystemExit) as exc:
            main(["area"])
        assert exc.value.code == 2


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "reuleaux", "sweep", "5"], capture_output=True, text=True, check=False
    )
    assert proc.returncode == 0
    assert proc.stdout.splitlines()[0] == "n,A_n"
