import json
from fractions import Fraction

import pytest

from starquant import serialize as ser
from starquant.algebroid import SimplicialComplex, scalar_unit_algebroid
from starquant.cli import main
from starquant.poly import Poly
from starquant.polyvector import Bivector
from starquant.rees import weyl_presentation


def _write(path, payload):
    path.write_text(json.dumps(payload), encoding="utf-8")
    return str(path)


@pytest.fixture
def so3_file(tmp_path):
    x1, x2, x3 = (Poly.variable(3, i) for i in range(3))
    gamma = Bivector(3, {(0, 1): x3, (1, 2): x1, (0, 2): -x2})
    return _write(tmp_path / "so3.json", ser.bivector_to_json(gamma))


@pytest.fixture
def nonjacobi_file(tmp_path):
    x1, x3 = Poly.variable(3, 0), Poly.variable(3, 2)
    gamma = Bivector(3, {(0, 1): x3 * x3, (0, 2): x1})
    return _write(tmp_path / "bad.json", ser.bivector_to_json(gamma))


def test_jacobi_pass(so3_file, tmp_path, capsys):
    out = tmp_path / "report.json"
    assert main(["jacobi", so3_file, "--output", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["verdict"] == "pass"
    assert report["provenance"]["conventions"].startswith("starquant-conventions-1")


def test_jacobi_fail_names_identity(nonjacobi_file, tmp_path):
    out = tmp_path / "report.json"
    assert main(["jacobi", nonjacobi_file, "--output", str(out)]) == 1
    report = json.loads(out.read_text())
    assert report["verdict"] == "fail"
    assert report["identity"] == "[gamma,gamma] = 0"
    assert report["witness"]["components"]


def test_star_solve_obstruction_report(nonjacobi_file, tmp_path):
    out = tmp_path / "obs.json"
    assert main(["star-solve", nonjacobi_file, "--order", "2",
                 "--output", str(out)]) == 1
    report = json.loads(out.read_text())
    assert report["outcome"] == "obstruction"
    assert report["obstruction"]["hkr"]["components"]


def test_star_solve_success(so3_file, tmp_path):
    out = tmp_path / "sp.json"
    assert main(["star-solve", so3_file, "--order", "2", "--output", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["outcome"] == "success"
    assert report["star_product"]["order"] == 2


def test_cech_sphere_rank(tmp_path):
    path = _write(tmp_path / "sphere.json",
                  ser.complex_to_json(SimplicialComplex.boundary_simplex(3)))
    out = tmp_path / "cech.json"
    assert main(["cech", path, "--q", "2", "--output", str(out)]) == 0
    assert json.loads(out.read_text())["rank"] == 1


def test_reports_deterministic(nonjacobi_file, tmp_path):
    out1, out2 = tmp_path / "a.json", tmp_path / "b.json"
    main(["star-solve", nonjacobi_file, "--order", "2", "--output", str(out1)])
    main(["star-solve", nonjacobi_file, "--order", "2", "--output", str(out2)])
    assert out1.read_bytes() == out2.read_bytes()


def test_moyal_then_star_check(tmp_path):
    gamma = Bivector(2, {(0, 1): Poly.const(2, Fraction(1, 2))})
    gpath = _write(tmp_path / "g.json", ser.bivector_to_json(gamma))
    out = tmp_path / "sp.json"
    assert main(["moyal", gpath, "--order", "4", "--output", str(out)]) == 0
    sp = json.loads(out.read_text())["star_product"]
    sppath = _write(tmp_path / "sponly.json", sp)
    assert main(["star-check", sppath, "--gamma", gpath, "--seed", "7"]) == 0
    # breaking an operator flips the verdict
    sp["ops"][2]["summands"] = []
    broken = _write(tmp_path / "broken.json", sp)
    assert main(["star-check", broken]) == 1


def test_moyal_rejects_nonconstant(tmp_path):
    gamma = Bivector(2, {(0, 1): Poly.variable(2, 0)})
    gpath = _write(tmp_path / "g.json", ser.bivector_to_json(gamma))
    assert main(["moyal", gpath, "--order", "2"]) == 2


def test_quant_and_dequant_roundtrip_via_cli(tmp_path):
    x1, x2 = Poly.variable(2, 0), Poly.variable(2, 1)
    gamma = Bivector(2, {(0, 1): x1 * x2})
    gpath = _write(tmp_path / "g.json", ser.bivector_to_json(gamma))
    qpath = tmp_path / "quant.json"
    assert main(["quant", gpath, "--order", "2", "--output", str(qpath)]) == 0
    dpath = tmp_path / "deq.json"
    assert main(["dequant", str(qpath), "--output", str(dpath)]) == 0
    back, _ = ser.bivector_from_json(json.loads(dpath.read_text())["bivector"])
    assert back == gamma


def test_quant_rejects_non_poisson_quadratic(tmp_path):
    x1, x3 = Poly.variable(3, 0), Poly.variable(3, 2)
    gamma = Bivector(3, {(0, 1): x3 * x3, (0, 2): x1 * x1})
    from starquant.polyvector import jacobi_check
    assert not jacobi_check(gamma).passed
    gpath = _write(tmp_path / "g.json", ser.bivector_to_json(gamma))
    out = tmp_path / "q.json"
    assert main(["quant", gpath, "--output", str(out)]) == 1
    assert json.loads(out.read_text())["identity"] == "[gamma,gamma] = 0"


def test_homogenize_cli(tmp_path):
    gamma = Bivector(2, {(0, 1): Poly.one(2)})
    gpath = _write(tmp_path / "g.json", ser.bivector_to_json(gamma))
    out = tmp_path / "h.json"
    assert main(["homogenize", gpath, "--output", str(out)]) == 0
    lifted, names = ser.bivector_from_json(json.loads(out.read_text())["bivector"])
    assert names == ["x1", "x2", "z"]
    assert lifted.entry(0, 1) == Poly.variable(3, 2) ** 2


def test_rees_cli(tmp_path):
    path = _write(tmp_path / "weyl.json", ser.presentation_to_json(weyl_presentation()))
    out = tmp_path / "rees.json"
    assert main(["rees", path, "--degree-bound", "6", "--output", str(out)]) == 0
    report = json.loads(out.read_text())
    assert report["checks"]["graded"] and report["checks"]["specializes_at_t_1"]


def test_filtration_check_cli(tmp_path):
    x1 = Poly.variable(2, 0)
    gpath = _write(tmp_path / "g.json",
                   ser.bivector_to_json(Bivector(2, {(0, 1): x1 ** 3})))
    out = tmp_path / "f.json"
    assert main(["filtration-check", gpath, "--weights", "1,1",
                 "--degree-bound", "5", "--output", str(out)]) == 1
    assert json.loads(out.read_text())["level"] == "incompatible"


def test_tangency_cli(tmp_path):
    x3 = Poly.variable(3, 2)
    cubic = _write(tmp_path / "cubic.json",
                   ser.bivector_to_json(Bivector(3, {(0, 1): x3 ** 3})))
    assert main(["tangency-pn", cubic]) == 1
    const = _write(tmp_path / "const.json",
                   ser.bivector_to_json(Bivector(2, {(0, 1): Poly.one(2)})))
    assert main(["tangency-pn", const]) == 0
    ppath = _write(tmp_path / "p.json", ser.poly_to_json(Poly.variable(2, 0)))
    assert main(["tangency-divisor", const, "--divisor", ppath]) == 1


def test_algebroid_cli(tmp_path):
    sphere = SimplicialComplex.boundary_simplex(3)
    data = scalar_unit_algebroid(sphere, {(0, 1, 2): Fraction(1)}, 2)
    apath = _write(tmp_path / "alg.json", ser.algebroid_to_json(data))
    assert main(["algebroid-verify", apath]) == 0
    out = tmp_path / "gauge.json"
    assert main(["algebroid-gauge", apath, "--order", "1",
                 "--output", str(out)]) == 1
    report = json.loads(out.read_text())
    assert report["outcome"] == "obstruction" and report["h2_rank"] == 1


def test_explore_xy_guess(tmp_path, capsys):
    assert main(["explore-xy-guess", "--order", "3", "--text"]) == 0
    captured = capsys.readouterr()
    assert "gauge" in captured.out


def test_unknown_verb_and_bad_json(tmp_path):
    assert main([]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json", encoding="utf-8")
    assert main(["jacobi", str(bad)]) == 2
    assert main(["jacobi", str(tmp_path / "missing.json")]) == 2
    with pytest.raises(SystemExit):
        main(["no-such-verb", "x"])
