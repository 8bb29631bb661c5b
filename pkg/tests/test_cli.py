import json
from pathlib import Path

import pytest

from qred import cli
from qred.algebra import complete
from qred.parser import ParseError, algebra_to_text, parse_algebra, parse_module

FIXTURES = Path(__file__).parent / "fixtures"


def fixture(name):
    return str(FIXTURES / f"{name}.alg")


def run(capsys, *argv):
    code = cli.main(list(argv))
    return code, capsys.readouterr()


# -- parsing -----------------------------------------------------------------


def test_parse_counts():
    pres = parse_algebra((FIXTURES / "bowtie.alg").read_text())
    assert len(pres.quiver.vertices) == 3
    assert len(pres.quiver.arrows) == 5
    assert len(pres.relations) == 10
    assert pres.convention == "right-to-left"


def test_parse_dual_numbers():
    pres = parse_algebra((FIXTURES / "dual_numbers.alg").read_text())
    assert len(pres.quiver.vertices) == 1
    assert len(pres.relations) == 1


def test_parse_unknown_vertex_reports_position():
    text = "algebra bad\nfield rational\nvertices 1\narrow a : 1 -> 9\n"
    with pytest.raises(ParseError) as ei:
        parse_algebra(text)
    assert ei.value.line == 4
    assert "unknown vertex" in ei.value.message


def test_parse_unknown_arrow_in_relation():
    text = "algebra bad\nvertices 1\narrow x : 1 -> 1\nrelations\n  x*y\nend\n"
    with pytest.raises(ParseError) as ei:
        parse_algebra(text)
    assert ei.value.line == 5


def test_parse_noncomposable_word():
    text = (
        "algebra bad\nvertices 1 2\narrow a : 1 -> 2\narrow b : 1 -> 2\n"
        "relations\n  a*b\nend\n"
    )
    with pytest.raises(ParseError) as ei:
        parse_algebra(text)
    assert "non-composable" in ei.value.message


def test_parse_coefficients_and_signs():
    text = (
        "algebra c\nfield rational\nvertices 1\narrow x : 1 -> 1\narrow y : 1 -> 1\n"
        "relations\n  2 * x*x - 1/3 * y*y + x*y\nend\n"
    )
    pres = parse_algebra(text)
    (rel,) = pres.relations
    coeffs = sorted(str(c) for _, c in rel)
    assert coeffs == ["-1/3", "1", "2"]


def test_parse_left_to_right_convention():
    text = (
        "algebra lr\nconvention left-to-right\nvertices 1 2\n"
        "arrow a : 1 -> 2\narrow b : 2 -> 1\nrelations\n  a*b\nend\n"
    )
    pres = parse_algebra(text)
    (rel,) = pres.relations
    path = rel[0][0]
    assert path.source == 0 and path.target == 0  # a then b: 1 -> 2 -> 1


def test_round_trip_text(bowtie):
    text = algebra_to_text(bowtie)
    again = complete(parse_algebra(text), 8)
    assert again.dim == bowtie.dim
    assert again.is_monomial == bowtie.is_monomial


def test_module_file_parsing(line2):
    good = "module P1 over line2\ndim 1 = 1\ndim 2 = 1\nmap a = [[1]]\n"
    name, rep = parse_module(good, line2)
    assert name == "P1" and rep.dims == [1, 1]


def test_module_file_relation_violation(dual_numbers):
    bad = "module M over dual_numbers\ndim 1 = 1\nmap x = [[1]]\n"
    with pytest.raises(ParseError) as ei:
        parse_module(bad, dual_numbers)
    assert "relation" in ei.value.message


def test_module_file_shape_mismatch(line2):
    bad = "module M over line2\ndim 1 = 2\ndim 2 = 1\nmap a = [[1]]\n"
    with pytest.raises(ParseError) as ei:
        parse_module(bad, line2)
    assert "shape" in ei.value.message


# -- CLI ---------------------------------------------------------------------


def test_cli_analyze(capsys):
    code, out = run(capsys, "analyze", fixture("tri_dual"))
    assert code == 0
    report = json.loads(out.out)
    assert report["algebra"]["dimension"] == 4
    assert report["results"]["monomial"] is True
    assert report["results"]["serial"] is False
    assert list(report.keys()) == [
        "algebra", "command", "results", "trace", "certificates",
        "conditional", "seed", "elapsed_ms",
    ]


def test_cli_check_holds(capsys):
    code, out = run(
        capsys, "check", fixture("tri_dual"), "--property", "syzygy-finite", "--bound", "12"
    )
    assert code == 0
    report = json.loads(out.out)
    assert report["results"]["verdicts"]["syzygy-finite"] == "holds"
    assert len(report["trace"]) == 1
    assert report["certificates"][0]["rule"] == "monomial (terminal)"


def test_cli_check_all_properties(capsys):
    code, out = run(capsys, "check", fixture("tri_dual"), "--property", "all")
    assert code == 0
    report = json.loads(out.out)
    assert all(v == "holds" for v in report["results"]["verdicts"].values())


def test_cli_check_inconclusive(capsys):
    code, out = run(capsys, "check", fixture("bowtie"), "--property", "syzygy-finite", "--bound", "6")
    assert code == 3
    report = json.loads(out.out)
    assert report["results"]["verdicts"]["syzygy-finite"] == "inconclusive"


def test_cli_check_with_quotient(capsys):
    code, out = run(
        capsys, "check", fixture("bowtie"), "--property", "injectives-generate",
        "--quotient", "1", "--bound", "8",
    )
    assert code == 0
    report = json.loads(out.out)
    assert report["results"]["verdicts"]["injectives-generate"] == "holds"
    assert report["trace"][0]["kind"] == "homological_quotient"
    assert report["trace"][0]["certified"] is True


def test_cli_reduce(capsys):
    code, out = run(capsys, "reduce", fixture("bowtie"))
    assert code == 0
    report = json.loads(out.out)
    assert report["results"]["trace_length"] == 0
    assert report["results"]["terminal"]["dimension"] == 9


def test_cli_reduce_with_certified_quotient(capsys):
    # deleting the source of the only arrow is a homological quotient here
    code, out = run(capsys, "reduce", fixture("line2"), "--quotient", "1")
    assert code == 0
    report = json.loads(out.out)
    assert report["results"]["terminal"]["dimension"] == 1


def test_cli_reduce_refuted_quotient(capsys):
    # deleting the middle of 1 -> 2 -> 3 (composite zero) is not homological
    code, out = run(capsys, "reduce", fixture("line3z"), "--quotient", "2")
    assert code == 1
    report = json.loads(out.out)
    assert report["results"]["refuted"] is True
    cond = report["trace"][0]["conditions"][0]
    assert cond["verdict"] == "refuted"
    assert "Tor_2" in cond["detail"]


def test_cli_corner_round_trip(capsys, tmp_path):
    code, out = run(capsys, "corner", fixture("bowtie"), "--vertices", "s,2")
    assert code == 0
    f = tmp_path / "corner.alg"
    f.write_text(out.out)
    again = complete(parse_algebra(out.out), 8)
    assert again.dim == 6 and again.is_monomial
    code2, out2 = run(capsys, "analyze", str(f))
    assert code2 == 0
    report = json.loads(out2.out)
    assert report["algebra"]["dimension"] == 6
    assert report["results"]["monomial"] is True


def test_cli_resolve(capsys):
    code, out = run(capsys, "resolve", fixture("line2"), "--module", "simple:1", "--steps", "5")
    assert code == 0
    report = json.loads(out.out)
    assert report["results"]["terminated"] is True
    assert report["results"]["pd"] == {"exact": True, "value": 1, "bound": 4}
    assert report["results"]["resolution"][0]["projective"] == [1, 1]


def test_cli_witness_identity(capsys):
    code, out = run(
        capsys, "witness", fixture("line2"), fixture("line2"), "--identity", "--level", "0"
    )
    assert code == 0
    report = json.loads(out.out)
    assert report["results"]["verdict"] == "holds"


def test_cli_witness_fails(capsys):
    code, out = run(capsys, "witness", fixture("dual_numbers"), "--identity", "--level", "1")
    assert code == 1
    report = json.loads(out.out)
    assert report["results"]["verdict"] == "fails"


def test_cli_witness_pair_files(capsys, tmp_path, dual_numbers):
    from qred.modules import regular_bimodule
    from qred.parser import rep_to_text

    reg = regular_bimodule(dual_numbers)
    mfile = tmp_path / "m.bim"
    nfile = tmp_path / "n.bim"
    text = rep_to_text(reg, "reg")
    assert text.startswith("bimodule reg over dual_numbers dual_numbers")
    mfile.write_text(text)
    nfile.write_text(rep_to_text(reg, "reg2"))
    code, out = run(
        capsys,
        "witness", fixture("dual_numbers"),
        "--pair", str(mfile), str(nfile),
        "--level", "0",
    )
    assert code == 0
    assert json.loads(out.out)["results"]["verdict"] == "holds"


def test_bimodule_round_trip(dual_numbers):
    from qred.modules import regular_bimodule
    from qred.parser import rep_to_text

    env = dual_numbers.enveloping()
    reg = regular_bimodule(dual_numbers)
    name, again = parse_module(rep_to_text(reg, "reg"), env)
    assert name == "reg"
    assert again.dims == reg.dims
    assert all(a == b for a, b in zip(again.mats, reg.mats))


def test_cli_witness_search(capsys):
    code, out = run(capsys, "witness", fixture("dual_numbers"), "--syzygy", "--search", "--level-max", "3")
    assert code == 0
    report = json.loads(out.out)
    assert report["results"]["search"]["found_level"] == 1


def test_cli_parse_error_exit_code(capsys, tmp_path):
    bad = tmp_path / "bad.alg"
    bad.write_text("algebra b\nvertices 1\narrow a : 1 -> 9\n")
    code, out = run(capsys, "analyze", str(bad))
    assert code == 2
    assert "unknown vertex" in out.err


def test_cli_missing_file(capsys):
    code, out = run(capsys, "analyze", "no_such_file.alg")
    assert code == 2


def test_cli_reports_byte_identical(capsys):
    outputs = []
    for _ in range(2):
        code, out = run(
            capsys, "check", fixture("tri_dual"), "--property", "all", "--seed", "7"
        )
        assert code == 0
        outputs.append(out.out)
    assert outputs[0] == outputs[1]


def test_cli_witness_byte_identical(capsys):
    outputs = []
    for _ in range(2):
        code, out = run(capsys, "witness", fixture("tri_dual"), "--syzygy", "--seed", "3")
        assert code == 0
        outputs.append(out.out)
    assert outputs[0] == outputs[1]


def test_cli_seed_env_fallback(capsys, monkeypatch):
    monkeypatch.setenv("QRED_SEED", "41")
    code, out = run(capsys, "analyze", fixture("line2"))
    assert code == 0
    assert json.loads(out.out)["seed"] == 41


def test_cli_text_format(capsys):
    code, out = run(capsys, "analyze", fixture("line2"), "--format", "text")
    assert code == 0
    assert "algebra line2" in out.out


def test_cli_gf_field_end_to_end(capsys, tmp_path):
    f = tmp_path / "dn5.alg"
    f.write_text(
        "algebra dn5\nfield gf 5\nvertices 1\narrow x : 1 -> 1\n"
        "relations\n  x*x\nend\n"
    )
    code, out = run(capsys, "check", str(f), "--property", "all")
    assert code == 0
    report = json.loads(out.out)
    assert report["algebra"]["field"] == "gf 5"
    assert all(v == "holds" for v in report["results"]["verdicts"].values())


def test_cli_reads_stdin(capsys, monkeypatch):
    import io

    text = (FIXTURES / "line2.alg").read_text()
    monkeypatch.setattr("sys.stdin", io.StringIO(text))
    code, out = run(capsys, "analyze", "-")
    assert code == 0
    assert json.loads(out.out)["algebra"]["dimension"] == 3
