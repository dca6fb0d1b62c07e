import io
import json

import pytest

from eslcheck.cli import run_cli

WITNESS = "exists x . D{}(loc({sigma(a)},x) -> EF p)"


def run(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run_cli(list(argv), out=out, err=err)
    return code, out.getvalue(), err.getvalue()


def test_fails_with_counterexample(e_bit_path):
    code, out, _ = run("--env", str(e_bit_path), "--class", "unif-det", "--formula", "EF p")
    assert code == 1
    assert out.strip() == "FORMULA 1: FAILS counterexample (s0, a:stay)"


def test_holds_with_witness(e_bit_path):
    code, out, _ = run("check", "--env", str(e_bit_path), "--formula", WITNESS)
    assert code == 0
    assert out.startswith("FORMULA 1: HOLDS witness x=(s")


def test_sentence_rule(e_bit_path):
    code, _, err = run("--env", str(e_bit_path), "--formula", "loc(a,x)")
    assert code == 2
    assert "free variables {x}: CLI accepts sentences only" in err


@pytest.mark.parametrize(
    "argv, code",
    [
        (["--formula", "true"], 0),
        (["--formula", "p"], 1),
        (["--formula", "EF p", "--class", "all"], 1),
        (["--formula", "(p"], 2),
        (["--formula", "K z p"], 2),
        (["--formula", "q"], 2),
        (["--formula", "true", "--class", "mixed"], 2),
        (["--formula", "true", "--vertex-cap", "1"], 2),
        ([], 2),
    ],
)
def test_exit_code_matrix(e_bit_path, argv, code):
    assert run("--env", str(e_bit_path), *argv)[0] == code


def test_usage_errors():
    assert run()[0] == 2
    assert run("check", "--formula", "p")[0] == 2
    assert run("--env", "/nonexistent.json", "--formula", "p")[0] == 2


def test_formula_file(tmp_path, e_bit_path):
    ff = tmp_path / "f.txt"
    ff.write_text("# E_bit checks\nEF p\nK a p | ~K a p\n" + WITNESS + "\n")
    code, out, _ = run("--env", str(e_bit_path), "--formula-file", str(ff))
    lines = out.splitlines()
    assert code == 1
    assert [ln.split(":")[1].split()[0] for ln in lines] == ["FAILS", "HOLDS", "HOLDS"]


def test_text_json_agree(tmp_path, e_bit_path):
    ff = tmp_path / "f.txt"
    ff.write_text("EF p\nAG (p | ~p)\n" + WITNESS + "\nexists x . loc(sigma(a), x)\n")
    for cls in ("all", "det", "unif", "unif-det"):
        base = ["--env", str(e_bit_path), "--formula-file", str(ff), "--class", cls]
        code_t, text, _ = run(*base)
        code_j, raw, _ = run(*base, "--format", "json")
        assert code_t == code_j
        doc = json.loads(raw)
        rebuilt = []
        for item in doc["formulas"]:
            line = f"FORMULA {item['index']}: {'HOLDS' if item['holds'] else 'FAILS'}"
            if item["counterexample"]:
                line += f" counterexample {item['counterexample']['text']}"
            if item["witness_bindings"]:
                line += " witness " + " ".join(f"{x}={v['text']}" for x, v in item["witness_bindings"].items())
            rebuilt.append(line)
        assert rebuilt == text.splitlines()


def test_stats(e_bit_path):
    code, out, _ = run("--env", str(e_bit_path), "--formula", "true", "--stats")
    assert "STATS profiles=2 vertices=3 edges=3" in out
    _, out, _ = run("--env", str(e_bit_path), "--formula", "true", "--stats", "--class", "all", "--format", "json")
    assert json.loads(out)["stats"]["profiles"] == 9
    _, out, _ = run("--env", str(e_bit_path), "--formula", "true")
    assert "STATS" not in out
    _, out, _ = run("--env", str(e_bit_path), "--formula", "true", "--format", "json")
    assert "stats" not in json.loads(out)


def test_dump_product(tmp_path, e_bit_path):
    dump = tmp_path / "product.json"
    run("--env", str(e_bit_path), "--formula", "true", "--dump-product", str(dump))
    doc = json.loads(dump.read_text())
    assert len(doc["vertices"]) == 3 and len(doc["edges"]) == 3


def test_validate_and_count(tmp_path, e_bit_doc, e_bit_path):
    assert run("validate", "--env", str(e_bit_path)) == (0, "ok\n", "")
    e_bit_doc["transitions"] = e_bit_doc["transitions"][1:]
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps(e_bit_doc))
    code, out, _ = run("validate", "--env", str(broken))
    assert code == 2 and "[seriality]" in out
    assert run("validate", "--env", str(broken), "--complete-self-loops")[0] == 0
    assert run("--env", str(broken), "--formula", "true")[0] == 2
    code, out, _ = run("count", "--env", str(e_bit_path))
    assert code == 0
    assert "agent a: all=9 det=4 unif=3 unif-det=2" in out


def test_oracle_subcommand():
    code, out, _ = run("oracle", "--seed", "3", "--cases", "12", "--class", "unif-det")
    assert code == 0 and out.startswith("differential: 12/12 cases agree")
