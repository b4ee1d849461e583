import json
import subprocess
import sys
from io import StringIO

import pytest

from plurality_ne.cli import EXIT_DATA, EXIT_NO, EXIT_UNKNOWN, EXIT_USAGE, EXIT_YES, run
from plurality_ne.decision import gen_comparison_example, gen_lazy_poa, gen_rc_vs_rv, gen_truth_poa
from plurality_ne.documents import (
    DocumentError,
    ElectionDocument,
    MsiDocument,
    parse_bcbs,
    parse_document,
    parse_msi,
    serialize_document,
    serialize_msi,
)
from plurality_ne.hardness import MsiInstance

from conftest import random_election


def call(*argv):
    out = StringIO()
    code = run(list(argv), out=out)
    return code, out.getvalue()


def machine(*argv):
    code, text = call(*argv, "--format", "machine")
    return code, json.loads(text)


@pytest.fixture
def comparison(tmp_path):
    path = tmp_path / "comparison.json"
    assert call("gen", "comparison-example", "-o", str(path))[0] == 0
    return str(path)


def write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_gen_to_stdout_is_a_document():
    code, text = call("gen", "comparison-example")
    assert code == 0
    doc = parse_document(text)
    assert doc.election() == gen_comparison_example()


def test_analyze_lazy_and_truth(comparison):
    code, rep = machine("analyze", comparison)
    assert code == 0
    assert [row["ballots"] for row in rep["result"]["pne"]] == [["c2", "-", "-", "-"]]
    assert rep["result"]["truthful"]["W"] == ["c3"]
    assert rep["result"]["truthful"]["Hprime"] == ["c2"]
    code, rep = machine("analyze", comparison, "--setting", "truth")
    assert [row["ballots"] for row in rep["result"]["pne"]] == [["c2", "c3", "c3", "c3"]]
    assert rep["method"] == "oracle"
    assert set(rep) == {"query", "result", "method", "budget", "timing"}


def test_analyze_table(comparison):
    code, text = call("analyze", comparison)
    assert code == 0
    assert "PNE (1):" in text and "(c2,-,-,-)" in text
    assert "method: oracle" in text


def test_analyze_threshold_column(tmp_path):
    e = ElectionDocument(("a", "b"), ((5, 1), (1, 5), (1, 5)))
    path = write(tmp_path, "e.json", serialize_document(e))
    code, rep = machine("analyze", path, "--setting", "truth")
    for row in rep["result"]["pne"]:
        if row["ballots"] != ["a", "b", "b"]:
            assert "threshold" in row


def test_decide_exit_codes(comparison):
    code, rep = machine("decide", comparison, "single-ne", "--target", "c2")
    assert code == EXIT_YES and rep["result"]["answer"] == "yes"
    assert rep["result"]["witness"] == ["c2", "-", "-", "-"]
    assert rep["method"] == "poly"
    code, rep = machine("decide", comparison, "exist-ne", "--tie", "rand-cand")
    assert code == EXIT_NO and rep["result"]["answer"] == "no"
    code, _ = call("decide", comparison, "tie-ne")
    assert code == EXIT_USAGE
    code, _ = call("decide", comparison, "exist-ne", "--target", "c1")
    assert code == EXIT_USAGE
    code, _ = call("decide", comparison, "single-ne", "--target", "zz")
    assert code == EXIT_USAGE


def test_decide_budget_exceeded(tmp_path):
    e, p = gen_rc_vs_rv()
    path = write(tmp_path, "rc.json", serialize_document(ElectionDocument.from_election(e, principled=p)))
    code, rep = machine("decide", path, "exist-ne", "--budget", "5")
    assert code == EXIT_UNKNOWN
    assert rep["result"]["answer"] == "unknown"
    assert rep["budget"]["status"] == "exceeded" and rep["budget"]["required"] == 4 ** 4


def test_usage_errors():
    with pytest.raises(SystemExit) as info:
        run(["frobnicate"], out=StringIO())
    assert info.value.code == EXIT_USAGE
    with pytest.raises(SystemExit) as info:
        run(["analyze", "x.json", "--tie", "coin"], out=StringIO())
    assert info.value.code == EXIT_USAGE
    assert call("analyze", "/nonexistent/file.json")[0] == EXIT_USAGE
    assert call("gen", "lazy-poa")[0] == EXIT_USAGE
    assert call("gen", "lazy-poa", "2")[0] == EXIT_USAGE
    assert call("gen", "comparison-example", "3")[0] == EXIT_USAGE


def test_poa_generated(tmp_path):
    path = str(tmp_path / "lazy7.json")
    assert call("gen", "lazy-poa", "7", "-o", path)[0] == 0
    code, rep = machine("poa", path)
    assert code == 0 and rep["result"]["gap"] == 5 and rep["method"] == "poly"
    path = str(tmp_path / "truth6.json")
    call("gen", "truth-poa", "6", "-o", path)
    code, rep = machine("poa", path, "--setting", "truth")
    assert rep["result"]["gap"] == 4 and rep["method"] == "search"
    code, text = call("poa", path, "--setting", "truth")
    assert "gap: 4" in text


def test_poa_undefined(comparison):
    code, rep = machine("poa", comparison, "--tie", "rand-voter")
    assert code == 0 and rep["result"]["defined"] is False


def test_lottery_command(tmp_path):
    path = str(tmp_path / "rc.json")
    call("gen", "rc-vs-rv", "-o", path)
    _, rep = machine("lottery", path, "--ballots", "c1,c1,c2,c2", "--tie", "rand-cand")
    assert rep["result"]["lottery"] == {"c1": "1/2", "c2": "1/2"}
    _, rep = machine("lottery", path, "--ballots", "c1,c1,c2,c2", "--tie", "rand-voter")
    assert rep["result"]["lottery"] == {"c1": "3/5", "c2": "2/5"}
    assert call("lottery", path, "--ballots", "c1,c1")[0] == EXIT_USAGE


def test_lottery_void_trivial(comparison):
    _, rep = machine("lottery", comparison, "--ballots=-,-,-,-", "--trivial-policy", "invalid")
    assert rep["result"]["void"] is True and rep["result"]["lottery"] is None
    code, text = call("lottery", comparison, "--ballots=-,-,-,-", "--trivial-policy", "invalid")
    assert "void" in text


def test_machine_output_is_deterministic(comparison):
    outs = []
    for _ in range(2):
        _, rep = machine("analyze", comparison, "--tie", "rand-cand")
        rep.pop("timing")
        outs.append(json.dumps(rep, sort_keys=True))
    assert outs[0] == outs[1]


@pytest.mark.parametrize("text, fragment", [
    ('{"candidates": ["a"], "voters": []}', "at least one voter"),
    ('{"candidates": ["a", "b"], "voters": [[1, 1]]}', "distinct"),
    ('{"candidates": ["a", "b"], "voters": [["a", "c"]]}', "every candidate"),
    ('{"candidates": ["a", "b"], "voters": [[1, 2]], "extra": 1}', "unknown fields"),
    ('{"candidates": ["a", "a"], "voters": [[1, 2]]}', "unique"),
    ('{"candidates": ["a", "b"],\n "voters": [[1, 2],, ]}', "line 2"),
])
def test_bad_documents(tmp_path, text, fragment):
    with pytest.raises(DocumentError) as info:
        parse_document(text)
    assert fragment in str(info.value)
    path = write(tmp_path, "bad.json", text)
    assert call("analyze", path)[0] == EXIT_DATA


def test_json_error_shows_line():
    with pytest.raises(DocumentError) as info:
        parse_document('{\n  "candidates": ["a"],\n  "voters": [[1]\n}')
    assert "line 4" in str(info.value) and "}" in str(info.value)


def test_document_round_trips(rng):
    docs = [ElectionDocument.from_election(gen_comparison_example()),
            ElectionDocument.from_election(gen_lazy_poa(5)),
            ElectionDocument.from_election(gen_truth_poa(9))]
    e, p = gen_rc_vs_rv()
    docs.append(ElectionDocument.from_election(e, principled=p))
    docs.append(ElectionDocument(("x", "y", "z"), (("x", "y", "z"), (9, 5, 1))))
    docs += [ElectionDocument.from_election(random_election(rng)) for _ in range(30)]
    for doc in docs:
        assert parse_document(serialize_document(doc)) == doc
    assert docs[-1].election() == parse_document(serialize_document(docs[-1])).election()
    inst = MsiInstance(3, ({0, 1}, {2}), 1, 1)
    mdoc = MsiDocument.from_instance(inst)
    assert parse_msi(serialize_msi(mdoc)) == mdoc
    assert mdoc.instance() == inst


def test_ranking_voters_use_rank_utilities():
    doc = parse_document('{"candidates": ["x", "y", "z"], "voters": [["y", "z", "x"]]}')
    assert doc.election().utilities == ((1, 3, 2),)


MSI_YES = {"elements": ["p", "r", "s"], "sets": [["p", "r"], ["p", "r", "s"], ["s"]], "k": 2, "q": 2}
MSI_NO = {"elements": ["p", "r", "s"], "sets": [["p", "r"], ["p", "s"], ["r", "s"]], "k": 2, "q": 2}


@pytest.mark.parametrize("msi, code", [(MSI_YES, EXIT_YES), (MSI_NO, EXIT_NO)])
def test_reduce_then_decide(tmp_path, msi, code):
    src = write(tmp_path, "msi.json", json.dumps(msi))
    dst = str(tmp_path / "election.json")
    rc, rep = machine("reduce", "msi-to-election", src, "-o", dst)
    assert rc == 0 and rep["result"]["target"] == "w2" and rep["result"]["sets_after_padding"] == 8
    doc = parse_document(open(dst).read())
    assert doc.candidates[-3:] == ("w3", "w1", "w2")
    rc, rep = machine("decide", dst, "single-ne", "--target", "w2", "--setting", "truth")
    assert rc == code and rep["method"] == "search"
    if code == EXIT_YES:
        w = rep["result"]["witness"]
        assert w.count("w2") >= 1


def test_reduce_bcbs(tmp_path):
    g = {"left": ["u", "v"], "right": ["x", "y"], "edges": [["u", "x"], ["u", "y"], ["v", "x"], ["v", "y"]], "k": 2}
    src = write(tmp_path, "g.json", json.dumps(g))
    dst = str(tmp_path / "msi.json")
    rc, rep = machine("reduce", "bcbs-to-msi", src, "-o", dst)
    assert rc == 0 and rep["result"] == {"output": dst, "elements": 2, "sets": 2, "k": 2, "q": 2}
    inst = parse_msi(open(dst).read()).instance()
    assert inst.sets == (frozenset({0, 1}), frozenset({0, 1}))
    assert parse_bcbs(json.dumps(g)).instance().k == 2


def test_reduce_bad_inputs(tmp_path):
    bad = write(tmp_path, "bad.json", json.dumps({**MSI_YES, "sets": [["p", "zz"]]}))
    assert call("reduce", "msi-to-election", bad)[0] == EXIT_DATA
    bad = write(tmp_path, "bad2.json", json.dumps({"left": ["u"], "right": ["x"], "edges": [["u", "q"]], "k": 1}))
    assert call("reduce", "bcbs-to-msi", bad)[0] == EXIT_DATA


def test_module_entry_point(comparison):
    proc = subprocess.run([sys.executable, "-m", "plurality_ne", "decide", comparison, "single-ne",
                           "--target", "c3", "--tie", "rand-cand", "--setting", "truth"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "answer: yes" in proc.stdout
