import json

import pytest

import theoria


def test_format_formula_modes():
    assert theoria.format_formula("a=b ∧ c=d") == "a = b ∧ c = d"
    assert theoria.format_formula("x ∈ ℤ", ascii=True) == "x ∈ ℤ"


def test_check(workspace_dir):
    code, out, _ = theoria.check(workspace_dir / "theories")
    assert code == 0
    assert "list.thy: ok" in out
    code, _, err = theoria.check(workspace_dir / "missing.thy")
    assert code == 2
    assert err


def test_workspace_queries(workspace_dir):
    ws = theoria.Workspace(workspace_dir)
    assert {"Basic", "List", "Real"} <= set(ws.theory_names())
    assert ws.diagnostics("List") == []
    assert ws.type_of("cons(1, nil)", ["List"]) == "List(ℤ)"
    assert ws.wd("divide(p, q ÷ r)", ["Basic"]) == "r ≠ 0 ∧ q ÷ r ≠ 0"
    ids = ws.add_sequent_file(workspace_dir / "pos" / "list.seq")
    assert ids == ["list.isEmpty_nil", "list.not_isEmpty_cons", "list.length_nil"]
    outcome = theoria.prove_obligation(ws, "list.length_nil")
    assert outcome["status"] == "CLOSED"
    assert outcome["applications"] == outcome["ruleCount"]


def test_kernel_errors_carry_kind(workspace_dir):
    ws = theoria.Workspace(workspace_dir)
    with pytest.raises(theoria.KernelError) as info:
        ws.type_of("x + TRUE", ["Basic"])
    assert info.value.kind == "TypeError"
    with pytest.raises(ValueError):
        theoria.prove(workspace_dir / "pos" / "list.seq", order="sideways")


def test_prove_and_replay(workspace_dir):
    seq = workspace_dir / "pos" / "real.seq"
    code, report = theoria.prove(seq)
    assert code == 0
    assert [p["status"] for p in report["pos"]] == ["CLOSED", "CLOSED"]
    stored = json.loads((workspace_dir / "pos" / "real.sum_zero_right.prf.json").read_text())
    assert stored["format"] == "theoria-proof"
    assert stored["version"] == 1
    code, report = theoria.prove(seq, auto=False, replay=True)
    assert code == 0
    assert report["pos"][0]["replay"] == "NEEDS_REPLAY"


def test_budget(workspace_dir):
    code, report = theoria.prove(workspace_dir / "loop" / "loop.seq", budget=4)
    assert code == 1
    assert report["pos"][0]["budgetExceeded"]
    assert report["pos"][0]["applications"] == 4


def test_service(workspace_dir):
    svc = theoria.Service(workspace_dir)
    status, body = svc.get("/pos")
    assert status == 200
    assert "real.sum_zero_run" in {p["id"] for p in body["pos"]}
    status, body = svc.post("/pos/real.sum_zero_run/auto")
    assert status == 200
    assert body["tree"]["status"] == "CLOSED"
    status, body = svc.post("/pos/real.sum_zero_run/prune", {"nodeId": body["tree"]["root"]["id"]})
    assert status == 200
    assert body["tree"]["status"] == "OPEN"
    status, body = svc.get("/pos/nope.nope/tree")
    assert status == 404
    assert body["error"] == "UnknownObligation"


def test_infix_extension_names_in_ascii(workspace_dir):
    ws = theoria.Workspace(workspace_dir)
    assert ws.format("x smr y", ["Real"]) == "x ≺ y"
    assert ws.format("x ≺ y", ["Real"], ascii=True) == "x smr y"
