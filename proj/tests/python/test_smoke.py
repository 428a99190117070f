import os
from pathlib import Path

import pytest

import vispi

DATA = Path(os.environ.get("VISPI_DATA_DIR", Path(__file__).resolve().parents[2] / "data"))


def load(name):
    return vispi.Program((DATA / name).read_text())


def envs(prog, name):
    return prog.env_file((DATA / name).read_text())


def test_display_example_types_and_steps():
    prog = load("seq_display.proc")
    player, observer = envs(prog, "seq_display.env")
    assert observer is not None
    assert vispi.check(vispi.Mode.SEQ, player, prog["P"])["ok"]
    acts = [a for a, _, _ in vispi.typed_steps(vispi.Mode.SEQ, observer, prog["P"], [1])]
    assert acts == ["a!<1>(b1)"]


def test_transitivity_gate():
    prog = load("ex_tr.proc")
    player, _ = envs(prog, "ex_tr.env")
    assert not player.transitive
    r = vispi.check(vispi.Mode.SEQ, player, prog["P"])
    assert not r["ok"] and r["rule"] == "TRANS"
    assert vispi.check(vispi.Mode.SEQ, player, prog["P"], transitivity_gate=False)["ok"]
    assert player.closure().transitive


def test_pruning_preserves_traces():
    prog = load("ex_prun.proc")
    player, observer = envs(prog, "ex_prun.env")
    pruned = prog.prune(["a", "d"], player, prog["P"])
    assert pruned.canonical_key() == prog["Pruned"].canonical_key()
    v = vispi.trace_equiv(vispi.Mode.SEQ, prog["P"], pruned, player, observer, depth=8)
    assert v["equivalent"], v


def test_bisim_depends_on_observer():
    prog = load("bisim_ex.proc")
    player, hidden = envs(prog, "bisim_ex_hidden.env")
    _, visible = envs(prog, "bisim_ex_visible.env")
    assert vispi.bisim(vispi.Mode.SEQ, prog["P"], prog["Q"], player, hidden)["equivalent"]
    v = vispi.bisim(vispi.Mode.SEQ, prog["P"], prog["Q"], player, visible)
    assert not v["equivalent"] and v["verdict"] == "distinguished"


def test_trace_predicates():
    prog = vispi.Program("mode wb;\nho a, c;\ncon s, t;")
    assert prog.respects_views(["a", "c"], ["a?<>(b1)", "b1!<>(b2)"])
    assert not prog.respects_views(["a"], ["c?<>(b1)"])
    assert set(prog.view(["a"], ["a?<>(b1)"])) == {"a", "b1"}


def test_generated_instances_type():
    for mode in (vispi.Mode.SEQ, vispi.Mode.WB):
        for seed in range(1, 6):
            proc, player, observer = vispi.generate(mode, seed=seed)
            assert vispi.check(mode, player, proc)["ok"]
            assert vispi.compatible(mode, player, observer)
            traces, _ = vispi.traces(mode, observer, proc, depth=4, tau_bound=8)
            assert all(isinstance(t, str) for t in traces)


def test_errors_raise():
    with pytest.raises(vispi.VispiError):
        vispi.Program("mode seq;\nproc P = a!().0;")
    prog = vispi.Program("mode seq;\nho a;\nproc P = a!().0;")
    with pytest.raises(vispi.VispiError):
        prog["Nope"]
