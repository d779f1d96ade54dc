import json
import random
from pathlib import Path

import pytest

from servicecomp.automata import ServiceAutomaton, load_automaton, serialize_automaton
from servicecomp.cli import main
from servicecomp.corpus import Job, Mutation, encode, format_table, load_jobs, mutation_jobs, run_corpus, run_job
from servicecomp.delegator import parse_delegator, replay
from servicecomp.generators import det_corpus, product_as_goal
from servicecomp.product import ProductView
from servicecomp.turing import load_tm

MACHINES = Path(__file__).resolve().parent.parent / "demos" / "machines"


def write(tmp_path, *automata):
    paths = []
    for a in automata:
        p = tmp_path / f"{a.name}.saut"
        p.write_text(serialize_automaton(a), encoding="utf-8")
        paths.append(str(p))
    return paths


def run_cli(capsys, *argv):
    status = main([str(x) for x in argv])
    out = capsys.readouterr().out
    return status, out


def ab(tmp_path):
    a1 = ServiceAutomaton("A1", ["p", "p1"], ["a"], "p", {("p", "a"): "p1"})
    a2 = ServiceAutomaton("A2", ["q", "q1"], ["b"], "q", {("q", "b"): "q1"})
    return a1, a2


# -- check-sim -------------------------------------------------------------------------

def test_check_sim_holds_for_single_service(tmp_path, capsys):
    a = ServiceAutomaton("A", ["p", "q"], ["a", "b"], "p", {("p", "a"): "q", ("q", "b"): "p"})
    goal, svc = write(tmp_path, ServiceAutomaton("B", a.states, a.alphabet, a.initial, a.transition_map()), a)
    status, out = run_cli(capsys, "check-sim", goal, svc)
    assert status == 0
    assert out.startswith("VERDICT: SIMULATED\n")
    manifest = json.loads(out.splitlines()[-1][len("MANIFEST: "):])
    assert manifest["command"] == "check-sim" and manifest["verdict"] == "SIMULATED"


def test_check_sim_halting_machine_gives_stuck(tmp_path, capsys):
    out_dir = tmp_path / "inst"
    status, _ = run_cli(capsys, "encode", MACHINES / "det_halts.tm", "--kind", "pspace", "--out", out_dir)
    assert status == 0
    services = sorted(out_dir.glob("A*.saut"), key=lambda p: int(p.stem[1:]))
    status, out = run_cli(capsys, "check-sim", out_dir / "goal.saut", *services)
    assert status == 1
    assert out.startswith("VERDICT: NOT-SIMULATED\n")
    assert any(line.startswith("STUCK: ") for line in out.splitlines())


def test_check_sim_oracle_agrees(tmp_path, capsys):
    a1, a2 = ab(tmp_path)
    goal = ServiceAutomaton("B", ["s0", "s1"], ["a", "b"], "s0", {("s0", "b"): "s1", ("s1", "b"): "s1"})
    paths = write(tmp_path, goal, a1, a2)
    s1, _ = run_cli(capsys, "check-sim", *paths)
    s2, _ = run_cli(capsys, "check-sim", "--oracle", *paths)
    s3, _ = run_cli(capsys, "check-sim", "--disjoint-fast", *paths)
    assert s1 == s2 == s3 == 1


def test_disjoint_fast_rejects_shared_labels(tmp_path, capsys):
    a1 = ServiceAutomaton("A1", ["p"], ["a"], "p", {("p", "a"): "p"})
    a2 = ServiceAutomaton("A2", ["q"], ["a"], "q", {("q", "a"): "q"})
    goal = ServiceAutomaton("B", ["s"], ["a"], "s", {("s", "a"): "s"})
    status, out = run_cli(capsys, "check-sim", "--disjoint-fast", *write(tmp_path, goal, a1, a2))
    assert status == 2 and out.startswith("ERROR: ")


def test_pair_cap_exit_status(tmp_path, capsys):
    a = ServiceAutomaton("A", [f"p{k}" for k in range(20)], ["a"], "p0",
                         {(f"p{k}", "a"): f"p{k + 1}" for k in range(19)})
    goal = ServiceAutomaton("B", ["s"], ["a"], "s", {("s", "a"): "s"})
    status, out = run_cli(capsys, "check-sim", "--pair-cap", 5, *write(tmp_path, goal, a))
    assert status == 2 and "cap-exceeded" in out


def test_malformed_input_is_an_error(tmp_path, capsys):
    bad = tmp_path / "bad.saut"
    bad.write_text("automaton X\nstates: a\n", encoding="utf-8")
    status, out = run_cli(capsys, "check-sim", bad, bad)
    assert status == 2 and out.startswith("ERROR: ")
    status, _ = run_cli(capsys, "check-sim", tmp_path / "missing.saut", bad)
    assert status == 2


# -- check-bisim -----------------------------------------------------------------------

def test_check_bisim(tmp_path, capsys):
    a1, a2 = ab(tmp_path)
    goal = product_as_goal(ProductView([a1, a2]))
    status, out = run_cli(capsys, "check-bisim", *write(tmp_path, goal, a1, a2))
    assert status == 0 and out.startswith("VERDICT: BISIMILAR\n")

    single = ServiceAutomaton("S", ["s0", "s1", "s2"], ["a", "b"], "s0", {("s0", "a"): "s1", ("s1", "b"): "s2"})
    paths = write(tmp_path, single, a1, a2)
    status, out = run_cli(capsys, "check-bisim", *paths)
    assert status == 1
    assert out.startswith("VERDICT: NOT-BISIMILAR\nFAILED: condition-A\n")
    status, _ = run_cli(capsys, "check-bisim", "--oracle", *paths)
    assert status == 1
    status, out = run_cli(capsys, "check-bisim", "--oracle", "--state-cap", 2, *paths)
    assert status == 2 and "cap-exceeded" in out


# -- synth ------------------------------------------------------------------------------

def test_synth_writes_replayable_delegator(tmp_path, capsys):
    rng = random.Random(3)
    a1 = ServiceAutomaton("A1", ["p", "q"], ["a", "c"], "p", {("p", "a"): "q", ("q", "c"): "p"})
    a2 = ServiceAutomaton("A2", ["r"], ["b", "c"], "r", {("r", "b"): "r", ("r", "c"): "r"})
    goal = ServiceAutomaton("B", ["s", "t"], ["a", "b", "c"], "s",
                            {("s", "a"): "t", ("t", "b"): "t", ("t", "c"): "s", ("s", "c"): "s"})
    paths = write(tmp_path, goal, a1, a2)
    out_file = tmp_path / "deleg.txt"
    status, out = run_cli(capsys, "synth", *paths, "--out", out_file)
    assert status == 0 and out_file.exists()
    d = parse_delegator(out_file.read_text(encoding="utf-8"), load_automaton(paths[0]),
                        ProductView([load_automaton(p) for p in paths[1:]]))
    for _ in range(100):
        s, trace = goal.initial, []
        for _ in range(rng.randint(0, 15)):
            lab, s = rng.choice(goal.out_edges(s))
            trace.append(lab)
        assert len(replay(d, trace)) == len(trace)


def test_synth_unsolvable_writes_nothing(tmp_path, capsys):
    a = ServiceAutomaton("A", ["p"], ["a"], "p", {})
    goal = ServiceAutomaton("B", ["s"], ["a"], "s", {("s", "a"): "s"})
    out_file = tmp_path / "deleg.txt"
    status, out = run_cli(capsys, "synth", *write(tmp_path, goal, a), "--out", out_file)
    assert status == 1 and not out_file.exists()


# -- encode -----------------------------------------------------------------------------

def test_encode_file_counts(tmp_path, capsys):
    det = load_tm(MACHINES / "det_loops.tm")
    status, out = run_cli(capsys, "encode", MACHINES / "det_loops.tm", "--kind", "pspace", "--out", tmp_path / "d")
    assert status == 0
    assert len(list((tmp_path / "d").iterdir())) == len(det.input) + 2
    alt = load_tm(MACHINES / "alt_survives.tm")
    status, out = run_cli(capsys, "encode", MACHINES / "alt_survives.tm", "--kind", "exptime", "--out", tmp_path / "a")
    assert status == 0
    assert len(list((tmp_path / "a").iterdir())) == 2 * len(alt.input) + 2
    assert "EXPECTED: SIMULATED" in out


def test_encode_wrong_kind(tmp_path, capsys):
    status, out = run_cli(capsys, "encode", MACHINES / "det_loops.tm", "--kind", "exptime", "--out", tmp_path / "x")
    assert status == 2


def test_encode_const_alphabet(tmp_path, capsys):
    d = tmp_path / "c"
    status, _ = run_cli(capsys, "encode", MACHINES / "det_halts.tm", "--kind", "pspace", "--const-alphabet", "a,b",
                        "--out", d)
    assert status == 0
    letters = set()
    for f in d.glob("*.saut"):
        letters |= set(load_automaton(f, allow_choice=True).alphabet)
    assert letters == {"a", "b", "hash", "dollar"}


# -- corpus and manifests ----------------------------------------------------------

def test_empty_corpus(tmp_path, capsys):
    spec = tmp_path / "corpus.json"
    spec.write_text("{}", encoding="utf-8")
    status, out = run_cli(capsys, "corpus", spec)
    assert status == 0 and "INSTANCES: 0" in out


def test_corpus_with_demo_machines(tmp_path, capsys):
    spec = tmp_path / "corpus.json"
    names = sorted(str(p) for p in MACHINES.glob("*.tm"))
    spec.write_text(json.dumps({"machines": names, "stepping": True}), encoding="utf-8")
    status, out = run_cli(capsys, "corpus", spec)
    assert status == 0
    assert out.splitlines()[0] == "instance\toracle\tchecker\tagree"
    assert "DISAGREEMENTS: 0" in out


def test_corpus_mutation_is_detected(tmp_path, capsys):
    m = load_tm(MACHINES / "det_loops.tm")
    k = encode(m).meta["K"]
    s, lab, t = next(iter(k.transitions()))
    target = next(x for x in k.states if x not in (t, s))
    spec = tmp_path / "corpus.json"
    spec.write_text(json.dumps({
        "machines": [str(MACHINES / "det_loops.tm")],
        "mutations": [{"machine": m.name, "source": s, "label": lab, "target": target}],
        "stepping": True,
    }), encoding="utf-8")
    status, out = run_cli(capsys, "corpus", spec)
    assert status == 1
    rows = out.splitlines()[1:3]
    assert rows[0].endswith("\tyes") and rows[1].endswith("\tno")


def test_manifest_rerun_is_byte_identical(tmp_path, capsys, monkeypatch):
    monkeypatch.chdir(tmp_path)
    a1, a2 = ab(tmp_path)
    goal = ServiceAutomaton("B", ["s0", "s1"], ["a", "b"], "s0", {("s0", "b"): "s1", ("s1", "a"): "s1"})
    write(tmp_path, goal, a1, a2)
    status, first = run_cli(capsys, "check-sim", "B.saut", "A1.saut", "A2.saut", "--manifest", "run.json")
    sidecar = json.loads(Path("run.json").read_text(encoding="utf-8"))
    assert sidecar["exit_status"] == status and "wall_seconds" in sidecar["timing"]
    status2, second = run_cli(capsys, "rerun", "run.json")
    assert status2 == status and second == first


def test_rerun_of_corpus_and_bad_manifest(tmp_path, capsys):
    spec = tmp_path / "corpus.json"
    spec.write_text(json.dumps({"machines": [str(MACHINES / "det_halts.tm")]}), encoding="utf-8")
    man = tmp_path / "m.json"
    status, first = run_cli(capsys, "corpus", spec, "--manifest", man)
    status2, second = run_cli(capsys, "rerun", man)
    assert (status, first) == (status2, second)
    (tmp_path / "junk.json").write_text("not json", encoding="utf-8")
    status, out = run_cli(capsys, "rerun", tmp_path / "junk.json")
    assert status == 2


# -- corpus library ---------------------------------------------------------------

def test_mutation_jobs_are_seeded():
    machines = det_corpus()[:6]
    a = [j.name for j in mutation_jobs(machines, 5, seed=1)]
    b = [j.name for j in mutation_jobs(machines, 5, seed=1)]
    assert a == b


def test_run_corpus_parallel_matches_serial():
    jobs = [Job(m) for m in det_corpus()[:6]]
    serial = run_corpus(jobs, 1)
    parallel = run_corpus(jobs, 2)
    assert [(r.name, r.checker, r.agree) for r in serial] == [(r.name, r.checker, r.agree) for r in parallel]
    assert all(r.agree for r in serial)


def test_bad_mutation_target():
    m = det_corpus()[0]
    k = encode(m).meta["K"]
    s, lab, _ = next(iter(k.transitions()))
    with pytest.raises(KeyError):
        run_job(Job(m, Mutation(s, lab, "nowhere")))


def test_format_table_columns():
    rows = run_corpus([Job(det_corpus()[0])])
    assert format_table(rows, timing=False).splitlines()[0] == "instance\toracle\tchecker\tagree"
    assert format_table(rows).splitlines()[0].endswith("\tseconds")


def test_load_jobs_random_blocks(tmp_path):
    spec = tmp_path / "c.json"
    spec.write_text(json.dumps({"random": [{"kind": "det", "seed": 2024, "count": 30}], "workers": 3}),
                    encoding="utf-8")
    jobs, workers = load_jobs(spec)
    assert len(jobs) == 30 and workers == 3
