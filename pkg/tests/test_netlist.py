"""Parser, fanout classes, simulation, and loop-check tests.

Independent oracles used here:
  * recursive truth-table evaluator (no shared code with simulate),
  * Floyd-Warshall transitive closure for loop checks.
"""

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from wirelift.circuits import random_circuit, suite_circuit
from wirelift.netlist import (
    CONST0,
    HIFON,
    PRIMARY_INPUT,
    SINGLE_SINK,
    BenchParseError,
    Gate,
    Netlist,
    UnknownGateError,
    classify_fanout,
    exhaustive_vectors,
    has_combinational_loop,
    make_netlist,
    parse_bench,
    random_vectors,
    serialize_bench,
    simulate,
    topological_gates,
    with_drive_strengths,
)

AND_TEXT = "INPUT(a)\nINPUT(b)\nOUTPUT(c)\nc = AND(a, b)"


def netlist_fingerprint(nl: Netlist):
    gates = sorted((g.id, g.function, g.inputs, g.output) for g in nl.gates)
    nets = sorted((n.id, n.driver, tuple(sorted(n.sinks))) for n in nl.nets)
    return (nl.inputs, nl.outputs, tuple(gates), tuple(nets))


# ---------------------------------------------------------------- oracles


def eval_recursive(nl: Netlist, assignment: dict) -> dict:
    """Independent recursive evaluator: walks drivers from each output."""
    ops = {
        "AND": lambda vs: all(vs),
        "NAND": lambda vs: not all(vs),
        "OR": lambda vs: any(vs),
        "NOR": lambda vs: not any(vs),
        "XOR": lambda vs: (sum(vs) % 2) == 1,
        "XNOR": lambda vs: (sum(vs) % 2) == 0,
        "NOT": lambda vs: not vs[0],
        "BUF": lambda vs: vs[0],
    }
    memo = dict(assignment)

    def value(net_id):
        if net_id in memo:
            return memo[net_id]
        net = nl.net(net_id)
        if net.driver == CONST0:
            memo[net_id] = False
            return False
        g = nl.gate(net.driver)
        memo[net_id] = ops[g.function]([value(i) for i in g.inputs])
        return memo[net_id]

    return {o: value(o) for o in nl.outputs}


def closure_reaches(nl: Netlist):
    """Floyd-Warshall reachability over the gate graph."""
    gids = sorted(g.id for g in nl.gates)
    idx = {g: i for i, g in enumerate(gids)}
    n = len(gids)
    reach = [[False] * n for _ in range(n)]
    for g in nl.gates:
        for gs, _ in nl.net(g.output).gate_sinks():
            reach[idx[g.id]][idx[gs]] = True
    for k in range(n):
        for i in range(n):
            if reach[i][k]:
                row_k = reach[k]
                row_i = reach[i]
                for j in range(n):
                    if row_k[j]:
                        row_i[j] = True
    return gids, idx, reach


# ---------------------------------------------------------------- parsing


def test_parse_minimal_and():
    nl = parse_bench(AND_TEXT)
    assert len(nl.inputs) == 2
    assert len(nl.outputs) == 1
    assert len(nl.gates) == 1
    assert len(nl.nets) == 3
    assert nl.net("a").driver == PRIMARY_INPUT
    assert nl.net("c").driver == "c"
    assert all(g.drive_strength == 1 for g in nl.gates)


def test_parse_undefined_net():
    with pytest.raises(BenchParseError, match="undefined net 'a'"):
        parse_bench("c = AND(a, b)")


def test_parse_errors_carry_line_numbers():
    with pytest.raises(BenchParseError) as e:
        parse_bench("INPUT(a)\nINPUT(b)\nc = FROB(a, b)")
    assert e.value.line == 3
    with pytest.raises(BenchParseError) as e:
        parse_bench("INPUT(a)\na = NOT(a)")
    assert e.value.line == 2  # duplicate driver for a
    with pytest.raises(BenchParseError, match="OUTPUT"):
        parse_bench("INPUT(a)\nOUTPUT(zz)\nb = NOT(a)")


def test_parse_rejects_cycles_with_line():
    text = "INPUT(a)\nx = AND(a, y)\ny = BUF(x)"
    with pytest.raises(BenchParseError, match="cyclic") as e:
        parse_bench(text)
    assert e.value.line in (2, 3)


def test_parse_rejects_sequential():
    with pytest.raises(BenchParseError, match="sequential"):
        parse_bench("INPUT(d)\nq = DFF(d)")


def test_parse_arity_checks():
    with pytest.raises(BenchParseError):
        parse_bench("INPUT(a)\nb = NOT(a, a)")
    with pytest.raises(BenchParseError):
        parse_bench("INPUT(a)\nb = AND(a)")


def test_parse_whitespace_and_comments():
    nl = parse_bench("# hdr\nINPUT( a )\nINPUT(b)\nOUTPUT(c)\n\nc = NAND( a ,  b )  # t\n")
    assert nl.gate("c").inputs == ("a", "b")


def test_identifiers_case_sensitive():
    nl = parse_bench("INPUT(A)\nINPUT(a)\nOUTPUT(c)\nc = AND(A, a)")
    assert len(nl.inputs) == 2


def test_input_count_matches_text_scan():
    # bench-file self-consistency on a full-size generated circuit
    text = serialize_bench(suite_circuit("r160"))
    expected = sum(1 for line in text.splitlines() if line.strip().startswith("INPUT("))
    assert len(parse_bench(text).inputs) == expected


def test_roundtrip_parse_serialize_parse():
    for name in ("r160", "r240"):
        nl = parse_bench(serialize_bench(suite_circuit(name)))
        text = serialize_bench(nl)
        again = parse_bench(text)
        assert netlist_fingerprint(nl) == netlist_fingerprint(again)
        assert serialize_bench(again) == text  # canonical fixpoint


# ---------------------------------------------------------------- fanout


def test_classify_fanout_rules():
    text = "INPUT(a)\nINPUT(b)\nOUTPUT(x)\nOUTPUT(y)\nx = AND(a, b)\ny = NOT(a)"
    cls = classify_fanout(parse_bench(text))
    assert cls["a"] == HIFON  # two gate sinks
    assert cls["b"] == SINGLE_SINK
    assert cls["x"] == SINGLE_SINK  # one PO sink


def test_hifon_fraction_plausible_band():
    nl = suite_circuit("r160")
    cls = classify_fanout(nl)
    direct = sum(1 for n in nl.nets if len(n.sinks) >= 2)
    assert sum(1 for v in cls.values() if v == HIFON) == direct
    frac = direct / len(nl.nets)
    assert 0.10 < frac < 0.45


# ---------------------------------------------------------------- simulate


def test_simulate_and_truth_table():
    nl = parse_bench(AND_TEXT)
    out = simulate(nl, [[1, 1], [1, 0], [0, 1], [0, 0]])
    assert out[:, 0].tolist() == [True, False, False, False]


def test_simulate_width_mismatch():
    nl = parse_bench(AND_TEXT)
    with pytest.raises(ValueError, match="width"):
        simulate(nl, [[1, 0, 1]])


def test_simulate_identity_self():
    nl = suite_circuit("r160")
    vec = random_vectors(len(nl.inputs), 64, seed=3)
    a = simulate(nl, vec)
    b = simulate(nl, vec)
    assert np.array_equal(a, b)


def test_simulate_matches_recursive_oracle_exhaustive():
    nl = random_circuit(12, 4, seed=7)
    vec = exhaustive_vectors(4)
    got = simulate(nl, vec)
    for row, bits in enumerate(vec):
        assign = dict(zip(nl.inputs, (bool(b) for b in bits)))
        want = eval_recursive(nl, assign)
        assert got[row].tolist() == [want[o] for o in nl.outputs], f"vector {row}"


@given(st.integers(0, 10_000), st.integers(1, 17))
@settings(max_examples=25, deadline=None)
def test_simulate_chunking_invariant(seed, chunk):
    nl = random_circuit(25, 5, seed=41)
    vec = random_vectors(5, 33, seed=seed)
    assert np.array_equal(simulate(nl, vec), simulate(nl, vec, chunk_size=chunk))


def test_simulate_const0_driver():
    g = Gate(id="y", function="OR", inputs=("a", "z"), output="y")
    nl = make_netlist("c0", ["a"], ["y"], [g], const0_nets=["z"])
    out = simulate(nl, [[0], [1]])
    assert out[:, 0].tolist() == [False, True]


# ---------------------------------------------------------------- loops


def chain3():
    return parse_bench("INPUT(a)\ng1 = BUF(a)\ng2 = BUF(g1)\nOUTPUT(g3)\ng3 = BUF(g2)")


def test_loop_back_edge():
    assert has_combinational_loop(chain3(), ("g3", "g1")) is True


def test_loop_forward_edge():
    assert has_combinational_loop(chain3(), ("g1", "g3")) is False


def test_loop_self_edge():
    assert has_combinational_loop(chain3(), ("g2", "g2")) is True


def test_loop_unknown_gate():
    with pytest.raises(UnknownGateError):
        has_combinational_loop(chain3(), ("g1", "nope"))


@given(st.integers(0, 10_000))
@settings(max_examples=40, deadline=None)
def test_loop_agrees_with_transitive_closure(seed):
    nl = random_circuit(10, 3, seed=seed)
    gids, idx, reach = closure_reaches(nl)
    for d in gids:
        for s in gids:
            # adding edge d->s closes a cycle iff s already reaches d (or d==s)
            expect = (d == s) or reach[idx[s]][idx[d]]
            assert has_combinational_loop(nl, (d, s)) == expect


def test_loop_oracle_exhaustive_12_gates():
    for seed in range(5):
        nl = random_circuit(12, 4, seed=100 + seed)
        gids, idx, reach = closure_reaches(nl)
        for d in gids:
            for s in gids:
                expect = (d == s) or reach[idx[s]][idx[d]]
                assert has_combinational_loop(nl, (d, s)) == expect


# ---------------------------------------------------------------- misc


def test_topological_order_respects_edges():
    nl = suite_circuit("r160")
    pos = {g: i for i, g in enumerate(topological_gates(nl))}
    for g in nl.gates:
        for gs, _ in nl.net(g.output).gate_sinks():
            assert pos[g.id] < pos[gs]


def test_with_drive_strengths_classes_and_determinism():
    nl = suite_circuit("r160")
    a = with_drive_strengths(nl, seed=5)
    b = with_drive_strengths(nl, seed=5)
    assert [g.drive_strength for g in a.gates] == [g.drive_strength for g in b.gates]
    assert {g.drive_strength for g in a.gates} <= {1, 2, 4}
    assert len({g.drive_strength for g in a.gates}) > 1


def test_make_netlist_rejects_cycle():
    g1 = Gate(id="x", function="AND", inputs=("a", "y"), output="x")
    g2 = Gate(id="y", function="BUF", inputs=("x",), output="y")
    with pytest.raises(ValueError):
        make_netlist("bad", ["a"], ["x"], [g1, g2])
