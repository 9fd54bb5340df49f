"""Seeded random combinational circuits for benchmarks and tests.

The generator produces layered DAGs whose size and fanout profile sit in the
ISCAS-85 range: a few hundred to a few thousand gates with roughly a
fifth to a third of nets driving two or more sinks.
"""

from __future__ import annotations

from random import Random

from .netlist import FUNCTIONS, Gate, Netlist, make_netlist, with_drive_strengths

BINARY_FUNCTIONS = tuple(f for f in FUNCTIONS if f not in ("NOT", "BUF"))


def random_circuit(
    n_gates: int,
    n_inputs: int,
    n_outputs: int | None = None,
    seed: int = 0,
    inv_fraction: float = 0.15,
    reuse_bias: float = 0.35,
) -> Netlist:
    """Generate a random combinational circuit.

    Gates pick operands from recent signals (locality) or, with probability
    `reuse_bias`, from a small pool of "hub" signals, which yields the
    high-fanout nets the lifting strategies care about.  Dangling internal
    signals are promoted to primary outputs so every net has a sink.
    """
    if n_gates < 1 or n_inputs < 2:
        raise ValueError("need at least 1 gate and 2 inputs")
    rng = Random(seed)
    inputs = [f"i{k}" for k in range(n_inputs)]
    signals = list(inputs)
    unused = list(inputs)  # signals not yet consumed; fresh picks drain this
    hubs = list(inputs[: max(2, n_inputs // 6)])
    gates: list[Gate] = []
    for k in range(n_gates):
        out = f"g{k}"
        if rng.random() < inv_fraction:
            func = rng.choice(("NOT", "BUF"))
            arity = 1
        else:
            func = rng.choice(BINARY_FUNCTIONS)
            arity = 2 if rng.random() < 0.8 else 3
        ops: list[str] = []
        while len(ops) < arity:
            if unused and rng.random() >= reuse_bias:
                cand = unused.pop(rng.randrange(max(0, len(unused) - 12), len(unused)))
            elif rng.random() < 0.6:
                cand = rng.choice(hubs)
            else:
                lo = max(0, len(signals) - 30)
                cand = signals[rng.randrange(lo, len(signals))]
            if cand not in ops:
                ops.append(cand)
        gates.append(Gate(id=out, function=func, inputs=tuple(ops), output=out))
        signals.append(out)
        unused.append(out)
        if rng.random() < 0.05:
            hubs.append(out)
            if len(hubs) > max(4, n_gates // 50):
                hubs.pop(0)

    used = set()
    for g in gates:
        used.update(g.inputs)
    dangling = [g.output for g in gates if g.output not in used]
    if n_outputs is None:
        outputs = dangling
    else:
        outputs = list(dangling)
        pool = [g.output for g in gates if g.output not in set(outputs)]
        rng.shuffle(pool)
        while len(outputs) < n_outputs and pool:
            outputs.append(pool.pop())
        outputs = outputs[: max(n_outputs, len(dangling))]
    nl = make_netlist(f"rand{n_gates}g_s{seed}", inputs, outputs, gates)
    return with_drive_strengths(nl, seed=seed + 1)


#: Desk-scale benchmark suite: name -> (gates, inputs, outputs, seed).  Sizes
#: span the smaller half of the ISCAS-85 range; runtimes stay in test-suite
#: territory.
BENCH_SUITE = {
    "r160": (160, 36, 12, 11),
    "r240": (240, 40, 14, 12),
    "r360": (360, 50, 18, 13),
    "r520": (520, 60, 22, 14),
    "r700": (700, 64, 28, 15),
}


def suite_circuit(name: str) -> Netlist:
    n_gates, n_inputs, n_outputs, seed = BENCH_SUITE[name]
    return random_circuit(n_gates, n_inputs, n_outputs, seed=seed)
