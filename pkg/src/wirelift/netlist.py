"""Gate-level netlist model: `.bench` parsing, fanout classes, simulation, loop checks.

The netlist is the ground truth that the protection flow guards and that
attack results are scored against.  Circuits are combinational only; every
net has exactly one driver (a gate output, a primary input, or the CONST0
stand-in used when an attack leaves a sink unassigned).
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from random import Random

import numpy as np

# Driver markers for nets not driven by a gate output.
PRIMARY_INPUT = "__PI__"
CONST0 = "__CONST0__"

# Sink kinds: a gate input pin or a primary output pad.
GATE_SINK = "gate"
PO_SINK = "po"

FUNCTIONS = ("AND", "NAND", "OR", "NOR", "XOR", "XNOR", "NOT", "BUF")
UNARY = ("NOT", "BUF")

DRIVE_CLASSES = (1, 2, 4)

HIFON = "HIFON"
SINGLE_SINK = "SINGLE_SINK"


class BenchParseError(ValueError):
    """Raised on malformed `.bench` input; carries the offending line number."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        prefix = f"line {line}: " if line is not None else ""
        super().__init__(prefix + message)


class UnknownGateError(KeyError):
    pass


@dataclass(frozen=True)
class Gate:
    id: str
    function: str
    inputs: tuple[str, ...]
    output: str
    drive_strength: int = 1

    def __post_init__(self):
        if self.function not in FUNCTIONS:
            raise ValueError(f"unknown gate function {self.function!r}")
        arity = len(self.inputs)
        if self.function in UNARY:
            if arity != 1:
                raise ValueError(f"{self.function} gate {self.id!r} needs 1 input, got {arity}")
        elif arity < 2:
            raise ValueError(f"{self.function} gate {self.id!r} needs >=2 inputs, got {arity}")
        if self.drive_strength not in DRIVE_CLASSES:
            raise ValueError(f"drive_strength must be one of {DRIVE_CLASSES}")


@dataclass(frozen=True)
class Net:
    id: str
    driver: str  # gate id, PRIMARY_INPUT, or CONST0
    sinks: tuple[tuple, ...] = ()  # (GATE_SINK, gate_id, pin_index) or (PO_SINK, net_id)

    @property
    def fanout(self) -> int:
        return len(self.sinks)

    def gate_sinks(self) -> list[tuple[str, int]]:
        return [(s[1], s[2]) for s in self.sinks if s[0] == GATE_SINK]


@dataclass(frozen=True)
class Netlist:
    name: str
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    gates: tuple[Gate, ...]
    nets: tuple[Net, ...]
    gate_by_id: dict = field(repr=False, compare=False, default_factory=dict)
    net_by_id: dict = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        object.__setattr__(self, "gate_by_id", {g.id: g for g in self.gates})
        object.__setattr__(self, "net_by_id", {n.id: n for n in self.nets})
        if len(self.gate_by_id) != len(self.gates):
            raise ValueError("duplicate gate ids")
        if len(self.net_by_id) != len(self.nets):
            raise ValueError("duplicate net ids")

    def gate(self, gate_id: str) -> Gate:
        try:
            return self.gate_by_id[gate_id]
        except KeyError:
            raise UnknownGateError(gate_id) from None

    def net(self, net_id: str) -> Net:
        return self.net_by_id[net_id]


def _build_nets(inputs, outputs, gates, const0_nets=()) -> list[Net]:
    drivers: dict[str, str] = {}
    for name in inputs:
        drivers[name] = PRIMARY_INPUT
    for name in const0_nets:
        drivers[name] = CONST0
    for g in gates:
        drivers[g.output] = g.id
    sinks: dict[str, list[tuple]] = {n: [] for n in drivers}
    for g in gates:
        for pin_idx, net_id in enumerate(g.inputs):
            sinks[net_id].append((GATE_SINK, g.id, pin_idx))
    for name in outputs:
        sinks[name].append((PO_SINK, name))
    return [Net(n, drivers[n], tuple(sinks[n])) for n in drivers]


def make_netlist(name, inputs, outputs, gates, const0_nets=()) -> Netlist:
    """Assemble and validate a Netlist from parts (shared by parser and attacks)."""
    nets = _build_nets(inputs, outputs, gates, const0_nets)
    nl = Netlist(name, tuple(inputs), tuple(outputs), tuple(gates), tuple(nets))
    _check_acyclic(nl)
    return nl


_LINE_RE = re.compile(r"^(\S+)\s*=\s*([A-Za-z0-9_]+)\s*\((.*)\)$")
_IO_RE = re.compile(r"^(INPUT|OUTPUT)\s*\(\s*([^()\s]+)\s*\)$")


def parse_bench(text: str, name: str = "bench") -> Netlist:
    """Parse an ISCAS-style `.bench` netlist.

    Accepts `INPUT(x)`, `OUTPUT(y)`, `z = FUNC(a, b, ...)` lines, `#` comments
    and blank lines.  Sequential tokens (DFF etc.) are rejected.  Every gate
    gets drive_strength 1; use `with_drive_strengths` to assign classes.
    """
    inputs: list[str] = []
    outputs: list[str] = []
    gates: list[Gate] = []
    defined: dict[str, int] = {}  # net id -> defining line
    out_lines: dict[str, int] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        io = _IO_RE.match(line)
        if io:
            kind, sym = io.group(1), io.group(2)
            if kind == "INPUT":
                if sym in defined:
                    raise BenchParseError(f"duplicate driver for net {sym!r}", lineno)
                defined[sym] = lineno
                inputs.append(sym)
            else:
                if sym in out_lines:
                    raise BenchParseError(f"duplicate OUTPUT({sym})", lineno)
                out_lines[sym] = lineno
                outputs.append(sym)
            continue
        m = _LINE_RE.match(line)
        if not m:
            raise BenchParseError(f"unparseable line {line!r}", lineno)
        out, func, args = m.group(1), m.group(2).upper(), m.group(3)
        if func == "DFF" or func in ("DFFSR", "LATCH", "SDFF"):
            raise BenchParseError(
                f"sequential element {func} is not supported (combinational circuits only)", lineno
            )
        if func not in FUNCTIONS:
            raise BenchParseError(f"unknown function token {func!r}", lineno)
        ins = tuple(a.strip() for a in args.split(",")) if args.strip() else ()
        if any(not a for a in ins):
            raise BenchParseError("empty operand in argument list", lineno)
        if out in defined:
            raise BenchParseError(f"duplicate driver for net {out!r}", lineno)
        defined[out] = lineno
        try:
            gates.append(Gate(id=out, function=func, inputs=ins, output=out))
        except ValueError as e:
            raise BenchParseError(str(e), lineno) from None

    for g in gates:
        for net_id in g.inputs:
            if net_id not in defined:
                raise BenchParseError(f"undefined net {net_id!r}", defined[g.output])
    for sym, lineno in out_lines.items():
        if sym not in defined:
            raise BenchParseError(f"OUTPUT({sym}) references an undefined net", lineno)

    cycle = _find_cycle_gate({g.id: g for g in gates})
    if cycle is not None:
        raise BenchParseError(f"cyclic definition involving net {cycle!r}", defined[cycle])

    return make_netlist(name, inputs, outputs, gates)


def serialize_bench(netlist: Netlist) -> str:
    """Canonical `.bench` text: declared I/O order, gates sorted by id."""
    lines = [f"# {netlist.name}"]
    lines += [f"INPUT({n})" for n in netlist.inputs]
    lines += [f"OUTPUT({n})" for n in netlist.outputs]
    lines.append("")
    for g in sorted(netlist.gates, key=lambda g: g.id):
        lines.append(f"{g.output} = {g.function}({', '.join(g.inputs)})")
    return "\n".join(lines) + "\n"


def with_drive_strengths(netlist: Netlist, seed: int) -> Netlist:
    """Assign seeded random drive classes {1,2,4} (weights 0.5/0.3/0.2) to all gates."""
    rng = Random(seed)
    gates = tuple(
        replace(g, drive_strength=rng.choices(DRIVE_CLASSES, weights=(5, 3, 2))[0])
        for g in netlist.gates
    )
    return Netlist(netlist.name, netlist.inputs, netlist.outputs, gates, netlist.nets)


def classify_fanout(netlist: Netlist) -> dict[str, str]:
    """Nets with two or more sinks are high-fanout (HIFON), the rest SINGLE_SINK."""
    return {n.id: HIFON if n.fanout >= 2 else SINGLE_SINK for n in netlist.nets}


def gate_graph(netlist: Netlist) -> dict[str, list[str]]:
    """Adjacency gate -> successor gates (through the driven net)."""
    adj: dict[str, list[str]] = {g.id: [] for g in netlist.gates}
    for g in netlist.gates:
        net = netlist.net(g.output)
        adj[g.id] = sorted({gs for gs, _ in net.gate_sinks()})
    return adj


def topological_gates(netlist: Netlist) -> list[str]:
    """Deterministic topological order of gate ids (inputs first)."""
    order = _topo({g.id: g for g in netlist.gates})
    if order is None:
        raise ValueError("netlist contains a combinational loop")
    return order


def _gate_preds(gates_by_id: dict[str, Gate], gid: str) -> list[str]:
    return [i for i in gates_by_id[gid].inputs if i in gates_by_id]


def _topo(gates_by_id: dict[str, Gate]) -> list[str] | None:
    import heapq

    indeg = {gid: 0 for gid in gates_by_id}
    succ: dict[str, list[str]] = {gid: [] for gid in gates_by_id}
    for gid in gates_by_id:
        for p in _gate_preds(gates_by_id, gid):
            succ[p].append(gid)
            indeg[gid] += 1
    heap = [gid for gid, d in indeg.items() if d == 0]
    heapq.heapify(heap)
    order = []
    while heap:
        gid = heapq.heappop(heap)
        order.append(gid)
        for s in sorted(succ[gid]):
            indeg[s] -= 1
            if indeg[s] == 0:
                heapq.heappush(heap, s)
    if len(order) != len(gates_by_id):
        return None
    return order


def _find_cycle_gate(gates_by_id: dict[str, Gate]) -> str | None:
    """Return the lexicographically first gate on a cycle, or None."""
    order = _topo(gates_by_id)
    if order is not None:
        return None
    placed = set(order or ())
    # all gates never placed participate in (or depend on) a cycle; pick the
    # first one that is actually on a cycle
    remaining = sorted(set(gates_by_id) - placed)
    for gid in remaining:
        if _reaches(gates_by_id, gid, gid):
            return gid
    return remaining[0]


def _reaches(gates_by_id: dict[str, Gate], src: str, dst: str) -> bool:
    """True iff some successor chain src -> ... -> dst exists (length >= 1)."""
    succ: dict[str, list[str]] = {gid: [] for gid in gates_by_id}
    for gid in gates_by_id:
        for p in _gate_preds(gates_by_id, gid):
            succ[p].append(gid)
    stack = list(succ[src])
    seen = set()
    while stack:
        g = stack.pop()
        if g == dst:
            return True
        if g in seen:
            continue
        seen.add(g)
        stack.extend(succ[g])
    return False


def _check_acyclic(netlist: Netlist) -> None:
    if _topo(dict(netlist.gate_by_id)) is None:
        raise ValueError("gate graph is cyclic")


def has_combinational_loop(netlist: Netlist, extra_edge: tuple[str, str]) -> bool:
    """Would wiring gate `extra_edge[0]`'s output into gate `extra_edge[1]` close a cycle?"""
    driver, sink = extra_edge
    netlist.gate(driver)
    netlist.gate(sink)
    if driver == sink:
        return True
    adj = gate_graph(netlist)
    # cycle iff sink already reaches driver
    stack = [sink]
    seen = set()
    while stack:
        g = stack.pop()
        if g == driver:
            return True
        if g in seen:
            continue
        seen.add(g)
        stack.extend(adj[g])
    return False


_EVAL = {
    "AND": lambda cols: np.logical_and.reduce(cols),
    "NAND": lambda cols: ~np.logical_and.reduce(cols),
    "OR": lambda cols: np.logical_or.reduce(cols),
    "NOR": lambda cols: ~np.logical_or.reduce(cols),
    "XOR": lambda cols: np.logical_xor.reduce(cols),
    "XNOR": lambda cols: ~np.logical_xor.reduce(cols),
    "NOT": lambda cols: ~cols[0],
    "BUF": lambda cols: cols[0],
}


def simulate(netlist: Netlist, vectors, chunk_size: int | None = None) -> np.ndarray:
    """Evaluate the circuit on input vectors; returns a (V, n_outputs) bool array.

    `vectors` is a (V, n_inputs) array-like, columns ordered as netlist.inputs.
    Evaluation is pure; optional chunking never changes the result order.
    """
    vec = np.asarray(vectors, dtype=bool)
    if vec.ndim == 1:
        vec = vec.reshape(1, -1)
    if vec.shape[1] != len(netlist.inputs):
        raise ValueError(
            f"vector width {vec.shape[1]} != {len(netlist.inputs)} primary inputs"
        )
    if chunk_size is not None and vec.shape[0] > chunk_size:
        parts = [
            simulate(netlist, vec[i : i + chunk_size])
            for i in range(0, vec.shape[0], chunk_size)
        ]
        return np.concatenate(parts, axis=0)

    nvec = vec.shape[0]
    values: dict[str, np.ndarray] = {}
    for idx, name in enumerate(netlist.inputs):
        values[name] = vec[:, idx]
    zeros = np.zeros(nvec, dtype=bool)
    for net in netlist.nets:
        if net.driver == CONST0:
            values[net.id] = zeros
    for gid in topological_gates(netlist):
        g = netlist.gate(gid)
        cols = [values[i] for i in g.inputs]
        values[g.output] = _EVAL[g.function](cols)
    return np.stack([values[o] for o in netlist.outputs], axis=1)


def exhaustive_vectors(n_inputs: int) -> np.ndarray:
    """All 2^n input vectors in counting order (n <= 20 guard)."""
    if n_inputs > 20:
        raise ValueError("exhaustive enumeration capped at 20 inputs")
    count = 1 << n_inputs
    idx = np.arange(count, dtype=np.uint32)
    bits = ((idx[:, None] >> np.arange(n_inputs - 1, -1, -1)) & 1).astype(bool)
    return bits


def random_vectors(n_inputs: int, count: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.integers(0, 2, size=(count, n_inputs), dtype=np.uint8).astype(bool)
