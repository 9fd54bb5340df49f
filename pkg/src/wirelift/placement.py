"""Toy-scale deterministic placement on a square site grid.

Gates are clustered by breadth-first traversal from the primary inputs and
laid out in serpentine order, then improved by seeded greedy swaps that only
ever reduce total half-perimeter wirelength.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field
from random import Random

from .netlist import PRIMARY_INPUT, Net, Netlist

SITE_PITCH_NM = 1000


class PlacementError(ValueError):
    pass


@dataclass(frozen=True)
class Placement:
    rows: int
    cols: int
    site_pitch_nm: int
    positions: dict = field(default_factory=dict)  # gate-id -> (row, col)
    utilization: float = 0.0

    def site_xy(self, site: tuple[int, int]) -> tuple[int, int]:
        row, col = site
        return col * self.site_pitch_nm, row * self.site_pitch_nm

    def gate_xy(self, gate_id: str) -> tuple[int, int]:
        return self.site_xy(self.positions[gate_id])

    def to_doc(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "site_pitch_nm": self.site_pitch_nm,
            "utilization": round(self.utilization, 6),
            "gates": [
                {"id": g, "row": r, "col": c}
                for g, (r, c) in sorted(self.positions.items())
            ],
        }

    @staticmethod
    def from_doc(doc: dict) -> "Placement":
        return Placement(
            rows=doc["rows"],
            cols=doc["cols"],
            site_pitch_nm=doc["site_pitch_nm"],
            positions={g["id"]: (g["row"], g["col"]) for g in doc["gates"]},
            utilization=doc["utilization"],
        )


def net_pin_sites(netlist: Netlist, placement: Placement, net: Net) -> list[tuple[int, int]]:
    """Sites of all placed pins of a net (driver gate plus gate sinks).

    Primary input pads are taken to sit at the first sink's site and primary
    output pads at the driver's site, so neither adds geometry.
    """
    sites = []
    if net.driver in placement.positions:
        sites.append(placement.positions[net.driver])
    for gid, _ in net.gate_sinks():
        sites.append(placement.positions[gid])
    return sites


def hpwl(placement: Placement, net: Net, netlist: Netlist) -> int:
    """Half-perimeter wirelength of the net's pin bounding box, in nm."""
    sites = net_pin_sites(netlist, placement, net)
    if len(sites) < 2:
        return 0
    rows = [s[0] for s in sites]
    cols = [s[1] for s in sites]
    return ((max(rows) - min(rows)) + (max(cols) - min(cols))) * placement.site_pitch_nm


def total_hpwl(placement: Placement, netlist: Netlist) -> int:
    return sum(hpwl(placement, n, netlist) for n in netlist.nets)


def _bfs_order(netlist: Netlist) -> list[str]:
    seen = set()
    order = []
    queue = deque()
    for pi in netlist.inputs:
        for gid, _ in netlist.net(pi).gate_sinks():
            if gid not in seen:
                seen.add(gid)
                queue.append(gid)
    while queue:
        gid = queue.popleft()
        order.append(gid)
        out_net = netlist.net(netlist.gate(gid).output)
        for nxt, _ in out_net.gate_sinks():
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)
    for g in netlist.gates:  # unreachable-from-PI gates, declaration order
        if g.id not in seen:
            order.append(g.id)
            seen.add(g.id)
    return order


def place(
    netlist: Netlist,
    target_utilization: float = 0.5,
    seed: int = 42,
    site_pitch_nm: int = SITE_PITCH_NM,
    swap_rounds: int | None = None,
) -> Placement:
    """Deterministic seeded placement at the given utilization target."""
    if not 0 < target_utilization <= 0.85:
        raise PlacementError(f"target_utilization {target_utilization} outside (0, 0.85]")
    n_gates = len(netlist.gates)
    sites_needed = max(1, math.ceil(n_gates / target_utilization))
    side = math.ceil(math.sqrt(sites_needed))
    rows = cols = side
    if rows * cols < n_gates:
        raise PlacementError("grid too small for gate count")

    order = _bfs_order(netlist)
    positions = {}
    for k, gid in enumerate(order):
        row = k // cols
        col = k % cols if row % 2 == 0 else cols - 1 - (k % cols)
        positions[gid] = (row, col)

    placement = Placement(
        rows=rows,
        cols=cols,
        site_pitch_nm=site_pitch_nm,
        positions=positions,
        utilization=n_gates / (rows * cols),
    )
    if n_gates >= 2:
        _improve_by_swaps(placement, netlist, seed, swap_rounds)
    return placement


def _improve_by_swaps(placement: Placement, netlist: Netlist, seed: int, rounds: int | None):
    """Greedy seeded swaps; accepts only strict total-HPWL improvements."""
    rng = Random(seed)
    positions = placement.positions
    gate_ids = sorted(positions)
    nets_of_gate: dict[str, list[Net]] = {g: [] for g in gate_ids}
    for net in netlist.nets:
        for s in net_pin_sites(netlist, placement, net):
            pass  # sites recomputed per net below; membership next
    for net in netlist.nets:
        members = set()
        if net.driver in positions:
            members.add(net.driver)
        members.update(gid for gid, _ in net.gate_sinks())
        for gid in members:
            nets_of_gate[gid].append(net)

    occupied = {site: gid for gid, site in positions.items()}
    all_sites = [(r, c) for r in range(placement.rows) for c in range(placement.cols)]

    def cost_around(gates):
        nets = {n.id: n for g in gates for n in nets_of_gate[g]}
        return sum(hpwl(placement, n, netlist) for n in nets.values())

    n = len(gate_ids)
    iters = rounds if rounds is not None else 6 * n
    for _ in range(iters):
        a = gate_ids[rng.randrange(n)]
        target = all_sites[rng.randrange(len(all_sites))]
        b = occupied.get(target)
        if b == a:
            continue
        involved = (a,) if b is None else (a, b)
        before = cost_around(involved)
        site_a = positions[a]
        positions[a] = target
        occupied[target] = a
        if b is None:
            del occupied[site_a]
        else:
            positions[b] = site_a
            occupied[site_a] = b
        after = cost_around(involved)
        if after >= before:  # revert
            positions[a] = site_a
            occupied[site_a] = a
            if b is None:
                del occupied[target]
            else:
                positions[b] = target
                occupied[target] = b
