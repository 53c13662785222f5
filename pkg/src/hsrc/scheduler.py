"""Slotted simulation of parallel repairs under unit link capacity.

Every node uploads at most one fragment and downloads at most one fragment
per time slot.  Each missing fragment is rebuilt by its own newcomer node,
which may upload the rebuilt fragment from the slot after it completes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .code import CodeParams, encode
from .errors import CodeError, Irreparable
from .gf2 import GF2Basis
from .repair import find_repair_set, repair_fragment


class Transfer(NamedTuple):
    src: int
    frag: int
    dst: int


@dataclass
class ClusterState:
    """Which node holds each available fragment and which newcomer rebuilds each lost one."""

    available: dict[int, int]
    missing: dict[int, int]

    def __post_init__(self):
        if set(self.available) & set(self.missing):
            raise CodeError("a fragment cannot be both available and missing")
        nodes = list(self.available.values()) + list(self.missing.values())
        if len(set(nodes)) != len(nodes):
            raise CodeError("each node holds at most one fragment")

    @classmethod
    def scenario(cls, code: CodeParams, missing, available=None) -> ClusterState:
        """Fragment i lives on node i; the newcomer for fragment i is node n + i."""
        missing = sorted(set(missing))
        if available is None:
            available = [i for i in range(1, code.n + 1) if i not in missing]
        for i in list(missing) + list(available):
            code.point(i)
        return cls({i: i for i in sorted(available)}, {i: code.n + i for i in missing})


@dataclass
class RepairSchedule:
    slots: list[list[Transfer]] = field(default_factory=list)

    @property
    def makespan(self) -> int:
        return len(self.slots)

    def to_json(self) -> list[list[dict]]:
        return [[t._asdict() for t in slot] for slot in self.slots]


def _repair_options(target: int, sources: list[int], code: CodeParams, max_size: int,
                    limit: int = 256) -> list[tuple[int, ...]]:
    """Donor sets from ``sources`` of size up to ``max_size``, smallest first.

    At most ``limit`` sets of each size are kept, in lexicographic order.
    """
    pts = {f: code.point(f) for f in sources}
    smallest = len(find_repair_set(target, sources, code))
    out = []
    for size in range(smallest, max(smallest, max_size) + 1):
        found = 0
        for combo in itertools.combinations(sources, size):
            x = 0
            for f in combo:
                x ^= pts[f]
            if x == target:
                out.append(combo)
                found += 1
                if found >= limit:
                    break
    return out


def _balanced_choice(code: CodeParams, targets: dict[int, int], sources: list[int],
                     budget: int = 20_000) -> dict[int, tuple[int, ...]]:
    """Pick one donor set per newcomer so that no source and no newcomer
    exceeds a common cap, taking the smallest feasible cap.

    Within a cap, smaller donor sets are preferred, then lighter sources.
    Depth-first search; running out of ``budget`` counts as failure at that
    cap.
    """
    smallest = {f: len(find_repair_set(t, sources, code)) for f, t in targets.items()}
    total = sum(smallest.values())
    cap = max(max(smallest.values()), -(-total // len(sources)))

    def search(cap: int, options: dict[int, list[tuple[int, ...]]]):
        order = sorted(options, key=lambda f: (len(options[f]), f))
        load: dict[int, int] = {}
        chosen: dict[int, tuple[int, ...]] = {}
        steps = 0

        def dfs(i: int) -> bool:
            nonlocal steps
            if i == len(order):
                return True
            room = sum(cap - load.get(g, 0) for g in sources)
            if room < sum(smallest[f] for f in order[i:]):
                return False
            f = order[i]
            ranked = sorted(
                options[f],
                key=lambda o: (len(o), max(load.get(g, 0) for g in o), sum(load.get(g, 0) for g in o), o),
            )
            for o in ranked:
                steps += 1
                if steps > budget:
                    return False
                if any(load.get(g, 0) + 1 > cap for g in o):
                    continue
                for g in o:
                    load[g] = load.get(g, 0) + 1
                chosen[f] = o
                if dfs(i + 1):
                    return True
                for g in o:
                    load[g] -= 1
                del chosen[f]
            return False

        return dict(chosen) if dfs(0) else None

    # greedy pass gives an upper bound; the search then tries smaller caps
    load: dict[int, int] = {}
    best: dict[int, tuple[int, ...]] = {}
    for f in sorted(targets):
        opts = _repair_options(targets[f], sources, code, smallest[f] + 1)
        o = min(opts, key=lambda o: (max(max(load.get(g, 0) + 1 for g in o), len(o)), len(o), o))
        for g in o:
            load[g] = load.get(g, 0) + 1
        best[f] = o
    best_cap = max(max(load.values()), max(len(o) for o in best.values()))
    for c in range(cap, best_cap):
        options = {f: _repair_options(t, sources, code, c) for f, t in targets.items()}
        got = search(c, options)
        if got is not None:
            return got
    return best


def _edge_colouring(edges: list[tuple[int, int]]) -> dict[tuple[int, int], int]:
    """Proper colouring of a simple bipartite graph with max-degree colours.

    Left vertices are newcomers, right vertices are source nodes; uses the
    classic alternating-path swap so no vertex sees a colour twice.
    """
    at_left: dict[int, dict[int, int]] = {}
    at_right: dict[int, dict[int, int]] = {}

    def free(table: dict[int, int]) -> int:
        c = 0
        while c in table:
            c += 1
        return c

    for u, v in edges:
        lu = at_left.setdefault(u, {})
        rv = at_right.setdefault(v, {})
        a, b = free(lu), free(rv)
        if a in rv:
            # walk the a/b alternating path from v and swap its colours
            path = []
            side, node, colour = "R", v, a
            while True:
                table = at_right if side == "R" else at_left
                nxt = table.get(node, {}).get(colour)
                if nxt is None:
                    break
                if side == "R":
                    path.append((nxt, node, colour))
                else:
                    path.append((node, nxt, colour))
                side = "L" if side == "R" else "R"
                node = nxt
                colour = b if colour == a else a
            for pu, pv, c in path:
                del at_left[pu][c]
                del at_right[pv][c]
            for pu, pv, c in path:
                c2 = b if c == a else a
                at_left[pu][c2] = pv
                at_right[pv][c2] = pu
        lu[a] = v
        rv[a] = u
    return {(u, v): c for u, t in at_left.items() for c, v in t.items()}


def plan_repairs(code: CodeParams, state: ClusterState) -> RepairSchedule:
    """Assign each newcomer a smallest donor set, balance source load, then
    split the transfers into slots by edge-colouring the newcomer/source graph.

    Each slot is a matching, so uplink and downlink capacities hold; the
    makespan equals the larger of the biggest donor set and the busiest
    source's load.
    """
    base = GF2Basis(code.point(i) for i in state.available)
    bad = [i for i in state.missing if not base.contains(code.point(i))]
    if bad:
        raise Irreparable(f"irreparable set: fragments {sorted(bad)} lie outside the available span")
    if not state.missing:
        return RepairSchedule()
    sources = sorted(state.available)
    chosen = _balanced_choice(code, {f: code.point(f) for f in sorted(state.missing)}, sources)
    edges = []
    for f in sorted(chosen):
        for g in chosen[f]:
            edges.append((state.missing[f], state.available[g]))
    colours = _edge_colouring(edges)
    node_frag = {node: f for f, node in state.available.items()}
    slots: list[list[Transfer]] = [[] for _ in range(max(colours.values()) + 1)]
    for (dst, src), c in colours.items():
        slots[c].append(Transfer(src, node_frag[src], dst))
    for slot in slots:
        slot.sort(key=lambda t: (t.dst, t.frag))
    return RepairSchedule(slots)


def schedule_violations(
    code: CodeParams, state: ClusterState, schedule: RepairSchedule, seed: int = 0, stripes: int = 4
) -> list[str]:
    """Every constraint the schedule breaks; empty when it is valid."""
    problems = []
    by_node = {node: f for f, node in state.missing.items()}
    holding = {node: f for f, node in state.available.items()}
    received: dict[int, list[int]] = {node: [] for node in by_node}
    done_at: dict[int, int] = {}
    for t, slot in enumerate(schedule.slots):
        srcs = [tr.src for tr in slot]
        dsts = [tr.dst for tr in slot]
        if len(set(srcs)) != len(srcs):
            problems.append(f"slot {t}: a source uploads more than once")
        if len(set(dsts)) != len(dsts):
            problems.append(f"slot {t}: a destination downloads more than once")
        for tr in slot:
            if holding.get(tr.src) != tr.frag:
                problems.append(f"slot {t}: node {tr.src} does not hold fragment {tr.frag}")
            if tr.dst not in by_node:
                problems.append(f"slot {t}: node {tr.dst} is not a newcomer")
                continue
            received[tr.dst].append(tr.frag)
        for node, f in by_node.items():
            if node in done_at:
                continue
            basis = GF2Basis(code.point(g) for g in received[node])
            if basis.contains(code.point(f)):
                done_at[node] = t
        # rebuilt fragments become uploadable from the next slot
        for node, t_done in done_at.items():
            if t_done == t:
                holding[node] = by_node[node]
    for node, f in by_node.items():
        if node not in done_at:
            problems.append(f"newcomer {node} never rebuilds fragment {f}")
    if problems:
        return problems

    rng = np.random.default_rng(seed)
    data = rng.integers(0, code.field.order, size=(stripes, code.k))
    truth = {fr.index: fr for fr in encode(data, code)}
    payload = {node: truth[f] for f, node in state.available.items()}
    order = sorted(by_node, key=lambda node: done_at[node])
    shipped: dict[int, list] = {node: [] for node in by_node}
    # replay transfers slot by slot so rebuilt payloads are used once ready
    for t, slot in enumerate(schedule.slots):
        for tr in slot:
            shipped[tr.dst].append(payload[tr.src])
        for node in order:
            if done_at[node] == t:
                target = code.point(by_node[node])
                got = {fr.index: fr for fr in shipped[node]}
                donors = find_repair_set(target, got.keys(), code)
                rebuilt = repair_fragment(target, [got[i] for i in donors], code)
                if rebuilt != truth[by_node[node]]:
                    problems.append(f"newcomer {node} rebuilt a wrong payload")
                payload[node] = rebuilt
    return problems


def verify_schedule(code: CodeParams, state: ClusterState, schedule: RepairSchedule, seed: int = 0) -> bool:
    return not schedule_violations(code, state, schedule, seed)


def sequential_baselines(code: CodeParams, state: ClusterState) -> tuple[int, int]:
    """(hybrid, ec) slot counts: one full copy uploading each lost fragment,
    versus downloading k fragments and then uploading the rest."""
    lost = len(state.missing)
    if lost == 0:
        return 0, 0
    return lost, code.k + lost - 1


def schedule_document(code: CodeParams, state: ClusterState, schedule: RepairSchedule) -> dict:
    hybrid, ec = sequential_baselines(code, state)
    return {
        "slots": schedule.to_json(),
        "makespan": schedule.makespan,
        "baselines": {"hybrid": hybrid, "ec": ec},
    }
