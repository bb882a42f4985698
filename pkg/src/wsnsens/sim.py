"""Tick-driven wireless sensor network simulator with per-activity energy accounting.

Nodes are scattered uniformly over a rectangular arena; a small cluster of
sinks sits at the arena center.  Every tick:

1. stimuli are spawned (Poisson count, uniform positions),
2. nodes due to sense scan their disc and create one packet per stimulus
   that appeared there since their previous scan and is still observable
   (stimuli fade after ``arena.stimulus_lifetime`` ticks),
3. nodes due to transmit forward their outbox one hop (greedy geographic
   routing toward the nearest sink, bounded by the hop budget),
4. every ``beacon_period`` ticks nodes broadcast a neighbor-monitoring beacon,
5. in the same ticks each node starts a route-maintenance control flood that
   is relayed up to ``num_hops`` hops over the neighbor-table graph.

Energy is drawn from node batteries and recorded in an :class:`EnergyLedger`.
Sinks are mains powered and are not charged.  A node whose battery reaches
zero dies at once and its queued packets are lost.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .config import ArenaSpec, CostModel, WsnConfig, validate_against_arena

ACTIVITIES = ("sense", "transmit", "receive", "beacon", "route_control")
SENSE, TRANSMIT, RECEIVE, BEACON, ROUTE_CONTROL = range(len(ACTIVITIES))

SINK_CLUSTER_RADIUS = 10.0


@dataclass(slots=True)
class Packet:
    origin: int
    created_tick: int
    hops_used: int
    target_sink: int


@dataclass(frozen=True)
class Stimulus:
    position: tuple[float, float]
    birth_tick: int


@dataclass(frozen=True)
class NodeState:
    """Read-only snapshot of one node."""

    id: int
    position: tuple[float, float]
    battery: float
    neighbor_table: tuple[int, ...]
    outbox: tuple[Packet, ...]
    alive: bool


class NextHop(NamedTuple):
    index: int
    is_sink: bool
    distance: float


class EnergyLedger:
    """Accumulated energy per node and activity.

    Entries only grow.  ``total()`` is the overall energy consumption of the
    network.
    """

    def __init__(self, n_nodes: int):
        self.table = np.zeros((n_nodes, len(ACTIVITIES)))

    def add(self, node: int, activity: int, amount: float) -> None:
        self.table[node, activity] += amount

    def add_many(self, nodes: np.ndarray, activity: int, amounts: np.ndarray) -> None:
        # nodes must be unique
        self.table[nodes, activity] += amounts

    def total(self) -> float:
        return float(self.table.sum())

    def by_activity(self) -> dict[str, float]:
        sums = self.table.sum(axis=0)
        return {name: float(sums[i]) for i, name in enumerate(ACTIVITIES)}

    def node(self, node_id: int) -> dict[str, float]:
        return {name: float(self.table[node_id, i]) for i, name in enumerate(ACTIVITIES)}

    def copy(self) -> "EnergyLedger":
        other = EnergyLedger(0)
        other.table = self.table.copy()
        return other


@dataclass(frozen=True)
class RunRecord:
    """Outcome of one simulation run."""

    config: WsnConfig
    seed: int
    total_energy: float
    packets_generated: int
    packets_delivered: int
    nodes_died: int
    duration: int

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "seed": self.seed,
            "total_energy": self.total_energy,
            "packets_generated": self.packets_generated,
            "packets_delivered": self.packets_delivered,
            "nodes_died": self.nodes_died,
            "duration": self.duration,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunRecord":
        return cls(
            config=WsnConfig(**data["config"]),
            seed=int(data["seed"]),
            total_energy=float(data["total_energy"]),
            packets_generated=int(data["packets_generated"]),
            packets_delivered=int(data["packets_delivered"]),
            nodes_died=int(data["nodes_died"]),
            duration=int(data["duration"]),
        )


@dataclass
class SimWorld:
    config: WsnConfig
    arena: ArenaSpec
    cost: CostModel
    seed: int
    positions: np.ndarray
    sinks: np.ndarray
    neighbors: list[np.ndarray]
    battery: np.ndarray
    alive: np.ndarray
    ledger: EnergyLedger
    outboxes: list[list[Packet]]
    rng: np.random.Generator
    tick: int = 0
    stimuli: list[Stimulus] = field(default_factory=list)
    # stimuli born since the last sensing round
    unseen: list[Stimulus] = field(default_factory=list)
    packets_generated: int = 0
    packets_delivered: int = 0
    packets_dropped: int = 0
    packets_lost: int = 0
    nodes_died: int = 0
    delivered_hops: list[int] = field(default_factory=list)
    control_forwards: int = 0
    sense_events: int = 0
    transmit_events: int = 0
    _flood_cache: tuple | None = field(default=None, repr=False)

    @property
    def n_nodes(self) -> int:
        return len(self.positions)

    def node(self, node_id: int) -> NodeState:
        return NodeState(
            id=node_id,
            position=(float(self.positions[node_id, 0]), float(self.positions[node_id, 1])),
            battery=float(self.battery[node_id]),
            neighbor_table=tuple(int(j) for j in self.neighbors[node_id]),
            outbox=tuple(self.outboxes[node_id]),
            alive=bool(self.alive[node_id]),
        )

    def nearest_sink(self, point) -> int:
        d = np.hypot(self.sinks[:, 0] - point[0], self.sinks[:, 1] - point[1])
        # argmin returns the first minimum, i.e. the lowest sink id on ties
        return int(np.argmin(d))

    def record(self) -> RunRecord:
        return RunRecord(
            config=self.config,
            seed=self.seed,
            total_energy=self.ledger.total(),
            packets_generated=self.packets_generated,
            packets_delivered=self.packets_delivered,
            nodes_died=self.nodes_died,
            duration=self.tick,
        )

    # --- energy -----------------------------------------------------------

    def _kill(self, node: int) -> None:
        self.alive[node] = False
        self.nodes_died += 1
        self.packets_lost += len(self.outboxes[node])
        self.outboxes[node] = []

    def charge(self, node: int, activity: int, amount: float) -> bool:
        """Draw ``amount`` from a node; return False if the battery ran out."""
        available = self.battery[node]
        if amount < available:
            self.battery[node] = available - amount
            self.ledger.add(node, activity, amount)
            return True
        self.battery[node] = 0.0
        self.ledger.add(node, activity, available)
        self._kill(node)
        return False

    def charge_many(self, nodes: np.ndarray, activity: int, amounts: np.ndarray) -> None:
        """Vectorized :meth:`charge` for a set of distinct alive nodes."""
        if len(nodes) == 0:
            return
        available = self.battery[nodes]
        drawn = np.minimum(amounts, available)
        remaining = available - drawn
        self.battery[nodes] = remaining
        self.ledger.add_many(nodes, activity, drawn)
        for node in nodes[remaining <= 0.0]:
            self.battery[node] = 0.0
            self._kill(int(node))


def build_world(config: WsnConfig, arena: ArenaSpec, seed: int, cost: CostModel | None = None) -> SimWorld:
    """Place nodes and sinks and fill neighbor tables.

    Deterministic in ``(config, arena, seed)``.
    """
    n = validate_against_arena(config, arena)
    cost = cost or CostModel()
    place_seq, stim_seq = np.random.SeedSequence(int(seed)).spawn(2)
    place = np.random.default_rng(place_seq)
    positions = np.column_stack(
        [place.uniform(0.0, arena.width, n), place.uniform(0.0, arena.height, n)]
    )
    radius = SINK_CLUSTER_RADIUS * np.sqrt(place.uniform(0.0, 1.0, config.num_sinks))
    angle = place.uniform(0.0, 2.0 * np.pi, config.num_sinks)
    sinks = np.column_stack(
        [arena.width / 2 + radius * np.cos(angle), arena.height / 2 + radius * np.sin(angle)]
    )
    return _assemble(config, arena, cost, seed, positions, sinks, np.random.default_rng(stim_seq))


def world_from_layout(
    config: WsnConfig,
    arena: ArenaSpec,
    cost: CostModel,
    positions,
    sinks,
    seed: int = 0,
) -> SimWorld:
    """Build a world with hand-placed nodes and sinks (tests, demos)."""
    positions = np.asarray(positions, dtype=float).reshape(-1, 2)
    sinks = np.asarray(sinks, dtype=float).reshape(-1, 2)
    rng = np.random.default_rng(np.random.SeedSequence(int(seed)).spawn(2)[1])
    return _assemble(config, arena, cost, seed, positions, sinks, rng)


def _neighbor_tables(positions: np.ndarray, radius: float, cap: int) -> list[np.ndarray]:
    n = len(positions)
    diff = positions[:, None, :] - positions[None, :, :]
    dist = np.hypot(diff[..., 0], diff[..., 1])
    ids = np.arange(n)
    tables = []
    for i in range(n):
        row = dist[i]
        cand = np.flatnonzero((row <= radius) & (ids != i))
        order = np.lexsort((cand, row[cand]))  # by distance, then id
        tables.append(cand[order][:cap].astype(np.int64))
    return tables


def _assemble(config, arena, cost, seed, positions, sinks, rng) -> SimWorld:
    n = len(positions)
    return SimWorld(
        config=config,
        arena=arena,
        cost=cost,
        seed=int(seed),
        positions=positions,
        sinks=sinks,
        neighbors=_neighbor_tables(positions, config.transmission_radius, config.num_neighbors),
        battery=np.full(n, arena.initial_battery),
        alive=np.ones(n, dtype=bool),
        ledger=EnergyLedger(n),
        outboxes=[[] for _ in range(n)],
        rng=rng,
    )


def route_next_hop(world: SimWorld, current: int, packet: Packet) -> NextHop | None:
    """Greedy geographic next hop toward ``packet.target_sink``.

    Returns the nearest sink if one is in radio range, otherwise the alive
    neighbor closest to the target sink among those strictly closer than
    ``current``.  ``None`` means the packet is dropped: hop budget exhausted
    or routing void.
    """
    if packet.hops_used >= world.config.num_hops or not world.alive[current]:
        return None
    here = world.positions[current]
    radius = world.config.transmission_radius
    sink_d = np.hypot(world.sinks[:, 0] - here[0], world.sinks[:, 1] - here[1])
    in_range = np.flatnonzero(sink_d <= radius)
    if len(in_range):
        best = int(in_range[np.argmin(sink_d[in_range])])
        return NextHop(best, True, float(sink_d[best]))

    table = world.neighbors[current]
    if len(table) == 0:
        return None
    table = table[world.alive[table]]
    if len(table) == 0:
        return None
    target = world.sinks[packet.target_sink]
    own = math.hypot(here[0] - target[0], here[1] - target[1])
    cand = world.positions[table]
    to_target = np.hypot(cand[:, 0] - target[0], cand[:, 1] - target[1])
    closer = to_target < own
    if not closer.any():
        return None
    table, to_target = table[closer], to_target[closer]
    pick = np.lexsort((table, to_target))[0]
    nxt = int(table[pick])
    d = world.positions[nxt] - here
    return NextHop(nxt, False, math.hypot(d[0], d[1]))


def _flood_forward_counts(world: SimWorld) -> np.ndarray:
    """How many control floods each node relays in one maintenance round.

    A flood started at ``u`` with TTL ``h`` is relayed by every alive node
    at most ``h - 1`` hops from ``u`` (``u`` itself included), each once.
    """
    key = world.nodes_died
    if world._flood_cache is not None and world._flood_cache[0] == key:
        return world._flood_cache[1]
    n = world.n_nodes
    alive = world.alive
    h = world.config.num_hops
    counts = np.zeros(n, dtype=np.int64)
    if h == 1:
        counts[alive] = 1
    else:
        rows, cols = [], []
        for i in np.flatnonzero(alive):
            nb = world.neighbors[i]
            nb = nb[alive[nb]]
            rows.append(np.full(len(nb), i))
            cols.append(nb)
        rows = np.concatenate(rows) if rows else np.zeros(0, dtype=np.int64)
        cols = np.concatenate(cols) if cols else np.zeros(0, dtype=np.int64)
        graph = csr_matrix((np.ones(len(rows)), (rows, cols)), shape=(n, n))
        origins = np.flatnonzero(alive)
        if len(origins):
            dist = dijkstra(graph, directed=True, unweighted=True, indices=origins, limit=h - 1 + 0.5)
            counts = np.isfinite(dist).sum(axis=0).astype(np.int64)
            counts[~alive] = 0
    world._flood_cache = (key, counts)
    return counts


def step(world: SimWorld) -> SimWorld:
    """Advance the world by one tick (in place) and return it."""
    cfg, cost = world.config, world.cost
    world.tick += 1
    t = world.tick

    # 1. stimuli
    k = int(world.rng.poisson(world.arena.stimulus_rate))
    xs = world.rng.uniform(0.0, world.arena.width, k)
    ys = world.rng.uniform(0.0, world.arena.height, k)
    world.stimuli = [Stimulus((float(x), float(y)), t) for x, y in zip(xs, ys)]
    world.unseen.extend(world.stimuli)

    # 2. sensing
    if t % cfg.sensor_interval == 0:
        scanners = np.flatnonzero(world.alive)
        per_scan = cost.e_sense_base + cost.e_sense_area * math.pi * cfg.sense_radius**2
        world.charge_many(scanners, SENSE, np.full(len(scanners), per_scan))
        world.sense_events += len(scanners)
        oldest = t - world.arena.stimulus_lifetime
        world.unseen = [st for st in world.unseen if st.birth_tick > oldest]
        if world.unseen:
            scanners = scanners[world.alive[scanners]]
            pts = np.array([st.position for st in world.unseen])
            pos = world.positions[scanners]
            d = np.hypot(pos[:, 0, None] - pts[None, :, 0], pos[:, 1, None] - pts[None, :, 1])
            hit_nodes, _ = np.nonzero(d <= cfg.sense_radius)
            for idx in hit_nodes:
                node = int(scanners[idx])
                sink = world.nearest_sink(world.positions[node])
                world.outboxes[node].append(Packet(node, t, 0, sink))
                world.packets_generated += 1
        world.unseen = []

    # 3. relaying
    if t % cfg.transmission_interval == 0:
        _transmit_round(world)

    # 4. neighbor monitoring beacons, 5. route maintenance
    if t % cost.beacon_period == 0:
        senders = np.flatnonzero(world.alive)
        world.charge_many(senders, BEACON, np.full(len(senders), cost.e_beacon))
        senders = senders[world.alive[senders]]
        if len(senders):
            heard = np.concatenate([world.neighbors[i] for i in senders])
            heard = heard[world.alive[heard]]
            receipts = np.bincount(heard, minlength=world.n_nodes)
            rx = np.flatnonzero(receipts)
            world.charge_many(rx, RECEIVE, receipts[rx] * (cost.e_elec * cost.ctl_bits))

        counts = _flood_forward_counts(world)
        fwd = np.flatnonzero(counts)
        world.charge_many(fwd, ROUTE_CONTROL, counts[fwd] * cost.e_route_ctl)
        world.control_forwards += int(counts.sum())
    return world


def _transmit_round(world: SimWorld) -> None:
    """Send every buffered packet one hop; packets received now wait for the next round."""
    cost = world.cost
    rx_cost = cost.e_elec * cost.packet_bits
    inbox: dict[int, list[Packet]] = {}
    for node in range(world.n_nodes):
        if not world.alive[node] or not world.outboxes[node]:
            continue
        queue, world.outboxes[node] = world.outboxes[node], []
        for i, packet in enumerate(queue):
            hop = route_next_hop(world, node, packet)
            if hop is None:
                world.packets_dropped += 1
                continue
            tx_cost = (cost.e_elec + cost.e_amp * hop.distance**2) * cost.packet_bits
            world.transmit_events += 1
            if not world.charge(node, TRANSMIT, tx_cost):
                # sender died mid-send: this packet and the rest of its queue are gone
                world.packets_lost += len(queue) - i
                break
            packet.hops_used += 1
            if hop.is_sink:
                world.packets_delivered += 1
                world.delivered_hops.append(packet.hops_used)
            elif world.charge(hop.index, RECEIVE, rx_cost):
                inbox.setdefault(hop.index, []).append(packet)
            else:
                world.packets_lost += 1
    for node, packets in inbox.items():
        if world.alive[node]:
            world.outboxes[node].extend(packets)
        else:
            world.packets_lost += len(packets)


def run_world(config: WsnConfig, arena: ArenaSpec, cost: CostModel, seed: int) -> SimWorld:
    """Build a world and step it for ``arena.duration`` ticks."""
    world = build_world(config, arena, seed, cost)
    for _ in range(arena.duration):
        step(world)
    return world


def run(config: WsnConfig, arena: ArenaSpec, cost: CostModel, seed: int) -> RunRecord:
    return run_world(config, arena, cost, seed).record()
