"""Binary-state networks and source-to-sink connectivity.

A network is a fixed, ordered list of arcs over 1-based node ids.  The arc
order defines the coordinate order of every arc-state vector: coordinate i
is the up/down state of arc i.  State vectors are plain sequences of 0/1
(tuples in most of this package).
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field


class NetworkParseError(ValueError):
    """Raised on a malformed network or instance file; carries the line number."""

    def __init__(self, message, lineno=None):
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)
        self.lineno = lineno


@dataclass(frozen=True)
class Network:
    """Immutable binary-state network with a designated source and sink.

    Arcs are (tail, head) pairs of 1-based node ids; arc i (1-based) is
    ``arcs[i-1]``.  Undirected networks (the default) traverse every arc in
    both directions.
    """

    node_count: int
    source: int
    sink: int
    arcs: tuple[tuple[int, int], ...]
    directed: bool = False
    _adj: dict = field(init=False, repr=False, compare=False, hash=False, default=None)

    def __post_init__(self):
        if self.node_count < 1:
            raise ValueError(f"node_count must be positive, got {self.node_count}")
        if self.source == self.sink:
            raise ValueError("source and sink must differ")
        for label, node in (("source", self.source), ("sink", self.sink)):
            if not 1 <= node <= self.node_count:
                raise ValueError(f"{label} {node} outside 1..{self.node_count}")
        for idx, (u, v) in enumerate(self.arcs, start=1):
            if not (1 <= u <= self.node_count and 1 <= v <= self.node_count):
                raise ValueError(
                    f"arc {idx} endpoint outside 1..{self.node_count}: ({u}, {v})"
                )
        # arc index lists per tail node, built once for reachability queries
        adj = {n: [] for n in range(1, self.node_count + 1)}
        for i, (u, v) in enumerate(self.arcs):
            adj[u].append((i, v))
            if not self.directed:
                adj[v].append((i, u))
        object.__setattr__(self, "_adj", adj)

    @property
    def n_arcs(self) -> int:
        return len(self.arcs)


def parse_network(text: str) -> Network:
    """Parse the line-oriented network file format.

    Expected directives: ``nodes N``, ``source S``, ``sink T``, optional
    ``mode directed|undirected`` (default undirected), and one
    ``arc <id> <tail> <head>`` line per arc with ids covering 1..N_var
    exactly once.  ``#`` starts a comment; blank lines are ignored.
    """
    nodes = source = sink = None
    directed = False
    arc_lines = {}  # arc id -> (tail, head, lineno)
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        fields = line.split()
        kind = fields[0].lower()
        try:
            if kind == "nodes":
                nodes = int(fields[1])
            elif kind == "source":
                source = int(fields[1])
            elif kind == "sink":
                sink = int(fields[1])
            elif kind == "mode":
                mode = fields[1].lower()
                if mode not in ("directed", "undirected"):
                    raise NetworkParseError(f"unknown mode {mode!r}", lineno)
                directed = mode == "directed"
            elif kind == "arc":
                arc_id, u, v = int(fields[1]), int(fields[2]), int(fields[3])
                if arc_id in arc_lines:
                    raise NetworkParseError(f"duplicate arc id {arc_id}", lineno)
                arc_lines[arc_id] = (u, v, lineno)
            else:
                raise NetworkParseError(f"unknown directive {kind!r}", lineno)
        except NetworkParseError:
            raise
        except (IndexError, ValueError):
            raise NetworkParseError(f"malformed {kind!r} line: {raw.strip()!r}", lineno)
    if nodes is None or source is None or sink is None:
        raise NetworkParseError("missing nodes/source/sink header")
    expected = set(range(1, len(arc_lines) + 1))
    if set(arc_lines) != expected:
        missing = sorted(expected - set(arc_lines)) or sorted(arc_lines)
        raise NetworkParseError(f"arc ids must cover 1..{len(arc_lines)}; check id {missing[0]}")
    arcs = []
    for arc_id in sorted(arc_lines):
        u, v, lineno = arc_lines[arc_id]
        if not (1 <= u <= nodes and 1 <= v <= nodes):
            raise NetworkParseError(f"arc {arc_id} references node outside 1..{nodes}", lineno)
        arcs.append((u, v))
    try:
        return Network(node_count=nodes, source=source, sink=sink,
                       arcs=tuple(arcs), directed=directed)
    except ValueError as exc:
        raise NetworkParseError(str(exc))


def parse_network_file(path) -> Network:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_network(fh.read())


def is_connected(net: Network, x) -> bool:
    """True iff the sink is reachable from the source over arcs with x_i = 1.

    Undirected networks traverse arcs both ways.  Pure function; breadth-first.
    """
    if len(x) != net.n_arcs:
        raise ValueError(f"state vector length {len(x)} != arc count {net.n_arcs}")
    seen = [False] * (net.node_count + 1)
    seen[net.source] = True
    queue = deque([net.source])
    adj = net._adj
    while queue:
        node = queue.popleft()
        if node == net.sink:
            return True
        for arc_idx, other in adj[node]:
            if x[arc_idx] and not seen[other]:
                seen[other] = True
                queue.append(other)
    return seen[net.sink]
