"""Word-adjacency networks and per-node topological measurements.

The network is a weighted directed graph over content lemmas: the weight
of edge ``(i, j)`` counts how often lemma ``i`` appears immediately before
lemma ``j``. Annotated occurrences of ambiguous words become their own
nodes (``word#k`` for the k-th occurrence corpus-wide) so that each
occurrence can be characterized independently; every other lemma shares a
single node.

Topological measurements are computed on the undirected, unweighted
projection of the network (self-loops dropped): hierarchical degree and
hierarchical clustering at levels 1 and 2, mean and standard deviation of
neighbor degrees, average shortest path length over reachable nodes, and
unnormalized betweenness (Brandes accumulation). The network is immutable
after construction, so per-node measurements are safe to compute in
parallel.
"""

import math
from collections import deque
from dataclasses import dataclass
from pathlib import Path


@dataclass(frozen=True)
class NodeTopology:
    """The eight structural measurements of one node."""

    hier_degree_1: float
    hier_degree_2: float
    hier_clustering_1: float
    hier_clustering_2: float
    neighbor_degree_mean: float
    neighbor_degree_std: float
    avg_shortest_path: float
    betweenness: float

    FIELD_NAMES = (
        "hier_degree_1",
        "hier_degree_2",
        "hier_clustering_1",
        "hier_clustering_2",
        "neighbor_degree_mean",
        "neighbor_degree_std",
        "avg_shortest_path",
        "betweenness",
    )

    def as_vector(self):
        return [getattr(self, name) for name in self.FIELD_NAMES]


class WordAdjacencyNetwork:
    """Directed weighted lemma graph with distinct ambiguous-occurrence nodes."""

    def __init__(self, weights, nodes, occurrence_nodes):
        self.weights = dict(weights)  # (i, j) -> count, count >= 1
        self.nodes = set(nodes)
        # (document_id, content position) -> occurrence node id
        self.occurrence_nodes = dict(occurrence_nodes)
        self._undirected = None
        self._betweenness = None

    def total_weight(self):
        return sum(self.weights.values())

    def node_for(self, document_id, position):
        return self.occurrence_nodes.get((document_id, position))

    def undirected(self):
        """Adjacency sets of the undirected unweighted projection (no self-loops)."""
        if self._undirected is None:
            adj = {node: set() for node in self.nodes}
            for (a, b) in self.weights:
                if a != b:
                    adj[a].add(b)
                    adj[b].add(a)
            self._undirected = adj
        return self._undirected


def build_network(token_streams, annotations=()):
    """Count adjacent content-lemma pairs across documents.

    ``token_streams`` maps document id to its ordered content-lemma list
    (the output of the corpus pipeline). Each annotated position becomes a
    ``word#k`` node, numbered in document/stream order.
    """
    annotated = {(a.document_id, a.position): a for a in annotations}
    weights = {}
    nodes = set()
    occurrence_nodes = {}
    occurrence_counter = {}

    items = token_streams.items() if hasattr(token_streams, "items") else token_streams
    for doc_id, lemmas in items:
        node_seq = []
        for position, lemma in enumerate(lemmas):
            ann = annotated.get((doc_id, position))
            if ann is not None:
                k = occurrence_counter.get(ann.word, 0)
                occurrence_counter[ann.word] = k + 1
                node = f"{ann.word}#{k}"
                occurrence_nodes[(doc_id, position)] = node
            else:
                node = lemma
            node_seq.append(node)
            nodes.add(node)
        for a, b in zip(node_seq, node_seq[1:]):
            weights[(a, b)] = weights.get((a, b), 0) + 1

    return WordAdjacencyNetwork(weights, nodes, occurrence_nodes)


def _bfs_distances(adj, source):
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def _ring_density(adj, ring):
    """Fraction of possible edges present among the given node set."""
    n = len(ring)
    if n < 2:
        return 0.0
    members = set(ring)
    edge_count = 0
    for u in ring:
        edge_count += sum(1 for v in adj[u] if v in members)
    return edge_count / (n * (n - 1))  # each edge seen from both ends


def brandes_betweenness(adj):
    """Unnormalized betweenness of every node (undirected, unweighted)."""
    centrality = {v: 0.0 for v in adj}
    for s in adj:
        stack = []
        preds = {v: [] for v in adj}
        sigma = {v: 0.0 for v in adj}
        sigma[s] = 1.0
        dist = {v: -1 for v in adj}
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            for w in adj[v]:
                if dist[w] < 0:
                    dist[w] = dist[v] + 1
                    queue.append(w)
                if dist[w] == dist[v] + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = {v: 0.0 for v in adj}
        while stack:
            w = stack.pop()
            for v in preds[w]:
                delta[v] += sigma[v] / sigma[w] * (1.0 + delta[w])
            if w != s:
                centrality[w] += delta[w]
    # each unordered pair was counted from both endpoints
    return {v: c / 2.0 for v, c in centrality.items()}


def node_topology(network, node):
    """All eight measurements for one node of the network."""
    adj = network.undirected()
    if node not in adj:
        raise KeyError(f"node {node!r} not in network")

    dist = _bfs_distances(adj, node)
    ring1 = [v for v, d in dist.items() if d == 1]
    ring2 = [v for v, d in dist.items() if d == 2]

    degrees = [len(adj[v]) for v in ring1]
    if degrees:
        mean = sum(degrees) / len(degrees)
        std = math.sqrt(sum((d - mean) ** 2 for d in degrees) / len(degrees))
    else:
        mean = std = 0.0

    reachable = [d for d in dist.values() if d > 0]
    aspl = sum(reachable) / len(reachable) if reachable else 0.0

    if network._betweenness is None:
        network._betweenness = brandes_betweenness(adj)

    return NodeTopology(
        hier_degree_1=float(len(ring1)),
        hier_degree_2=float(len(ring2)),
        hier_clustering_1=_ring_density(adj, ring1),
        hier_clustering_2=_ring_density(adj, ring2),
        neighbor_degree_mean=mean,
        neighbor_degree_std=std,
        avg_shortest_path=aspl,
        betweenness=network._betweenness[node],
    )


def write_edgelist(network, path):
    """Serialize as ``i<TAB>j<TAB>w_ij`` lines, sorted for reproducibility."""
    lines = [f"{a}\t{b}\t{w}" for (a, b), w in sorted(network.weights.items())]
    isolated = sorted(
        network.nodes - {a for a, _ in network.weights} - {b for _, b in network.weights}
    )
    lines.extend(f"{node}\t\t0" for node in isolated)  # keep edge-free nodes
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_edgelist(path):
    """Inverse of ``write_edgelist``; occurrence bookkeeping is not restored."""
    weights = {}
    nodes = set()
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        if not line.strip():
            continue
        a, b, w = line.split("\t")
        if b == "":
            nodes.add(a)
            continue
        weights[(a, b)] = int(w)
        nodes.update((a, b))
    return WordAdjacencyNetwork(weights, nodes, {})
