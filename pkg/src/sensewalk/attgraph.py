"""Attribute-space class graphs: combined epsilon-radius / kNN formation.

Each class of a labeled dataset becomes one connected graph component.
A training vertex links to every same-class vertex closer than epsilon
when that ball holds more than kappa points (dense regions), and to its
kappa nearest same-class vertices otherwise (sparse regions). Classes
left disconnected by the local rule are repaired by repeatedly adding
the shortest edge between components.

Test instances are inserted *virtually*: an :class:`InsertionView` lists
the links a test point would make into one class component without ever
mutating the trained graphs, so many test instances can be scored
concurrently against the same graphs.
"""

import hashlib
from dataclasses import dataclass

import numpy as np


class ClassTooSmall(Exception):
    """A class must contribute at least 2 training instances."""


@dataclass(frozen=True)
class GraphConfig:
    """Formation parameters.

    ``epsilon=None`` asks the builder to use the median pairwise
    same-class distance of the training data. ``fallback_factor`` bounds
    how far (in units of epsilon) a test instance may sit from a
    component and still fall back to kappa-nearest links when its
    epsilon-ball is empty.
    """

    epsilon: float | None = None
    kappa: int = 3
    fallback_factor: float = 3.0

    def __post_init__(self):
        if self.epsilon is not None and self.epsilon <= 0:
            raise ValueError("epsilon must be > 0")
        if self.kappa < 1:
            raise ValueError("kappa must be >= 1")
        if self.fallback_factor <= 0:
            raise ValueError("fallback_factor must be > 0")


@dataclass(frozen=True)
class InsertionView:
    """Links a test instance would make into one class component."""

    class_id: int
    links: tuple  # ((vertex id, distance), ...) possibly empty

    @property
    def linked(self):
        return len(self.links) > 0


class ClassGraph:
    """One class's component: vertices, positions and weighted adjacency.

    Treated as immutable once built; ``commit_or_discard`` returns fresh
    objects instead of mutating. Walk caches hang off private slots and
    never participate in ``content_hash``.
    """

    def __init__(self, class_id, ids, positions, adjacency, config, neighbor_rule=None):
        self.class_id = class_id
        self.ids = list(ids)  # sorted instance ids
        self.positions = dict(positions)  # id -> feature vector
        self.adjacency = adjacency  # id -> {neighbor id: distance}
        self.config = config
        # id -> "epsilon" | "knn": which formation rule chose its neighborhood
        self.neighbor_rule = dict(neighbor_rule or {})
        self._component = None  # tourist-walk view, built lazily
        self._walk_cache = {}  # mu -> (mean_t, mean_c, per-start detail)

    @property
    def vertex_count(self):
        return len(self.ids)

    def edges(self):
        """Unique undirected edges as (id_a, id_b, distance), sorted."""
        seen = []
        for a in self.ids:
            for b, d in self.adjacency[a].items():
                if not (b < a):  # emit each pair once
                    seen.append((a, b, d))
        return sorted(seen)

    def is_connected(self):
        if not self.ids:
            return True
        stack = [self.ids[0]]
        visited = {self.ids[0]}
        while stack:
            u = stack.pop()
            for v in self.adjacency[u]:
                if v not in visited:
                    visited.add(v)
                    stack.append(v)
        return len(visited) == len(self.ids)

    def content_hash(self):
        h = hashlib.sha256()
        for i in self.ids:
            h.update(repr(i).encode())
            h.update(np.asarray(self.positions[i], dtype=float).tobytes())
        for a, b, d in self.edges():
            h.update(repr((a, b)).encode())
            h.update(np.float64(d).tobytes())
        return h.hexdigest()


def _pairwise_distances(X):
    diff = X[:, None, :] - X[None, :, :]
    return np.sqrt((diff * diff).sum(axis=2))


def default_epsilon(dataset):
    """Median Euclidean distance over all labeled same-class pairs."""
    dists = []
    labels = np.array([lab if lab is not None else -1 for lab in dataset.labels])
    for class_id in sorted(set(labels[labels >= 0])):
        X = dataset.X[labels == class_id]
        if len(X) < 2:
            continue
        D = _pairwise_distances(X)
        iu = np.triu_indices(len(X), k=1)
        dists.extend(D[iu].tolist())
    if not dists:
        raise ClassTooSmall("no class has 2 or more labeled instances")
    return float(np.median(dists))


def _neighbor_choice(D, row, epsilon, kappa):
    """(rule name, indices) chosen by the combined rule for one vertex."""
    d = D[row].copy()
    d[row] = np.inf
    ball = np.nonzero(d < epsilon)[0]
    if len(ball) > kappa:
        return "epsilon", ball
    order = np.argsort(d, kind="stable")  # ties fall back to id order
    return "knn", order[: min(kappa, len(d) - 1)]


def _repair_connectivity(ids, D, adjacency):
    """Bridge disconnected pieces with the shortest inter-component edge."""
    n = len(ids)
    parent = list(range(n))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    index = {v: i for i, v in enumerate(ids)}
    for a in ids:
        for b in adjacency[a]:
            ra, rb = find(index[a]), find(index[b])
            if ra != rb:
                parent[ra] = rb

    while True:
        roots = {find(i) for i in range(n)}
        if len(roots) <= 1:
            break
        best = None
        for i in range(n):
            for j in range(i + 1, n):
                if find(i) != find(j):
                    cand = (D[i, j], i, j)
                    if best is None or cand < best:
                        best = cand
        _, i, j = best
        adjacency[ids[i]][ids[j]] = D[i, j]
        adjacency[ids[j]][ids[i]] = D[i, j]
        parent[find(i)] = find(j)


def build_training_graph(dataset, config=None):
    """Build one connected ClassGraph per class of a labeled dataset."""
    config = config or GraphConfig()
    by_class = {}
    for i, label in enumerate(dataset.labels):
        if label is not None:
            by_class.setdefault(label, []).append(i)

    if not by_class:
        raise ClassTooSmall("dataset has no labeled instances")
    for class_id, rows in by_class.items():
        if len(rows) < 2:
            raise ClassTooSmall(f"class {class_id} has {len(rows)} instance(s); need >= 2")

    epsilon = config.epsilon if config.epsilon is not None else default_epsilon(dataset)
    resolved = GraphConfig(epsilon, config.kappa, config.fallback_factor)

    graphs = []
    for class_id in sorted(by_class):
        rows = sorted(by_class[class_id], key=lambda r: dataset.ids[r])
        ids = [dataset.ids[r] for r in rows]
        X = dataset.X[rows]
        D = _pairwise_distances(X)
        adjacency = {v: {} for v in ids}
        neighbor_rule = {}
        for i in range(len(ids)):
            rule, chosen = _neighbor_choice(D, i, epsilon, resolved.kappa)
            neighbor_rule[ids[i]] = rule
            for j in chosen:
                j = int(j)
                adjacency[ids[i]][ids[j]] = D[i, j]
                adjacency[ids[j]][ids[i]] = D[i, j]
        _repair_connectivity(ids, D, adjacency)
        positions = {v: X[k].copy() for k, v in enumerate(ids)}
        graphs.append(ClassGraph(class_id, ids, positions, adjacency, resolved, neighbor_rule))
    return graphs


def insert_test(instance_features, class_graphs, config=None):
    """Virtual insertion: one InsertionView per class, graphs untouched.

    Links are the component vertices strictly within epsilon of the test
    point; if none qualify but the component lies within
    ``epsilon * fallback_factor``, the kappa nearest vertices are linked
    instead; beyond that the view stays empty.
    """
    x = np.asarray(getattr(instance_features, "features", instance_features), dtype=float)
    views = []
    for graph in class_graphs:
        cfg = config or graph.config
        P = np.stack([graph.positions[v] for v in graph.ids])
        d = np.sqrt(((P - x) ** 2).sum(axis=1))
        within = np.nonzero(d < cfg.epsilon)[0]
        if len(within) > 0:
            links = tuple((graph.ids[int(i)], float(d[i])) for i in within)
        elif d.min() < cfg.epsilon * cfg.fallback_factor:
            order = np.argsort(d, kind="stable")[: min(cfg.kappa, len(d))]
            links = tuple((graph.ids[int(i)], float(d[i])) for i in order)
        else:
            links = ()
        views.append(InsertionView(graph.class_id, links))
    return views


def commit_or_discard(instance, predicted_label, class_graphs, mode="discard"):
    """Either leave the graphs alone or fold the instance into its class.

    Incorporation links the new vertex by the training rule (epsilon ball
    if large enough, else kappa nearest), re-bridges if needed, and
    returns a fresh ClassGraph whose walk caches start empty.
    """
    if mode == "discard":
        return class_graphs
    if mode != "incorporate":
        raise ValueError(f"mode must be 'discard' or 'incorporate', got {mode!r}")

    x = np.asarray(instance.features, dtype=float)
    updated = []
    for graph in class_graphs:
        if graph.class_id != predicted_label:
            updated.append(graph)
            continue
        cfg = graph.config
        ids = sorted(graph.ids + [instance.id])
        positions = dict(graph.positions)
        positions[instance.id] = x.copy()
        adjacency = {v: dict(graph.adjacency.get(v, {})) for v in graph.ids}
        adjacency[instance.id] = {}

        others = graph.ids
        P = np.stack([graph.positions[v] for v in others])
        d = np.sqrt(((P - x) ** 2).sum(axis=1))
        within = np.nonzero(d < cfg.epsilon)[0]
        if len(within) > cfg.kappa:
            rule, chosen = "epsilon", within
        else:
            rule, chosen = "knn", np.argsort(d, kind="stable")[: min(cfg.kappa, len(others))]
        for i in chosen:
            v = others[int(i)]
            adjacency[instance.id][v] = float(d[i])
            adjacency[v][instance.id] = float(d[i])

        neighbor_rule = dict(graph.neighbor_rule)
        neighbor_rule[instance.id] = rule
        X = np.stack([positions[v] for v in ids])
        D = _pairwise_distances(X)
        _repair_connectivity(ids, D, adjacency)
        updated.append(ClassGraph(graph.class_id, ids, positions, adjacency, cfg, neighbor_rule))
    return updated


def write_class_graphs(class_graphs, path):
    """Per-class edge dump: ``class_id<TAB>id_a<TAB>id_b<TAB>distance``."""
    lines = []
    for graph in class_graphs:
        for a, b, d in graph.edges():
            lines.append(f"{graph.class_id}\t{a}\t{b}\t{float(d)!r}")
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")
