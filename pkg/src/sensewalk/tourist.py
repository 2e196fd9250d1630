"""Deterministic tourist walks over class components.

A walker sits on a vertex and repeatedly moves along graph edges to the
nearest vertex (Euclidean distance, ties to the smallest vertex id) that
is not among the last ``mu`` visited vertices. The window counts the
current vertex, so ``mu == 0`` lets the walker stay in place (distance 0
to itself) and every walk degenerates to transient 0, cycle 1; ``mu == 1``
is the classic nearest-neighbor walk that only avoids standing still.

Each walk splits into a transient prefix and a periodic cycle. The cycle
is found through the first repetition of the full (vertex, window) state,
which is the walk's true Markov state; the transient is then shrunk to
the first index where the vertex sequence itself turns periodic. A walker
whose every neighbor is forbidden halts: cycle 0, transient = steps taken.

Components are immutable snapshots, so walks from different starts,
memory lengths, or insertion trials can all run concurrently.
"""

from bisect import insort
from dataclasses import dataclass


class VertexNotInComponent(Exception):
    pass


class AllViewsEmpty(Exception):
    """The test instance links into no class component; high-level scores are undefined."""


@dataclass(frozen=True)
class WalkConfig:
    """Memory length for a single walk and the cap used when sweeping."""

    mu: int = 1
    mu_critical: int = 10

    def __post_init__(self):
        if not (0 <= self.mu <= self.mu_critical):
            raise ValueError("need 0 <= mu <= mu_critical")


@dataclass(frozen=True)
class WalkResult:
    transient: int
    cycle: int
    trajectory: tuple  # transient vertices then one cycle period (all visited on dead end)


@dataclass(frozen=True)
class ComponentWalkStats:
    """Per-mu averages of transient and cycle length over all start vertices."""

    means: dict  # mu -> (mean transient, mean cycle)

    def mean_transient(self, mu):
        return self.means[mu][0]

    def mean_cycle(self, mu):
        return self.means[mu][1]


class Component:
    """Walkable snapshot: vertices re-indexed to 0..n-1 in id order.

    Adjacency rows are pre-sorted by (distance, index); because indexing
    follows id order, scanning a row front to back realizes the
    nearest-first, smallest-id-tie movement rule. Vertex ids must be
    mutually comparable for this to be meaningful.
    """

    __slots__ = ("ids", "index", "adj")

    def __init__(self, ids, adj_rows):
        self.ids = list(ids)
        self.index = {v: i for i, v in enumerate(self.ids)}
        self.adj = adj_rows  # list of sorted [(distance, neighbor index), ...]

    @classmethod
    def from_adjacency(cls, adjacency):
        """Build from a mapping id -> {neighbor id: distance}."""
        ids = sorted(adjacency)
        index = {v: i for i, v in enumerate(ids)}
        rows = []
        for v in ids:
            row = sorted((float(d), index[w]) for w, d in adjacency[v].items())
            rows.append(row)
        return cls(ids, rows)

    def with_vertex(self, new_id, links):
        """A fresh component with one extra vertex linked as given.

        ``links`` is an iterable of (existing id, distance). Existing
        indices shift to keep id order, preserving tie determinism.
        """
        if new_id in self.index:
            raise ValueError(f"vertex {new_id!r} already present")
        cut = len([v for v in self.ids if v < new_id])
        shift = lambda j: j + 1 if j >= cut else j  # noqa: E731
        rows = [[(d, shift(j)) for d, j in row] for row in self.adj]
        new_row = []
        for vid, dist in links:
            i = self.index[vid]
            insort(rows[i], (float(dist), cut))
            new_row.append((float(dist), shift(i)))
        rows.insert(cut, sorted(new_row))
        ids = self.ids[:cut] + [new_id] + self.ids[cut:]
        return Component(ids, rows), cut

    def __len__(self):
        return len(self.ids)


def _component_of(graph_or_component):
    if isinstance(graph_or_component, Component):
        return graph_or_component
    cached = getattr(graph_or_component, "_component", None)
    if cached is None:
        cached = Component.from_adjacency(graph_or_component.adjacency)
        graph_or_component._component = cached
    return cached


def _walk_indices(adj, start, mu):
    """Core loop in index space; returns (transient, cycle, trajectory)."""
    if mu == 0:
        return 0, 1, (start,)
    traj = [start]
    window = (start,)
    seen = {(start, window): 0}
    keep = mu - 1
    while True:
        nxt = -1
        for d, j in adj[traj[-1]]:
            if j not in window:
                nxt = j
                break
        if nxt < 0:
            # dead end: every neighbor inside the memory window
            return len(traj) - 1, 0, tuple(traj)
        traj.append(nxt)
        window = (nxt,) + window[:keep]
        key = (nxt, window)
        k = len(traj) - 1
        i = seen.get(key)
        if i is not None:
            c = k - i
            t = i
            # the vertex sequence may turn periodic before the state does
            while t > 0 and traj[t - 1] == traj[t - 1 + c]:
                t -= 1
            return t, c, tuple(traj[: t + c])
        seen[key] = k


def walk(graph_or_component, start, mu):
    """One tourist walk from ``start`` with memory length ``mu``."""
    if mu < 0:
        raise ValueError("mu must be >= 0")
    comp = _component_of(graph_or_component)
    if start not in comp.index:
        raise VertexNotInComponent(repr(start))
    t, c, traj = _walk_indices(comp.adj, comp.index[start], mu)
    return WalkResult(t, c, tuple(comp.ids[i] for i in traj))


def _stats_for_mu(comp, mu):
    """Means plus per-start (transient, cycle, visited set) details."""
    detail = []
    total_t = 0
    total_c = 0
    for s in range(len(comp)):
        t, c, traj = _walk_indices(comp.adj, s, mu)
        total_t += t
        total_c += c
        detail.append((t, c, frozenset(traj)))
    n = len(comp)
    return total_t / n, total_c / n, detail


def component_stats(graph_or_component, mu_critical):
    """Averages of (transient, cycle) over walks from every vertex, for
    each mu in [0, mu_critical]. Results are cached on ClassGraph objects."""
    comp = _component_of(graph_or_component)
    if len(comp) == 0:
        raise ValueError("component is empty")
    cache = getattr(graph_or_component, "_walk_cache", None)
    if cache is None:
        cache = {}
    means = {}
    for mu in range(mu_critical + 1):
        if mu not in cache:
            cache[mu] = _stats_for_mu(comp, mu)
        mean_t, mean_c, _ = cache[mu]
        means[mu] = (mean_t, mean_c)
    if hasattr(graph_or_component, "_walk_cache"):
        graph_or_component._walk_cache = cache
    return ComponentWalkStats(means)


class InsertionTrial:
    """Walk bookkeeping for one test instance virtually joining the components.

    Builds each linked class's augmented component once; per-mu averages
    reuse the cached base walk of any start whose trajectory never meets a
    linked vertex, since such walks cannot be deflected by the insertion.
    """

    def __init__(self, test_id, class_graphs, views):
        self.class_graphs = list(class_graphs)
        self.views = {v.class_id: v for v in views}
        self.linked_ids = [g.class_id for g in class_graphs if self.views[g.class_id].linked]
        if not self.linked_ids:
            raise AllViewsEmpty(f"test instance {test_id!r} links into no class component")
        self._aug = {}
        for graph in class_graphs:
            view = self.views[graph.class_id]
            if not view.linked:
                continue
            base = _component_of(graph)
            aug, test_idx = base.with_vertex(test_id, view.links)
            touched = frozenset(base.index[vid] for vid, _ in view.links)
            self._aug[graph.class_id] = (graph, base, aug, test_idx, touched)

    def augmented_means(self, class_id, mu):
        graph, base, aug, test_idx, touched = self._aug[class_id]
        cache = graph._walk_cache
        if mu not in cache:
            cache[mu] = _stats_for_mu(base, mu)
        _, _, detail = cache[mu]
        cut = test_idx
        total_t = 0
        total_c = 0
        for s, (t, c, visited) in enumerate(detail):
            if visited & touched:
                s_aug = s + 1 if s >= cut else s
                t, c, _ = _walk_indices(aug.adj, s_aug, mu)
            total_t += t
            total_c += c
        t, c, _ = _walk_indices(aug.adj, test_idx, mu)
        total_t += t
        total_c += c
        n = len(aug)
        return total_t / n, total_c / n

    def variations(self, mu):
        """Normalized per-class variations (delta_t, delta_c) at one mu.

        Unlinked classes receive twice the largest linked variation (1.0
        when every linked variation is zero); if everything is zero the
        deltas are uniform so they still sum to one.
        """
        raw_t = {}
        raw_c = {}
        for graph in self.class_graphs:
            class_id = graph.class_id
            if class_id in self._aug:
                stats = component_stats(graph, mu)
                base_t, base_c = stats.means[mu]
                new_t, new_c = self.augmented_means(class_id, mu)
                raw_t[class_id] = abs(new_t - base_t)
                raw_c[class_id] = abs(new_c - base_c)
        max_t = max(raw_t.values())
        max_c = max(raw_c.values())
        high_t = 2.0 * max_t if max_t > 0 else 1.0
        high_c = 2.0 * max_c if max_c > 0 else 1.0
        for graph in self.class_graphs:
            if graph.class_id not in self._aug:
                raw_t[graph.class_id] = high_t
                raw_c[graph.class_id] = high_c
        return _normalize(raw_t), _normalize(raw_c)


def _normalize(raw):
    total = sum(raw.values())
    if total == 0:
        return {k: 1.0 / len(raw) for k in raw}
    return {k: v / total for k, v in raw.items()}


def insertion_variation(test_instance, class_graphs, views, mu, trial=None):
    """Per-class (delta_t, delta_c) for one memory length.

    ``trial`` may carry a prebuilt :class:`InsertionTrial` to share the
    augmented components across many mu values.
    """
    if trial is None:
        test_id = getattr(test_instance, "id", test_instance)
        trial = InsertionTrial(test_id, class_graphs, views)
    return trial.variations(mu)
