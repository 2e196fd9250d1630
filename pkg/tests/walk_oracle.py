"""Brute-force tourist-walk simulator used as an independent test oracle.

Tracks explicit (vertex, last-mu-window) states until one repeats, then
derives the transient by forward-scanning for the first index where the
vertex sequence is periodic. Implemented against plain dictionaries with
its own candidate selection, independent of the package's engine.
"""


def oracle_neighbors(positions, edges):
    """Adjacency map id -> list of neighbor ids from an undirected edge list."""
    adj = {v: set() for v in positions}
    for a, b in edges:
        adj[a].add(b)
        adj[b].add(a)
    return {v: sorted(ns) for v, ns in adj.items()}


def _distance(positions, a, b):
    pa, pb = positions[a], positions[b]
    return sum((x - y) ** 2 for x, y in zip(pa, pb)) ** 0.5


def oracle_walk(positions, adj, start, mu):
    """Return (transient, cycle) for a walk from ``start`` with memory ``mu``."""
    if mu == 0:
        # the current vertex is an admissible destination at distance zero
        return 0, 1

    history = [start]
    seen_states = {}

    def current_state():
        window = tuple(history[-mu:])
        return history[-1], window

    while True:
        state = current_state()
        if state in seen_states:
            anchor = seen_states[state]
            here = len(history) - 1
            cycle = here - anchor
            transient = _first_periodic_index(history, cycle)
            _check_cycle_repeats(positions, adj, history, transient, cycle, mu)
            return transient, cycle
        seen_states[state] = len(history) - 1

        window = set(history[-mu:])
        candidates = [v for v in adj[history[-1]] if v not in window]
        if not candidates:
            return len(history) - 1, 0  # dead end
        best = min(candidates, key=lambda v: (_distance(positions, history[-1], v), v))
        history.append(best)


def _first_periodic_index(history, cycle):
    last = len(history) - 1
    for t in range(last + 1):
        if all(history[m] == history[m + cycle] for m in range(t, last - cycle + 1)):
            return t
    return last


def _check_cycle_repeats(positions, adj, history, transient, cycle, mu):
    # internal sanity: replaying the cycle reproduces its vertices in order
    segment = history[transient : transient + cycle]
    follow = history[transient + cycle : transient + 2 * cycle]
    for offset, v in enumerate(follow):
        assert v == segment[offset], "oracle cycle does not repeat"


def random_geometric_graph(rng, n, radius=None):
    """Seeded random points in the unit square, edges within the radius."""
    positions = {i: (rng.random(), rng.random()) for i in range(n)}
    if radius is None:
        radius = 0.3 + 0.5 * rng.random()
    edges = []
    for i in range(n):
        for j in range(i + 1, n):
            if _distance(positions, i, j) < radius:
                edges.append((i, j))
    return positions, edges
