"""From raw text to a word-adjacency network.

Walks the preprocessing pipeline over a short poem whose heavy repetition
makes the edge weights easy to eyeball, then marks two occurrences of an
ambiguous word as distinct nodes and prints their local topology.
"""

from sensewalk import (
    SenseAnnotation,
    build_network,
    node_topology,
    preprocess_document,
)

POEM = (
    "In the middle of the road there was a stone / there was a stone "
    "in the middle of the road there was a stone in the middle of the "
    "road there was a stone. Never should I forget this event / in the "
    "lifetime of my fatigued retinas / Never should I forget that in "
    "the middle of the road / there was a stone / there was a stone "
    "in the middle of the road / in the middle of the road there was "
    "a stone."
)

doc = preprocess_document("poem", POEM)
lemmas = doc.content_lemmas()
print(f"content lemmas ({len(lemmas)}):")
print(" ".join(lemmas))

# ---------------------------------------------------------------------------
# every adjacent lemma pair increments one directed edge

net = build_network({"poem": lemmas})
print("\nheaviest edges:")
for (a, b), w in sorted(net.weights.items(), key=lambda kv: -kv[1])[:6]:
    print(f"  {a} -> {b}: {w}")
print(f"total edge weight: {net.total_weight()} (= content tokens - 1)")

# ---------------------------------------------------------------------------
# ambiguous occurrences become their own nodes, so each occurrence gets
# its own topological signature

rock_text = "The grey rock face rose above the camp while waves rock the small boats below."
rock_doc = preprocess_document("cliffs", rock_text)
rock_lemmas = rock_doc.content_lemmas()
positions = [i for i, lemma in enumerate(rock_lemmas) if lemma == "rock"]
annotations = [
    SenseAnnotation("cliffs", positions[0], "rock", 1),  # stone
    SenseAnnotation("cliffs", positions[1], "rock", 2),  # to sway
]
net2 = build_network({"cliffs": rock_lemmas}, annotations)
print(f"\n'{rock_text}'")
for ann in annotations:
    node = net2.node_for(ann.document_id, ann.position)
    topo = node_topology(net2, node)
    print(f"  node {node} (sense {ann.sense_id}): degree={topo.hier_degree_1:.0f}, "
          f"second ring={topo.hier_degree_2:.0f}, "
          f"neighbor degree mean={topo.neighbor_degree_mean:.2f}")
