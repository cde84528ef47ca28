"""Regenerates small_graphs.txt: every connected simple graph with at most 8
edges, one representative per isomorphism class. Run once; the output is pinned.

Format: one graph per line, "n u-v u-v ...".
"""
import itertools
import networkx as nx
from networkx.generators.atlas import graph_atlas_g

reps = []

def add(g):
    if g.number_of_edges() == 0 or g.number_of_edges() > 8 or not nx.is_connected(g):
        return
    for h in reps:
        if h.number_of_nodes() == g.number_of_nodes() and \
           h.number_of_edges() == g.number_of_edges() and nx.is_isomorphic(h, g):
            return
    reps.append(nx.convert_node_labels_to_integers(g))

for g in graph_atlas_g():  # all graphs up to 7 nodes
    add(g)
# 8 edges on 8 nodes (unicyclic) and trees on 8 and 9 nodes.
for t in nx.nonisomorphic_trees(8):
    add(t)
    for a, b in itertools.combinations(range(8), 2):
        if not t.has_edge(a, b):
            g = t.copy()
            g.add_edge(a, b)
            add(g)
for t in nx.nonisomorphic_trees(9):
    add(t)

with open(__file__.replace("gen_small_graphs.py", "small_graphs.txt"), "w") as f:
    for g in reps:
        f.write(f"{g.number_of_nodes()} " + " ".join(f"{u}-{v}" for u, v in sorted(
            tuple(sorted(e)) for e in g.edges())) + "\n")
print(len(reps))
