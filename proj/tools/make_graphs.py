"""Regenerate the bundled edge lists in data/graphs (needs networkx)."""
import random
from pathlib import Path

import networkx as nx

out = Path(__file__).resolve().parent.parent / "data" / "graphs"
rng = random.Random(11)


def write(path, g, label):
    with open(path, "w") as f:
        f.write(f"% {label}, {g.number_of_nodes()} vertices, {g.number_of_edges()} edges, 1-based\n")
        for u, v in sorted(g.edges()):
            f.write(f"{u + 1} {v + 1} {rng.uniform(0.5, 2.0):.6f}\n")


# largest component of a random geometric graph
g = nx.random_geometric_graph(220, 0.13, seed=11)
cc = max(nx.connected_components(g), key=len)
g = nx.convert_node_labels_to_integers(g.subgraph(cc).copy())
write(out / "geometric.txt", g, "random geometric graph")
write(out / "preferential.txt", nx.barabasi_albert_graph(300, 3, seed=5), "preferential attachment graph")
