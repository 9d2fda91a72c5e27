"""Interaction-weighted graphs, minimum spanning trees and degree statistics."""

from __future__ import annotations

import json
import logging
import math
from collections import Counter
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from jinja2 import Template
from networkx.utils import UnionFind
from scipy.stats import linregress

from src.lib.errors import DegenerateGraphError, InsufficientDataError, RejectedInputError
from src.lib.inverter_registry import get_inverter
from src.lib.market_analytics import make_report, map_windows
from src.models.coupling_model import CouplingModel
from src.models.graph import Edge, PowerLawFit, Tree, WeightedGraph
from src.models.inversion_options import InversionOptions
from src.models.series_report import TimeSeriesReport
from src.models.spin_matrix import SpinMatrix
from src.models.window_spec import WindowSpec

logger = logging.getLogger(__name__)

DISTANCE_MAP = "mantegna-max-normalized-coupling"

DOT_TMPL = (
    "graph mst {\n"
    "{% for node in nodes %}"
    '  n{{ node.id }} [label="{{ node.label }}", degree={{ node.degree }}];\n'
    "{% endfor %}"
    "{% for edge in edges %}"
    '  n{{ edge.source }} -- n{{ edge.target }} [weight="{{ edge.weight }}"];\n'
    "{% endfor %}"
    "}\n"
)


def coupling_to_distance(model: CouplingModel) -> WeightedGraph:
    """d_ij = sqrt(2 (1 - J_ij / max_{k != l} |J_kl|)) on the off-diagonal couplings."""
    if model.n_spins < 2:
        raise RejectedInputError("a coupling graph needs N >= 2")
    J = model.off_diagonal()
    scale = float(np.abs(J).max())
    if scale == 0.0:
        raise DegenerateGraphError("all off-diagonal couplings are zero; no interaction graph")
    dist = np.sqrt(np.clip(2.0 * (1.0 - J / scale), 0.0, None))
    np.fill_diagonal(dist, 0.0)
    return WeightedGraph(model.labels, dist)


def minimum_spanning_tree(graph: WeightedGraph) -> Tree:
    """Kruskal on the complete graph; equal weights resolve in lexicographic (i, j) order."""
    n = graph.n_vertices
    if n < 2:
        raise RejectedInputError("a spanning tree needs N >= 2")
    i_idx, j_idx = np.triu_indices(n, k=1)
    weights = graph.dist[i_idx, j_idx]
    # lexsort keys run last-to-first: weight, then i, then j
    order = np.lexsort((j_idx, i_idx, weights))
    forest = UnionFind(range(n))
    edges: List[Edge] = []
    for k in order:
        i, j = int(i_idx[k]), int(j_idx[k])
        if forest[i] != forest[j]:
            forest.union(i, j)
            edges.append((i, j, float(weights[k])))
            if len(edges) == n - 1:
                break
    edges.sort(key=lambda e: (e[0], e[1]))
    return Tree(n, tuple(edges), math.fsum(w for _, _, w in edges))


def tree_to_graph(tree: Tree, labels: Optional[Sequence[str]] = None) -> nx.Graph:
    g = nx.Graph()
    for v in range(tree.n_vertices):
        g.add_node(v, label=str(labels[v]) if labels is not None else str(v))
    for i, j, w in tree.edges:
        g.add_edge(i, j, weight=w)
    return g


def mst_length(model: CouplingModel) -> float:
    return minimum_spanning_tree(coupling_to_distance(model)).length


def mst_length_series(
    spins: SpinMatrix, spec: WindowSpec, options: Optional[InversionOptions] = None, threads: int = 1
) -> TimeSeriesReport:
    """l(t) = (L(t) - <L>) / <L>, with L(t) the MST length of each window's fitted couplings."""
    options = options or InversionOptions()
    inverter = get_inverter(options.method)

    def length(window: SpinMatrix) -> float:
        return mst_length(inverter.invert(window, options).model)

    lengths, gaps = map_windows(spins, spec, length, threads)
    valid = ~np.isnan(lengths)
    mean = float(lengths[valid].mean()) if valid.any() else math.nan
    if mean == 0.0:
        # every window collapsed to zero length
        values = np.where(valid, 0.0, math.nan)
    else:
        values = (lengths - mean) / mean
    return make_report(
        spins,
        spec,
        "mstLengthDeviation",
        values,
        gaps,
        {"inversion": options.model_dump(), "mean_length": mean, "distance": DISTANCE_MAP},
    )


def degree_distribution(tree: Tree) -> Dict[int, int]:
    """Number of vertices per degree, keyed by ascending degree."""
    degrees: Counter[int] = Counter()
    for i, j, _ in tree.edges:
        degrees[i] += 1
        degrees[j] += 1
    per_degree = Counter(degrees[v] for v in range(tree.n_vertices))
    return dict(sorted(per_degree.items()))


def fit_power_law(freqs: Mapping[int, int]) -> PowerLawFit:
    """Least squares of ln f(n) on ln n over degrees with nonzero frequency."""
    points = sorted((int(n), float(f)) for n, f in freqs.items() if f > 0 and n > 0)
    if len(points) < 2:
        raise InsufficientDataError(f"a power-law fit needs at least 2 nonzero frequencies, got {len(points)}")
    x = np.log([n for n, _ in points])
    y = np.log([f for _, f in points])
    fit = linregress(x, y)
    return PowerLawFit(
        alpha=float(-fit.slope),
        alpha_stderr=float(fit.stderr),
        r2=float(min(1.0, fit.rvalue**2)),
        points_used=len(points),
        intercept=float(fit.intercept),
    )


def _node_rows(tree: Tree, labels: Sequence[str]) -> List[Dict[str, Any]]:
    degree: Counter[int] = Counter()
    for i, j, _ in tree.edges:
        degree[i] += 1
        degree[j] += 1
    return [{"id": v, "label": str(labels[v]), "degree": degree[v]} for v in range(tree.n_vertices)]


def _dot_escape(text: str) -> str:
    return text.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")


def export_tree(
    tree: Tree, labels: Sequence[str], fmt: str = "json", metadata: Optional[Mapping[str, Any]] = None
) -> str:
    """Serialize a tree as DOT or JSON adjacency text.

    Nodes come in vertex order and edges in (i, j) order, so equal trees give
    equal bytes.
    """
    if len(labels) != tree.n_vertices:
        raise RejectedInputError(f"{len(labels)} labels for a tree on {tree.n_vertices} vertices")
    nodes = _node_rows(tree, labels)
    if fmt == "dot":
        return Template(DOT_TMPL, keep_trailing_newline=True).render(
            nodes=[dict(n, label=_dot_escape(n["label"])) for n in nodes],
            edges=[{"source": i, "target": j, "weight": f"{w:.17g}"} for i, j, w in tree.edges],
        )
    if fmt == "json":
        payload = {
            "nodes": nodes,
            "edges": [{"source": i, "target": j, "weight": w} for i, j, w in tree.edges],
            "length": tree.length,
            "metadata": dict(metadata or {}),
        }
        return json.dumps(payload, indent=2, sort_keys=True, ensure_ascii=False) + "\n"
    raise RejectedInputError(f"unknown tree export format {fmt!r}; use 'dot' or 'json'")


def read_tree(text: str) -> Tuple[Tree, Tuple[str, ...]]:
    """Parse the JSON form written by export_tree."""
    try:
        data = json.loads(text)
        nodes = sorted(data["nodes"], key=lambda n: int(n["id"]))
        labels = tuple(str(n["label"]) for n in nodes)
        edges = tuple(
            (min(int(e["source"]), int(e["target"])), max(int(e["source"]), int(e["target"])), float(e["weight"]))
            for e in data["edges"]
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise RejectedInputError(f"not a tree export: {exc}") from exc
    tree = Tree(len(labels), tuple(sorted(edges)), math.fsum(w for _, _, w in edges))
    if tree.n_vertices > 1 and not nx.is_tree(tree_to_graph(tree)):
        raise RejectedInputError("edge list does not form a spanning tree")
    return tree, labels
