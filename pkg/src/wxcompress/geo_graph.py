"""Distance-threshold proximity graph over station locations, and its Laplacian."""

from __future__ import annotations

import csv
import math
from collections import deque
from dataclasses import dataclass
from typing import TextIO

import numpy as np

from . import kernels
from .errors import ArgumentError

EARTH_RADIUS_MI = 3958.8
DEFAULT_THRESHOLD_MI = 70.0


def haversine_mi(a, b, radius=EARTH_RADIUS_MI) -> float:
    """Great-circle distance in statute miles between ``(lat, lon)`` pairs."""
    lat1, lon1 = (math.radians(v) for v in a)
    lat2, lon2 = (math.radians(v) for v in b)
    s1 = math.sin((lat2 - lat1) * 0.5)
    s2 = math.sin((lon2 - lon1) * 0.5)
    h = s1 * s1 + math.cos(lat1) * math.cos(lat2) * s2 * s2
    return 2.0 * radius * math.asin(math.sqrt(min(h, 1.0)))


@dataclass(frozen=True)
class ProximityGraph:
    n: int
    edges: np.ndarray  # (m, 2) int64, rows (i, j) with i < j, lexicographic
    threshold_mi: float
    distances: np.ndarray = None  # edge lengths in miles, aligned with ``edges``

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    def degrees(self) -> np.ndarray:
        deg = np.zeros(self.n, dtype=np.int64)
        np.add.at(deg, self.edges[:, 0], 1)
        np.add.at(deg, self.edges[:, 1], 1)
        return deg

    def adjacency_lists(self):
        adj = [[] for _ in range(self.n)]
        for i, j in self.edges.tolist():
            adj[i].append(j)
            adj[j].append(i)
        return adj


def build_graph(sites, threshold_mi=DEFAULT_THRESHOLD_MI) -> ProximityGraph:
    """Connect every pair of sites strictly closer than ``threshold_mi``.

    ``sites`` is a SiteIndex or an ``(n, 2)`` array of latitude/longitude.
    """
    if not threshold_mi > 0:
        raise ArgumentError(f"threshold must be positive, got {threshold_mi}")
    if hasattr(sites, "latitudes"):
        lat, lon = sites.latitudes, sites.longitudes
    else:
        coords = np.asarray(sites, dtype=np.float64).reshape(-1, 2)
        lat, lon = np.ascontiguousarray(coords[:, 0]), np.ascontiguousarray(coords[:, 1])
    i, j, d = kernels.threshold_edges(lat, lon, float(threshold_mi), EARTH_RADIUS_MI)
    edges = np.column_stack([i, j]).astype(np.int64).reshape(-1, 2)
    return ProximityGraph(n=len(lat), edges=edges, threshold_mi=float(threshold_mi), distances=d)


def graph_from_edges(n, edges, threshold_mi=DEFAULT_THRESHOLD_MI) -> ProximityGraph:
    """Graph from an explicit edge list; pairs are normalized to i < j."""
    pairs = set()
    for a, b in edges:
        a, b = int(a), int(b)
        if a == b or not (0 <= a < n and 0 <= b < n):
            raise ArgumentError(f"bad edge ({a}, {b}) for n = {n}")
        pairs.add((min(a, b), max(a, b)))
    arr = np.array(sorted(pairs), dtype=np.int64).reshape(-1, 2)
    return ProximityGraph(n=n, edges=arr, threshold_mi=threshold_mi)


def laplacian(graph: ProximityGraph) -> np.ndarray:
    """Dense combinatorial Laplacian: degree on the diagonal, -1 per edge."""
    H = np.zeros((graph.n, graph.n))
    i, j = graph.edges[:, 0], graph.edges[:, 1]
    H[i, j] = -1.0
    H[j, i] = -1.0
    H[np.diag_indices(graph.n)] = graph.degrees()
    return H


def connected_components(graph: ProximityGraph):
    """Return ``(count, labels)``; labels are numbered in order of lowest vertex."""
    labels = np.full(graph.n, -1, dtype=np.int64)
    adj = graph.adjacency_lists()
    count = 0
    for start in range(graph.n):
        if labels[start] >= 0:
            continue
        labels[start] = count
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if labels[w] < 0:
                    labels[w] = count
                    queue.append(w)
        count += 1
    return count, labels


def write_edge_csv(graph: ProximityGraph, stream: TextIO):
    """Debug dump: ``i,j,distance_mi`` per edge."""
    w = csv.writer(stream, lineterminator="\n")
    w.writerow(["i", "j", "distance_mi"])
    dist = graph.distances if graph.distances is not None else np.full(graph.edge_count, np.nan)
    for (i, j), d in zip(graph.edges.tolist(), dist.tolist()):
        w.writerow([i, j, format(d, ".17g")])
