"""Intrinsic (geodesic) distances via shortest paths on a refined edge graph.

The plain edge graph overestimates geodesics badly (paths must follow
edges).  One round of midpoint refinement plus the median chords of every
triangle brings the overestimate on a sphere down to well under a percent.
"""

from __future__ import annotations

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from .errors import DisconnectedMesh
from .surface import DiscreteHypersurface

__all__ = ["intrinsic_distances", "check_connected"]


def _curve_graph(mesh):
    E = mesh.elements
    L = mesh.element_measures
    return E[:, 0], E[:, 1], L, mesh.n_vertices


def _triangle_graph(mesh, refine):
    V = mesh.vertices
    F = mesh.elements
    if not refine:
        e = mesh.edges
        w = np.linalg.norm(V[e[:, 0]] - V[e[:, 1]], axis=1)
        return e[:, 0], e[:, 1], w, mesh.n_vertices
    # midpoint nodes, one per undirected edge
    e = mesh.edges
    nv = mesh.n_vertices
    mid_id = {tuple(ed): nv + i for i, ed in enumerate(map(tuple, e))}
    P = np.vstack([V, (V[e[:, 0]] + V[e[:, 1]]) / 2])
    rows, cols = [], []
    for a, b, c in F:
        mab = mid_id[(a, b) if a < b else (b, a)]
        mbc = mid_id[(b, c) if b < c else (c, b)]
        mca = mid_id[(c, a) if c < a else (a, c)]
        # split edges, medial triangle, and median chords
        rows += [a, mab, b, mbc, c, mca, mab, mbc, mca, a, b, c]
        cols += [mab, b, mbc, c, mca, a, mbc, mca, mab, mbc, mca, mab]
    rows = np.asarray(rows)
    cols = np.asarray(cols)
    w = np.linalg.norm(P[rows] - P[cols], axis=1)
    return rows, cols, w, len(P)


def _graph(mesh, refine):
    if mesh.dim_d == 1:
        rows, cols, w, n = _curve_graph(mesh)
    else:
        rows, cols, w, n = _triangle_graph(mesh, refine)
    rows = np.concatenate([rows, cols])
    cols = np.concatenate([cols[:len(w)], rows[:len(w)]])
    w = np.concatenate([w, w])
    # drop duplicate arcs (shared faces emit them twice); coo would sum them
    key = rows.astype(np.int64) * n + cols
    _, first = np.unique(key, return_index=True)
    g = coo_matrix((w[first], (rows[first], cols[first])), shape=(n, n))
    return g.tocsr()


def check_connected(mesh: DiscreteHypersurface) -> None:
    g = _graph(mesh, refine=False)
    n, _ = connected_components(g, directed=False)
    if n != 1:
        raise DisconnectedMesh(f"edge graph has {n} components")


def intrinsic_distances(mesh: DiscreteHypersurface, sources=None,
                        refine=True) -> np.ndarray:
    """Graph-geodesic distances from each source vertex to every vertex.

    Returns a (len(sources), V) array.  Distances are an upper bound on
    the true polyhedral geodesic distance and at least the chord length.
    """
    check_connected(mesh)
    if sources is None:
        sources = np.arange(mesh.n_vertices)
    sources = np.atleast_1d(np.asarray(sources, int))
    g = _graph(mesh, refine)
    d = dijkstra(g, directed=False, indices=sources)
    return d[:, :mesh.n_vertices]
