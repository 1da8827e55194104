"""Nonlocal curvature quantities: pointwise H_s and |A|_s, the energies
W_{s,p}, B_{s,p}, T_{p,q}, and the tangent-point radius.

All double sums share one chunked kernel driver.  Outer points are split
into fixed-size chunks regardless of worker count and every chunk writes
into a preallocated slot, so results are bitwise reproducible for any
number of threads.
"""

from __future__ import annotations

import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateGeometry, InvalidParams, UnsupportedMode
from .quadrature import QuadratureScheme
from .surface import DiscreteHypersurface, EnergyParameters

__all__ = [
    "EnergyReport",
    "pointwise_curvature",
    "fractional_mean_curvature",
    "nonlocal_second_fundamental",
    "willmore_energy",
    "bending_energy",
    "tangent_point_energy",
    "tangent_point_radius",
    "get_workers",
]

_CHUNK = 128          # outer points per work unit (fixed for determinism)
_PAIR_CUTOFF = 1e-14  # times diameter: closer non-excluded pairs are an error


def get_workers(workers=None) -> int:
    """Worker-thread count: explicit argument, else NLCURV_WORKERS, else 1."""
    if workers is None:
        workers = os.environ.get("NLCURV_WORKERS", "1")
    workers = int(workers)
    if workers < 1:
        raise InvalidParams("worker count must be >= 1")
    return workers


@dataclass(frozen=True)
class EnergyReport:
    """One evaluated energy with enough metadata to reproduce it."""

    kind: str
    energy: float
    params: dict
    mesh: dict
    scheme: dict
    wall_time_s: float

    def to_dict(self) -> dict:
        d = {"kind": self.kind, "energy": self.energy}
        d.update(self.params)
        d.update(self.mesh)
        d.update(self.scheme)
        d["wall_time_s"] = self.wall_time_s
        return d


def _mesh_descriptor(mesh):
    return {"V": mesh.n_vertices, "M": mesh.n_elements,
            "area": mesh.area, "diameter": mesh.diameter}


# --------------------------------------------------------------------------
# exclusion tables
# --------------------------------------------------------------------------

def _vertex_star_elements(mesh):
    """List of incident-element index arrays, one per vertex."""
    star = [[] for _ in range(mesh.n_vertices)]
    for m, el in enumerate(mesh.elements):
        for v in el:
            star[v].append(m)
    return [np.asarray(s) for s in star]


def _element_neighbourhoods(mesh, policy):
    """Per element: excluded inner elements (itself, or its vertex star)."""
    if policy == "skip_same_element":
        return [np.array([m]) for m in range(mesh.n_elements)]
    star = _vertex_star_elements(mesh)
    out = []
    for m, el in enumerate(mesh.elements):
        out.append(np.unique(np.concatenate([star[v] for v in el])))
    return out


def _excluded_samples(excluded_elements, n_per_element):
    base = np.repeat(excluded_elements * n_per_element, n_per_element)
    return base + np.tile(np.arange(n_per_element), len(excluded_elements))


# --------------------------------------------------------------------------
# kernel driver
# --------------------------------------------------------------------------

def _inner_data(mesh, scheme, params):
    """Sample positions, weights, and the pairing-direction data n(y)."""
    Y = scheme.points
    W = scheme.weights
    if mesh.codim2 or params.codim_mode == "projection":
        if mesh.dim_d != 1 or mesh.ambient_n != 3:
            raise UnsupportedMode("projection mode is for curves in 3-space; "
                                  "embed plane curves with ambient=3")
        N = mesh.element_tangents[scheme.element_of]
        mode = "projection"
    else:
        if mesh.element_normals.size == 0:
            raise UnsupportedMode("mesh has no normals; use projection mode")
        N = mesh.element_normals[scheme.element_of]
        mode = "hypersurface"
    return Y, W, N, mode


def _pairing(diff, r2, N, mode):
    """|pairing| and signed pairing of x-y with the normal data at y.

    hypersurface: <x-y, n(y)>.  projection: |x-y - <t,x-y> t| (length of
    the component of x-y in the normal plane of the curve at y); the sign
    is meaningless there and the magnitude is returned for both slots.
    """
    if mode == "hypersurface":
        dot = np.einsum("bsk,sk->bs", diff, N)
        return np.abs(dot), dot
    tang = np.einsum("bsk,sk->bs", diff, N)
    mag = np.sqrt(np.maximum(r2 - tang * tang, 0.0))
    return mag, mag


def _kernel_block(X, excl, Y, W, N, mode, expo_r, power_num, cutoff):
    """Sum_y  |pairing|^a (or signed pairing) / r^expo_r * w(y) for a block.

    power_num is None for the signed single-power sum (H_s), else the
    exponent applied to |pairing|.
    """
    diff = X[:, None, :] - Y[None, :, :]
    r2 = np.einsum("bsk,bsk->bs", diff, diff)
    for i, e in enumerate(excl):
        r2[i, e] = np.inf
    if np.any(r2 < cutoff * cutoff):
        raise DegenerateGeometry(
            "non-excluded sample pair closer than the degeneracy cutoff")
    # park excluded pairs at a harmless finite distance, zero them at the end
    for i, e in enumerate(excl):
        r2[i, e] = 1.0
    absdot, dot = _pairing(diff, r2, N, mode)
    r = np.sqrt(r2)
    if power_num is None:
        terms = dot / r ** expo_r
    else:
        terms = absdot ** power_num / r ** expo_r
    for i, e in enumerate(excl):
        terms[i, e] = 0.0
    return terms @ W


def _run_chunks(X, excl_list, worker_fn, workers):
    """Apply worker_fn to fixed chunks of outer points; order-stable."""
    n = len(X)
    out = np.empty(n)
    jobs = [(i, min(i + _CHUNK, n)) for i in range(0, n, _CHUNK)]

    def do(job):
        a, b = job
        out[a:b] = worker_fn(X[a:b], excl_list[a:b])

    if workers == 1 or len(jobs) == 1:
        for j in jobs:
            do(j)
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            list(pool.map(do, jobs))
    return out


# --------------------------------------------------------------------------
# pointwise curvature
# --------------------------------------------------------------------------

def pointwise_curvature(mesh, scheme, params, vertices=None, kind="H",
                        workers=None):
    """H_s (signed) or |A|_s at mesh vertices; returns an array.

    The vertex star is always excluded: flat incident elements pair to an
    exact zero there, and keeping them only injects 0/0 noise.
    """
    if kind not in ("H", "A"):
        raise InvalidParams("kind must be 'H' or 'A'")
    if kind == "H" and (mesh.codim2 or params.codim_mode == "projection"):
        raise UnsupportedMode("H_s is signed and needs a hypersurface; "
                              "use kind='A' in projection mode")
    workers = get_workers(workers)
    if vertices is None:
        vertices = np.arange(mesh.n_vertices)
    vertices = np.atleast_1d(np.asarray(vertices, int))
    Y, W, N, mode = _inner_data(mesh, scheme, params)
    star = _vertex_star_elements(mesh)
    excl = [_excluded_samples(star[v], scheme.n_per_element) for v in vertices]
    X = mesh.vertices[vertices]
    expo = mesh.dim_d + 1 + params.s
    cutoff = _PAIR_CUTOFF * mesh.diameter
    power = None if kind == "H" else 1.0

    def fn(Xb, eb):
        return _kernel_block(Xb, eb, Y, W, N, mode, expo, power, cutoff)

    vals = params.c_s * _run_chunks(X, excl, fn, workers)
    return vals


def fractional_mean_curvature(mesh, scheme, vertex, params, workers=None):
    """Signed fractional mean curvature at one vertex."""
    return float(pointwise_curvature(mesh, scheme, params, [vertex], "H",
                                     workers)[0])


def nonlocal_second_fundamental(mesh, scheme, vertex, params, workers=None):
    """Nonlocal second-fundamental-form magnitude at one vertex (>= 0)."""
    return float(pointwise_curvature(mesh, scheme, params, [vertex], "A",
                                     workers)[0])


# --------------------------------------------------------------------------
# energies
# --------------------------------------------------------------------------

def _energy_outer(mesh, scheme, params, kind, workers):
    """|H_s|^p or |A|_s^p evaluated at the quadrature points themselves."""
    Y, W, N, mode = _inner_data(mesh, scheme, params)
    nbhd = _element_neighbourhoods(mesh, scheme.diagonal_policy)
    excl = [_excluded_samples(nbhd[m], scheme.n_per_element)
            for m in scheme.element_of]
    expo = mesh.dim_d + 1 + params.s
    cutoff = _PAIR_CUTOFF * mesh.diameter
    power = None if kind == "H" else 1.0

    def fn(Xb, eb):
        return _kernel_block(Xb, eb, Y, W, N, mode, expo, power, cutoff)

    vals = params.c_s * _run_chunks(Y, excl, fn, workers)
    return float(np.abs(vals) ** params.p @ W)


def _report(kind, energy, mesh, scheme, pdict, t0):
    return EnergyReport(kind, energy, pdict, _mesh_descriptor(mesh),
                        scheme.descriptor(), time.perf_counter() - t0)


def willmore_energy(mesh, scheme, params, workers=None) -> EnergyReport:
    """W_{s,p} = integral of |H_s|^p over the surface."""
    if mesh.codim2 or params.codim_mode == "projection":
        raise UnsupportedMode("W_{s,p} needs a hypersurface; "
                              "use bending_energy in projection mode")
    t0 = time.perf_counter()
    e = _energy_outer(mesh, scheme, params, "H", get_workers(workers))
    pd = {"s": params.s, "p": params.p, "q": None,
          "normalization": params.normalization}
    return _report("willmore", e, mesh, scheme, pd, t0)


def bending_energy(mesh, scheme, params, workers=None) -> EnergyReport:
    """B_{s,p} = integral of |A|_s^p over the surface."""
    t0 = time.perf_counter()
    e = _energy_outer(mesh, scheme, params, "A", get_workers(workers))
    pd = {"s": params.s, "p": params.p, "q": None,
          "normalization": params.normalization}
    return _report("bending", e, mesh, scheme, pd, t0)


def tangent_point_energy(mesh, scheme, p, q, normalization="raw",
                         codim_mode="hypersurface", workers=None) -> EnergyReport:
    """T_{p,q}: double integral of |<x-y, n(y)>|^p / |x-y|^{q-p}."""
    if not (q > p > 0):
        raise InvalidParams("tangent-point energy needs q > p > 0")
    t0 = time.perf_counter()
    params = EnergyParameters(s=0.5, p=p, q=q, normalization=normalization,
                              codim_mode=codim_mode)
    workers = get_workers(workers)
    Y, W, N, mode = _inner_data(mesh, scheme, params)
    nbhd = _element_neighbourhoods(mesh, scheme.diagonal_policy)
    excl = [_excluded_samples(nbhd[m], scheme.n_per_element)
            for m in scheme.element_of]
    cutoff = _PAIR_CUTOFF * mesh.diameter

    def fn(Xb, eb):
        return _kernel_block(Xb, eb, Y, W, N, mode, q - p, p, cutoff)

    per_outer = _run_chunks(Y, excl, fn, workers)
    e = float(abs(params.c_s) ** p * (per_outer @ W))
    pd = {"s": None, "p": p, "q": q, "normalization": normalization}
    return _report("tangent_point", e, mesh, scheme, pd, t0)


def tangent_point_radius(x, y, n_y):
    """Radius of the smallest sphere through x tangent to the surface at y."""
    x = np.asarray(x, float)
    y = np.asarray(y, float)
    d = x - y
    r2 = float(d @ d)
    if r2 == 0.0:
        raise InvalidParams("tangent-point radius needs x != y")
    denom = abs(float(np.asarray(n_y, float) @ d))
    if denom < 1e-14 * r2:
        return np.inf
    return r2 / denom
