"""Discrete hypersurfaces: representation, file IO, primitives, elementary geometry.

A surface is a closed simplicial d-manifold embedded in (d+1)-space
(curves in the plane, triangle meshes in 3-space) or, in codimension-2
mode, a closed curve in 3-space.  Meshes are immutable after
construction and safe to share between threads.
"""

from __future__ import annotations

import functools
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    InvalidParams,
    NonManifoldError,
    OrientationError,
    ParseError,
    UnsupportedMode,
)

__all__ = [
    "DiscreteHypersurface",
    "EnergyParameters",
    "build_surface",
    "load_mesh",
    "save_off",
    "make_primitive",
    "area",
    "rescale",
    "signed_volume",
    "convexity_check",
    "PRIMITIVE_KINDS",
]


# --------------------------------------------------------------------------
# core types
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DiscreteHypersurface:
    """Closed oriented simplicial d-manifold with per-element geometry.

    vertices        (V, ambient_n) float array
    elements        (M, d+1) int array of vertex indices
    element_normals (M, ambient_n) unit outward normals, empty in codim-2 mode
    element_measures(M,) segment lengths / triangle areas
    vertex_measures (V,) lumped measures, 1/(d+1) share of each adjacent element
    """

    dim_d: int
    ambient_n: int
    vertices: np.ndarray
    elements: np.ndarray
    element_normals: np.ndarray
    element_measures: np.ndarray
    vertex_measures: np.ndarray
    has_boundary: bool = False

    def __post_init__(self):
        for a in (self.vertices, self.elements, self.element_normals,
                  self.element_measures, self.vertex_measures):
            a.setflags(write=False)

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @property
    def n_elements(self) -> int:
        return len(self.elements)

    @property
    def codim2(self) -> bool:
        return self.ambient_n - self.dim_d > 1

    @property
    def area(self) -> float:
        return float(self.element_measures.sum())

    @functools.cached_property
    def diameter(self) -> float:
        V = self.vertices
        if len(V) <= 2048:
            d2 = ((V[:, None, :] - V[None, :, :]) ** 2).sum(-1)
            return float(np.sqrt(d2.max()))
        best = 0.0
        for i in range(0, len(V), 1024):
            chunk = V[i:i + 1024]
            d2 = ((chunk[:, None, :] - V[None, :, :]) ** 2).sum(-1)
            best = max(best, float(d2.max()))
        return float(np.sqrt(best))

    @functools.cached_property
    def element_centroids(self) -> np.ndarray:
        c = self.vertices[self.elements].mean(axis=1)
        c.setflags(write=False)
        return c

    @functools.cached_property
    def element_tangents(self) -> np.ndarray:
        """Unit tangents per segment (d=1 only)."""
        if self.dim_d != 1:
            raise UnsupportedMode("tangents are defined for curves only")
        e = self.vertices[self.elements[:, 1]] - self.vertices[self.elements[:, 0]]
        t = e / np.linalg.norm(e, axis=1)[:, None]
        t.setflags(write=False)
        return t

    @functools.cached_property
    def vertex_normals(self) -> np.ndarray:
        """Measure-weighted averages of adjacent element normals, renormalized."""
        if self.codim2:
            raise UnsupportedMode("vertex normals need a hypersurface")
        vn = np.zeros_like(self.vertices)
        w = self.element_normals * self.element_measures[:, None]
        for k in range(self.elements.shape[1]):
            np.add.at(vn, self.elements[:, k], w)
        vn /= np.linalg.norm(vn, axis=1)[:, None]
        vn.setflags(write=False)
        return vn

    @functools.cached_property
    def area_centroid(self) -> np.ndarray:
        c = (self.element_centroids * self.element_measures[:, None]).sum(0) / self.area
        c.setflags(write=False)
        return c

    @functools.cached_property
    def edges(self) -> np.ndarray:
        """Undirected edge list (E, 2), sorted per row, deduplicated."""
        el = self.elements
        if self.dim_d == 1:
            e = el
        else:
            e = np.concatenate([el[:, [0, 1]], el[:, [1, 2]], el[:, [2, 0]]])
        e = np.sort(e, axis=1)
        e = np.unique(e, axis=0)
        e.setflags(write=False)
        return e

    def with_vertices(self, vertices: np.ndarray) -> "DiscreteHypersurface":
        """Same connectivity, new vertex positions (geometry recomputed)."""
        return build_surface(np.asarray(vertices, float), self.elements,
                             codim2=self.codim2,
                             allow_boundary=self.has_boundary,
                             fix_orientation=False)


@dataclass(frozen=True)
class EnergyParameters:
    """Kernel parameters shared by every nonlocal functional.

    normalization 'raw' uses c_s = 1; 'limit_normalized' uses c_s = 1 - s,
    which reproduces the classical curvature of circles as s -> 1.
    """

    s: float
    p: float = 4.0
    q: float | None = None
    normalization: str = "raw"
    codim_mode: str = "hypersurface"

    def __post_init__(self):
        if not (0.0 < self.s < 1.0):
            raise InvalidParams(f"s must lie in (0,1), got {self.s}")
        if self.p <= 0:
            raise InvalidParams(f"p must be positive, got {self.p}")
        if self.q is not None and self.q <= self.p:
            raise InvalidParams("tangent-point energies need q > p")
        if self.normalization not in ("raw", "limit_normalized"):
            raise InvalidParams(f"unknown normalization {self.normalization!r}")
        if self.codim_mode not in ("hypersurface", "projection"):
            raise InvalidParams(f"unknown codim mode {self.codim_mode!r}")

    @property
    def c_s(self) -> float:
        return 1.0 if self.normalization == "raw" else 1.0 - self.s

    def subcritical(self, dim_d: int) -> bool:
        return self.p > dim_d / self.s


# --------------------------------------------------------------------------
# construction and validation
# --------------------------------------------------------------------------

def _segment_geometry(V, E):
    vec = V[E[:, 1]] - V[E[:, 0]]
    L = np.linalg.norm(vec, axis=1)
    if V.shape[1] == 2:
        n = np.stack([vec[:, 1], -vec[:, 0]], axis=1) / L[:, None]
    else:
        n = np.empty((0, V.shape[1]))
    return n, L


def _triangle_geometry(V, F):
    P = V[F]
    cr = np.cross(P[:, 1] - P[:, 0], P[:, 2] - P[:, 0])
    A2 = np.linalg.norm(cr, axis=1)
    n = cr / A2[:, None]
    return n, A2 / 2.0


def signed_volume(vertices: np.ndarray, elements: np.ndarray) -> float:
    """Signed enclosed volume (d=2) or signed area (d=1 in the plane)."""
    if elements.shape[1] == 3:
        P = vertices[elements]
        return float(np.einsum("mk,mk->", P[:, 0], np.cross(P[:, 1], P[:, 2]))) / 6.0
    a = vertices[elements[:, 0]]
    b = vertices[elements[:, 1]]
    return float(np.sum(a[:, 0] * b[:, 1] - a[:, 1] * b[:, 0])) / 2.0


def _check_manifold(elements, n_vertices, dim_d, allow_boundary):
    if elements.min() < 0 or elements.max() >= n_vertices:
        raise ParseError("element index out of range")
    if dim_d == 1:
        faces = elements.reshape(-1)
    else:
        faces = np.sort(np.concatenate(
            [elements[:, [0, 1]], elements[:, [1, 2]], elements[:, [2, 0]]]), axis=1)
        faces = faces[:, 0] * (elements.max() + 1) + faces[:, 1]
    _, counts = np.unique(faces, return_counts=True)
    if allow_boundary:
        if counts.max() > 2:
            raise NonManifoldError("a face is shared by more than two elements")
    elif counts.min() != 2 or counts.max() != 2:
        raise NonManifoldError("mesh is not a closed manifold "
                               f"(face multiplicities {counts.min()}..{counts.max()})")


def _check_orientation(elements, dim_d, allow_boundary):
    """Each directed (d-1)-face must appear at most once; exactly once if closed."""
    if dim_d == 1:
        heads = elements[:, 1]
        tails = elements[:, 0]
        if len(np.unique(heads)) != len(heads) or len(np.unique(tails)) != len(tails):
            raise OrientationError("inconsistent segment winding")
        return
    d = np.concatenate([elements[:, [0, 1]], elements[:, [1, 2]], elements[:, [2, 0]]])
    key = d[:, 0].astype(np.int64) * (elements.max() + 1) + d[:, 1]
    _, counts = np.unique(key, return_counts=True)
    if counts.max() > 1:
        raise OrientationError("adjacent elements do not induce opposite "
                               "orientations on their shared edge")


def build_surface(vertices, elements, *, codim2=False, allow_boundary=False,
                  fix_orientation=True) -> DiscreteHypersurface:
    """Assemble and validate a DiscreteHypersurface from raw arrays.

    Closed meshes are re-oriented outward (positive signed volume) by a
    single global flip when needed.  ``allow_boundary`` admits open test
    fixtures and skips the closedness and volume-sign checks.
    """
    V = np.array(vertices, dtype=float, order="C", copy=True)
    E = np.array(elements, dtype=np.int64, order="C", copy=True)
    if V.ndim != 2 or E.ndim != 2 or E.shape[1] not in (2, 3):
        raise ParseError("need (V,n) vertices and (M,2|3) elements")
    dim_d = E.shape[1] - 1
    ambient = V.shape[1]
    if codim2 and not (dim_d == 1 and ambient == 3):
        raise InvalidParams("codimension-2 mode supports curves in 3-space only")
    if not codim2 and ambient != dim_d + 1:
        raise InvalidParams(f"ambient dimension {ambient} does not match d={dim_d}")

    _check_manifold(E, len(V), dim_d, allow_boundary)
    _check_orientation(E, dim_d, allow_boundary)

    if fix_orientation and not allow_boundary and not codim2:
        if signed_volume(V, E) < 0:
            E = E[:, ::-1].copy()

    if dim_d == 1:
        normals, measures = _segment_geometry(V, E)
        if codim2:
            normals = np.empty((0, ambient))
    else:
        normals, measures = _triangle_geometry(V, E)
    if measures.min() <= 0:
        raise ParseError("degenerate element with non-positive measure")

    vm = np.zeros(len(V))
    share = measures / (dim_d + 1)
    for k in range(dim_d + 1):
        np.add.at(vm, E[:, k], share)
    return DiscreteHypersurface(dim_d, ambient, V, E, normals, measures, vm,
                                has_boundary=allow_boundary)


# --------------------------------------------------------------------------
# file IO
# --------------------------------------------------------------------------

def _tokens(path):
    try:
        with open(path) as fh:
            for line in fh:
                line = line.split("#")[0].strip()
                if line:
                    yield line
    except OSError as exc:
        raise ParseError(str(exc)) from exc


def load_mesh(path, fmt=None) -> DiscreteHypersurface:
    """Read an ASCII OFF or OBJ file (triangles or closed polylines)."""
    if fmt is None:
        fmt = "OBJ" if str(path).lower().endswith(".obj") else "OFF"
    fmt = fmt.upper()
    if fmt == "OFF":
        return _load_off(path)
    if fmt == "OBJ":
        return _load_obj(path)
    raise InvalidParams(f"unknown mesh format {fmt!r}")


def _load_off(path):
    lines = list(_tokens(path))
    if not lines or lines[0].split()[0] != "OFF":
        raise ParseError("missing OFF header")
    rest = lines[1:] if lines[0].strip() == "OFF" else [lines[0][3:]] + lines[1:]
    try:
        nv, nf, _ = (int(x) for x in rest[0].split()[:3])
        verts = [tuple(float(x) for x in rest[1 + i].split()[:3]) for i in range(nv)]
        faces = []
        for i in range(nf):
            parts = rest[1 + nv + i].split()
            k = int(parts[0])
            faces.append(tuple(int(x) for x in parts[1:1 + k]))
    except (ValueError, IndexError) as exc:
        raise ParseError(f"malformed OFF file: {exc}") from exc
    return _from_polygons(np.array(verts), faces)


def _load_obj(path):
    verts, faces = [], []
    for line in _tokens(path):
        parts = line.split()
        if parts[0] == "v":
            verts.append(tuple(float(x) for x in parts[1:4]))
        elif parts[0] == "f":
            faces.append(tuple(int(tok.split("/")[0]) - 1 for tok in parts[1:]))
        elif parts[0] == "l":
            idx = [int(tok) - 1 for tok in parts[1:]]
            faces.extend(zip(idx[:-1], idx[1:]))
    if not verts or not faces:
        raise ParseError("OBJ file holds no usable geometry")
    return _from_polygons(np.array(verts), faces)


def _from_polygons(verts, faces):
    sizes = {len(f) for f in faces}
    if sizes == {2}:
        E = np.array(faces)
        if np.allclose(verts[:, 2] if verts.shape[1] == 3 else 0.0, 0.0) \
                and verts.shape[1] == 3:
            verts = verts[:, :2]
        return build_surface(verts, E)
    if sizes == {3}:
        return build_surface(verts, np.array(faces))
    raise ParseError(f"unsupported polygon sizes {sorted(sizes)}")


def save_off(mesh: DiscreteHypersurface, path) -> None:
    V = mesh.vertices
    if V.shape[1] == 2:
        V = np.c_[V, np.zeros(len(V))]
    with open(path, "w") as fh:
        fh.write("OFF\n")
        fh.write(f"{mesh.n_vertices} {mesh.n_elements} 0\n")
        for v in V:
            fh.write("%.17g %.17g %.17g\n" % tuple(v))
        for e in mesh.elements:
            fh.write(f"{len(e)} " + " ".join(str(int(i)) for i in e) + "\n")


# --------------------------------------------------------------------------
# primitives
# --------------------------------------------------------------------------

def _icosahedron():
    phi = (1 + 5 ** 0.5) / 2
    V = np.array([(-1, phi, 0), (1, phi, 0), (-1, -phi, 0), (1, -phi, 0),
                  (0, -1, phi), (0, 1, phi), (0, -1, -phi), (0, 1, -phi),
                  (phi, 0, -1), (phi, 0, 1), (-phi, 0, -1), (-phi, 0, 1)],
                 float)
    V /= np.linalg.norm(V, axis=1)[:, None]
    F = np.array([(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
                  (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
                  (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
                  (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)])
    return V, F


def _subdivide_project(V, F):
    verts = [tuple(v) for v in V]
    cache = {}

    def midpoint(a, b):
        key = (a, b) if a < b else (b, a)
        if key not in cache:
            m = (np.asarray(verts[a]) + np.asarray(verts[b])) / 2
            verts.append(tuple(m))
            cache[key] = len(verts) - 1
        return cache[key]

    F2 = []
    for a, b, c in F:
        ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
        F2 += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
    V2 = np.asarray(verts)
    V2 /= np.linalg.norm(V2, axis=1)[:, None]
    return V2, np.asarray(F2)


def unit_icosphere(subdivisions: int):
    """Unit-radius icosphere directions and faces (midpoints re-projected)."""
    V, F = _icosahedron()
    for _ in range(subdivisions):
        V, F = _subdivide_project(V, F)
    return V, F


def _harmonic_noise(directions, seed, degrees=(2, 3, 4)):
    """Smooth seeded direction field with unit RMS over the sphere."""
    from scipy.special import sph_harm_y

    rng = np.random.default_rng(seed)
    theta = np.arccos(np.clip(directions[:, 2], -1, 1))
    phi = np.arctan2(directions[:, 1], directions[:, 0])
    noise = np.zeros(len(directions))
    csum = 0.0
    for ell in degrees:
        for m in range(-ell, ell + 1):
            c = rng.standard_normal()
            Y = sph_harm_y(ell, abs(m), theta, phi)
            if m < 0:
                basis = np.sqrt(2) * (-1) ** m * Y.imag
            elif m > 0:
                basis = np.sqrt(2) * (-1) ** m * Y.real
            else:
                basis = Y.real
            noise += c * basis
            csum += c * c
    return noise / np.sqrt(csum / (4 * np.pi))


def _revolve(prof_x, prof_r, n_theta):
    """Closed surface of revolution about the x-axis; profile ends at r=0."""
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    rings = []
    for x, r in zip(prof_x[1:-1], prof_r[1:-1]):
        rings.append(np.stack([np.full(n_theta, x),
                               r * np.cos(theta), r * np.sin(theta)], 1))
    nr = len(rings)
    V = [np.array([prof_x[0], 0, 0])] + [p for ring in rings for p in ring] \
        + [np.array([prof_x[-1], 0, 0])]
    V = np.asarray(V)
    last = 1 + nr * n_theta
    F = []
    for j in range(n_theta):
        F.append((0, 1 + j, 1 + (j + 1) % n_theta))
    for i in range(nr - 1):
        base = 1 + i * n_theta
        for j in range(n_theta):
            a, b = base + j, base + (j + 1) % n_theta
            c, d = a + n_theta, b + n_theta
            F.append((a, c, d))
            F.append((a, d, b))
    base = 1 + (nr - 1) * n_theta
    for j in range(n_theta):
        F.append((last, base + (j + 1) % n_theta, base + j))
    return V, np.asarray(F)


def _circle(radius=1.0, n=64, ambient=2):
    if n < 8:
        raise InvalidParams("circle needs at least 8 vertices")
    th = 2 * np.pi * np.arange(n) / n
    V = radius * np.stack([np.cos(th), np.sin(th)], 1)
    E = np.stack([np.arange(n), (np.arange(n) + 1) % n], 1)
    if ambient == 3:
        return build_surface(np.c_[V, np.zeros(n)], E, codim2=True)
    return build_surface(V, E)


def _sphere_icosub(radius=1.0, subdivisions=3):
    if subdivisions < 0:
        raise InvalidParams("subdivision level must be >= 0")
    if radius <= 0:
        raise InvalidParams("radius must be positive")
    V, F = unit_icosphere(subdivisions)
    return build_surface(radius * V, F)


def _ellipsoid(semi_axes=(1.0, 1.0, 2.0), subdivisions=3):
    ax = np.asarray(semi_axes, float)
    if ax.shape != (3,) or ax.min() <= 0:
        raise InvalidParams("ellipsoid needs three positive semi-axes")
    V, F = unit_icosphere(subdivisions)
    # affine image of the icosphere: stays exactly convex
    return build_surface(V * ax[None, :], F)


def _torus(major_radius=2.0, minor_radius=0.5, n_major=48, n_minor=24):
    if minor_radius <= 0 or major_radius <= minor_radius:
        raise InvalidParams("torus needs 0 < minor_radius < major_radius")
    u = 2 * np.pi * np.arange(n_major) / n_major
    v = 2 * np.pi * np.arange(n_minor) / n_minor
    U, Vv = np.meshgrid(u, v, indexing="ij")
    X = (major_radius + minor_radius * np.cos(Vv)) * np.cos(U)
    Y = (major_radius + minor_radius * np.cos(Vv)) * np.sin(U)
    Z = minor_radius * np.sin(Vv)
    P = np.stack([X.ravel(), Y.ravel(), Z.ravel()], 1)

    def vid(i, j):
        return (i % n_major) * n_minor + (j % n_minor)

    F = []
    for i in range(n_major):
        for j in range(n_minor):
            a, b, c, d = vid(i, j), vid(i + 1, j), vid(i + 1, j + 1), vid(i, j + 1)
            F.append((a, b, c))
            F.append((a, c, d))
    return build_surface(P, np.asarray(F))


def _perturbed_sphere(radius=1.0, amplitude=0.0, seed=0, subdivisions=3):
    if radius <= 0:
        raise InvalidParams("radius must be positive")
    V, F = unit_icosphere(subdivisions)
    if amplitude == 0.0:
        return build_surface(radius * V, F)
    r = radius * (1.0 + amplitude * _harmonic_noise(V, seed))
    if r.min() <= 0:
        raise InvalidParams("perturbation amplitude collapses the sphere")
    return build_surface(V * r[:, None], F)


def _dumbbell(neck_radius=0.2, n_profile=48, n_theta=24):
    """Two unit spheres bridged by a catenoid neck of the given waist radius."""
    if not (0 < neck_radius < 0.9):
        raise InvalidParams("neck radius must lie in (0, 0.9)")
    eps = neck_radius
    c = 1.0 + eps  # sphere centers at +-c
    xs = np.linspace(-(c + 1.0), c + 1.0, 4 * n_profile + 1)

    def prof(x):
        sph = np.sqrt(np.maximum(0.0, 1.0 - (np.abs(x) - c) ** 2))
        with np.errstate(over="ignore"):
            neck = np.where(np.abs(x) < c, eps * np.cosh(np.clip(x / eps, -500, 500)), 0.0)
        return np.maximum(sph, np.minimum(neck, 1.0))

    r = prof(xs)
    keep = [0]
    for i in range(1, len(xs) - 1):
        if r[i] > 0:
            keep.append(i)
    keep.append(len(xs) - 1)
    xs, r = xs[keep], r[keep]
    return build_surface(*_revolve(xs, r, n_theta))


PRIMITIVE_KINDS = {
    "circle": _circle,
    "sphere_icosub": _sphere_icosub,
    "ellipsoid": _ellipsoid,
    "torus": _torus,
    "perturbed_sphere": _perturbed_sphere,
    "dumbbell": _dumbbell,
}


def make_primitive(kind: str, **params) -> DiscreteHypersurface:
    """Deterministic test-shape factory; identical params give identical meshes."""
    try:
        factory = PRIMITIVE_KINDS[kind]
    except KeyError:
        raise InvalidParams(
            f"unknown primitive {kind!r}, pick one of {sorted(PRIMITIVE_KINDS)}")
    try:
        return factory(**params)
    except TypeError as exc:
        raise InvalidParams(f"bad parameters for {kind}: {exc}") from exc


# --------------------------------------------------------------------------
# elementary geometry
# --------------------------------------------------------------------------

def area(mesh: DiscreteHypersurface) -> float:
    """Total d-dimensional measure (length or area)."""
    return mesh.area


def rescale(mesh: DiscreteHypersurface, lam: float) -> DiscreteHypersurface:
    """Scale about the origin by lam > 0; measures scale by lam**d."""
    if lam <= 0:
        raise InvalidParams("scale factor must be positive")
    return mesh.with_vertices(mesh.vertices * lam)


def convexity_check(mesh: DiscreteHypersurface, tol=None):
    """Half-space test of every vertex against every supporting element plane.

    Returns {'is_convex': bool, 'max_violation': float}; the violation is
    max(0, <x - y, n(y)>) over all (vertex, element centroid) pairs.
    """
    if mesh.codim2:
        raise UnsupportedMode("convexity needs a hypersurface bounding a region")
    if tol is None:
        tol = 1e-9 * mesh.diameter
    C = mesh.element_centroids
    n = mesh.element_normals
    worst = -np.inf
    for i in range(0, mesh.n_vertices, 512):
        X = mesh.vertices[i:i + 512]
        dots = np.einsum("vmk,mk->vm", X[:, None, :] - C[None, :, :], n)
        worst = max(worst, float(dots.max()))
    return {"is_convex": bool(worst <= tol), "max_violation": max(0.0, worst)}
