import os

import numpy as np
import pytest

from nlcurv import errors
from nlcurv.surface import (
    EnergyParameters,
    area,
    build_surface,
    convexity_check,
    load_mesh,
    make_primitive,
    rescale,
    save_off,
    signed_volume,
)


class TestPrimitives:
    def test_icosahedron_counts(self):
        m = make_primitive("sphere_icosub", subdivisions=0)
        assert m.n_vertices == 12 and m.n_elements == 20
        assert signed_volume(m.vertices, m.elements) > 0

    def test_circle_perimeter(self):
        m = make_primitive("circle", radius=1.0, n=4096)
        exact = 2 * 4096 * np.sin(np.pi / 4096)
        assert abs(m.area - exact) < 1e-12
        assert abs(m.area - 2 * np.pi) < 1e-5

    def test_circle_radius_two(self):
        m = make_primitive("circle", radius=2.0, n=1024)
        assert abs(m.area - 4 * np.pi) < 1e-4

    def test_sphere_area_from_below(self):
        m = make_primitive("sphere_icosub", subdivisions=5)
        assert 4 * np.pi * (1 - 0.002) < m.area < 4 * np.pi

    def test_perturbed_zero_amplitude(self):
        a = make_primitive("perturbed_sphere", amplitude=0.0, seed=7,
                           subdivisions=2)
        b = make_primitive("sphere_icosub", subdivisions=2)
        assert np.array_equal(a.vertices, b.vertices)

    def test_primitive_deterministic(self):
        a = make_primitive("perturbed_sphere", amplitude=0.1, seed=11,
                           subdivisions=2)
        b = make_primitive("perturbed_sphere", amplitude=0.1, seed=11,
                           subdivisions=2)
        assert np.array_equal(a.vertices, b.vertices)
        c = make_primitive("perturbed_sphere", amplitude=0.1, seed=12,
                           subdivisions=2)
        assert not np.array_equal(a.vertices, c.vertices)

    def test_unit_normals(self):
        for kind, kw in [("sphere_icosub", {"subdivisions": 2}),
                         ("torus", {}), ("circle", {"n": 32})]:
            m = make_primitive(kind, **kw)
            norms = np.linalg.norm(m.element_normals, axis=1)
            assert np.all(np.abs(norms - 1) < 1e-12)

    def test_vertex_measures_partition(self):
        m = make_primitive("torus")
        assert abs(m.vertex_measures.sum() - m.element_measures.sum()) \
            < 1e-10 * m.area

    @pytest.mark.parametrize("kind,kw", [
        ("circle", {"n": 4}),
        ("sphere_icosub", {"subdivisions": -1}),
        ("sphere_icosub", {"radius": -2.0}),
        ("torus", {"major_radius": 0.3, "minor_radius": 0.5}),
        ("ellipsoid", {"semi_axes": (1.0, -1.0, 2.0)}),
        ("dumbbell", {"neck_radius": 0.95}),
        ("nonesuch", {}),
    ])
    def test_invalid_params(self, kind, kw):
        with pytest.raises(errors.InvalidParams):
            make_primitive(kind, **kw)


class TestValidation:
    def test_non_manifold(self):
        m = make_primitive("sphere_icosub", subdivisions=0)
        with pytest.raises(errors.NonManifoldError):
            build_surface(m.vertices, m.elements[:-1])

    def test_open_mesh_allowed_with_flag(self):
        m = make_primitive("sphere_icosub", subdivisions=0)
        open_mesh = build_surface(m.vertices, m.elements[:-1],
                                  allow_boundary=True)
        assert open_mesh.has_boundary

    def test_inconsistent_winding(self):
        m = make_primitive("sphere_icosub", subdivisions=0)
        F = m.elements.copy()
        F[0] = F[0][::-1]
        with pytest.raises(errors.OrientationError):
            build_surface(m.vertices, F)

    def test_global_flip_repair(self):
        m = make_primitive("sphere_icosub", subdivisions=1)
        flipped = m.elements[:, ::-1]
        rebuilt = build_surface(m.vertices, flipped)
        assert signed_volume(rebuilt.vertices, rebuilt.elements) > 0

    def test_codim2_circle(self):
        m = make_primitive("circle", n=64, ambient=3)
        assert m.codim2 and m.element_normals.size == 0
        assert m.element_tangents.shape == (64, 3)


class TestIO:
    def test_off_roundtrip(self, tmp_path, sphere1):
        p = os.path.join(tmp_path, "s.off")
        save_off(sphere1, p)
        m = load_mesh(p)
        assert np.allclose(m.vertices, sphere1.vertices)
        assert np.array_equal(m.elements, sphere1.elements)

    def test_obj_cube_inward_flipped(self, tmp_path):
        # all faces wound inward: loader flips to positive volume
        V = np.array([[x, y, z] for x in (0, 1) for y in (0, 1)
                      for z in (0, 1)], float)
        F = [(0, 1, 3), (0, 3, 2), (4, 6, 7), (4, 7, 5), (0, 4, 5),
             (0, 5, 1), (2, 3, 7), (2, 7, 6), (0, 2, 6), (0, 6, 4),
             (1, 5, 7), (1, 7, 3)]
        # that winding is outward; invert it to get an inward cube
        F = [f[::-1] for f in F]
        p = os.path.join(tmp_path, "cube.obj")
        with open(p, "w") as fh:
            for v in V:
                fh.write("v %g %g %g\n" % tuple(v))
            for f in F:
                fh.write("f %d %d %d\n" % tuple(i + 1 for i in f))
        m = load_mesh(p)
        assert signed_volume(m.vertices, m.elements) > 0

    def test_parse_error(self, tmp_path):
        p = os.path.join(tmp_path, "bad.off")
        with open(p, "w") as fh:
            fh.write("not a mesh\n")
        with pytest.raises(errors.ParseError):
            load_mesh(p)


class TestGeometry:
    @pytest.mark.parametrize("lam", [0.5, 2.0, 10.0])
    def test_rescale_area(self, sphere2, lam):
        r = rescale(sphere2, lam)
        assert abs(r.area - lam ** 2 * sphere2.area) \
            < 1e-12 * lam ** 2 * sphere2.area

    def test_rescale_identity(self, sphere2):
        r = rescale(sphere2, 1.0)
        assert np.array_equal(r.vertices, sphere2.vertices)

    def test_rescale_norms(self):
        m = rescale(make_primitive("circle", n=64), 3.0)
        assert np.allclose(np.linalg.norm(m.vertices, axis=1), 3.0)

    def test_rescale_invalid(self, sphere2):
        with pytest.raises(errors.InvalidParams):
            rescale(sphere2, -1.0)

    @pytest.mark.parametrize("sub", [0, 1, 2, 3])
    def test_icosphere_convex(self, sub):
        m = make_primitive("sphere_icosub", subdivisions=sub)
        res = convexity_check(m)
        assert res["is_convex"] and res["max_violation"] <= 1e-12

    def test_torus_not_convex(self):
        res = convexity_check(make_primitive("torus"))
        assert not res["is_convex"] and res["max_violation"] > 0

    def test_dented_sphere_matches_brute_force(self):
        m = make_primitive("perturbed_sphere", amplitude=0.3, seed=1,
                           subdivisions=2)
        res = convexity_check(m)
        V, C, N = m.vertices, m.element_centroids, m.element_normals
        brute = max(max(float((x - c) @ n) for c, n in zip(C, N)) for x in V)
        assert not res["is_convex"]
        assert abs(res["max_violation"] - brute) < 1e-14

    def test_convexity_codim2_unsupported(self):
        with pytest.raises(errors.UnsupportedMode):
            convexity_check(make_primitive("circle", n=32, ambient=3))

    def test_area_function(self, sphere2):
        assert area(sphere2) == sphere2.area


class TestEnergyParameters:
    def test_defaults_and_subcritical(self):
        p = EnergyParameters(s=0.5, p=5.0)
        assert p.c_s == 1.0
        assert p.subcritical(2) and not EnergyParameters(s=0.5, p=4.0).subcritical(2)

    def test_limit_normalized(self):
        assert EnergyParameters(s=0.75, normalization="limit_normalized").c_s \
            == 0.25

    @pytest.mark.parametrize("kw", [
        {"s": 0.0}, {"s": 1.0}, {"s": 0.5, "p": 0.0},
        {"s": 0.5, "q": 2.0, "p": 4.0},
        {"s": 0.5, "normalization": "weird"},
    ])
    def test_invalid(self, kw):
        with pytest.raises(errors.InvalidParams):
            EnergyParameters(**kw)
