"""Evaluate the nonlocal energies across a small shape zoo.

Computes W_{s,p}, B_{s,p}, and the tangent-point energy on a few closed
surfaces, and demonstrates the exact lambda^{d-sp} scaling law.

Run:  python3 demos/energy_landscape.py
"""

from nlcurv import (
    EnergyParameters,
    bending_energy,
    build_scheme,
    make_primitive,
    rescale,
    tangent_point_energy,
    willmore_energy,
)

PARAMS = EnergyParameters(s=0.5, p=4.0)


def zoo():
    shapes = {
        "sphere (sub 2)": make_primitive("sphere_icosub", subdivisions=2),
        "ellipsoid 1:1:2": make_primitive("ellipsoid",
                                          semi_axes=(1.0, 1.0, 2.0),
                                          subdivisions=2),
        "torus 2:0.5": make_primitive("torus"),
        "dumbbell neck 0.2": make_primitive("dumbbell", neck_radius=0.2),
    }
    print(f"{'shape':<20} {'W_{s,p}':>12} {'B_{s,p}':>12}   note")
    for name, mesh in shapes.items():
        sc = build_scheme(mesh)
        w = willmore_energy(mesh, sc, PARAMS, workers=4).energy
        b = bending_energy(mesh, sc, PARAMS, workers=4).energy
        note = "W = B (convex)" if abs(w - b) < 1e-9 * b else \
            f"W < B by {100 * (1 - w / b):.1f}% (non-convex)"
        print(f"{name:<20} {w:12.4f} {b:12.4f}   {note}")


def scaling():
    print("\nexact scaling: E(lambda Sigma) = lambda^(d - s p) E(Sigma)")
    mesh = make_primitive("sphere_icosub", subdivisions=1)
    base = bending_energy(mesh, build_scheme(mesh), PARAMS).energy
    for lam in (0.5, 2.0, 10.0):
        big = rescale(mesh, lam)
        e = bending_energy(big, build_scheme(big), PARAMS).energy
        expo = mesh.dim_d - PARAMS.s * PARAMS.p
        print(f"  lambda={lam:4}: ratio={e / base:.15f}  "
              f"expected lambda^{expo:g} = {lam ** expo:.15f}")


def tangent_point():
    print("\ntangent-point energy on the unit circle (p=2, q=4): the "
          "kernel is sin^2(t/2), so the exact value is 2 pi^2 = 19.7392...")
    m = make_primitive("circle", n=1024)
    sc = build_scheme(m, order="gauss7", diagonal_policy="skip_same_element")
    e = tangent_point_energy(m, sc, p=2.0, q=4.0).energy
    print(f"  computed: {e:.6f}")


if __name__ == "__main__":
    zoo()
    scaling()
    tangent_point()
