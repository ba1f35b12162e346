import json
import math

import numpy as np
import pytest

from isodimer.errors import IsoradialityError, SchemaError
from isodimer.graphs import (
    dual,
    load_graph,
    quotient,
    skewed_honeycomb,
    standard_lattice,
    translate_isomorphic,
)

S = math.sqrt(2.0)

SQUARE_SPEC = {
    "basis": [[S, 0.0], [0.0, S]],
    "vertices": [{"id": "v0", "pos": [0.0, 0.0]}],
    "edges": [
        {"u": "v0", "v": "v0", "offset": [1, 0]},
        {"u": "v0", "v": "v0", "offset": [0, 1]},
    ],
}


def honeycomb_spec():
    g = standard_lattice("honeycomb")
    return g.to_spec()


def test_load_square_spec_half_angles():
    g = load_graph(SQUARE_SPEC)
    assert g.num_vertices == 1 and g.num_edges == 2
    assert np.allclose(g.theta, math.pi / 4, atol=1e-12)


def test_load_accepts_json_string_and_rejects_garbage():
    g = load_graph(json.dumps(SQUARE_SPEC))
    assert g.num_edges == 2
    with pytest.raises(SchemaError):
        load_graph("{not json")


def test_perturbed_vertex_rejected():
    spec = honeycomb_spec()
    spec["vertices"][1]["pos"][0] += 0.3
    with pytest.raises(IsoradialityError):
        load_graph(spec)


def test_load_honeycomb_half_angles():
    g = load_graph(honeycomb_spec())
    assert np.allclose(g.theta, math.pi / 3, atol=1e-12)


def test_schema_errors():
    bad = dict(SQUARE_SPEC, edges=SQUARE_SPEC["edges"] + [
        {"u": "v0", "v": "v0", "offset": [1, 0]}])
    with pytest.raises(SchemaError):
        load_graph(bad)
    bad = dict(SQUARE_SPEC, edges=[{"u": "v0", "v": "zzz", "offset": [1, 0]}])
    with pytest.raises(SchemaError):
        load_graph(bad)
    bad = dict(SQUARE_SPEC, vertices=[{"id": "v0", "pos": [0, 0]},
                                      {"id": "v0", "pos": [1, 0]}])
    with pytest.raises(SchemaError):
        load_graph(bad)


@pytest.mark.parametrize("kind,theta,nv,ne", [
    ("square", math.pi / 4, 1, 2),
    ("triangular", math.pi / 6, 1, 3),
    ("honeycomb", math.pi / 3, 2, 3),
])
def test_standard_lattices(kind, theta, nv, ne):
    g = standard_lattice(kind)
    assert g.num_vertices == nv and g.num_edges == ne
    assert np.allclose(g.theta, theta, atol=1e-12)


def test_all_faces_radius_one(lattices):
    for g in lattices.values():
        faces, _, dart_cell = g.faces()
        for f, orbit in enumerate(faces):
            for d in orbit:
                cell = np.array(dart_cell[d], dtype=float)
                p = g.pos[g.dart_tail(d)] + cell @ g.basis
                # recover the face center in the traversal frame
                off = np.array(g.dart_face_offset[d], dtype=float) + cell
                c = g.face_center[f] + off @ g.basis
                assert abs(np.hypot(*(p - c)) - 1.0) < 1e-9


def test_rhombus_unit_sides(lattices):
    for g in lattices.values():
        for e, edge in enumerate(g.edges):
            pu = g.pos[edge.u]
            pv = g.pos[edge.v] + np.array(edge.offset, float) @ g.basis
            for c in (g.center_left[e], g.center_right[e]):
                assert abs(np.hypot(*(c - pu)) - 1.0) < 1e-9
                assert abs(np.hypot(*(c - pv)) - 1.0) < 1e-9


def test_dual_square_is_square():
    g = standard_lattice("square")
    d = dual(g)
    assert translate_isomorphic(g, d)


def test_dual_triangular_is_honeycomb_like():
    d = dual(standard_lattice("triangular"))
    assert d.num_vertices == 2 and d.num_edges == 3
    assert np.allclose(d.theta, math.pi / 3, atol=1e-12)


def test_dual_half_angles_complementary(lattices):
    for g in lattices.values():
        d = dual(g)
        # dual edge list is aligned with the primal one
        assert np.allclose(g.theta + d.theta, math.pi / 2, atol=1e-12)


def test_double_dual_isomorphic(lattices):
    for name, g in lattices.items():
        dd = dual(dual(g))
        assert translate_isomorphic(g, dd), name


def test_quotient_counts():
    g = standard_lattice("square")
    t1 = quotient(g, 1)
    assert t1.num_vertices == 1 and t1.num_edges == 2
    t2 = quotient(g, 2)
    assert t2.num_vertices == 4 and t2.num_edges == 8
    for n in (1, 2, 3):
        t = quotient(g, n)
        assert t.num_vertices == n * n * g.num_vertices
        assert t.num_edges == n * n * g.num_edges


def test_quotient_crossings_scale_linearly(lattices):
    for g in lattices.values():
        base = quotient(g, 1).total_crossings()
        for n in (2, 3):
            got = quotient(g, n).total_crossings()
            assert got == (n * base[0], n * base[1])


def test_quotient_of_one_has_offsets_as_wraps():
    g = standard_lattice("square")
    t = quotient(g, 1)
    assert sorted(e.wrap for e in t.edges) == [(0, 1), (1, 0)]


def test_generic_lattice_is_isoradial():
    g = skewed_honeycomb((0.9, 1.1, math.pi - 2.0))
    assert g.num_vertices == 2
    assert np.allclose(sorted(g.theta), sorted((0.9, 1.1, math.pi - 2.0)))
    with pytest.raises(ValueError):
        skewed_honeycomb((0.5, 0.5, 0.5))
