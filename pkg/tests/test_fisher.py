import math

import numpy as np
import pytest

from isodimer.elliptic import coupling
from isodimer.errors import NotAContourError
from isodimer.fisher import critical_long_weight, critical_weights, fisher_graph, \
    matchings_of_contour
from isodimer.graphs import quotient, standard_lattice
from isodimer.oracle import even_subgraphs, toroidal_ising_partition, toroidal_matchings


def test_decoration_counts(fishers):
    assert fishers["square"].num_vertices == 12      # one degree-4 vertex
    assert fishers["honeycomb"].num_vertices == 18   # two degree-3 vertices
    assert fishers["triangular"].num_vertices == 18  # one degree-6 vertex
    for fg in fishers.values():
        assert fg.num_vertices == 6 * fg.base.num_edges
        assert fg.num_vertices % 2 == 0


def test_every_vertex_degree_three(fishers):
    for fg in fishers.values():
        deg = [0] * fg.num_vertices
        for e in fg.edges:
            deg[e.u] += 1
            deg[e.v] += 1
        assert all(d == 3 for d in deg)


def test_faces_are_cellular(fishers):
    for fg in fishers.values():
        faces, _, _ = fg.faces()
        assert len(faces) == fg.num_edges - fg.num_vertices


def test_critical_weights():
    fg = fisher_graph(standard_lattice("square"))
    w = critical_weights(fg)
    for i, role in enumerate(fg.roles):
        if role == "long":
            assert w[i] == pytest.approx(1 + math.sqrt(2), rel=1e-14)
        else:
            assert w[i] == 1.0
    fg = fisher_graph(standard_lattice("triangular"))
    for i in fg.long_edges():
        assert fg.weights[i] == pytest.approx(2 + math.sqrt(3), rel=1e-14)


def test_weight_is_coth_of_coupling(lattices):
    for g in lattices.values():
        for t in g.theta:
            j = coupling(float(t), 0.0)
            assert abs(critical_long_weight(float(t)) - 1 / math.tanh(j)) < 1e-12


def test_long_edge_backmap(fishers):
    for fg in fishers.values():
        assert sorted(fg.long_edge.values()) == sorted(fg.long_base.keys())
        for base, idx in fg.long_edge.items():
            assert fg.roles[idx] == "long"
            assert fg.edges[idx].offset == fg.base.edges[base].offset


def test_partition_identity_at_enumeration_scale(fishers):
    # Z^J(G_n) = prod sinh(J_e) * (weighted matching count of the decoration)
    for name in ("square", "honeycomb"):
        fg = fishers[name]
        g = fg.base
        tg = quotient(g, 1)
        j = [coupling(float(t), 0.0) for t in g.theta]
        zj = toroidal_ising_partition(tg, j)
        sinh_prod = math.prod(math.sinh(j[e.base]) for e in tg.edges)
        _, z_dimer = toroidal_matchings(quotient(fg, 1), fg.weights)
        assert abs(zj - sinh_prod * z_dimer) < 1e-9 * zj


def test_contour_completions_square_cell(fishers):
    fg = fishers["square"]
    assert matchings_of_contour(fg, 1, []) == 2
    tg = quotient(fg.base, 1)
    for contour in even_subgraphs(tg.num_vertices, [(e.u, e.v) for e in tg.edges]):
        assert matchings_of_contour(fg, 1, contour) == 2


def test_contour_completions_two_by_two(fishers):
    fg = fishers["square"]
    assert matchings_of_contour(fg, 2, []) == 2 ** 4


def test_not_a_contour(fishers):
    fg = fishers["square"]
    with pytest.raises(NotAContourError):
        matchings_of_contour(fg, 2, [0])  # one non-loop edge has odd ends


def test_spec_roundtrip_has_roles(fishers):
    doc = fishers["square"].to_spec()
    roles = {rec["role"] for rec in doc["edges"]}
    assert roles == {"triangle", "link", "long"}
    longs = [rec for rec in doc["edges"] if rec["role"] == "long"]
    assert all(abs(rec["weight"] - (1 + math.sqrt(2))) < 1e-12 for rec in longs)
