import math

import numpy as np
import pytest

from isodimer.elliptic import coupling
from isodimer.errors import BudgetExceededError
from isodimer.graphs import dual, quotient, standard_lattice
from isodimer.oracle import (
    EnumerationBudget,
    enumerate_crsf,
    enumerate_matchings,
    even_subgraph_sum,
    even_subgraphs,
    ising_partition,
    toroidal_even_subgraph_sum,
    toroidal_ising_partition,
    toroidal_matchings,
)


def test_four_cycle_matchings():
    edges = [(0, 1), (1, 2), (2, 3), (3, 0)]
    count, total = enumerate_matchings(4, edges)
    assert count == 2 and total == 2.0


def test_weighted_matchings_and_marginals():
    edges = [(0, 1), (1, 2), (2, 3), (3, 0)]
    w = [2.0, 3.0, 5.0, 7.0]
    count, total, marg = enumerate_matchings(4, edges, w, marginals=True)
    assert count == 2
    assert total == pytest.approx(2 * 5 + 3 * 7)
    # marginals around each vertex sum to one
    for v in range(4):
        inc = [i for i, (a, b) in enumerate(edges) if v in (a, b)]
        assert sum(marg[i] for i in inc) == pytest.approx(1.0)


def test_matchings_forced_forbidden():
    edges = [(0, 1), (1, 2), (2, 3), (3, 0)]
    count, total = enumerate_matchings(4, edges, forced=[0])
    assert count == 1 and total == 1.0
    count, total = enumerate_matchings(4, edges, forbidden=[0, 2])
    assert count == 1


def test_matchings_budget():
    with pytest.raises(BudgetExceededError):
        enumerate_matchings(100, [])


def test_matchings_deterministic():
    g = standard_lattice("square")
    from isodimer.fisher import fisher_graph
    fg = fisher_graph(g)
    tg = quotient(fg, 1)
    a = toroidal_matchings(tg, fg.weights)
    b = toroidal_matchings(tg, fg.weights)
    assert a == b  # bit-identical reruns


def test_ising_single_vertex_and_single_edge():
    assert ising_partition(1, [], []) == pytest.approx(2.0)
    j = 0.37
    z = ising_partition(2, [(0, 1)], [j])
    assert z == pytest.approx(4 * math.cosh(j), rel=1e-14)


def test_ising_loop_edges():
    # a self-loop contributes a constant factor e^J
    z = ising_partition(1, [(0, 0)], [0.5])
    assert z == pytest.approx(2 * math.exp(0.5), rel=1e-14)


def test_ising_budget():
    with pytest.raises(BudgetExceededError):
        ising_partition(25, [], [])


def test_even_subgraphs_empty_graph():
    assert even_subgraph_sum(1, [], []) == 1.0


def test_even_subgraph_loops_unconstrained():
    subs = even_subgraphs(1, [(0, 0), (0, 0)])
    assert len(subs) == 4


def test_high_temperature_identity_exact():
    # Z^J = prod cosh * 2^V * sum over contours of prod tanh, exactly
    rng = np.random.default_rng(11)
    for name, n in (("square", 1), ("square", 2), ("honeycomb", 1),
                    ("triangular", 1)):
        g = standard_lattice(name)
        tg = quotient(g, n)
        j = [float(rng.uniform(0.2, 1.2)) for _ in g.theta]
        zj = toroidal_ising_partition(tg, j)
        x = [math.tanh(v) for v in j]
        rhs = toroidal_even_subgraph_sum(tg, x)
        for e in tg.edges:
            rhs *= math.cosh(j[e.base])
        rhs *= 2 ** tg.num_vertices
        assert abs(zj - rhs) < 1e-12 * zj, (name, n)


def test_low_temperature_identity_on_dual():
    # Z^J = prod e^J * 2 * sum over null-homologous dual contours of e^{-2J};
    # on the torus only contours bounding mod 2 arise from spin interfaces
    rng = np.random.default_rng(12)
    for name, n in (("square", 1), ("square", 2), ("honeycomb", 1)):
        g = standard_lattice(name)
        gd = dual(g)
        tg = quotient(g, n)
        tgd = quotient(gd, n)
        j = [float(rng.uniform(0.2, 1.2)) for _ in g.theta]
        zj = toroidal_ising_partition(tg, j)
        x = [math.exp(-2 * v) for v in j]  # dual edge list is primal-aligned
        contour_sum = toroidal_even_subgraph_sum(tgd, x, homology_trivial=True)
        rhs = 2.0 * contour_sum
        for e in tg.edges:
            rhs *= math.exp(j[e.base])
        assert abs(zj - rhs) < 1e-12 * zj, (name, n)


def test_even_subgraph_budget():
    with pytest.raises(BudgetExceededError):
        even_subgraph_sum(2, [(0, 1)] * 21, [1.0] * 21)


def test_crsf_square_cell():
    tg = quotient(standard_lattice("square"), 1)
    forests = enumerate_crsf(tg)
    assert len(forests) == 2
    homs = sorted(f.homologies[0] for f in forests)
    assert homs == [(0, 1), (1, 0)]


def test_crsf_components_unicyclic_and_parallel():
    for name in ("honeycomb", "triangular"):
        tg = quotient(standard_lattice(name), 1)
        for forest in enumerate_crsf(tg):
            assert len(forest.edges) == tg.num_vertices
            for comp in forest.components:
                verts = set()
                for e in comp:
                    verts.update((tg.edges[e].u, tg.edges[e].v))
                assert len(comp) == len(verts)  # unicyclic
            assert len({h for h in forest.homologies}) == 1  # parallel cycles


def test_crsf_budget():
    big = EnumerationBudget(max_crsf_edges=2)
    tg = quotient(standard_lattice("triangular"), 1)
    with pytest.raises(BudgetExceededError):
        enumerate_crsf(tg, budget=big)
