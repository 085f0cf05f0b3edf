import pytest

from hare.bounds import fast_score, similarity_score
from hare.compress import ReductionMap, extract_reduced_hamiltonian, flip, merge_event, reduction_function
from hare.engine import (
    RunReport,
    _top_edges,
    check_state,
    initialize,
    on_flip,
    on_merge,
    reduce_hamiltonian,
    run,
)
from hare.instances import random_instance
from hare.model import SKGraph, ising_to_sk
from hare.oracle import exact_ground_states
from hare.rng import Xoshiro256


def test_initialize_takes_every_edge_within_budget(running_graph):
    st = initialize(running_graph, 2)
    assert st.L == [(1, 2), (1, 3)]
    assert _top_edges(running_graph, st.A, 2) == [(1, 2), (1, 3)]
    assert st.fast(running_graph, (1, 2)) == 3 and st.fast(running_graph, (1, 3)) == 1


def test_initialize_empty_graph():
    st = initialize(SKGraph(3), 2)
    assert st.L == [] and set(st.A.values()) == {0}


@pytest.mark.parametrize("alpha", [0, -1, 1.5, True])
def test_initialize_rejects_bad_alpha(running_graph, alpha):
    with pytest.raises(ValueError):
        initialize(running_graph, alpha)


def test_run_running_example(running_graph):
    g, rmap, rep = run(running_graph)
    assert list(g.adj) == [g.field_node]
    assert rep.fixed_spins == 2 and rep.reduction_ratio_logical == 1.0
    assert rep.offset == -4
    f = reduction_function(g, rmap)
    assert f(()) == (1, 1)


def test_run_fixpoint_leaves_graph_alone():
    g = SKGraph.from_edges(5, {(1, 2): -1, (2, 3): -1, (3, 4): -1, (1, 4): -1})
    before = g.copy()
    _, _, rep = run(g)
    assert rep.merges == 0 and g == before


def test_report_fields():
    _, _, rep = run(ising_to_sk(random_instance(8, 1)))
    assert list(rep.to_dict()) == [
        "rounds", "merges", "flips", "weak_merges", "nodes_before", "nodes_after",
        "edges_before", "edges_after", "fixed_spins", "offset", "reduction_ratio_logical", "time_ms",
    ]
    assert isinstance(RunReport().to_dict()["time_ms"], float)


def test_on_flip_refreshes_correction():
    g = SKGraph.from_edges(4, {(1, 2): 2, (1, 3): 1, (2, 3): -4})
    rmap = ReductionMap(g.n_spins)
    st = initialize(g, 2)
    flip(g, rmap, 2)
    on_flip(st, g, 2)
    check_state(st, g)
    flip(g, rmap, 2)
    on_flip(st, g, 2)
    check_state(st, g)
    assert st.B == initialize(g, 2).B


def test_on_flip_isolated_node_marks_nothing_in_l():
    g = SKGraph.from_edges(4, {(1, 2): 2})
    st = initialize(g, 2)
    flip(g, ReductionMap(g.n_spins), 3)
    on_flip(st, g, 3)
    assert not st.at.get(3)


def test_on_merge_twins_update_neighbor_norm():
    g = SKGraph.from_edges(4, {(1, 3): 2, (2, 3): 5})
    st = initialize(g, 2)
    ev = merge_event(g, ReductionMap(g.n_spins), 1, 2)
    on_merge(st, g, ev)
    assert st.A[3] == 7
    check_state(st, g)


def test_on_merge_cancellation_lowers_norm():
    g = SKGraph.from_edges(5, {(1, 3): 2, (2, 3): -2, (3, 4): 1})
    st = initialize(g, 2)
    ev = merge_event(g, ReductionMap(g.n_spins), 1, 2)
    on_merge(st, g, ev)
    assert st.A[3] == 1
    check_state(st, g)


@pytest.mark.parametrize("seed", range(15))
def test_maintenance_matches_recomputation(seed):
    rng = Xoshiro256(seed)
    g = ising_to_sk(random_instance(6 + seed, seed, density=0.4))
    rmap = ReductionMap(g.n_spins)
    st = initialize(g, 1 + seed % 3)
    for _ in range(40):
        live = sorted(g.adj)
        if len(live) > 1 and rng.randbelow(3) == 0:
            a, b = live[rng.randbelow(len(live))], live[rng.randbelow(len(live))]
            if a != b:
                on_merge(st, g, merge_event(g, rmap, a, b))
        else:
            u = live[rng.randbelow(len(live))]
            flip(g, rmap, u)
            on_flip(st, g, u)
        check_state(st, g)
        for e in st.B:
            assert st.fast(g, e) == fast_score(g, *e)
            assert st.similarity_x2(g, e) == 2 * similarity_score(g, *e)


@pytest.mark.parametrize("weak", [True, False])
@pytest.mark.parametrize("seed", range(40))
def test_run_preserves_ground_energy(seed, weak):
    ham = random_instance(2 + seed % 11, seed)
    g, rmap, _ = run(ising_to_sk(ham), weak_ngs=weak, check=True)
    reduced, offset = extract_reduced_hamiltonian(g, rmap)
    orig = exact_ground_states(ham)
    red = exact_ground_states(reduced)
    assert orig.ground_energy == red.ground_energy + offset
    f = reduction_function(g, rmap)
    for y in red.ground_states:
        assert ham.energy(f(y)) == orig.ground_energy


@pytest.mark.parametrize("seed", range(20))
def test_second_pass_is_a_no_op(seed):
    first = reduce_hamiltonian(random_instance(3 + seed % 10, seed))
    second = reduce_hamiltonian(first.reduced)
    assert second.report.merges == 0
    assert second.reduced == first.reduced


def test_weak_merges_can_be_disabled():
    g = SKGraph.from_edges(5, {(1, 2): 2, (1, 3): 2, (2, 4): 2})
    _, _, rep = run(g.copy(), weak_ngs=False)
    assert rep.weak_merges == 0
    _, _, rep = run(g.copy(), weak_ngs=True)
    assert rep.merges > 0
