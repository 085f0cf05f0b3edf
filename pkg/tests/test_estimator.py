import numpy as np
import pytest
from sklearn.base import clone
from sklearn.exceptions import NotFittedError

from hare.estimator import HamiltonianReducer
from hare.instances import random_instance
from hare.model import IsingHamiltonian, ModelError, QuboInstance
from hare.oracle import exact_ground_states
from hare.validation import check_alpha, check_hamiltonian


def test_params_and_clone():
    est = HamiltonianReducer(alpha=3, weak_ngs=False)
    assert est.get_params() == {"alpha": 3, "weak_ngs": False}
    assert clone(est).get_params() == est.get_params()


def test_fit_transform_inverse(running_example):
    est = HamiltonianReducer()
    reduced = est.fit_transform(running_example)
    assert reduced == IsingHamiltonian(0)
    assert est.offset_ == -4 and est.report_.fixed_spins == 2
    assert est.inverse_transform(np.zeros(0, dtype=int)).tolist() == [1, 1]


def test_not_fitted():
    with pytest.raises(NotFittedError):
        HamiltonianReducer().transform(IsingHamiltonian(1))


def test_transform_requires_fitted_instance(running_example):
    est = HamiltonianReducer().fit(running_example)
    with pytest.raises(ModelError):
        est.transform(IsingHamiltonian(2))


def test_inverse_transform_batches():
    ham = random_instance(10, 4)
    est = HamiltonianReducer().fit(ham)
    red = exact_ground_states(est.reduced_)
    ys = np.array(red.ground_states, dtype=int).reshape(len(red.ground_states), est.reduced_.n)
    xs = est.inverse_transform(ys)
    best = exact_ground_states(ham).ground_energy
    assert xs.shape == (len(ys), 10)
    assert all(ham.energy(tuple(x)) == best for x in xs)
    with pytest.raises(ModelError):
        est.inverse_transform(np.ones((1, est.reduced_.n + 1), dtype=int))


def test_array_input_matches_object_input():
    h = np.array([1, 0, -2])
    j = np.array([[0, 3, 0], [3, 0, -1], [0, -1, 0]])
    ham, offset = check_hamiltonian((h, j))
    assert offset == 0
    assert ham == IsingHamiltonian.from_terms(3, {1: 1, 3: -2}, {(1, 2): 3, (2, 3): -1})
    upper = np.triu(j)
    assert check_hamiltonian((h, upper))[0] == ham


@pytest.mark.parametrize("bad", [
    (np.array([1.0, 0.0]), np.zeros((2, 2), dtype=int)),
    (np.array([1, 0]), np.zeros((3, 3), dtype=int)),
    (np.array([1, 0]), np.eye(2, dtype=int)),
    (np.array([1, 0]), np.array([[0, 1], [2, 0]])),
    "not a hamiltonian",
])
def test_bad_inputs_rejected(bad):
    with pytest.raises(ModelError):
        check_hamiltonian(bad)


def test_qubo_input_gives_binary_solutions():
    q = QuboInstance.from_terms(2, {(1, 1): -3, (1, 2): 4, (2, 2): -1})
    est = HamiltonianReducer().fit(q)
    red = exact_ground_states(est.reduced_)
    x = est.inverse_transform(np.array(red.ground_states[0], dtype=int).reshape(est.reduced_.n))
    assert set(x.tolist()) <= {0, 1}
    assert q.value(tuple(x)) == -3
    assert 4 * -3 == red.ground_energy + est.offset_


@pytest.mark.parametrize("alpha", [0, 2.0, True, "2"])
def test_check_alpha(alpha):
    with pytest.raises(ModelError):
        check_alpha(alpha)
    assert check_alpha(np.int64(3)) == 3
