import itertools

import numpy as np
import pytest

from ffdyn.dynamics import (
    Budget, IterateCache, certify_coprime, compose, degree_sequence,
    degree_sequence_by_lines, delta_estimate, extend_by_lines, monomial_degree_sequence,
)
from ffdyn.errors import DimensionMismatch, ResourceLimit
from ffdyn.exact import unipoly
from ffdyn.experiments import random_map
from ffdyn.projective import MonomialMap, SelfMapFF

t = unipoly([0, 1])
EXAMPLE = SelfMapFF.monomial([[2, 0, 1], [0, 3, 0], [0, 0, 3]])
CREMONA = SelfMapFF.monomial([[0, 1, 1], [1, 0, 1], [1, 1, 0]])


def test_cremona_squares_to_identity():
    assert compose(CREMONA, CREMONA) == SelfMapFF.identity(2)


def test_example_composed_with_itself():
    assert compose(EXAMPLE, EXAMPLE).bidegree == (9, 0)


def test_identity_is_neutral():
    f = random_map(np.random.default_rng(3), 2, 2, 1)
    assert compose(f, SelfMapFF.identity(2)) == f
    with pytest.raises(DimensionMismatch):
        compose(f, SelfMapFF.identity(1))


def test_degree_sequences_from_examples():
    seq = degree_sequence(CREMONA, 6)
    assert seq.d == [2, 1, 2, 1, 2, 1] and seq.e == [0] * 6
    assert degree_sequence(EXAMPLE, 4).d == [3, 9, 27, 81]
    g = SelfMapFF.from_terms(1, [{(2, 0): t}, {(0, 2): 1}])
    seq = degree_sequence(g, 3)
    assert seq.d == [2, 4, 8] and seq.e == [1, 3, 7]


def test_monomial_examples():
    assert monomial_degree_sequence([[2, 0, 1], [0, 3, 0], [0, 0, 3]], 3).d == [3, 9, 27]
    assert monomial_degree_sequence([[0, 1, 1], [1, 0, 1], [1, 1, 0]], 4).d == [2, 1, 2, 1]
    assert monomial_degree_sequence(np.eye(3, dtype=int).tolist(), 5).d == [1] * 5


def random_exponent_matrix(rng, n, d):
    monos = [m for m in itertools.product(range(d + 1), repeat=n + 1) if sum(m) == d]
    while True:
        B = [list(monos[i]) for i in rng.choice(len(monos), size=n + 1)]
        if abs(round(np.linalg.det(np.array(B, dtype=float)))) > 0:
            return B


@pytest.mark.parametrize("n", [1, 2, 3])
def test_monomial_fast_path_matches_compose(n):
    rng = np.random.default_rng(n)
    for _ in range(4):
        B = random_exponent_matrix(rng, n, int(rng.integers(2, 4)))
        f = SelfMapFF.monomial(B)
        fast = monomial_degree_sequence(MonomialMap.reduced(B), 6)
        M = 6 if f.d ** 6 <= 10 ** 4 else 4
        assert degree_sequence(f, M).d == fast.d[:M]


def test_morphism_degrees_are_powers():
    f = SelfMapFF.from_terms(2, [{(2, 0, 0): 1, (0, 1, 1): t}, {(0, 2, 0): 1}, {(0, 0, 2): 1}])
    assert degree_sequence(f, 4).d == [2, 4, 8, 16]


def test_delta_estimates():
    assert delta_estimate([3, 9, 27, 81]).exact == 3
    assert delta_estimate([3, 9, 27, 81]).final == 3.0
    assert delta_estimate([2, 1, 2, 1, 2, 1]).exact == 1
    assert delta_estimate([1]).value == 1
    est = delta_estimate([2, 3, 5, 8, 13, 21, 34, 55])
    assert est.exact is None
    assert est.value == pytest.approx(max(13 / 8, 21 / 13, 34 / 21, 55 / 34))
    assert min(est.root_estimates + est.ratio_estimates) >= 1


def test_delta_invariant_under_coordinate_permutation():
    rng = np.random.default_rng(8)
    f = random_map(rng, 2, 2, 0)
    perm = [2, 0, 1]
    inv = [perm.index(i) for i in range(3)]
    terms = []
    for i in inv:
        terms.append({tuple(xs[p] for p in perm): c for xs, c in f.grouped_terms()[i]})
    g = SelfMapFF.from_terms(2, terms)
    assert delta_estimate(degree_sequence(f, 5)).value == \
        delta_estimate(degree_sequence(g, 5)).value


def test_budget_returns_partial():
    with pytest.raises(ResourceLimit) as err:
        degree_sequence(EXAMPLE, 8, Budget(max_degree=100))
    assert err.value.partial.d == [3, 9, 27, 81]
    assert not err.value.partial.complete


def test_line_probes_match_exact_entries():
    rng = np.random.default_rng(4)
    for n, d, e in [(1, 3, 1), (2, 2, 1), (2, 2, 0), (2, 3, 0)]:
        f = random_map(rng, n, d, e)
        exact = degree_sequence(f, 4).d
        assert degree_sequence_by_lines(f, 4).d == exact
    assert degree_sequence_by_lines(CREMONA, 8).d == [2, 1] * 4


def test_extension_keeps_exact_entries_and_flags_the_rest():
    try:
        degree_sequence(EXAMPLE, 7, Budget(max_degree=100))
    except ResourceLimit as exc:
        seq = extend_by_lines(exc.partial, EXAMPLE, 7)
    assert seq.d == [3 ** m for m in range(1, 8)]
    assert seq.certified == ["exact"] * 4 + ["probabilistic"] * 3


def test_submultiplicative_on_random_maps():
    rng = np.random.default_rng(12)
    for _ in range(6):
        f = random_map(rng, 2, int(rng.integers(2, 4)), int(rng.integers(0, 2)))
        seq = degree_sequence(f, 4)
        assert seq.submultiplicativity_violations() == []


def test_coprimality_certificate():
    f = SelfMapFF.from_terms(3, [{(2, 0, 0, 0): 1}, {(0, 2, 0, 0): 1},
                                 {(0, 0, 2, 0): 1}, {(0, 0, 0, 2): t}])
    assert certify_coprime(f)
    shared = SelfMapFF.from_terms(3, [{(1, 1, 0, 0): 1}, {(1, 0, 1, 0): 1},
                                      {(1, 0, 0, 1): 1}, {(2, 0, 0, 0): 1}],
                                  remove_content=False)
    assert not certify_coprime(shared)


def test_probabilistic_strategy_for_p3():
    f = SelfMapFF.from_terms(3, [{(0, 1, 1, 0): 1}, {(1, 0, 1, 0): 1},
                                 {(1, 1, 0, 0): 1}, {(0, 0, 0, 2): 1}])
    cache = IterateCache(f)
    seq = degree_sequence(f, 3, cache=cache)
    assert seq.d[0] == 2
    assert set(seq.certified) <= {"exact", "probabilistic"}
