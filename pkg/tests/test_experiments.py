import numpy as np
import pytest

from ffdyn.dynamics import IterateCache, degree_sequence
from ffdyn.dsl import parse_map
from ffdyn.errors import SamplingExhausted
from ffdyn.experiments import (
    ExperimentConfig, IterateStore, is_dominant, make_config, random_map,
    read_config_file, sample_sections,
)


def test_sections_are_coprime_of_exact_degree_and_reproducible():
    a = sample_sections(n=2, degree=2, count=100, B=5, seed=3)
    b = sample_sections(n=2, degree=2, count=100, B=5, seed=3)
    assert a == b
    assert all(P.D == 2 for P in a)
    assert len(set(a)) > 90


def test_degenerate_box_exhausts_sampling():
    with pytest.raises(SamplingExhausted):
        sample_sections(n=1, degree=2, count=1, B=0, seed=0)


def test_config_invariants():
    with pytest.raises(ValueError):
        ExperimentConfig(degree=0)
    with pytest.raises(ValueError):
        ExperimentConfig(count=0)


def test_config_file_and_overrides(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("seed = 4\nM = 5  # short run\npoint = point P1: [t, 1]\n"
                    "point = point P1: [1, t]\nmap = map P1: [x^2, y^2]\n")
    cfg = make_config(read_config_file(path), {"M": 7})
    assert cfg.seed == 4 and cfg.M == 7
    assert len(cfg.points) == 2
    with pytest.raises(ValueError):
        make_config({"colour": "blue"})


def test_random_maps_have_requested_bidegree():
    rng = np.random.default_rng(0)
    for d, e in [(2, 0), (2, 1), (3, 0), (3, 1)]:
        f = random_map(rng, 2, d, e)
        assert f.bidegree == (d, e)
        assert is_dominant(f, rng)
    assert not is_dominant(parse_map("map P2: [x^2, x*y, y^2]"), rng)


def test_iterate_store_round_trip(tmp_path):
    f = parse_map("map P2: [x^2 - t*y*z, y^2 + z^2, 3*z^2]")
    store = IterateStore(tmp_path)
    first = degree_sequence(f, 4, cache=IterateCache(f, store=store))
    assert any(tmp_path.iterdir())
    again = IterateCache(f, store=IterateStore(tmp_path))
    assert again.get(4) == IterateCache(f).get(4)
    assert degree_sequence(f, 4, cache=again).d == first.d
