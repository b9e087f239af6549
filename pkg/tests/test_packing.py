import itertools

import numpy as np
import pytest

from ecoroutes.instance import ContainerSpec, DemandLedger, Instance
from ecoroutes.packing import (ConfigError, adapted_config,
                               block_requirement_row, block_requirements,
                               diversified_config, min_visits)
from oracles import simulate_full_container_visits


def test_block_requirements_ceilings(sioux_falls):
    demands = np.array([[9, 0], [5, 2]])
    inst = Instance(sioux_falls, 1, [2, 3], 2, demands, ContainerSpec(1, 4))
    q = block_requirements(DemandLedger(inst), ContainerSpec(1, 4))
    assert q.tolist() == [[9, 0], [5, 2]]
    q2 = block_requirements(DemandLedger(inst), ContainerSpec(2, 4))
    assert q2.tolist() == [[5, 0], [3, 1]]
    assert block_requirement_row([5, 0, 1], ContainerSpec(2, 4)) == [3, 0, 1]


def test_requirement_zero_iff_zero_residual(sioux_falls):
    demands = np.array([[3, 0, 7, 1]])
    inst = Instance(sioux_falls, 1, [2], 4, demands, ContainerSpec(2, 4))
    q = block_requirements(DemandLedger(inst), inst.container)
    assert ((q == 0) == (demands == 0)).all()


def test_min_visits():
    spec = ContainerSpec(1, 4)
    assert min_visits(9, spec) == 3
    assert min_visits(4, spec) == 1
    assert min_visits(0, spec) == 0
    with pytest.raises(ValueError):
        min_visits(-1, spec)


def test_min_visits_matches_simulation():
    spec = ContainerSpec(1, 4)
    for q in range(0, 30):
        assert min_visits(q, spec) == simulate_full_container_visits(q, 4)


def test_diversified_configs():
    assert diversified_config(ContainerSpec(1, 4), 4).blocks == (1, 1, 1, 1)
    assert diversified_config(ContainerSpec(1, 6), 4).blocks == (2, 2, 1, 1)
    assert diversified_config(ContainerSpec(1, 9), 4).blocks == (3, 2, 2, 2)
    with pytest.raises(ConfigError):
        diversified_config(ContainerSpec(1, 3), 4)


def test_adapted_case_boundaries():
    spec = ContainerSpec(1, 4)
    # block sum exactly fills the container
    assert adapted_config(1, [2, 0, 1, 1], spec).blocks == (2, 0, 1, 1)
    # one modality overflows the container: it takes every block
    assert adapted_config(1, [5, 1, 0, 0], spec).blocks == (4, 0, 0, 0)
    # everything fits with room to spare: copy the requirement row
    assert adapted_config(1, [1, 0, 1, 0], spec).blocks == (1, 0, 1, 0)


def test_adapted_case1_lowest_modality_wins():
    spec = ContainerSpec(1, 4)
    assert adapted_config(1, [0, 4, 9, 0], spec).blocks == (0, 4, 0, 0)


def test_adapted_case2_greedy_split():
    spec = ContainerSpec(1, 4)
    assert adapted_config(1, [3, 3, 1, 0], spec).blocks == (3, 1, 0, 0)
    assert adapted_config(1, [2, 3, 1, 1], spec).blocks == (1, 3, 0, 0)
    # ties: lower modality index first
    assert adapted_config(1, [2, 2, 2, 0], spec).blocks == (2, 2, 0, 0)


def test_adapted_rejects_empty_row():
    with pytest.raises(ConfigError):
        adapted_config(1, [0, 0, 0, 0], ContainerSpec(1, 4))


def test_adapted_properties_exhaustive():
    """Block budget, demand-matching and purity over every small q row."""
    spec = ContainerSpec(1, 4)
    L = spec.block_count
    for q in itertools.product(range(0, 7), repeat=4):
        if not any(q):
            continue
        cfg = adapted_config(1, list(q), spec)
        assert sum(cfg.blocks) <= L
        if max(q) >= L or sum(q) >= L:
            assert sum(cfg.blocks) == L
        if max(q) < L:  # cases 2 and 3 never over-allocate a modality
            assert all(n <= qk for n, qk in zip(cfg.blocks, q))
        assert cfg.blocks == adapted_config(1, list(q), spec).blocks
