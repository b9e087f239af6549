import numpy as np
import pytest

from ecoroutes.instance import (ContainerSpec, DemandLedger, InstanceError,
                                Instance, derive_trial_seed, generate_instance,
                                instance_checksum, read_instance, total_waste,
                                write_instance)


def protocol_instance(net, seed=7):
    """Seven demand nodes, four modalities, demands in [1, 9], 4x1kg blocks."""
    return generate_instance(net, depot=1, demand_nodes=list(range(2, 9)),
                             modalities=4, demand_range=(1, 9),
                             spec=ContainerSpec(1, 4), seed=seed)


def test_container_spec_capacity():
    spec = ContainerSpec(block_capacity=1, block_count=4)
    assert spec.total_capacity == 4
    with pytest.raises(InstanceError):
        ContainerSpec(0, 4)
    with pytest.raises(InstanceError):
        ContainerSpec(1, 0)


def test_generate_protocol_ranges(sioux_falls):
    inst = protocol_instance(sioux_falls)
    assert inst.demands.shape == (7, 4)
    assert inst.demands.min() >= 1 and inst.demands.max() <= 9
    assert inst.container.total_capacity == 4


def test_generate_rejects_zero_range(sioux_falls):
    with pytest.raises(InstanceError, match="positive"):
        generate_instance(sioux_falls, 1, [2, 3], 2, (0, 0),
                          ContainerSpec(1, 2), seed=1)


def test_generate_rejects_depot_in_demand_nodes(sioux_falls):
    with pytest.raises(InstanceError, match="depot"):
        generate_instance(sioux_falls, 1, [1, 2], 2, (1, 2),
                          ContainerSpec(1, 2), seed=1)
    with pytest.raises(InstanceError, match="empty"):
        generate_instance(sioux_falls, 1, [], 2, (1, 2),
                          ContainerSpec(1, 2), seed=1)


def test_generate_deterministic(sioux_falls):
    a = write_instance(protocol_instance(sioux_falls, seed=123))
    b = write_instance(protocol_instance(sioux_falls, seed=123))
    assert a == b
    c = write_instance(protocol_instance(sioux_falls, seed=124))
    assert a != c


def test_trial_seed_derivation_stable():
    assert derive_trial_seed(42, 1) == derive_trial_seed(42, 1)
    assert derive_trial_seed(42, 1) != derive_trial_seed(42, 2)
    assert derive_trial_seed(41, 1) != derive_trial_seed(42, 1)


def test_total_waste(sioux_falls):
    demands = np.array([[2, 0, 1, 1], [0, 0, 0, 0], [1, 2, 3, 4]])
    inst = Instance(sioux_falls, 1, [2, 3, 4], 4, demands, ContainerSpec(1, 4))
    totals = total_waste(inst)
    assert totals.per_node == {2: 4, 3: 0, 4: 10}
    assert totals.per_modality == [3, 2, 4, 5]
    assert totals.grand == 14
    assert totals.grand == sum(totals.per_node.values()) == sum(totals.per_modality)


def test_round_trip_identity(sioux_falls):
    inst = protocol_instance(sioux_falls, seed=99)
    again = read_instance(write_instance(inst))
    assert again == inst
    assert write_instance(again) == write_instance(inst)


def test_round_trip_inline_network(standin):
    inst = generate_instance(standin, 17, [1, 11, 19], 2, (1, 3),
                             ContainerSpec(2, 3), seed=5)
    again = read_instance(write_instance(inst))
    assert again == inst


def test_read_rejects_negative_demand(sioux_falls):
    import json
    d = json.loads(write_instance(protocol_instance(sioux_falls)))
    d["demands"]["2"][0] = -1
    with pytest.raises(InstanceError, match=r"demands\[2\]\[0\]"):
        read_instance(json.dumps(d))


def test_read_rejects_missing_field():
    with pytest.raises(InstanceError, match="network"):
        read_instance("{}")


def test_read_rejects_unknown_demand_node(sioux_falls):
    import json
    d = json.loads(write_instance(protocol_instance(sioux_falls)))
    d["demands"]["999"] = [1, 1, 1, 1]
    with pytest.raises(InstanceError, match="999"):
        read_instance(json.dumps(d))


def test_checksum_ignores_lambda_and_name(sioux_falls):
    a = protocol_instance(sioux_falls, seed=3)
    b = Instance(a.network, a.depot, a.demand_nodes, a.modalities, a.demands,
                 a.container, lam="1/2", name="other")
    assert instance_checksum(a) == instance_checksum(b)
    c = Instance(a.network, a.depot, a.demand_nodes, a.modalities,
                 a.demands + 1, a.container)
    assert instance_checksum(a) != instance_checksum(c)


def test_ledger_clamps_and_tracks(sioux_falls):
    inst = protocol_instance(sioux_falls, seed=11)
    ledger = DemandLedger(inst)
    node = inst.demand_nodes[0]
    start = int(ledger.residual_at(node)[0])
    ledger.collect(node, 0, start)
    assert ledger.residual_at(node)[0] == 0
    with pytest.raises(ValueError, match="over-collection"):
        ledger.collect(node, 0, 1)
    with pytest.raises(ValueError):
        ledger.collect(node, 1, -1)
    assert ledger.total_remaining() == int(inst.demands.sum()) - start
    assert not ledger.is_cleared()


def test_ledger_universe_and_positive_nodes(sioux_falls):
    demands = np.array([[1, 1], [2, 0]])
    inst = Instance(sioux_falls, 1, [2, 3], 2, demands, ContainerSpec(1, 2))
    ledger = DemandLedger(inst)
    assert ledger.has_all_modalities(2)
    assert not ledger.has_all_modalities(3)
    assert ledger.positive_nodes() == [2, 3]
    ledger.collect(3, 0, 2)
    assert ledger.positive_nodes() == [2]
