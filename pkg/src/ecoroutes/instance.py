"""Problem instances: demands, container spec, depot, and serialization.

All demands are integer kilograms.  Randomness flows through one named
generator (numpy PCG64 seeded via SeedSequence), so a seed fully determines
an instance on every platform.
"""

import hashlib
import json
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .network import Network, bundled_sioux_falls, parse_edge_list


class InstanceError(ValueError):
    """Invalid instance data; message carries the offending field path."""


@dataclass(frozen=True)
class ContainerSpec:
    """A container: `block_count` blocks, each holding `block_capacity` kg."""

    block_capacity: int
    block_count: int

    def __post_init__(self):
        if self.block_capacity < 1:
            raise InstanceError("container.block_capacity: must be >= 1")
        if self.block_count < 1:
            raise InstanceError("container.block_count: must be >= 1")

    @property
    def total_capacity(self):
        return self.block_capacity * self.block_count


class Instance:
    """One collection problem: network, depot, demand table, container, lambda."""

    def __init__(self, network, depot, demand_nodes, modalities, demands,
                 container, lam=Fraction(1), name="", seed=None):
        self.network = network
        self.depot = depot
        self.demand_nodes = list(demand_nodes)
        self.modalities = int(modalities)
        self.demands = np.asarray(demands, dtype=np.int64)
        self.container = container
        self.lam = Fraction(lam)
        self.name = name
        self.seed = seed
        self._check()
        self._node_row = {j: r for r, j in enumerate(self.demand_nodes)}

    def _check(self):
        node_set = set(self.network.nodes)
        if self.depot not in node_set:
            raise InstanceError(f"depot: node {self.depot} not in network")
        if not self.demand_nodes:
            raise InstanceError("demand_nodes: must not be empty")
        if len(set(self.demand_nodes)) != len(self.demand_nodes):
            raise InstanceError("demand_nodes: duplicate node id")
        for j in self.demand_nodes:
            if j not in node_set:
                raise InstanceError(f"demand_nodes: node {j} not in network")
            if j == self.depot:
                raise InstanceError(f"demand_nodes: depot {j} listed as demand node")
        if self.modalities < 1:
            raise InstanceError("modalities: must be >= 1")
        if self.demands.shape != (len(self.demand_nodes), self.modalities):
            raise InstanceError(
                f"demands: shape {self.demands.shape} does not match "
                f"({len(self.demand_nodes)}, {self.modalities})")
        neg = np.argwhere(self.demands < 0)
        if len(neg):
            r, k = neg[0]
            raise InstanceError(
                f"demands[{self.demand_nodes[r]}][{k}]: negative value "
                f"{int(self.demands[r, k])}")
        if not self.demands.any():
            raise InstanceError("demands: at least one entry must be positive")
        if not (0 <= self.lam <= 1):
            raise InstanceError(f"lambda: {self.lam} outside [0, 1]")

    def row_of(self, node):
        """Row index of a demand node in the demand table."""
        return self._node_row[node]

    def demand_at(self, node):
        return self.demands[self._node_row[node]]

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (self.network == other.network
                and self.depot == other.depot
                and self.demand_nodes == other.demand_nodes
                and self.modalities == other.modalities
                and np.array_equal(self.demands, other.demands)
                and self.container == other.container
                and self.lam == other.lam
                and self.name == other.name
                and self.seed == other.seed)

    def __repr__(self):
        return (f"Instance({self.name!r}, |J\\O|={len(self.demand_nodes)}, "
                f"|K|={self.modalities}, c={self.container.block_capacity}, "
                f"|L|={self.container.block_count})")


class DemandLedger:
    """Residual demand during one solve run.  Single-owner, mutable.

    Residuals start at the instance demands and only ever decrease; a
    collection event can never drive an entry below zero.
    """

    def __init__(self, inst):
        self.inst = inst
        self.residual = inst.demands.copy()

    def residual_at(self, node):
        return self.residual[self.inst.row_of(node)]

    def collect(self, node, modality_index, kg):
        """Remove `kg` of one modality at `node`; returns kg for chaining."""
        if kg < 0:
            raise ValueError("cannot collect a negative amount")
        r = self.inst.row_of(node)
        if kg > self.residual[r, modality_index]:
            raise ValueError(
                f"over-collection at node {node}, modality {modality_index + 1}: "
                f"{kg} > residual {int(self.residual[r, modality_index])}")
        self.residual[r, modality_index] -= kg
        return kg

    def has_all_modalities(self, node):
        return bool((self.residual_at(node) > 0).all())

    def positive_nodes(self):
        """Demand nodes that still hold any residual, in table order."""
        return [j for j in self.inst.demand_nodes if self.residual_at(j).any()]

    def is_cleared(self):
        return not self.residual.any()

    def total_remaining(self):
        return int(self.residual.sum())


def generate_instance(net, depot, demand_nodes, modalities, demand_range,
                      spec, seed, lam=Fraction(1), name=""):
    """Draw each demand entry independently, uniform integer in [lo, hi], from PCG64(seed)."""
    lo, hi = demand_range
    if lo < 0 or hi < lo:
        raise InstanceError(f"demand_range: invalid interval [{lo}, {hi}]")
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed)))
    w = rng.integers(lo, hi, size=(len(demand_nodes), modalities), endpoint=True,
                     dtype=np.int64)
    return Instance(net, depot, demand_nodes, modalities, w, spec,
                    lam=lam, name=name or f"generated-s{seed}", seed=seed)


def trial_seed_sequence(master_seed, trial_index):
    """Documented splittable scheme: SeedSequence(master, spawn_key=(trial,))."""
    return np.random.SeedSequence(entropy=master_seed, spawn_key=(trial_index,))


def derive_trial_seed(master_seed, trial_index):
    """A single 63-bit integer seed for re-running one trial in isolation."""
    return int(trial_seed_sequence(master_seed, trial_index).generate_state(1)[0] >> 1)


@dataclass(frozen=True)
class WasteTotals:
    per_node: dict      # node id -> total kg over modalities
    per_modality: list  # kg per modality, index 0 = modality 1
    grand: int


def total_waste(inst):
    """Per-node totals, per-modality totals, and the grand total."""
    per_node = {j: int(inst.demands[r].sum()) for r, j in enumerate(inst.demand_nodes)}
    per_modality = [int(x) for x in inst.demands.sum(axis=0)]
    return WasteTotals(per_node=per_node, per_modality=per_modality,
                       grand=int(inst.demands.sum()))


# -- serialization -----------------------------------------------------------

FORMAT_VERSION = 1


def _lambda_to_doc(lam):
    return str(Fraction(lam))


def _lambda_from_doc(value, path="lambda"):
    try:
        if isinstance(value, float):
            return Fraction(str(value))
        return Fraction(value)
    except (ValueError, ZeroDivisionError, TypeError):
        raise InstanceError(f"{path}: cannot parse {value!r} as a rational") from None


def write_instance(inst):
    """Serialize to the canonical instance document (a JSON string)."""
    if inst.network.name == "sioux-falls":
        net_doc = {"bundle": "sioux-falls"}
    else:
        net_doc = {"edge_list": inst.network.to_edge_list(), "name": inst.network.name}
    doc = {
        "format": FORMAT_VERSION,
        "name": inst.name,
        "network": net_doc,
        "depot": inst.depot,
        "demand_nodes": list(inst.demand_nodes),
        "modalities": inst.modalities,
        "demands": {str(j): [int(x) for x in inst.demands[r]]
                    for r, j in enumerate(inst.demand_nodes)},
        "container": {"block_capacity": inst.container.block_capacity,
                      "block_count": inst.container.block_count},
        "lambda": _lambda_to_doc(inst.lam),
    }
    if inst.seed is not None:
        doc["seed"] = inst.seed
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


def _require(doc, key, path):
    if key not in doc:
        raise InstanceError(f"{path}{key}: missing field")
    return doc[key]


def read_instance(text):
    """Parse an instance document; raises InstanceError naming the bad field."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceError(f"document is not valid JSON: {e}") from None
    if not isinstance(doc, dict):
        raise InstanceError("document root must be an object")

    net_doc = _require(doc, "network", "")
    if "bundle" in net_doc:
        if net_doc["bundle"] != "sioux-falls":
            raise InstanceError(f"network.bundle: unknown bundle {net_doc['bundle']!r}")
        net = bundled_sioux_falls()
    elif "edge_list" in net_doc:
        net = parse_edge_list(net_doc["edge_list"], name=net_doc.get("name", ""))
    else:
        raise InstanceError("network: needs 'bundle' or 'edge_list'")

    depot = _require(doc, "depot", "")
    demand_nodes = _require(doc, "demand_nodes", "")
    modalities = _require(doc, "modalities", "")
    demands_doc = _require(doc, "demands", "")
    container_doc = _require(doc, "container", "")
    spec = ContainerSpec(
        block_capacity=_require(container_doc, "block_capacity", "container."),
        block_count=_require(container_doc, "block_count", "container."))

    rows = []
    for j in demand_nodes:
        key = str(j)
        if key not in demands_doc:
            raise InstanceError(f"demands[{j}]: missing row")
        row = demands_doc[key]
        if len(row) != modalities:
            raise InstanceError(f"demands[{j}]: expected {modalities} entries, got {len(row)}")
        for k, x in enumerate(row):
            if not isinstance(x, int):
                raise InstanceError(f"demands[{j}][{k}]: not an integer")
            if x < 0:
                raise InstanceError(f"demands[{j}][{k}]: negative value {x}")
        rows.append(row)
    extra = set(demands_doc) - {str(j) for j in demand_nodes}
    if extra:
        raise InstanceError(f"demands[{sorted(extra)[0]}]: unknown node id")

    return Instance(net, depot, demand_nodes, modalities, np.array(rows, dtype=np.int64),
                    spec, lam=_lambda_from_doc(doc.get("lambda", 1)),
                    name=doc.get("name", ""), seed=doc.get("seed"))


def instance_checksum(inst):
    """Stable sha256 over the problem identity.

    Covers network, depot, demand table and container; excludes lambda,
    name and seed, which do not change what a feasible solution is.
    """
    doc = json.loads(write_instance(inst))
    for key in ("lambda", "name", "seed"):
        doc.pop(key, None)
    payload = json.dumps(doc, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(payload.encode()).hexdigest()
