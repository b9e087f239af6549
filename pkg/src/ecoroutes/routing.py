"""Greedy route construction for both container strategies.

Construction runs in two phases over a residual-demand ledger:

* phase 1 serves nodes that hold waste of every modality, with diversified
  out-and-back trips, until some modality runs out at each node;
* phase 2 clears the leftovers, either by extending diversified containers
  across several nodes until their blocks fill (fixed strategy) or by
  dispatching one container per target with a configuration matched to the
  target's residual (adapted strategy).

Every route starts and ends at the depot; distances are shortest-path
matrix entries between consecutive stops.
"""

import json
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .instance import DemandLedger, instance_checksum
from .network import all_pairs_shortest
from .packing import (ConfigError, ContainerConfig, adapted_config,
                      block_requirement_row, diversified_config)

STRATEGIES = ("fixed", "adapted")


@dataclass(frozen=True)
class Route:
    """One container trip: depot-anchored stop sequence, config, pickups."""

    stops: tuple              # node ids, stops[0] == stops[-1] == depot
    config: ContainerConfig
    pickups: tuple            # (node, modality_index, kg) in collection order
    distance: int

    def collected_per_modality(self, modalities):
        out = [0] * modalities
        for _, k, kg in self.pickups:
            out[k] += kg
        return out

    def used_modalities(self, modalities):
        """Modalities this route actually collects (defines the usage count)."""
        return [k for k, kg in enumerate(self.collected_per_modality(modalities)) if kg > 0]


@dataclass
class Solution:
    """A complete set of routes with evaluated objectives."""

    routes: list
    strategy: str
    z1: int                   # used (route, modality) pairs
    z2: int                   # total distance
    lam: Fraction
    z3: Fraction
    residual: np.ndarray = field(repr=False)

    def route_count(self):
        return len(self.routes)


def combined_objective(z1, z2, lam):
    lam = Fraction(lam)
    if not (0 <= lam <= 1):
        raise ValueError(f"lambda {lam} outside [0, 1]")
    return (1 - lam) * z1 + lam * z2


def evaluate_routes(routes, inst, lam=None):
    """(Z1, Z2, Z3) for a route list under the instance's modality count."""
    lam = inst.lam if lam is None else Fraction(lam)
    z1 = sum(len(r.used_modalities(inst.modalities)) for r in routes)
    z2 = sum(r.distance for r in routes)
    return z1, z2, combined_objective(z1, z2, lam)


def _route_distance(stops, dist):
    return sum(dist.distance(a, b) for a, b in zip(stops, stops[1:]))


def _by_depot_distance(inst, dist):
    """Demand nodes in increasing distance from the depot, ties by node id."""
    return sorted(inst.demand_nodes, key=lambda j: (dist.distance(inst.depot, j), j))


def phase1_diversified(inst, ledger, dist):
    """Serve every node that still holds all modalities with direct trips.

    Nodes are processed in increasing depot distance; a node keeps receiving
    diversified containers while every modality is present, each trip
    collecting up to the per-block capacity of each modality.
    """
    config = diversified_config(inst.container, inst.modalities)
    caps = config.capacity(inst.container)
    routes = []
    depot = inst.depot
    for j in _by_depot_distance(inst, dist):
        while ledger.has_all_modalities(j):
            residual = ledger.residual_at(j)
            pickups = []
            for k in range(inst.modalities):
                take = min(int(residual[k]), caps[k])
                if take > 0:
                    ledger.collect(j, k, take)
                    pickups.append((j, k, take))
            stops = (depot, j, depot)
            routes.append(Route(stops=stops, config=config, pickups=tuple(pickups),
                                distance=_route_distance(stops, dist)))
    return routes


def phase2_fixed(inst, ledger, dist):
    """Clear leftovers with diversified containers extended across nodes.

    Each container leaves the depot, repeatedly moves to the nearest node
    (ties: lower id) holding residual that fits some unfilled block, and
    returns once nothing more fits.  Containers keep being dispatched until
    the ledger is empty.
    """
    config = diversified_config(inst.container, inst.modalities)
    caps = config.capacity(inst.container)
    routes = []
    depot = inst.depot
    while not ledger.is_cleared():
        pos = depot
        stops = [depot]
        collected = [0] * inst.modalities
        pickups = []
        while True:
            candidates = []
            for j in ledger.positive_nodes():
                residual = ledger.residual_at(j)
                if any(residual[k] > 0 and collected[k] < caps[k]
                       for k in range(inst.modalities)):
                    candidates.append(j)
            if not candidates:
                break
            j = min(candidates, key=lambda x: (dist.distance(pos, x), x))
            residual = ledger.residual_at(j)
            for k in range(inst.modalities):
                take = min(int(residual[k]), caps[k] - collected[k])
                if take > 0:
                    ledger.collect(j, k, take)
                    collected[k] += take
                    pickups.append((j, k, take))
            stops.append(j)
            pos = j
        stops.append(depot)
        routes.append(Route(stops=tuple(stops), config=config, pickups=tuple(pickups),
                            distance=_route_distance(tuple(stops), dist)))
    return routes


def phase2_adapted(inst, ledger, dist):
    """Clear leftovers with per-target configured out-and-back trips.

    The nearest node with residual (ties: lower id) is served by a container
    configured from its block-requirement row; the node keeps its place
    until fully cleared.
    """
    routes = []
    depot = inst.depot
    while True:
        pending = ledger.positive_nodes()
        if not pending:
            break
        j = min(pending, key=lambda x: (dist.distance(depot, x), x))
        residual = ledger.residual_at(j)
        q_row = block_requirement_row(residual, inst.container)
        config = adapted_config(j, q_row, inst.container)
        caps = config.capacity(inst.container)
        pickups = []
        for k in range(inst.modalities):
            take = min(int(residual[k]), caps[k])
            if take > 0:
                ledger.collect(j, k, take)
                pickups.append((j, k, take))
        stops = (depot, j, depot)
        routes.append(Route(stops=stops, config=config, pickups=tuple(pickups),
                            distance=_route_distance(stops, dist)))
    return routes


def solve_heuristic(inst, strategy, dist=None):
    """Run the two-phase construction under the chosen strategy."""
    if strategy not in STRATEGIES:
        raise ValueError(f"unknown strategy {strategy!r}; expected one of {STRATEGIES}")
    if strategy == "fixed" and inst.container.block_count < inst.modalities:
        raise ConfigError(
            f"fixed strategy needs block_count >= modalities "
            f"({inst.container.block_count} < {inst.modalities})")
    if dist is None:
        dist = all_pairs_shortest(inst.network)
    ledger = DemandLedger(inst)
    if inst.container.block_count >= inst.modalities:
        routes = phase1_diversified(inst, ledger, dist)
    else:
        # No container can hold every modality, so phase 1 has nothing to do;
        # the adapted phase 2 handles any block_count.
        routes = []
    if strategy == "fixed":
        routes += phase2_fixed(inst, ledger, dist)
    else:
        routes += phase2_adapted(inst, ledger, dist)
    assert ledger.is_cleared(), "construction ended with residual demand"
    z1, z2, z3 = evaluate_routes(routes, inst)
    return Solution(routes=routes, strategy=strategy, z1=z1, z2=z2,
                    lam=inst.lam, z3=z3, residual=ledger.residual)


# -- solution documents -------------------------------------------------------

SOLUTION_FORMAT_VERSION = 1


def write_solution(sol, inst, certificate=None, expand_paths=None):
    """Serialize a Solution (JSON string); `expand_paths` takes a DistanceMatrix."""
    doc = {
        "format": SOLUTION_FORMAT_VERSION,
        "strategy": sol.strategy,
        "lambda": str(sol.lam),
        "objectives": {"z1": sol.z1, "z2": sol.z2, "z3": str(sol.z3)},
        "routes": [
            {
                "stops": list(r.stops),
                "config": list(r.config.blocks),
                "pickups": [[j, k, kg] for j, k, kg in r.pickups],
                "distance": r.distance,
            }
            for r in sol.routes
        ],
        "instance_checksum": instance_checksum(inst),
    }
    if certificate is not None:
        doc["certificate"] = certificate
    if expand_paths is not None:
        walks = []
        for r in sol.routes:
            walk = [r.stops[0]]
            for a, b in zip(r.stops, r.stops[1:]):
                walk.extend(expand_paths.path(a, b)[1:])
            walks.append(walk)
        doc["paths"] = walks
    return json.dumps(doc, sort_keys=True, indent=2) + "\n"


class SolutionFormatError(ValueError):
    pass


def read_solution(text, inst):
    """Parse a solution document back into a Solution (plus certificate dict)."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise SolutionFormatError(f"document is not valid JSON: {e}") from None
    try:
        routes = []
        for rd in doc["routes"]:
            routes.append(Route(
                stops=tuple(rd["stops"]),
                config=ContainerConfig(blocks=tuple(rd["config"])),
                pickups=tuple((j, k, kg) for j, k, kg in rd["pickups"]),
                distance=int(rd["distance"]),
            ))
        lam = Fraction(doc["lambda"])
        obj = doc["objectives"]
        sol = Solution(routes=routes, strategy=doc["strategy"], z1=int(obj["z1"]),
                       z2=int(obj["z2"]), lam=lam, z3=Fraction(obj["z3"]),
                       residual=np.zeros_like(inst.demands))
        checksum = doc.get("instance_checksum")
    except (KeyError, TypeError, ValueError) as e:
        raise SolutionFormatError(f"malformed solution document: {e}") from None
    if checksum is not None and checksum != instance_checksum(inst):
        raise SolutionFormatError("solution does not match this instance (checksum mismatch)")
    return sol, doc.get("certificate")
