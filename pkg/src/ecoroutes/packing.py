"""Container-configuration logic.

A container holds `block_count` blocks of `block_capacity` kg each.  A
configuration assigns blocks to waste modalities.  Two strategies exist:

* diversified (fixed): one block per modality, surplus blocks round-robin;
* adapted: blocks matched to one node's residual demand, in three cases
  keyed on the per-modality block requirement q = ceil(residual / capacity).
"""

import math
from dataclasses import dataclass

import numpy as np


class ConfigError(ValueError):
    """No valid container configuration exists for the request."""


@dataclass(frozen=True)
class ContainerConfig:
    """Blocks per modality for one container/route."""

    blocks: tuple  # n^k, index 0 = modality 1

    def __post_init__(self):
        if not self.blocks or all(n == 0 for n in self.blocks):
            raise ConfigError("configuration must assign at least one block")
        if any(n < 0 for n in self.blocks):
            raise ConfigError("negative block count")

    @property
    def total_blocks(self):
        return sum(self.blocks)

    def capacity(self, spec):
        """Per-modality kg capacities under `spec`."""
        return [n * spec.block_capacity for n in self.blocks]


def block_requirements(ledger, spec):
    """q_j^k = ceil(residual / block_capacity), exact integer arithmetic."""
    c = spec.block_capacity
    return -(-ledger.residual // c)  # ceil division on the int64 array


def block_requirement_row(residual_row, spec):
    """Ceiling requirements for one node's residual vector."""
    c = spec.block_capacity
    return [math.ceil(int(x) / c) for x in residual_row]


def min_visits(q_jk, spec):
    """Minimum container visits to retire q_jk blocks: ceil(q / block_count)."""
    if q_jk < 0:
        raise ValueError("block requirement must be non-negative")
    return -(-q_jk // spec.block_count)


def diversified_config(spec, modalities):
    """One block per modality; surplus blocks round-robin from modality 1.

    The fixed strategy presumes at least one block per modality, so
    block_count < modalities is rejected.
    """
    L, K = spec.block_count, modalities
    if L < K:
        raise ConfigError(
            f"diversified configuration needs block_count >= modalities "
            f"({L} < {K})")
    blocks = [1] * K
    for i in range(L - K):
        blocks[i % K] += 1
    return ContainerConfig(blocks=tuple(blocks))


def adapted_config(target, req, spec):
    """Configuration matched to one node's block-requirement row.

    Three cases, checked in order on the row q for node `target`:

    1. some q^k >= block_count: all blocks go to that modality (lowest
       modality index wins; the node will need further visits);
    2. sum(q) >= block_count: exactly block_count blocks, granted greedily
       to modalities in decreasing q (ties: lower index), capped at q^k;
    3. sum(q) < block_count: copy the row, n^k = q^k.
    """
    q = [int(x) for x in req]
    L = spec.block_count
    if all(x == 0 for x in q):
        raise ConfigError(f"node {target} has no residual demand")
    if any(x < 0 for x in q):
        raise ConfigError("negative block requirement")

    for k, qk in enumerate(q):
        if qk >= L:
            blocks = [0] * len(q)
            blocks[k] = L
            return ContainerConfig(blocks=tuple(blocks))

    if sum(q) >= L:
        blocks = [0] * len(q)
        remaining = L
        for k in sorted(range(len(q)), key=lambda k: (-q[k], k)):
            grant = min(q[k], remaining)
            blocks[k] = grant
            remaining -= grant
            if remaining == 0:
                break
        return ContainerConfig(blocks=tuple(blocks))

    return ContainerConfig(blocks=tuple(q))
