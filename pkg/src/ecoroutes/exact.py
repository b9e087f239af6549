"""Exact solving and feasibility validation.

`validate` checks any Solution against the instance's constraints (reported
as C1..C12 violation codes) and recomputes the objectives.  `solve_exact`
runs a depth-first branch-and-bound over complete route actions: an action
is a pickup table for one container trip, its stop order chosen as the
cheapest tour over the picked nodes.  States (residual tables) are shared
through a dominance table; pruning uses an admissible bound combining a
block-count bound for the usage objective with a radial distance bound.

Certificates: `optimal` means the search space was exhausted under the
given bounds; `incumbent` means a budget stopped the search, and the
reported bound is then a true lower bound on the optimum.
"""

import itertools
import time
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .network import all_pairs_shortest
from .packing import ConfigError, ContainerConfig
from .routing import Route, Solution, combined_objective, solve_heuristic

_TT_CAP = 500_000          # dominance-table entries kept at most
_MATERIALIZE_CAP = 4096    # actions sorted by bound when a state has fewer


class ExactSolveError(RuntimeError):
    pass


@dataclass
class ModelBounds:
    """Search limits for the exact solver.

    `max_steps` is a deterministic budget (number of route actions applied);
    `time_budget` is a wall-clock safety net in seconds.  Unset fields mean
    unrestricted.
    """

    max_routes: int | None = None
    max_stops_per_route: int | None = None
    time_budget: float | None = None
    max_steps: int | None = None


@dataclass
class Verdict:
    feasible: bool
    violations: list  # (constraint id, human-readable detail)
    objectives: tuple  # recomputed (z1, z2, z3)


def objective(sol, lam):
    """Recompute (Z1, Z2, Z3) from the routes; lambda must lie in [0, 1]."""
    lam = Fraction(lam)
    if not (0 <= lam <= 1):
        raise ValueError(f"lambda {lam} outside [0, 1]")
    z1 = 0
    z2 = 0
    for r in sol.routes:
        per_k = {}
        for _, k, kg in r.pickups:
            per_k[k] = per_k.get(k, 0) + kg
        z1 += sum(1 for kg in per_k.values() if kg > 0)
        z2 += r.distance
    return z1, z2, combined_objective(z1, z2, lam)


def validate(inst, sol, dist=None):
    """Constraint check of a Solution's realized variables.

    Codes: C1 route collects something; C2 positive-demand nodes visited;
    C3 blocks backing every pickup (and n^k <= block budget); C4 total
    blocks within budget; C5 per-modality load within block capacity;
    C6 collected == demand per (node, modality); C7/C8 depot-anchored
    start/end; C9 walk consistency (pickups only at stops, depot only at
    the ends); C11 no node revisited inside one route; C12 variable
    domains and reported-value consistency.

    Empty blocks are allowed: a configured block that returns empty does
    not count toward the usage objective and violates nothing (the fixed
    strategy ships identical containers regardless of what fills).
    """
    if dist is None:
        dist = all_pairs_shortest(inst.network)
    node_set = set(inst.network.nodes)
    demand_set = set(inst.demand_nodes)
    K = inst.modalities
    c = inst.container.block_capacity
    L = inst.container.block_count
    depot = inst.depot
    violations = []

    for r_i, r in enumerate(sol.routes):
        for node in r.stops:
            if node not in node_set:
                raise ValueError(f"route {r_i}: unknown node id {node}")
        for j, k, kg in r.pickups:
            if j not in node_set:
                raise ValueError(f"route {r_i}: unknown node id {j} in pickups")
            if j not in demand_set:
                violations.append(("C12", f"route {r_i}: pickup at non-demand node {j}"))
            if not (0 <= k < K):
                violations.append(("C12", f"route {r_i}: modality index {k} out of range"))
            if kg <= 0 or kg != int(kg):
                violations.append(("C12", f"route {r_i}: pickup amount {kg} at node {j}"))

    collected = np.zeros((len(inst.demand_nodes), K), dtype=np.int64)
    recomputed_z1 = 0
    recomputed_z2 = 0
    for r_i, r in enumerate(sol.routes):
        if len(r.stops) < 2 or r.stops[0] != depot:
            violations.append(("C7", f"route {r_i} does not start at depot {depot}"))
        if len(r.stops) < 2 or r.stops[-1] != depot:
            violations.append(("C8", f"route {r_i} does not end at depot {depot}"))
        inner = list(r.stops[1:-1])
        if depot in inner:
            violations.append(("C9", f"route {r_i} passes through the depot mid-route"))
        if len(set(inner)) != len(inner):
            violations.append(("C11", f"route {r_i} revisits a node"))

        per_k = [0] * K
        stop_set = set(inner)
        for j, k, kg in r.pickups:
            if 0 <= k < K:
                per_k[k] += kg
            if j not in stop_set:
                violations.append(("C9", f"route {r_i} picks up at {j} without stopping there"))
            if j in demand_set and 0 <= k < K:
                collected[inst.row_of(j), k] += kg

        if sum(per_k) == 0:
            violations.append(("C1", f"route {r_i} collects nothing"))
        blocks = r.config.blocks
        if len(blocks) != K:
            violations.append(("C12", f"route {r_i}: config has {len(blocks)} entries, expected {K}"))
            blocks = tuple(blocks) + (0,) * max(0, K - len(blocks))
        for k in range(K):
            if per_k[k] > 0 and blocks[k] < 1:
                violations.append(
                    ("C3", f"route {r_i}: collects modality {k} with no block assigned"))
            if blocks[k] > L:
                violations.append(
                    ("C3", f"route {r_i}: {blocks[k]} blocks for modality {k} exceeds {L}"))
            if per_k[k] > c * blocks[k]:
                violations.append(
                    ("C5", f"route {r_i}: {per_k[k]} kg of modality {k} exceeds "
                           f"capacity {c * blocks[k]}"))
        if sum(blocks) > L:
            violations.append(("C4", f"route {r_i}: {sum(blocks)} blocks exceed budget {L}"))

        recomputed_z1 += sum(1 for kg in per_k if kg > 0)
        true_dist = sum(dist.distance(a, b) for a, b in zip(r.stops, r.stops[1:]))
        if true_dist != r.distance:
            violations.append(
                ("C12", f"route {r_i}: reported distance {r.distance}, recomputed {true_dist}"))
        recomputed_z2 += true_dist

    visited = set()
    for r in sol.routes:
        visited.update(r.stops[1:-1])
    for r_row, j in enumerate(inst.demand_nodes):
        if inst.demands[r_row].any() and j not in visited:
            violations.append(("C2", f"demand node {j} is never visited"))
        for k in range(K):
            want = int(inst.demands[r_row, k])
            got = int(collected[r_row, k])
            if got != want:
                violations.append(
                    ("C6", f"node {j}, modality {k}: collected {got} kg of {want} kg"))

    z3 = combined_objective(recomputed_z1, recomputed_z2, sol.lam)
    if (sol.z1, sol.z2) != (recomputed_z1, recomputed_z2) or sol.z3 != z3:
        violations.append(
            ("C12", f"reported objectives (Z1={sol.z1}, Z2={sol.z2}, Z3={sol.z3}) != "
                    f"recomputed (Z1={recomputed_z1}, Z2={recomputed_z2}, Z3={z3})"))

    return Verdict(feasible=not violations, violations=violations,
                   objectives=(recomputed_z1, recomputed_z2, z3))


@dataclass
class ExactResult:
    solution: Solution
    status: str        # "optimal" | "incumbent"
    bound: Fraction    # lower bound on the optimum (== value when optimal)
    steps: int
    runtime: float

    @property
    def optimal(self):
        return self.status == "optimal"

    def certificate(self):
        gap = self.gap_percent()
        doc = {"status": self.status, "bound": str(self.bound), "steps": self.steps}
        if gap is not None:
            doc["gap_percent"] = round(gap, 2)
        return doc

    def gap_percent(self):
        if self.optimal or self.solution is None or self.solution.z3 == 0:
            return None
        return float(100 * (self.solution.z3 - self.bound) / self.solution.z3)


class _RouteSearch:
    """Depth-first branch-and-bound over complete route actions."""

    def __init__(self, inst, bounds, dist):
        self.inst = inst
        self.bounds = bounds
        self.dist = dist
        self.K = inst.modalities
        self.c = inst.container.block_capacity
        self.L = inst.container.block_count
        self.C = self.c * self.L
        self.nodes = list(inst.demand_nodes)
        self.n = len(self.nodes)
        self.depot = inst.depot
        self.w_route = 1 - inst.lam   # weight of the usage objective
        self.w_dist = inst.lam
        self.rt = [dist.distance(self.depot, j) + dist.distance(j, self.depot)
                   for j in self.nodes]
        self.max_stops = bounds.max_stops_per_route or self.C
        self._tour_cache = {}
        total_blocks = int(sum(-(-int(x) // self.c) for x in inst.demands.flat))
        min_routes = -(-total_blocks // self.L)
        self.max_routes = bounds.max_routes if bounds.max_routes is not None else total_blocks
        if self.max_routes < min_routes:
            raise ExactSolveError(
                f"max_routes={self.max_routes} below the {min_routes} routes "
                f"provably required")

    # -- scoring -------------------------------------------------------------

    def tour(self, rows):
        """Cheapest closed tour through the given demand rows; cached.

        Returns (distance, stop order).  Ties break deterministically; the
        small sizes use brute force, larger ones a subset dynamic program.
        """
        key = rows
        hit = self._tour_cache.get(key)
        if hit is not None:
            return hit
        best = self._tour_brute(rows) if len(rows) <= 7 else self._tour_subset_dp(rows)
        self._tour_cache[key] = best
        return best

    def _tour_brute(self, rows):
        d = self.dist
        depot = self.depot
        best = None
        for perm in itertools.permutations(rows):
            stops = [depot] + [self.nodes[r] for r in perm] + [depot]
            length = sum(d.distance(a, b) for a, b in zip(stops, stops[1:]))
            cand = (length, perm)
            if best is None or cand < best:
                best = cand
        return best

    def _tour_subset_dp(self, rows):
        d = self.dist
        depot = self.depot
        m = len(rows)
        leg = [[d.distance(self.nodes[a], self.nodes[b]) for b in rows] for a in rows]
        from_depot = [d.distance(depot, self.nodes[r]) for r in rows]
        to_depot = [d.distance(self.nodes[r], depot) for r in rows]
        # dp[mask][last] = (cost, predecessor); strict improvement keeps one
        # deterministic argmin per cell.
        dp = [[None] * m for _ in range(1 << m)]
        for i in range(m):
            dp[1 << i][i] = (from_depot[i], -1)
        for mask in range(1 << m):
            for last in range(m):
                cell = dp[mask][last]
                if cell is None:
                    continue
                for nxt in range(m):
                    if mask & (1 << nxt):
                        continue
                    cand = cell[0] + leg[last][nxt]
                    tgt = dp[mask | (1 << nxt)][nxt]
                    if tgt is None or cand < tgt[0]:
                        dp[mask | (1 << nxt)][nxt] = (cand, last)
        full = (1 << m) - 1
        best_last, best_cost = None, None
        for last in range(m):
            cell = dp[full][last]
            if cell is None:
                continue
            total = cell[0] + to_depot[last]
            if best_cost is None or total < best_cost:
                best_cost, best_last = total, last
        order = []
        mask, last = full, best_last
        while last != -1:
            order.append(last)
            mask, last = mask ^ (1 << last), dp[mask][last][1]
        order.reverse()
        return best_cost, tuple(rows[i] for i in order)

    def lower_bound(self, state):
        """Admissible bound on the remaining cost from a residual state."""
        K, c, L, C = self.K, self.c, self.L, self.C
        w_per_k = [0] * K
        radial_num = 0
        max_rt = 0
        for r in range(self.n):
            base = r * K
            kg_j = 0
            for k in range(K):
                kg = state[base + k]
                w_per_k[k] += kg
                kg_j += kg
            if kg_j:
                radial_num += kg_j * self.rt[r]
                if self.rt[r] > max_rt:
                    max_rt = self.rt[r]
        if radial_num == 0:
            return Fraction(0)
        usage_lb = max(
            sum(-(-wk // C) for wk in w_per_k),
            -(-sum(-(-wk // c) for wk in w_per_k) // L),
        )
        dist_lb = max(Fraction(radial_num, C), Fraction(max_rt))
        return self.w_route * usage_lb + self.w_dist * dist_lb

    # -- actions ---------------------------------------------------------------

    def iter_actions(self, state):
        """All feasible single-route pickup tables from `state`, lazily.

        A cell order fixed by (row, modality) and amounts tried largest
        first make the stream deterministic; block budget and stop cap are
        pruned during construction.
        """
        cells = [(r, k) for r in range(self.n) for k in range(self.K)
                 if state[r * self.K + k] > 0]
        if not cells:
            return
        K, c, L = self.K, self.c, self.L
        totals = [0] * K
        picks = []
        support = set()

        def blocks_used():
            return sum(-(-t // c) for t in totals)

        def rec(i):
            if i == len(cells):
                if picks:
                    yield self._finish_action(tuple(picks), tuple(totals))
                return
            r, k = cells[i]
            avail = state[r * K + k]
            spare_blocks = L - (blocks_used() - (-(-totals[k] // c)))
            cap = c * spare_blocks - totals[k]
            hi = min(avail, cap)
            if r not in support and len(support) >= self.max_stops:
                hi = 0
            for amount in range(hi, -1, -1):
                if amount:
                    totals[k] += amount
                    picks.append((r, k, amount))
                    added = r not in support
                    if added:
                        support.add(r)
                    yield from rec(i + 1)
                    if added:
                        support.remove(r)
                    picks.pop()
                    totals[k] -= amount
                else:
                    yield from rec(i + 1)

        yield from rec(0)

    def _finish_action(self, picks, totals):
        rows = tuple(sorted({r for r, _, _ in picks}))
        dist, order = self.tour(rows)
        z1add = sum(1 for t in totals if t > 0)
        cost = self.w_route * z1add + self.w_dist * dist
        return picks, totals, order, dist, z1add, cost

    def count_actions_under(self, state, cap):
        """Rough upper bound on action count, stopping early beyond `cap`."""
        est = 1
        for r in range(self.n):
            for k in range(self.K):
                est *= min(state[r * self.K + k], self.C) + 1
                if est > cap:
                    return est
        return est

    def apply(self, state, picks):
        child = list(state)
        for r, k, amount in picks:
            child[r * self.K + k] -= amount
        return tuple(child)

    def action_to_route(self, action):
        picks, totals, order, dist_len, _, _ = action
        stops = (self.depot,) + tuple(self.nodes[r] for r in order) + (self.depot,)
        config = ContainerConfig(blocks=tuple(-(-t // self.c) for t in totals))
        by_stop = {r: i for i, r in enumerate(order)}
        pickups = tuple(sorted(((self.nodes[r], k, kg) for r, k, kg in picks),
                               key=lambda p: (by_stop[self.inst.row_of(p[0])], p[1])))
        return Route(stops=stops, config=config, pickups=pickups, distance=dist_len)


def _encode_routes(routes):
    return tuple(sorted((r.stops, r.config.blocks, r.pickups) for r in routes))


def solve_exact(inst, bounds=None, dist=None, warm_start=True):
    """Branch-and-bound search for a minimum-Z3 solution.

    Heuristic solutions (when `warm_start`) seed the incumbent, so the
    result is never worse than either greedy strategy.  Returns an
    ExactResult whose status tells whether the search ran to exhaustion.
    """
    bounds = bounds or ModelBounds()
    if dist is None:
        dist = all_pairs_shortest(inst.network)
    t0 = time.perf_counter()
    search = _RouteSearch(inst, bounds, dist)

    incumbent_value = None
    incumbent_routes = None
    incumbent_encoding = None
    if warm_start:
        for strategy in ("adapted", "fixed"):
            try:
                sol = solve_heuristic(inst, strategy, dist=dist)
            except ConfigError:
                continue
            enc = _encode_routes(sol.routes)
            if (incumbent_value is None or sol.z3 < incumbent_value
                    or (sol.z3 == incumbent_value and enc < incumbent_encoding)):
                incumbent_value = sol.z3
                incumbent_routes = list(sol.routes)
                incumbent_encoding = enc

    root = tuple(int(x) for x in inst.demands.flat)
    tt = {root: Fraction(0)}
    steps = 0
    aborted = False
    frontier_bound = None   # min over abandoned subtrees of g + LB(state)

    # Stack frames: [state, g, action iterator, route built to reach this frame].
    stack = [[root, Fraction(0), None, None]]
    path = []

    def out_of_budget():
        if bounds.max_steps is not None and steps >= bounds.max_steps:
            return True
        if bounds.time_budget is not None and steps % 256 == 0:
            return time.perf_counter() - t0 > bounds.time_budget
        return False

    while stack:
        frame = stack[-1]
        state, g = frame[0], frame[1]

        if frame[2] is None:
            if not any(state):
                enc = _encode_routes(path)
                if (incumbent_value is None or g < incumbent_value
                        or (g == incumbent_value and enc < incumbent_encoding)):
                    incumbent_value = g
                    incumbent_routes = list(path)
                    incumbent_encoding = enc
                stack.pop()
                if path:
                    path.pop()
                continue
            if len(path) >= search.max_routes:
                stack.pop()
                if path:
                    path.pop()
                continue
            if aborted:
                b = g + search.lower_bound(state)
                frontier_bound = b if frontier_bound is None else min(frontier_bound, b)
                stack.pop()
                if path:
                    path.pop()
                continue
            if search.count_actions_under(state, _MATERIALIZE_CAP) <= _MATERIALIZE_CAP:
                actions = []
                for action in search.iter_actions(state):
                    child = search.apply(state, action[0])
                    score = g + action[5] + search.lower_bound(child)
                    actions.append((score, action[0], action))
                actions.sort(key=lambda a: (a[0], a[1]))
                frame[2] = iter([a[2] for a in actions])
            else:
                frame[2] = search.iter_actions(state)

        if aborted:
            b = g + search.lower_bound(state)
            frontier_bound = b if frontier_bound is None else min(frontier_bound, b)
            stack.pop()
            if path:
                path.pop()
            continue

        action = next(frame[2], None)
        if action is None:
            stack.pop()
            if path:
                path.pop()
            continue

        steps += 1
        if out_of_budget():
            aborted = True

        g_child = g + action[5]
        if incumbent_value is not None and g_child >= incumbent_value:
            continue
        child = search.apply(state, action[0])
        lb = search.lower_bound(child)
        if incumbent_value is not None and g_child + lb >= incumbent_value:
            continue
        seen = tt.get(child)
        if seen is not None and seen <= g_child:
            continue
        if len(tt) < _TT_CAP or child in tt:
            tt[child] = g_child
        path.append(search.action_to_route(action))
        stack.append([child, g_child, None, None])

    runtime = time.perf_counter() - t0
    if incumbent_value is None:
        raise ExactSolveError("search budget exhausted before any solution was found")

    status = "incumbent" if aborted else "optimal"
    bound = incumbent_value
    if aborted and frontier_bound is not None:
        bound = min(incumbent_value, frontier_bound)

    routes = list(incumbent_routes)
    z1 = sum(len(r.used_modalities(inst.modalities)) for r in routes)
    z2 = sum(r.distance for r in routes)
    z3 = combined_objective(z1, z2, inst.lam)
    assert z3 == incumbent_value
    solution = Solution(routes=routes, strategy="exact", z1=z1, z2=z2,
                        lam=inst.lam, z3=z3,
                        residual=np.zeros_like(inst.demands))
    return ExactResult(solution=solution, status=status, bound=bound,
                       steps=steps, runtime=runtime)
