"""Per-round test planning and the round driver.

Two planners, both returning a TestMatrix no taller than the per-round
capacity: random individual testing, and the hybrid pooled policy that packs
as many code blocks as fit, tops the round up with random singleton tests,
and falls back to pure individual testing in the regimes where pooling
stops paying off.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .codec import RoundOutcome, TestMatrix, assemble_matrix, code_width, decode_round, \
    evaluate_tests
from .sir import POLICY_INDIVIDUAL, POLICY_SAFFRON_HYBRID, PopulationState, Status, isolate
from .theory import saffron_group_size


@dataclass(frozen=True)
class PolicyContext:
    """What the planner is allowed to see at one time step.

    The tester knows whom it has isolated (``isolated``) and the theory
    estimate of the post-spread infected count (``expected_infected``); it
    never observes true infection statuses directly.
    """

    t: int
    n: int
    capacity: int
    isolated: int = 0
    expected_infected: float = 0.0


def plan_individual(ctx: PolicyContext, rng: np.random.Generator) -> TestMatrix:
    """Singleton tests on ``capacity`` distinct individuals drawn uniformly from all n.

    Isolated individuals may be drawn; those tests are knowingly wasted,
    which keeps every circulating infection's per-round detection
    probability at exactly capacity/n.
    """
    tested = rng.choice(ctx.n, size=ctx.capacity, replace=False)
    return assemble_matrix(ctx.n, [], tested)


def plan_saffron_hybrid(ctx: PolicyContext, non_isolated,
                        rng: np.random.Generator) -> TestMatrix:
    """Pooled groups over the non-isolated individuals, leftover rows as singletons.

    Groups of size eta = floor((n - isolated) / expected_infected), clamped
    to [2, pool size], are drawn disjointly from the non-isolated
    individuals; floor(capacity / (2*ceil(log2(eta)))) groups fit, capped at
    what the pool can supply. Remaining capacity goes to singleton tests
    drawn from the whole population. Falls back to plan_individual when the
    switch rule says pooling is not worthwhile this round.
    """
    pool = np.asarray(non_isolated, dtype=np.int64)
    eta = saffron_group_size(pool.size, ctx.expected_infected, ctx.capacity)
    if eta is None:
        return plan_individual(ctx, rng)
    rows_per_group = 2 * code_width(eta)
    n_groups = min(ctx.capacity // rows_per_group, pool.size // eta)
    if n_groups == 0:
        return plan_individual(ctx, rng)
    drawn = rng.choice(pool, size=n_groups * eta, replace=False)
    groups = [drawn[i * eta:(i + 1) * eta] for i in range(n_groups)]
    leftover = ctx.capacity - n_groups * rows_per_group
    singles = rng.choice(ctx.n, size=leftover, replace=False) if leftover else []
    return assemble_matrix(ctx.n, groups, singles)


def run_round(state: PopulationState, policy: str, capacity: int,
              rng: np.random.Generator,
              expected_infected: float | None = None) -> tuple[PopulationState, RoundOutcome]:
    """One testing phase: plan, test, decode, isolate.

    The state must already be past this step's spread phase. Identification
    uses only this round's results; identified individuals are isolated
    before the function returns.
    """
    ctx = PolicyContext(t=state.t, n=state.n, capacity=capacity, isolated=state.isolated,
                        expected_infected=0.0 if expected_infected is None else expected_infected)
    if policy == POLICY_INDIVIDUAL:
        matrix = plan_individual(ctx, rng)
    elif policy == POLICY_SAFFRON_HYBRID:
        non_isolated = np.flatnonzero(state.statuses != Status.ISOLATED)
        matrix = plan_saffron_hybrid(ctx, non_isolated, rng)
    else:
        raise ValueError(f"unknown policy {policy!r}")
    results = evaluate_tests(matrix, state)
    outcome = decode_round(matrix, results)
    isolate(state, outcome.identified)
    return state, outcome
